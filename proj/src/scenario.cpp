#include "dnp/scenario.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "dnp/errors.hpp"
#include "toml.hpp"

namespace dnp {

namespace {

namespace fs = std::filesystem;

int line_of(const toml::node& n) { return static_cast<int>(n.source().begin.line); }

[[noreturn]] void bad(const std::string& key, const toml::node& n, const std::string& what) {
  throw ParseError(key + ": " + what, key, line_of(n));
}

void check_keys(const toml::table& t, const std::string& sec, std::set<std::string> allowed) {
  for (const auto& [k, v] : t) {
    const std::string key(k.str());
    if (!allowed.count(key)) bad(sec + "." + key, v, "unknown key");
  }
}

const toml::table* sub(const toml::table& t, const std::string& name, const std::string& sec) {
  const toml::node* n = t.get(name);
  if (n == nullptr) return nullptr;
  if (!n->is_table()) bad(sec + name, *n, "expected a table");
  return n->as_table();
}

std::optional<double> opt_num(const toml::table& t, const std::string& key,
                              const std::string& sec) {
  const toml::node* n = t.get(key);
  if (n == nullptr) return std::nullopt;
  if (auto v = n->value<double>()) return *v;
  bad(sec + "." + key, *n, "expected a number");
}

double num(const toml::table& t, const std::string& key, double def, const std::string& sec) {
  return opt_num(t, key, sec).value_or(def);
}

double req_num(const toml::table& t, const std::string& key, const std::string& sec) {
  auto v = opt_num(t, key, sec);
  if (!v) throw ParseError(sec + "." + key + ": required", sec + "." + key, 0);
  return *v;
}

long integer(const toml::table& t, const std::string& key, long def, const std::string& sec) {
  const toml::node* n = t.get(key);
  if (n == nullptr) return def;
  if (auto v = n->value<int64_t>()) return static_cast<long>(*v);
  bad(sec + "." + key, *n, "expected an integer");
}

bool boolean(const toml::table& t, const std::string& key, bool def, const std::string& sec) {
  const toml::node* n = t.get(key);
  if (n == nullptr) return def;
  if (auto v = n->value<bool>()) return *v;
  bad(sec + "." + key, *n, "expected true or false");
}

std::string str(const toml::table& t, const std::string& key, const std::string& def,
                const std::string& sec) {
  const toml::node* n = t.get(key);
  if (n == nullptr) return def;
  if (auto v = n->value<std::string>()) return *v;
  bad(sec + "." + key, *n, "expected a string");
}

std::vector<double> numbers(const toml::node& n, const std::string& key) {
  std::vector<double> out;
  if (auto v = n.value<double>()) {
    out.push_back(*v);
    return out;
  }
  const toml::array* a = n.as_array();
  if (a == nullptr) bad(key, n, "expected a number or an array of numbers");
  for (const auto& e : *a) {
    auto v = e.value<double>();
    if (!v) bad(key, e, "expected numbers");
    out.push_back(*v);
  }
  return out;
}

std::vector<double> opt_numbers(const toml::table& t, const std::string& key,
                                const std::string& sec) {
  const toml::node* n = t.get(key);
  if (n == nullptr) return {};
  return numbers(*n, sec + "." + key);
}

std::vector<std::vector<double>> rows(const toml::table& t, const std::string& key,
                                      const std::string& sec) {
  std::vector<std::vector<double>> out;
  const toml::node* n = t.get(key);
  if (n == nullptr) return out;
  const toml::array* a = n->as_array();
  if (a == nullptr) bad(sec + "." + key, *n, "expected an array of arrays");
  for (const auto& e : *a) out.push_back(numbers(e, sec + "." + key));
  return out;
}

struct Ctx {
  std::string base;
  std::string canonical;

  std::string resolve(const std::string& p) const {
    fs::path path(p);
    if (path.is_relative()) path = fs::path(base) / path;
    return path.string();
  }
  std::string slurp(const std::string& p) {
    const std::string full = resolve(p);
    std::ifstream in(full, std::ios::binary);
    if (!in) throw DomainError("cannot read " + full);
    std::stringstream ss;
    ss << in.rdbuf();
    canonical += "\n--- " + p + "\n" + ss.str();
    return full;
  }
};

Grid parse_grid(const toml::table& root) {
  const toml::table* t = sub(root, "grid", "");
  if (t == nullptr) throw ParseError("missing [grid] section", "grid", 0);
  check_keys(*t, "grid", {"dim", "length", "n", "bc"});
  const int dim = static_cast<int>(integer(*t, "dim", 1, "grid"));
  std::vector<double> len = opt_numbers(*t, "length", "grid");
  std::vector<double> n = opt_numbers(*t, "n", "grid");
  if (len.empty()) len.assign(static_cast<std::size_t>(dim), 1.0);
  if (n.empty()) n.assign(static_cast<std::size_t>(dim), 101.0);
  if (len.size() == 1 && dim == 2) len.push_back(len[0]);
  if (n.size() == 1 && dim == 2) n.push_back(n[0]);
  if (static_cast<int>(len.size()) != dim || static_cast<int>(n.size()) != dim) {
    throw ParseError("grid.length and grid.n need one entry per axis", "grid", line_of(*t));
  }
  const std::string bc = str(*t, "bc", "dirichlet", "grid");
  Boundary b;
  if (bc == "dirichlet") {
    b = Boundary::Dirichlet0;
  } else if (bc == "neumann") {
    b = Boundary::Neumann0;
  } else {
    bad("grid.bc", *t->get("bc"), "expected \"dirichlet\" or \"neumann\"");
  }
  return Grid(dim, {len[0], dim == 2 ? len[1] : 1.0},
              {static_cast<int>(n[0]), dim == 2 ? static_cast<int>(n[1]) : 1}, b);
}

EllipticOperator parse_operator(const toml::table& root, const Grid& g, Ctx& ctx,
                                bool& q_alternative_needed) {
  const toml::table* t = sub(root, "operator", "");
  q_alternative_needed = false;
  if (t == nullptr) return EllipticOperator::linear(g);
  check_keys(*t, "operator", {"kind", "d", "d_file", "a", "p"});
  const std::string kind = str(*t, "kind", "linear", "operator");
  if (kind == "linear") {
    const double a = num(*t, "a", 0.0, "operator");
    if (t->get("d_file")) {
      const std::string path = ctx.slurp(str(*t, "d_file", "", "operator"));
      return EllipticOperator::linear_field(g, load_tensor_csv(path, g), a);
    }
    kernels::Sym2 d;
    if (const toml::node* n = t->get("d")) {
      const auto v = numbers(*n, "operator.d");
      if (v.size() == 1) {
        d = {v[0], 0.0, v[0]};
      } else if (v.size() == 3) {
        d = {v[0], v[1], v[2]};
      } else {
        bad("operator.d", *n, "expected a scalar or [dxx, dxy, dyy]");
      }
    }
    return EllipticOperator::linear(g, d, a);
  }
  if (kind == "p_laplace") {
    const double p = num(*t, "p", 2.0, "operator");
    q_alternative_needed = !(p > 1.2);
    return EllipticOperator::p_laplace(g, p);
  }
  bad("operator.kind", *t->get("kind"), "expected \"linear\" or \"p_laplace\"");
}

std::optional<GrowthBounds> parse_growth(const toml::table& t, const std::string& sec) {
  const toml::table* gt = sub(t, "growth", sec + ".");
  if (gt == nullptr) return std::nullopt;
  const std::string s = sec + ".growth";
  check_keys(*gt, s, {"sigma_prime", "kappa_inf", "ell_inf", "p_inf", "q_inf"});
  GrowthBounds gb;
  gb.sigma_prime = num(*gt, "sigma_prime", 0.0, s);
  gb.kappa_inf = num(*gt, "kappa_inf", 0.0, s);
  gb.ell_inf = num(*gt, "ell_inf", 0.0, s);
  gb.p_inf = num(*gt, "p_inf", 1.0, s);
  gb.q_inf = num(*gt, "q_inf", 1.0, s);
  if (!(gb.p_inf >= 1.0) || gb.p_inf > gb.q_inf) {
    throw ValidationError(s + ": growth exponents need 1 <= p_inf <= q_inf (got p_inf = " +
                              std::to_string(gb.p_inf) + ", q_inf = " +
                              std::to_string(gb.q_inf) + ")",
                          "LS");
  }
  return gb;
}

MonotoneGraph parse_graph(const toml::table& t, const std::string& sec, const std::string& def) {
  const std::string b = str(t, "builtin", def, sec);
  std::optional<MonotoneGraph> g;
  if (b == "identity") {
    g = MonotoneGraph::identity();
  } else if (b == "power") {
    g = MonotoneGraph::power(num(t, "k", 3.0, sec), num(t, "coeff", 1.0, sec),
                             num(t, "linear", 0.0, sec));
  } else if (b == "indicator_halfline") {
    g = MonotoneGraph::indicator_halfline(static_cast<int>(integer(t, "side", 1, sec)),
                                          num(t, "slope", 0.0, sec));
  } else if (b == "singular_power") {
    g = MonotoneGraph::singular_power(num(t, "rbar", 1.0, sec), num(t, "kappa", 2.0, sec),
                                      num(t, "c", 1.0, sec));
  } else if (b == "logarithmic") {
    g = MonotoneGraph::logarithmic();
  } else if (b == "upper_obstacle") {
    g = MonotoneGraph::upper_obstacle(num(t, "rbar", 1.0, sec));
  } else if (b == "piecewise") {
    const auto dom = opt_numbers(t, "domain", sec);
    Domain d;
    if (!dom.empty()) {
      if (dom.size() != 2) bad(sec + ".domain", *t.get("domain"), "expected [lo, hi]");
      std::vector<bool> closed{false, false};
      if (const toml::node* cn = t.get("closed")) {
        const toml::array* a = cn->as_array();
        if (a == nullptr || a->size() != 2) bad(sec + ".closed", *cn, "expected [bool, bool]");
        closed = {(*a)[0].value_or(false), (*a)[1].value_or(false)};
      }
      auto end = [](double v, bool c) {
        if (std::isinf(v)) return Endpoint{v, EndKind::Infinite};
        return Endpoint{v, c ? EndKind::Closed : EndKind::Open};
      };
      d.lo = end(dom[0], closed[0]);
      d.hi = end(dom[1], closed[1]);
    }
    std::vector<MonotoneGraph::LinearPiece> pieces;
    for (const auto& r : rows(t, "pieces", sec)) {
      if (r.size() != 4) bad(sec + ".pieces", *t.get("pieces"), "rows are [from, to, slope, intercept]");
      pieces.push_back({r[0], r[1], r[2], r[3]});
    }
    std::vector<Jump> jumps;
    for (const auto& r : rows(t, "jumps", sec)) {
      if (r.size() != 3) bad(sec + ".jumps", *t.get("jumps"), "rows are [at, lo, hi]");
      jumps.push_back({r[0], {r[1], r[2]}});
    }
    SlopeFloor fl;
    fl.sigma = num(t, "sigma", 0.0, sec);
    const auto flat = opt_numbers(t, "flat", sec);
    if (flat.size() == 2) {
      fl.flat_lo = flat[0];
      fl.flat_hi = flat[1];
    }
    g = MonotoneGraph::piecewise(d, pieces, jumps, fl);
  } else {
    bad(sec + ".builtin", *t.get("builtin"), "unknown graph \"" + b + "\"");
  }
  if (auto gb = parse_growth(t, sec)) g->set_growth(*gb);
  return *g;
}

const std::set<std::string> kGraphKeys{"builtin", "k",      "coeff", "linear", "side",
                                       "slope",   "rbar",   "kappa", "c",      "domain",
                                       "closed",  "pieces", "jumps", "sigma",  "flat",
                                       "growth"};

MonotoneGraph parse_alpha(const toml::table& root) {
  const toml::table* t = sub(root, "alpha", "");
  if (t == nullptr) return MonotoneGraph::identity();
  check_keys(*t, "alpha", kGraphKeys);
  return parse_graph(*t, "alpha", "identity");
}

Potential parse_potential(const toml::table& root) {
  const toml::table* t = sub(root, "potential", "");
  if (t == nullptr) return Potential::quadratic();
  auto keys = std::set<std::string>{"builtin", "kappa",  "c",   "lambda", "c_w", "eta", "rbar",
                                    "window",  "margin", "q_growth", "graph", "singularity",
                                    "lower_singularity"};
  check_keys(*t, "potential", keys);
  const std::string sec = "potential";
  const std::string b = str(*t, "builtin", "quadratic", sec);
  if (auto l = opt_num(*t, "lambda", sec); l && *l < 0.0) {
    throw ValidationError("potential.lambda = " + std::to_string(*l) + " < 0: W must be " +
                              "lambda-convex with lambda >= 0",
                          "H1");
  }
  std::optional<Potential> p;
  if (b == "double_well") {
    p = Potential::double_well();
  } else if (b == "quadratic") {
    p = Potential::quadratic();
  } else if (b == "logarithmic") {
    p = Potential::logarithmic();
  } else if (b == "singular_power") {
    p = Potential::singular_power(num(*t, "kappa", 2.0, sec), num(*t, "c", 1.0, sec),
                                  num(*t, "lambda", 0.0, sec));
  } else if (b == "half_line_obstacle") {
    p = Potential::half_line_obstacle(num(*t, "rbar", 1.0, sec));
  } else if (b == "custom") {
    const toml::table* gt = sub(*t, "graph", "potential.");
    if (gt == nullptr) throw ParseError("potential.graph required for custom", "potential.graph", line_of(*t));
    check_keys(*gt, "potential.graph", kGraphKeys);
    p = Potential{"custom", parse_graph(*gt, "potential.graph", "identity")};
  } else {
    bad("potential.builtin", *t->get("builtin"), "unknown potential \"" + b + "\"");
  }
  if (auto v = opt_num(*t, "lambda", sec)) p->lambda = *v;
  if (auto v = opt_num(*t, "c_w", sec)) p->c_w = *v;
  if (auto v = opt_num(*t, "eta", sec)) p->eta = *v;
  if (const toml::node* w = t->get("window")) {
    const auto v = numbers(*w, "potential.window");
    if (v.size() != 2 || !(v[0] < v[1])) bad("potential.window", *w, "expected [lo, hi]");
    p->analytic_window = AnalyticWindow{v[0], v[1], num(*t, "margin", 0.0, sec)};
  }
  if (const toml::table* q = sub(*t, "q_growth", "potential.")) {
    p->q_growth = QGrowth{num(*q, "eta1", 0.0, "potential.q_growth"),
                          num(*q, "q", 0.0, "potential.q_growth")};
  }
  auto sing = [&](const std::string& key) -> std::optional<Singularity> {
    const toml::table* s = sub(*t, key, "potential.");
    if (s == nullptr) return std::nullopt;
    const std::string ss = "potential." + key;
    return Singularity{req_num(*s, "kappa", ss), req_num(*s, "c", ss), req_num(*s, "onset", ss)};
  };
  if (auto s = sing("singularity")) p->upper_singularity = s;
  if (auto s = sing("lower_singularity")) p->lower_singularity = s;
  return *p;
}

Profile parse_profile(const toml::table& t, const std::string& sec, Ctx& ctx) {
  Profile pr;
  const std::string fam = str(t, "family", "constant", sec);
  pr.value = num(t, "value", 0.0, sec);
  pr.amplitude = num(t, "amplitude", 1.0, sec);
  pr.offset = num(t, "offset", 0.0, sec);
  if (fam == "constant") {
    pr.family = Profile::Family::Constant;
  } else if (fam == "polynomial") {
    pr.family = Profile::Family::Polynomial;
    pr.coeffs = opt_numbers(t, "coeffs", sec);
    pr.coeffs_y = opt_numbers(t, "coeffs_y", sec);
  } else if (fam == "sine") {
    pr.family = Profile::Family::Sine;
    pr.mode = static_cast<int>(integer(t, "mode", 1, sec));
    pr.phase = num(t, "phase", 0.0, sec);
  } else if (fam == "gaussian") {
    pr.family = Profile::Family::Gaussian;
    const auto c = opt_numbers(t, "center", sec);
    if (!c.empty()) pr.center = {c[0], c.size() > 1 ? c[1] : 0.5};
    pr.width = num(t, "width", 0.1, sec);
  } else if (fam == "file") {
    pr.family = Profile::Family::File;
    pr.path = ctx.slurp(str(t, "path", "", sec));
  } else {
    bad(sec + ".family", *t.get("family"), "unknown profile family \"" + fam + "\"");
  }
  return pr;
}

const std::set<std::string> kProfileKeys{"family", "value", "amplitude", "offset", "coeffs",
                                         "coeffs_y", "mode", "phase", "center", "width", "path"};

Eigen::VectorXd read_nodal_csv(const std::string& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  std::vector<double> vals;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto pos = line.find_last_of(',');
    const std::string last = pos == std::string::npos ? line : line.substr(pos + 1);
    try {
      std::size_t used = 0;
      const double v = std::stod(last, &used);
      vals.push_back(v);
    } catch (const std::exception&) {
      if (vals.empty()) continue;  // header row
      throw ShapeError("non-numeric value in " + path);
    }
  }
  if (vals.size() != n) {
    throw ShapeError(path + " has " + std::to_string(vals.size()) + " rows, grid has " +
                     std::to_string(n) + " nodes");
  }
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(n));
}

Forcing read_forcing_table(const std::string& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  std::vector<double> times;
  std::vector<Eigen::VectorXd> vals;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double t;
    ss >> t;
    std::vector<double> row;
    double x;
    while (ss >> x) row.push_back(x);
    if (row.size() == 1) row.assign(n, row[0]);
    if (row.size() != n) throw ShapeError("forcing table rows need 1 or " + std::to_string(n) + " values");
    times.push_back(t);
    vals.push_back(Eigen::Map<Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(n)));
  }
  return Forcing::tabulated(std::move(times), std::move(vals));
}

}  // namespace

Eigen::VectorXd Profile::sample_on(const Grid& g) const {
  if (family == Family::File) return read_nodal_csv(path, g.size()).array() + offset;
  const double lx = g.length[0];
  const double ly = g.length[1];
  auto poly = [](const std::vector<double>& c, double x) {
    double s = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) s = s * x + c[k];
    return s;
  };
  return sample(g, [&](double x, double y) {
           double v = 0.0;
           switch (family) {
             case Family::Constant:
               v = value;
               break;
             case Family::Polynomial:
               v = amplitude * poly(coeffs, x);
               if (g.dim == 2 && !coeffs_y.empty()) v *= poly(coeffs_y, y);
               break;
             case Family::Sine:
               v = amplitude * std::sin(mode * M_PI * x / lx + phase);
               if (g.dim == 2) v *= std::sin(mode * M_PI * y / ly + phase);
               break;
             case Family::Gaussian: {
               const double dx = x - center[0];
               const double dy = g.dim == 2 ? y - center[1] : 0.0;
               v = amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
               break;
             }
             case Family::File:
               break;
           }
           return v + offset;
         })
      .values;
}

Scenario parse_config(const std::string& text, const std::string& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ParseError(std::string(e.description()), "", static_cast<int>(e.source().begin.line));
  }
  check_keys(root, "", {"grid", "operator", "potential", "alpha", "forcing", "scheme",
                        "diagnostics", "output", "initial", "continuation", "depend",
                        "stationary"});
  Ctx ctx{base_dir, text};
  const Grid grid = parse_grid(root);
  bool q_needed = false;
  EllipticOperator op = parse_operator(root, grid, ctx, q_needed);
  Potential pot = parse_potential(root);
  MonotoneGraph alpha = parse_alpha(root);
  if (q_needed && !pot.q_growth) {
    throw ValidationError("p <= 6/5 needs q-growth metadata on the potential", "H3");
  }
  Scenario s{Model{std::move(op), std::move(pot), std::move(alpha)}};
  const std::size_t n = grid.size();

  if (const toml::table* t = sub(root, "scheme", "")) {
    check_keys(*t, "scheme", {"tau", "T", "epsilon", "nu", "tol_newton", "max_newton"});
    s.scheme.tau = num(*t, "tau", s.scheme.tau, "scheme");
    s.scheme.T = num(*t, "T", s.scheme.T, "scheme");
    s.scheme.epsilon = num(*t, "epsilon", s.scheme.epsilon, "scheme");
    s.scheme.nu = num(*t, "nu", 0.0, "scheme");
    s.scheme.tol_newton = num(*t, "tol_newton", s.scheme.tol_newton, "scheme");
    s.scheme.max_newton = static_cast<int>(integer(*t, "max_newton", s.scheme.max_newton, "scheme"));
  }
  const long nsteps = s.scheme.steps();

  if (const toml::table* t = sub(root, "forcing", "")) {
    auto keys = kProfileKeys;
    keys.insert({"kind", "rate", "xi", "file", "power_tail"});
    check_keys(*t, "forcing", keys);
    const std::string kind = str(*t, "kind", "zero", "forcing");
    s.xi = num(*t, "xi", s.xi, "forcing");
    if (kind == "zero") {
      s.scheme.forcing = Forcing::zero();
    } else if (kind == "constant") {
      s.scheme.forcing = Forcing::constant(parse_profile(*t, "forcing", ctx).sample_on(grid));
    } else if (kind == "decaying") {
      s.scheme.forcing = Forcing::decaying(parse_profile(*t, "forcing", ctx).sample_on(grid),
                                           req_num(*t, "rate", "forcing"));
    } else if (kind == "tabulated") {
      if (t->get("file")) {
        s.scheme.forcing = read_forcing_table(ctx.slurp(str(*t, "file", "", "forcing")), n);
      } else {
        // f(t) = profile (1 + t)^-power_tail on t = i tau
        const double a = req_num(*t, "power_tail", "forcing");
        const Eigen::VectorXd prof = parse_profile(*t, "forcing", ctx).sample_on(grid);
        std::vector<double> ts;
        std::vector<Eigen::VectorXd> vs;
        for (long i = 0; i <= nsteps; ++i) {
          const double tt = static_cast<double>(i) * s.scheme.tau;
          ts.push_back(tt);
          vs.push_back(prof * std::pow(1.0 + tt, -a));
        }
        s.scheme.forcing = Forcing::tabulated(std::move(ts), std::move(vs));
      }
    } else {
      bad("forcing.kind", *t->get("kind"), "expected zero, constant, decaying or tabulated");
    }
  }

  if (const toml::table* t = sub(root, "initial", "")) {
    check_keys(*t, "initial", kProfileKeys);
    s.initial = parse_profile(*t, "initial", ctx);
  }
  s.u0 = s.initial.sample_on(grid);
  if (grid.bc == Boundary::Dirichlet0) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto k = static_cast<Eigen::Index>(j);
      if (grid.on_boundary(j) && s.u0[k] != 0.0) {
        if (std::abs(s.u0[k]) > 1e-12) ++s.projected_boundary_nodes;
        s.u0[k] = 0.0;
      }
    }
  }

  if (const toml::table* t = sub(root, "diagnostics", "")) {
    const std::string sec = "diagnostics";
    check_keys(*t, sec, {"energy_check", "uniform_bounds", "regime", "drift_tol", "separation",
                         "holder_nu", "omega_limit", "tol_rate", "tol_res", "decay",
                         "decay_mode", "lojasiewicz", "theta_grid", "chi"});
    auto& d = s.diagnostics;
    d.energy_check = boolean(*t, "energy_check", d.energy_check, sec);
    d.uniform_bounds = boolean(*t, "uniform_bounds", d.uniform_bounds, sec);
    if (t->get("regime")) {
      const std::string r = str(*t, "regime", "generic", sec);
      if (r == "s0_f1") {
        d.regime = Regime::S0_f1;
      } else if (r == "f2") {
        d.regime = Regime::F2;
      } else if (r == "generic") {
        d.regime = Regime::Generic;
      } else {
        bad(sec + ".regime", *t->get("regime"), "expected s0_f1, f2 or generic");
      }
    }
    d.drift_tol = num(*t, "drift_tol", d.drift_tol, sec);
    d.separation = boolean(*t, "separation", d.separation, sec);
    d.holder_nu = num(*t, "holder_nu", d.holder_nu, sec);
    d.omega_limit = boolean(*t, "omega_limit", d.omega_limit, sec);
    d.tol_rate = num(*t, "tol_rate", d.tol_rate, sec);
    d.tol_res = num(*t, "tol_res", d.tol_res, sec);
    d.decay = boolean(*t, "decay", d.decay, sec);
    const std::string mode = str(*t, "decay_mode", "exponential", sec);
    if (mode == "exponential") {
      d.decay_mode = DecayFit::Mode::Exponential;
    } else if (mode == "algebraic") {
      d.decay_mode = DecayFit::Mode::Algebraic;
    } else {
      bad(sec + ".decay_mode", *t->get("decay_mode"), "expected exponential or algebraic");
    }
    d.lojasiewicz = boolean(*t, "lojasiewicz", d.lojasiewicz, sec);
    if (t->get("theta_grid")) d.theta_grid = opt_numbers(*t, "theta_grid", sec);
    d.chi = num(*t, "chi", d.chi, sec);
  }

  if (const toml::table* t = sub(root, "output", "")) {
    check_keys(*t, "output", {"dir", "checkpoint_every"});
    s.output.dir = str(*t, "dir", s.output.dir, "output");
    s.output.checkpoint_every = integer(*t, "checkpoint_every", 0, "output");
  }

  if (const toml::table* t = sub(root, "continuation", "")) {
    check_keys(*t, "continuation", {"ladder", "halvings"});
    for (const auto& r : rows(*t, "ladder", "continuation")) {
      if (r.size() != 3) bad("continuation.ladder", *t->get("ladder"), "rows are [tau, epsilon, nu]");
      s.ladder.push_back({r[0], r[1], r[2]});
    }
    if (s.ladder.empty()) {
      const long h = integer(*t, "halvings", 3, "continuation");
      Rung r{s.scheme.tau, s.scheme.epsilon, s.scheme.nu_eff()};
      for (long k = 0; k <= h; ++k) {
        s.ladder.push_back(r);
        r = {r.tau / 2, r.epsilon / 2, r.nu / 2};
      }
    }
  }
  if (const toml::table* t = sub(root, "depend", "")) {
    auto keys = kProfileKeys;
    keys.insert("delta");
    check_keys(*t, "depend", keys);
    if (t->get("delta")) s.depend_deltas = opt_numbers(*t, "delta", "depend");
    s.depend_perturbation = parse_profile(*t, "depend", ctx);
  } else {
    s.depend_perturbation.family = Profile::Family::Sine;
  }
  if (const toml::table* t = sub(root, "stationary", "")) {
    check_keys(*t, "stationary", {"eps_ladder", "tol"});
    if (t->get("eps_ladder")) s.stationary_ladder = opt_numbers(*t, "eps_ladder", "stationary");
    s.stationary_tol = num(*t, "tol", s.stationary_tol, "stationary");
  }

  s.canonical = ctx.canonical;
  s.fingerprint = sha256_hex(s.canonical);
  return s;
}

Scenario load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const fs::path p(path);
  return parse_config(ss.str(), p.has_parent_path() ? p.parent_path().string() : ".");
}

bool ValidationReport::ok() const {
  return std::none_of(items.begin(), items.end(),
                      [](const CheckItem& c) { return c.hard && c.status == "fail"; });
}

const CheckItem* ValidationReport::find(const std::string& tag) const {
  for (const auto& c : items) {
    if (c.tag == tag) return &c;
  }
  return nullptr;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

ValidationReport validate_scenario(const Scenario& s) {
  ValidationReport rep;
  const Model& m = s.model;
  const Grid& g = m.op.grid();
  const MonotoneGraph& alpha = m.alpha;
  const Potential& pot = m.pot;
  const auto& dg = s.diagnostics;
  auto add = [&](std::string tag, std::string status, bool hard, std::string ev) {
    rep.items.push_back({std::move(tag), std::move(status), hard, std::move(ev)});
  };

  {
    const CoercivityReport c = validate_coercivity(pot, 1000);
    std::string ev = "lambda = " + fmt(pot.lambda) + ", growth margin " +
                     (c.growth_vacuous ? std::string("vacuous") : fmt(c.growth_margin)) +
                     ", c_W shift " + fmt(c.energy_shift);
    add("H1", pot.lambda >= 0.0 && c.pass ? "pass" : "fail", true, ev);
  }
  {
    const auto& fl = alpha.slope_floor();
    const double nu = s.scheme.nu_eff();
    bool ok = nu <= alpha.nu_bar() * (1.0 + 1e-12);
    std::string ev = "sigma = " + fmt(fl.sigma) + ", flat [" + fmt(fl.flat_lo) + ", " +
                     fmt(fl.flat_hi) + "], nu = " + fmt(nu) + " <= nu_bar = " +
                     fmt(alpha.nu_bar());
    if (ok) {
      const double hi0 = std::max(2.0 * fl.flat_hi, 0.0);
      const double lo0 = std::min(2.0 * fl.flat_lo, 0.0);
      const auto up = yosida_slope_certificate(alpha, nu, hi0 + 1e-9, hi0 + 10.0, 1001);
      const auto dn = yosida_slope_certificate(alpha, nu, lo0 - 10.0, lo0 - 1e-9, 1001);
      ok = up.pass && dn.pass;
      ev += ", min Yosida slope " + fmt(std::min(up.min_slope, dn.min_slope));
    }
    add("H2", ok ? "pass" : "fail", true, ev);
  }
  {
    const auto& k = m.op.growth();
    std::string ev = "kappa1 = " + fmt(k.kappa1) + ", kappa2 = " + fmt(k.kappa2) +
                     ", kappa3 = " + fmt(k.kappa3);
    bool ok = true;
    if (m.op.kind() == EllipticOperator::Kind::PLaplace) {
      ev += ", p = " + fmt(m.op.p());
      ok = m.op.p_above_six_fifths() || pot.q_growth.has_value();
    }
    add("H3", ok ? "pass" : "fail", true, ev);
  }
  {
    bool ok = s.u0.allFinite();
    const Eigen::VectorXd bu = apply_b(m.op, Field{s.u0, 0.0}).values;
    ok = ok && bu.allFinite();
    const Domain& d = pot.beta.domain();
    int outside = 0;
    for (Eigen::Index j = 0; j < s.u0.size(); ++j) {
      if (!d.in_domain(s.u0[j])) ++outside;
    }
    ok = ok && outside == 0;
    std::string ev = "Bu0 finite: " + std::string(bu.allFinite() ? "yes" : "no") +
                     ", nodes outside I: " + std::to_string(outside);
    if (s.projected_boundary_nodes > 0) {
      ev += ", zeroed " + std::to_string(s.projected_boundary_nodes) + " Dirichlet nodes";
    }
    add("H4", ok ? "pass" : "fail", true, ev);
  }
  if (dg.separation) {
    if (!pot.has_singularity()) {
      add("H5", "fail", true, pot.name + " declares no power-type singularity (kappa)");
    } else {
      const bool ok = validate_separation_compatibility(pot, dg.holder_nu, g.dim);
      double kappa = kInf;
      for (const auto& si : {pot.upper_singularity, pot.lower_singularity}) {
        if (si) kappa = std::min(kappa, si->kappa);
      }
      add("H5", ok ? "pass" : "fail", true,
          "2 kappa nu = " + fmt(2.0 * kappa * dg.holder_nu) + " vs d = " + std::to_string(g.dim));
    }
  } else {
    add("H5", "n/a", false, "separation monitor disabled");
  }
  {
    const bool linear = m.op.kind() == EllipticOperator::Kind::Linear;
    const bool needed = dg.lojasiewicz;
    std::string ev = linear ? "a = " + fmt(m.op.ellipticity()) : "p-Laplacian";
    add("H6", linear ? "pass" : (needed ? "fail" : "n/a"), needed, ev);
  }
  {
    if (pot.analytic_window) {
      const auto& w = *pot.analytic_window;
      const Eigen::VectorXd f0 = s.scheme.forcing.at(0.0, g.size());
      const double mm = std::max(w.margin, f0.size() ? f0.cwiseAbs().maxCoeff() : 0.0);
      bool ok = true;
      for (double r : barrier_samples(pot.beta, 400, 10.0)) {
        if (!pot.beta.domain().in_domain(r)) continue;
        if (r <= w.lo && !(w_prime(pot, r).hi + mm < 0.0)) ok = false;
        if (r >= w.hi && !(w_prime(pot, r).lo - mm > 0.0)) ok = false;
      }
      add("H7", ok ? "pass" : "fail", false,
          "window (" + fmt(w.lo) + ", " + fmt(w.hi) + "), M = " + fmt(mm));
    } else {
      add("H7", dg.lojasiewicz ? "warn" : "n/a", false, "no analytic window declared");
    }
  }
  {
    const auto& fl = alpha.slope_floor();
    const bool s0 = fl.flat_lo == 0.0 && fl.flat_hi == 0.0;
    add("S0", s0 ? "pass" : "warn", false,
        s0 ? "S- = S+ = 0" : "c1 = " + fmt(slope_floor_constant(alpha, g.volume())) +
                                 " > 0: bounds may grow linearly in T");
  }
  {
    const auto kind = s.scheme.forcing.kind;
    if (kind == Forcing::Kind::Decaying || kind == Forcing::Kind::Tabulated) {
      const Forcing::Tail tl = s.scheme.forcing.tail(m.op, s.xi);
      add("f1", tl.bounded ? "pass" : "fail", true,
          "t^(1+xi) int_t^inf |f|^2 sup " + fmt(tl.sup_value) + ", tail exponent " +
              fmt(tl.exponent) + " vs 2 + xi = " + fmt(2.0 + s.xi));
      add("f2", "n/a", false, "forcing depends on time");
    } else {
      add("f1", kind == Forcing::Kind::Zero ? "pass" : "n/a", false,
          kind == Forcing::Kind::Zero ? "f = 0" : "constant forcing");
      add("f2", "pass", false, "forcing independent of time");
    }
  }
  {
    const ValueInterval a0 = alpha.eval(0.0);
    const bool single = a0.lo == 0.0 && a0.hi == 0.0;
    add("alpha0", single ? "pass" : "warn", false,
        single ? "alpha(0) = {0}" : "alpha(0) = [" + fmt(a0.lo) + ", " + fmt(a0.hi) +
                                        "]: omega-limit only as weak inclusion");
  }
  if (dg.lojasiewicz) {
    const auto& gb = alpha.growth();
    if (!gb) {
      add("LS", "warn", false, "alpha declares no growth bounds");
    } else {
      const bool ok = dg.chi * gb->q_inf <= gb->p_inf + 1.0;
      add("LS", ok ? "pass" : "warn", false,
          "chi q_inf = " + fmt(dg.chi * gb->q_inf) + " vs p_inf + 1 = " + fmt(gb->p_inf + 1.0));
    }
  } else {
    add("LS", "n/a", false, "decay probe disabled");
  }
  return rep;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, data.data(), data.size());
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[md[k] >> 4];
    out += hex[md[k] & 15];
  }
  return out;
}

}  // namespace dnp
