#include "dnp/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dnp/errors.hpp"

namespace dnp::io {

namespace {

void put(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

Json numbers(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

}  // namespace

std::string ledger_csv(const std::vector<LedgerEntry>& ledger) {
  std::string out =
      "i,t,energy,phi,w_int,dissipation,newton_iters,residual,min_u,max_u,sup_|du/dt|\n";
  for (const auto& e : ledger) {
    out += std::to_string(e.i);
    for (double v : {e.t, e.energy, e.phi, e.w_int, e.dissipation}) {
      out += ',';
      put(out, v);
    }
    out += ',' + std::to_string(e.newton_iters);
    for (double v : {e.residual, e.min_u, e.max_u, e.du_sup}) {
      out += ',';
      put(out, v);
    }
    out += '\n';
  }
  return out;
}

std::string snapshot_csv(const Grid& g, const Eigen::VectorXd& u) {
  std::string out = g.dim == 1 ? "x,u\n" : "x,y,u\n";
  for (std::size_t j = 0; j < g.size(); ++j) {
    const auto [x, y] = g.coord(j);
    put(out, x);
    out += ',';
    if (g.dim == 2) {
      put(out, y);
      out += ',';
    }
    put(out, u[static_cast<Eigen::Index>(j)]);
    out += '\n';
  }
  return out;
}

std::string series_csv(const std::string& header, const std::vector<std::vector<double>>& cols) {
  std::string out = header + "\n";
  const std::size_t n = cols.empty() ? 0 : cols.front().size();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c > 0) out += ',';
      put(out, cols[c][k]);
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DomainError("cannot write " + path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string file_sha256(const std::string& path) { return sha256_hex(read_text(path)); }

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const ValidationReport& r) {
  Json items = Json::array();
  for (const auto& c : r.items) {
    items.push_back({{"tag", c.tag}, {"status", c.status}, {"hard", c.hard}, {"evidence", c.evidence}});
  }
  return {{"ok", r.ok()}, {"checks", items}};
}

Json to_json(const UniformBoundReport& r) {
  auto mx = [](const BoundMaxima& b) {
    return Json{{"u", number(b.u)},
                {"du", number(b.du)},
                {"bu", number(b.bu)},
                {"beta_eps", number(b.beta_eps)},
                {"energy", number(b.energy)}};
  };
  const char* regime = r.regime == Regime::S0_f1 ? "s0_f1" : r.regime == Regime::F2 ? "f2" : "generic";
  return {{"regime", regime},     {"full", mx(r.full)},        {"half", mx(r.half)},
          {"drift", number(r.drift)}, {"drift_tol", number(r.drift_tol)},
          {"asserted", r.asserted}, {"pass", r.pass},           {"note", r.note}};
}

Json to_json(const SeparationReport& r) {
  return {{"upper", r.upper},
          {"lower", r.lower},
          {"margin_upper", number(r.margin_upper)},
          {"margin_lower", number(r.margin_lower)},
          {"min_margin", number(r.min_margin)},
          {"worst_step", r.worst_step},
          {"holder_delta", number(r.holder_delta)},
          {"rho_upper", number(r.rho_upper)},
          {"rho_lower", number(r.rho_lower)},
          {"compatible", r.compatible},
          {"pass", r.pass}};
}

Json to_json(const StationaryReport& r, bool with_state) {
  Json j{{"residual", number(r.residual)},
         {"eps_path", numbers(r.eps_path)},
         {"residual_path", numbers(r.residual_path)},
         {"newton_iters", r.newton_iters},
         {"weak_inclusion", r.weak_inclusion},
         {"min_u", number(r.min_u)},
         {"max_u", number(r.max_u)}};
  if (with_state) j["u"] = numbers(std::vector<double>(r.u.data(), r.u.data() + r.u.size()));
  return j;
}

Json to_json(const OmegaReport& r) {
  Json j{{"tail_rate", number(r.tail_rate)},
         {"residual_ok", r.residual_ok},
         {"f_tail_ok", r.f_tail_ok},
         {"stationary", to_json(r.stationary)}};
  j["f_tail"] = r.f_tail ? number(*r.f_tail) : Json(nullptr);
  return j;
}

Json to_json(const DecayFit& f) {
  return {{"mode", f.mode == DecayFit::Mode::Algebraic ? "algebraic" : "exponential"},
          {"c", number(f.c)},
          {"exponent", number(f.exponent)},
          {"r2", number(f.r2)},
          {"samples", f.samples}};
}

Json to_json(const LojProbe& p) {
  Json bounded = Json::array();
  for (bool b : p.bounded) bounded.push_back(b);
  return {{"theta", number(p.theta)},
          {"c_l", number(p.c_l)},
          {"theta_grid", numbers(p.theta_grid)},
          {"max_ratio", numbers(p.max_ratio)},
          {"slope", numbers(p.slope)},
          {"bounded", bounded},
          {"samples", p.samples.size()},
          {"neighborhood", number(p.neighborhood)}};
}

Json to_json(const ContinuationReport& r) {
  Json ladder = Json::array();
  for (const auto& g : r.ladder) {
    ladder.push_back({{"tau", number(g.tau)}, {"epsilon", number(g.epsilon)}, {"nu", number(g.nu)}});
  }
  return {{"ladder", ladder},
          {"linf_h", numbers(r.linf_h)},
          {"c0_h", numbers(r.c0_h)},
          {"phi_final", numbers(r.phi_final)},
          {"phi_final_diff", numbers(r.phi_final_diff)},
          {"min_u", numbers(r.min_u)},
          {"max_u", numbers(r.max_u)},
          {"c0_monotone", r.c0_monotone},
          {"phi_converging", r.phi_converging}};
}

Json to_json(const DependenceReport& r) {
  return {{"lipschitz", number(r.lipschitz)},
          {"sigma_eff", number(r.sigma_eff)},
          {"max_excess", number(r.max_excess)},
          {"identical", r.identical},
          {"pass", r.pass},
          {"times", numbers(r.times)},
          {"ratio", numbers(r.ratio)},
          {"envelope", numbers(r.envelope)}};
}

Json ledger_summary(const Trajectory& tr) {
  int max_iters = 0;
  int substeps = 0;
  long step_fail = 0;
  double max_res = 0.0;
  double min_margin = kInf;
  for (const auto& e : tr.ledger) {
    max_iters = std::max(max_iters, e.newton_iters);
    max_res = std::max(max_res, e.residual);
    if (e.substeps > 1) ++substeps;
    if (!e.step_pass) ++step_fail;
    min_margin = std::min(min_margin, e.step_margin);
  }
  Json j{{"steps", tr.ledger.size()},
         {"aborted", tr.aborted},
         {"max_newton_iters", max_iters},
         {"max_residual", number(max_res)},
         {"halved_steps", substeps},
         {"step_inequality_failures", step_fail},
         {"step_inequality_min_margin", number(min_margin)}};
  if (tr.aborted) j["abort_reason"] = tr.abort_reason;
  if (!tr.ledger.empty()) {
    const auto& last = tr.ledger.back();
    j["final"] = {{"t", number(last.t)},         {"energy", number(last.energy)},
                  {"phi", number(last.phi)},     {"min_u", number(last.min_u)},
                  {"max_u", number(last.max_u)}, {"sup_du", number(last.du_sup)}};
  }
  return j;
}

}  // namespace dnp::io
