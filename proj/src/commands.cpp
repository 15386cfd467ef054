#include "dnp/commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>

#include "dnp/errors.hpp"
#include "dnp/io.hpp"

#ifndef DNP_VERSION
#define DNP_VERSION "dev"
#endif

namespace dnp {

namespace {

namespace fs = std::filesystem;
using io::Json;

class Writer {
 public:
  explicit Writer(std::string dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void text(const std::string& rel, const std::string& body) {
    io::write_text((fs::path(dir_) / rel).string(), body);
    files_[rel] = {body.size(), sha256_hex(body)};
  }
  void json(const std::string& rel, const Json& j) { text(rel, io::json_text(j)); }

  Json inventory() const {
    Json a = Json::array();
    for (const auto& [rel, meta] : files_) {
      a.push_back({{"path", rel}, {"bytes", meta.first}, {"sha256", meta.second}});
    }
    return a;
  }
  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  std::map<std::string, std::pair<std::size_t, std::string>> files_;
};

struct Session {
  const CommandArgs& args;
  Scenario s;
  Writer w;
  Json manifest;
  Json reports = Json::object();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void report(const std::string& name, const Json& j) {
    const std::string rel = "reports/" + name + ".json";
    w.json(rel, j);
    reports[name] = rel;
  }

  void finish() {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    manifest["tool"] = "dnp";
    manifest["version"] = DNP_VERSION;
    manifest["command"] = args.command;
    manifest["fingerprint"] = s.fingerprint;
    const Grid& g = s.model.op.grid();
    manifest["grid"] = {{"dim", g.dim},
                        {"n", std::vector<int>(g.n.begin(), g.n.begin() + g.dim)},
                        {"length", std::vector<double>(g.length.begin(), g.length.begin() + g.dim)},
                        {"bc", g.bc == Boundary::Dirichlet0 ? "dirichlet" : "neumann"},
                        {"node_order", g.dim == 1 ? "x" : "axis-major, x fastest: j = i + nx * k"}};
    manifest["wall_time_s"] = wall;
    manifest["reports"] = reports;
    manifest["files"] = w.inventory();
    io::write_text((fs::path(w.dir()) / "manifest.json").string(), io::json_text(manifest));
  }
};

Scenario load(const CommandArgs& a) {
  Scenario s = load_config(a.config);
  if (!a.out.empty()) s.output.dir = a.out;
  if (a.checkpoint_every >= 0) s.output.checkpoint_every = a.checkpoint_every;
  return s;
}

std::string first_hard_failure(const ValidationReport& r) {
  for (const auto& c : r.items) {
    if (c.hard && c.status == "fail") return c.tag;
  }
  return "";
}

void require_valid(Session& ss) {
  const ValidationReport rep = validate_scenario(ss.s);
  ss.report("validation", io::to_json(rep));
  if (!rep.ok()) {
    const std::string tag = first_hard_failure(rep);
    throw ValidationError("scenario fails hypothesis " + tag + ": " + rep.find(tag)->evidence, tag);
  }
  validate_scheme(ss.s.scheme, ss.s.model.alpha);
}

std::string snapshot_name(long i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshots/u_%06ld.csv", i);
  return buf;
}

Trajectory run_with_outputs(Session& ss) {
  const Scenario& s = ss.s;
  const Grid& g = s.model.op.grid();
  const long n = s.scheme.steps();
  const long every = s.output.checkpoint_every;
  RunOptions opts;
  opts.on_store = [&](long i, const Eigen::VectorXd& u) {
    if (i == 0 || i == n || (every > 0 && i % every == 0)) {
      ss.w.text(snapshot_name(i), io::snapshot_csv(g, u));
    }
  };
  Trajectory tr = run(s.model, s.scheme, s.u0, opts);
  tr.fingerprint = s.fingerprint;
  if (tr.aborted) {
    // partial trajectory: keep the last state next to the partial ledger
    ss.w.text(snapshot_name(tr.indices.back()), io::snapshot_csv(g, tr.final_state()));
  }
  ss.w.text("ledger.csv", io::ledger_csv(tr.ledger));
  ss.manifest["ledger_summary"] = io::ledger_summary(tr);
  return tr;
}

Json energy_report(const Scenario& s, const Trajectory& tr) {
  long fails = 0;
  double worst = kInf;
  double rise = 0.0;
  for (std::size_t k = 0; k < tr.ledger.size(); ++k) {
    const auto& e = tr.ledger[k];
    if (!e.step_pass) ++fails;
    worst = std::min(worst, e.step_margin);
    if (k > 0) rise = std::max(rise, e.energy_reg - tr.ledger[k - 1].energy_reg);
  }
  const bool unforced = s.scheme.forcing.kind == Forcing::Kind::Zero;
  const double tol = 10.0 * s.scheme.tol_newton;
  Json j{{"steps", tr.ledger.size()},
         {"step_inequality_failures", fails},
         {"step_inequality_min_margin", io::number(worst)},
         {"max_energy_rise", io::number(rise)},
         {"energy_tol", tol}};
  j["energy_nonincreasing"] = unforced ? Json(rise <= tol) : Json(nullptr);
  j["pass"] = fails == 0 && (!unforced || rise <= tol);
  return j;
}

struct FitOutcome {
  OmegaReport omega;
  Eigen::VectorXd u_inf;
  DecaySeries series;
  DecayFit fit;
  std::string limit_source;
};

FitOutcome fit_trajectory(const Scenario& s, const Trajectory& tr) {
  const auto& d = s.diagnostics;
  auto om = omega_limit_detect(tr, s.model, s.scheme.forcing, d.tol_rate, d.tol_res);
  if (!om) {
    double rate = 0.0;
    for (std::size_t k = tr.ledger.size() - tail_window(tr.ledger.size()); k < tr.ledger.size(); ++k) {
      rate = std::max(rate, tr.ledger[k].du_sup);
    }
    throw NotSettled("no omega-limit: tail sup |du/dt| = " + std::to_string(rate) +
                     " above tol_rate = " + std::to_string(d.tol_rate));
  }
  FitOutcome fo;
  fo.omega = *om;
  fo.u_inf = tr.final_state();
  fo.limit_source = "final state";
  try {
    const StationaryReport st = solve_stationary(s.model.op, s.model.pot, limit_forcing(s),
                                                 s.stationary_ladder, tr.final_state(),
                                                 s.stationary_tol);
    fo.u_inf = st.u;
    fo.limit_source = "stationary solve from final state";
  } catch (const NonconvergedLadder&) {
  } catch (const NewtonDivergence&) {
  }
  fo.series = decay_series(tr, s.model.op, fo.u_inf);
  fo.fit = fit_decay(fo.series.t, fo.series.d, d.decay_mode);
  return fo;
}

void write_fit(Session& ss, const FitOutcome& fo) {
  std::vector<double> model(fo.series.t.size());
  for (std::size_t k = 0; k < model.size(); ++k) {
    const double t = fo.series.t[k];
    model[k] = fo.fit.mode == DecayFit::Mode::Algebraic ? fo.fit.c * std::pow(t, -fo.fit.exponent)
                                                       : fo.fit.c * std::exp(-fo.fit.exponent * t);
  }
  ss.w.text("decay.csv", io::series_csv("t,distance,fit", {fo.series.t, fo.series.d, model}));
  Json j = io::to_json(fo.fit);
  j["limit"] = fo.limit_source;
  ss.report("decay", j);
}

void diagnostics_after_run(Session& ss, const Trajectory& tr) {
  const Scenario& s = ss.s;
  const auto& d = s.diagnostics;
  if (d.energy_check) ss.report("energy", energy_report(s, tr));
  if (d.uniform_bounds) {
    ss.report("uniform_bounds",
              io::to_json(uniform_bound_monitor(tr, d.regime.value_or(default_regime(s)), d.drift_tol)));
  }
  if (d.separation) {
    ss.report("separation",
              io::to_json(separation_monitor(tr, s.model.op.grid(), s.model.pot, d.holder_nu)));
  }
  if (d.omega_limit) {
    auto om = omega_limit_detect(tr, s.model, s.scheme.forcing, d.tol_rate, d.tol_res);
    ss.report("omega_limit", om ? Json{{"settled", true}, {"report", io::to_json(*om)}}
                                : Json{{"settled", false}});
  }
}

int cmd_validate(const CommandArgs& a, std::ostream& out, std::ostream& err) {
  const Scenario s = load(a);
  const ValidationReport rep = validate_scenario(s);
  Json j = io::to_json(rep);
  j["fingerprint"] = s.fingerprint;
  out << io::json_text(j);
  if (!rep.ok()) {
    const std::string tag = first_hard_failure(rep);
    err << Json{{"error", "ValidationError"},
                {"tag", tag},
                {"message", rep.find(tag)->evidence},
                {"exit_code", kExitValidation}}
               .dump()
        << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

int cmd_run(Session& ss) {
  require_valid(ss);
  const Trajectory tr = run_with_outputs(ss);
  if (tr.aborted) {
    ss.finish();
    throw NewtonDivergence(tr.abort_reason, {}, {});
  }
  diagnostics_after_run(ss, tr);
  if (ss.s.diagnostics.decay) {
    try {
      write_fit(ss, fit_trajectory(ss.s, tr));
    } catch (const Error& e) {
      ss.report("decay", Json{{"skipped", e.kind()}, {"message", e.what()}});
    }
  }
  ss.finish();
  return kExitOk;
}

int cmd_fit(Session& ss) {
  require_valid(ss);
  const Trajectory tr = run_with_outputs(ss);
  if (tr.aborted) {
    ss.finish();
    throw NewtonDivergence(tr.abort_reason, {}, {});
  }
  const FitOutcome fo = fit_trajectory(ss.s, tr);
  ss.report("omega_limit", io::to_json(fo.omega));
  write_fit(ss, fo);
  if (ss.s.diagnostics.lojasiewicz) {
    ss.report("lojasiewicz", io::to_json(lojasiewicz_probe(tr, fo.u_inf, ss.s.model,
                                                           limit_forcing(ss.s),
                                                           ss.s.diagnostics.theta_grid)));
  }
  ss.finish();
  return kExitOk;
}

int cmd_stationary(Session& ss) {
  require_valid(ss);
  const Scenario& s = ss.s;
  const StationaryReport st = solve_stationary(s.model.op, s.model.pot, limit_forcing(s),
                                               s.stationary_ladder, s.u0, s.stationary_tol);
  ss.w.text("stationary.csv", io::snapshot_csv(s.model.op.grid(), st.u));
  ss.report("stationary", io::to_json(st));
  ss.finish();
  return kExitOk;
}

int cmd_continuation(Session& ss) {
  require_valid(ss);
  const Scenario& s = ss.s;
  std::vector<Rung> ladder = s.ladder;
  if (ladder.empty()) {
    Rung r{s.scheme.tau, s.scheme.epsilon, s.scheme.nu_eff()};
    for (int k = 0; k < 4; ++k) {
      ladder.push_back(r);
      r = {r.tau / 2, r.epsilon / 2, r.nu / 2};
    }
  }
  ss.report("continuation", io::to_json(continuation_study(s.model, s.scheme, s.u0, ladder)));
  ss.finish();
  return kExitOk;
}

int cmd_depend(Session& ss) {
  require_valid(ss);
  const Scenario& s = ss.s;
  const Grid& g = s.model.op.grid();
  Eigen::VectorXd phi = s.depend_perturbation.sample_on(g);
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (!s.model.op.free()[j]) phi[static_cast<Eigen::Index>(j)] = 0.0;
  }
  Json runs = Json::array();
  std::vector<DependenceReport> reps;
  for (double delta : s.depend_deltas) {
    reps.push_back(continuous_dependence(s.model, s.scheme, s.u0, s.u0 + delta * phi));
    Json j = io::to_json(reps.back());
    j["delta"] = delta;
    runs.push_back(j);
  }
  double spread = 0.0;
  for (const auto& r : reps) {
    for (std::size_t k = 0; k < r.ratio.size(); ++k) {
      const double ref = reps.front().ratio[k];
      if (ref > 0.0) spread = std::max(spread, std::abs(r.ratio[k] - ref) / ref);
    }
  }
  bool all = true;
  for (const auto& r : reps) all = all && r.pass;
  ss.report("depend", Json{{"runs", runs},
                           {"ratio_spread", io::number(spread)},
                           {"envelope_pass", all},
                           {"curves_agree_10pct", spread <= 0.1}});
  ss.finish();
  return kExitOk;
}

void print_error(std::ostream& err, const std::exception& e, int code) {
  Json j{{"message", e.what()}, {"exit_code", code}};
  if (const auto* de = dynamic_cast<const Error*>(&e)) {
    j["error"] = de->kind();
  } else {
    j["error"] = "Error";
  }
  if (const auto* v = dynamic_cast<const ValidationError*>(&e)) j["tag"] = v->tag();
  if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
    j["key"] = p->key();
    j["line"] = p->line();
  }
  if (const auto* n = dynamic_cast<const NewtonDivergence*>(&e)) {
    j["residual_history"] = n->residual_history();
  }
  err << j.dump() << "\n";
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const DomainError*>(&e) || dynamic_cast<const ShapeError*>(&e)) {
    return kExitValidation;
  }
  if (dynamic_cast<const PreconditionError*>(&e) || dynamic_cast<const NotSettled*>(&e) ||
      dynamic_cast<const MissingMetadata*>(&e) || dynamic_cast<const InsufficientData*>(&e)) {
    return kExitPrecondition;
  }
  return kExitNumerical;
}

Regime default_regime(const Scenario& s) {
  const auto& fl = s.model.alpha.slope_floor();
  const bool s0 = fl.flat_lo == 0.0 && fl.flat_hi == 0.0;
  switch (s.scheme.forcing.kind) {
    case Forcing::Kind::Constant:
      return Regime::F2;
    case Forcing::Kind::Zero:
      return s0 ? Regime::S0_f1 : Regime::F2;
    default:
      return s0 && s.scheme.forcing.tail(s.model.op, s.xi).bounded ? Regime::S0_f1
                                                                  : Regime::Generic;
  }
}

Eigen::VectorXd limit_forcing(const Scenario& s) {
  if (s.scheme.forcing.kind == Forcing::Kind::Constant) return s.scheme.forcing.field;
  return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.model.op.grid().size()));
}

int run_command(const CommandArgs& a, std::ostream& out, std::ostream& err) {
  try {
    if (a.command == "validate") return cmd_validate(a, out, err);
    static const std::map<std::string, int (*)(Session&)> table{
        {"run", cmd_run},         {"fit", cmd_fit},       {"stationary", cmd_stationary},
        {"continuation", cmd_continuation}, {"depend", cmd_depend}};
    const auto it = table.find(a.command);
    if (it == table.end()) throw DomainError("unknown command \"" + a.command + "\"");
    Scenario s = load(a);
    const std::string dir = s.output.dir;
    Session ss{a, std::move(s), Writer(dir)};
    return it->second(ss);
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    print_error(err, e, code);
    return code;
  }
}

}  // namespace dnp
