#include "ostrovsky/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "CLI11.hpp"

namespace ostrovsky {

namespace {

namespace fs = std::filesystem;

constexpr double kElTol2 = 1e-7;
constexpr double kElTol4 = 1e-6;
constexpr double kPohozaevTol = 1e-4;
constexpr double kDecayTol = 0.1;
constexpr double kRatioTol = 10.0;
constexpr double kTravelTol = 1e-4;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string cell_tag(Family f, double p, double lambda) {
  return std::string(to_string(f)) + "_p" + num(p) + "_lambda" + num(lambda);
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) fail(ErrorCode::Usage, where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) fail(ErrorCode::Usage, "unknown config key '" + where + it.key() + "'");
}

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::Usage, "config key '" + key + "' has the wrong type");
  }
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

void write_json(const std::string& path, const json& j) { write_atomic(path, j.dump(2) + "\n"); }

WaveProfile solve_cell(const RunConfig& cfg, const Model& model, double lambda) {
  return minimize_auto(model, lambda, cfg.grid, cfg.solver);
}

void write_profile(const RunConfig& cfg, const WaveProfile& pr, const std::string& stem) {
  write_atomic(out_path(cfg, stem + ".csv"), profile_to_csv(pr));
  write_json(out_path(cfg, stem + ".json"), profile_to_json(pr));
}

double single_lambda(const RunConfig& cfg) {
  if (cfg.lambdas.size() != 1) fail(ErrorCode::Usage, cfg.command + " takes exactly one lambda");
  return cfg.lambdas.front();
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  Model model = make_model(cfg.family, cfg.p);
  double lambda = single_lambda(cfg);
  WaveProfile pr = solve_cell(cfg, model, lambda);
  std::string tag = cell_tag(cfg.family, cfg.p, lambda);
  write_profile(cfg, pr, "profile_" + tag);
  out << "solve " << tag << ": omega=" << format_double(pr.omega) << " m=" << format_double(pr.energy)
      << " el_residual=" << pr.el_residual << " L=" << pr.phi.grid.half_length << " n=" << pr.phi.grid.n
      << " iterations=" << pr.iterations << "\n";
  return pr.omega < 2.0 ? 0 : 1;
}

int run_curve(const RunConfig& cfg, std::ostream& out, bool need_triples) {
  if (cfg.lambdas.size() < 2) fail(ErrorCode::Usage, cfg.command + " needs at least two lambda values");
  Model model = make_model(cfg.family, cfg.p);
  CostCurve curve = cost_curve(model, cfg.lambdas, cfg.grid, cfg.solver, true);
  json manifest{{"command", cfg.command}, {"family", to_string(cfg.family)}, {"p", cfg.p}};
  json failed = json::array();
  for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
    if (curve.ok(i)) {
      write_profile(cfg, *curve.profiles[i], "profile_" + cell_tag(cfg.family, cfg.p, curve.lambdas[i]));
    } else {
      failed.push_back({{"lambda", curve.lambdas[i]}, {"error", curve.failures[i]}});
    }
  }
  manifest["failed"] = failed;
  write_atomic(out_path(cfg, "cost_curve.csv"), cost_curve_to_csv(curve));

  int code = 0;
  std::size_t usable = 0;
  for (std::size_t i = 0; i < curve.lambdas.size(); ++i) usable += curve.ok(i);
  if (usable >= 3 || need_triples) {
    SubadditivityReport rep = check_subadditivity(curve);
    write_json(out_path(cfg, "subadditivity.json"), subadditivity_to_json(rep));
    manifest["subadditivity_pass"] = rep.pass;
    out << cfg.command << ": subadditivity " << (rep.pass ? "pass" : "FAIL") << " over " << rep.triples.size()
        << " triples, m/lambda " << (rep.ratio_decreasing ? "decreasing" : "NOT decreasing") << "\n";
    if (!rep.pass) code = 1;
  } else {
    manifest["subadditivity_pass"] = nullptr;
    bool dec = true;
    double prev = 0.0;
    bool have = false;
    for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
      if (!curve.ok(i)) continue;
      double r = curve.values[i] / curve.lambdas[i];
      if (have && !(r < prev)) dec = false;
      prev = r;
      have = true;
    }
    manifest["ratio_decreasing"] = dec;
    out << cfg.command << ": m/lambda " << (dec ? "decreasing" : "NOT decreasing") << " (too few samples for triples)\n";
    if (!dec) code = 1;
  }
  write_json(out_path(cfg, "manifest.json"), manifest);
  for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
    if (curve.ok(i))
      out << "  lambda=" << num(curve.lambdas[i]) << " m=" << format_double(curve.values[i])
          << " omega=" << format_double(curve.omegas[i]) << "\n";
    else
      out << "  lambda=" << num(curve.lambdas[i]) << " failed: " << curve.failures[i] << "\n";
  }
  if (!failed.empty()) return 3;
  return code;
}

SpectrumReport stability_of(const RunConfig& cfg, const WaveProfile& pr, const std::string& stem) {
  StabilityOptions so;
  so.full_spectrum = cfg.full_spectrum;
  SpectrumReport rep = analyze_stability(pr, so);
  write_json(out_path(cfg, stem + "spectrum.json"), spectrum_report_to_json(rep));
  write_atomic(out_path(cfg, stem + "eigenvalues_lplus.csv"), symmetric_eigenvalues_csv(rep));
  if (rep.full_computed) write_atomic(out_path(cfg, stem + "eigenvalues_full.csv"), full_eigenvalues_csv(rep.full));
  return rep;
}

int cmd_stability(const RunConfig& cfg, std::ostream& out) {
  Model model = make_model(cfg.family, cfg.p);
  double lambda = single_lambda(cfg);
  WaveProfile pr = solve_cell(cfg, model, lambda);
  std::string tag = cell_tag(cfg.family, cfg.p, lambda);
  write_profile(cfg, pr, "profile_" + tag);
  SpectrumReport rep = stability_of(cfg, pr, tag + "_");
  out << "stability " << tag << ": n_minus=" << rep.n_minus << " kernel_dim=" << rep.kernel_dim
      << " kernel_overlap=" << rep.kernel_overlap << " vk=" << format_double(rep.vk_value)
      << " max_real=" << rep.max_real_full << " verdict=" << to_string(rep.verdict) << " (" << rep.reason << ")\n";
  return rep.verdict == Verdict::Stable ? 0 : 1;
}

PerturbationResult evolve_of(const RunConfig& cfg, const WaveProfile& pr, const std::string& stem) {
  std::uint64_t seed = cfg.evolve.seed.value_or(0);
  PerturbationResult r = perturbation_experiment(pr, cfg.evolve.delta, cfg.evolve.T, cfg.evolve.dt, seed);
  json j = perturbation_to_json(r);
  if (cfg.evolve.seed) j["seed"] = *cfg.evolve.seed;
  j["T"] = cfg.evolve.T;
  j["dt"] = cfg.evolve.dt;
  write_json(out_path(cfg, stem + "evolve.json"), j);
  write_atomic(out_path(cfg, stem + "trace.csv"), trace_to_csv(r.trace));
  return r;
}

bool evolve_pass(const PerturbationResult& r) {
  if (r.trace.blowup_time) return false;
  return r.traveling_wave_mode ? r.max_traveling_error <= kTravelTol : r.ratio <= kRatioTol;
}

int cmd_evolve(const RunConfig& cfg, std::ostream& out) {
  Model model = make_model(cfg.family, cfg.p);
  double lambda = single_lambda(cfg);
  if (cfg.evolve.delta > 0.0 && !cfg.evolve.seed)
    fail(ErrorCode::Usage, "evolve with delta > 0 needs a seed (--seed or evolve.seed)");
  WaveProfile pr = solve_cell(cfg, model, lambda);
  std::string tag = cell_tag(cfg.family, cfg.p, lambda);
  write_profile(cfg, pr, "profile_" + tag);
  PerturbationResult r = evolve_of(cfg, pr, tag + "_");
  out << "evolve " << tag << ": ";
  if (r.traveling_wave_mode)
    out << "traveling-wave error " << r.max_traveling_error;
  else
    out << "ratio " << r.ratio;
  out << " mass_drift=" << r.trace.mass_drift() << " energy_drift=" << r.trace.energy_drift();
  if (r.trace.blowup_time) out << " blowup at t=" << *r.trace.blowup_time;
  out << "\n";
  return evolve_pass(r) ? 0 : 1;
}

json pohozaev_bundle(const PohozaevReport& a, const PohozaevReport& b, const DecayFit* d) {
  json j{{"second_order", pohozaev_to_json(a)}, {"fourth_order", pohozaev_to_json(b)}};
  if (d) j["decay"] = decay_to_json(*d);
  return j;
}

int cmd_pohozaev(const RunConfig& cfg, std::ostream& out) {
  Model model = make_model(cfg.family, cfg.p);
  int code = 0;
  for (double lambda : cfg.lambdas) {
    WaveProfile pr = solve_cell(cfg, model, lambda);
    std::string tag = cell_tag(cfg.family, cfg.p, lambda);
    write_profile(cfg, pr, "profile_" + tag);
    PohozaevReport a = pohozaev_residuals(pr);
    PohozaevReport b = pohozaev_fourth_order(pr);
    write_json(out_path(cfg, tag + "_pohozaev.json"), pohozaev_bundle(a, b, nullptr));
    bool ok = std::max({a.r1, a.r2, b.r1, b.r2}) <= kPohozaevTol;
    out << "pohozaev " << tag << ": r1=" << a.r1 << " r2=" << a.r2 << " (fourth order r1=" << b.r1
        << " r2=" << b.r2 << ") " << (ok ? "pass" : "FAIL") << "\n";
    if (!ok) code = 1;
  }
  return code;
}

VerificationRow verify_cell(const RunConfig& cfg, const Model& model, double lambda, std::ostream& out) {
  VerificationRow row;
  row.family = to_string(model.family);
  row.p = model.p;
  row.lambda = lambda;
  std::string tag = cell_tag(model.family, model.p, lambda);
  std::string stem = tag + "_";
  try {
    WaveProfile pr = solve_cell(cfg, model, lambda);
    write_profile(cfg, pr, "profile_" + tag);
    row.omega = pr.omega;
    row.m_value = pr.energy;
    row.el_residual_2 = el_residual_second_order(pr);
    row.el_residual_4 = el_residual_fourth_order(pr);
    PohozaevReport a = pohozaev_residuals(pr);
    PohozaevReport b = pohozaev_fourth_order(pr);
    DecayFit d = fit_decay(pr);
    write_json(out_path(cfg, stem + "pohozaev.json"), pohozaev_bundle(a, b, &d));
    row.pohozaev_r1 = a.r1;
    row.pohozaev_r2 = a.r2;
    row.pohozaev4_r1 = b.r1;
    row.pohozaev4_r2 = b.r2;
    row.kappa_fit = d.kappa_fit;
    row.kappa_ref = d.kappa_ref;
    row.kappa_rel_dev = d.rel_dev;
    SpectrumReport s = stability_of(cfg, pr, stem);
    row.n_minus = s.n_minus;
    row.kernel_dim = s.kernel_dim;
    row.kernel_overlap = s.kernel_overlap;
    row.vk_value = s.vk_value;
    row.max_real_full = s.max_real_full;
    row.verdict = to_string(s.verdict);
    bool evolve_ok = true;
    if (cfg.evolve.seed) {
      PerturbationResult r = evolve_of(cfg, pr, stem);
      row.evolve_ratio = r.ratio;
      evolve_ok = evolve_pass(r);
    }
    row.pass = row.omega < 2.0 && row.m_value < lambda && row.el_residual_2 <= kElTol2 &&
               row.el_residual_4 <= kElTol4 &&
               std::max({a.r1, a.r2, b.r1, b.r2}) <= kPohozaevTol && row.kappa_rel_dev <= kDecayTol &&
               row.n_minus == 1 && row.kernel_overlap <= 1e-4 && s.verdict == Verdict::Stable && evolve_ok;
  } catch (const Error& e) {
    row.failure = e.what();
    row.pass = false;
  }
  out << "verify " << tag << ": ";
  if (!row.failure.empty())
    out << "failed: " << row.failure << "\n";
  else
    out << "omega=" << format_double(row.omega) << " verdict=" << row.verdict << " "
        << (row.pass ? "pass" : "FAIL") << "\n";
  return row;
}

int cmd_verify_all(const RunConfig& cfg, std::ostream& out) {
  Model model = make_model(cfg.family, cfg.p);
  if (cfg.evolve.seed && cfg.evolve.delta == 0.0)
    fail(ErrorCode::Usage, "verify-all runs the perturbation experiment; delta must be positive");
  std::vector<VerificationRow> rows;
  for (double lambda : cfg.lambdas) rows.push_back(verify_cell(cfg, model, lambda, out));
  write_atomic(out_path(cfg, "verification_table.csv"), verification_table_csv(rows));
  json manifest{{"command", cfg.command}, {"config", config_to_json(cfg)}};
  if (!cfg.evolve.seed) manifest["note"] = "perturbation experiment skipped: no seed given";
  json cells = json::array();
  bool failed = false, all_pass = true;
  for (const auto& r : rows) {
    cells.push_back({{"tag", cell_tag(cfg.family, cfg.p, r.lambda)}, {"pass", r.pass}, {"failure", r.failure}});
    failed = failed || !r.failure.empty();
    all_pass = all_pass && r.pass;
  }
  manifest["cells"] = cells;
  write_json(out_path(cfg, "manifest.json"), manifest);
  if (failed) return 3;
  return all_pass ? 0 : 1;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"solve", "sweep", "stability", "evolve", "subadd", "pohozaev",
                                              "verify-all"};
  return names;
}

void merge_config_json(RunConfig& cfg, const json& j) {
  check_keys(j, {"command", "family", "p", "lambda", "lambdas", "grid", "solver", "evolve", "full_spectrum", "out_dir"},
             "");
  if (j.contains("command")) cfg.command = get_as<std::string>(j["command"], "command");
  if (j.contains("family")) cfg.family = family_from_string(get_as<std::string>(j["family"], "family"));
  if (j.contains("p")) cfg.p = get_as<double>(j["p"], "p");
  for (const char* key : {"lambda", "lambdas"}) {
    if (!j.contains(key)) continue;
    const json& v = j[key];
    cfg.lambdas = v.is_array() ? get_as<std::vector<double>>(v, key) : std::vector<double>{get_as<double>(v, key)};
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    check_keys(g, {"L", "n"}, "grid.");
    if (g.contains("L")) {
      if (g["L"].is_string()) {
        if (g["L"].get<std::string>() != "auto") fail(ErrorCode::Usage, "grid.L must be a number or \"auto\"");
        cfg.grid.L = 0.0;
      } else {
        cfg.grid.L = get_as<double>(g["L"], "grid.L");
        if (!(cfg.grid.L > 0.0)) fail(ErrorCode::NonPositiveLength, "grid.L must be positive");
      }
    }
    if (g.contains("n")) cfg.grid.n = get_as<int>(g["n"], "grid.n");
  }
  if (j.contains("solver")) {
    const json& s = j["solver"];
    check_keys(s, {"tol", "max_iter", "step0", "backtrack", "recenter_every", "seed_epsilon", "seed_alpha",
                   "oversampling", "sigma_min", "seed_shift"},
               "solver.");
    SolverOptions& o = cfg.solver;
    if (s.contains("tol")) o.tol = get_as<double>(s["tol"], "solver.tol");
    if (s.contains("max_iter")) o.max_iter = get_as<int>(s["max_iter"], "solver.max_iter");
    if (s.contains("step0")) o.step0 = get_as<double>(s["step0"], "solver.step0");
    if (s.contains("backtrack")) o.backtrack = get_as<double>(s["backtrack"], "solver.backtrack");
    if (s.contains("recenter_every")) o.recenter_every = get_as<int>(s["recenter_every"], "solver.recenter_every");
    if (s.contains("seed_epsilon")) o.seed_epsilon = get_as<double>(s["seed_epsilon"], "solver.seed_epsilon");
    if (s.contains("seed_alpha")) o.seed_alpha = get_as<double>(s["seed_alpha"], "solver.seed_alpha");
    if (s.contains("oversampling")) o.oversampling = get_as<int>(s["oversampling"], "solver.oversampling");
    if (s.contains("sigma_min")) o.sigma_min = get_as<double>(s["sigma_min"], "solver.sigma_min");
    if (s.contains("seed_shift")) o.seed_shift = get_as<int>(s["seed_shift"], "solver.seed_shift");
  }
  if (j.contains("evolve")) {
    const json& e = j["evolve"];
    check_keys(e, {"T", "dt", "delta", "seed"}, "evolve.");
    if (e.contains("T")) cfg.evolve.T = get_as<double>(e["T"], "evolve.T");
    if (e.contains("dt")) cfg.evolve.dt = get_as<double>(e["dt"], "evolve.dt");
    if (e.contains("delta")) cfg.evolve.delta = get_as<double>(e["delta"], "evolve.delta");
    if (e.contains("seed")) cfg.evolve.seed = get_as<std::uint64_t>(e["seed"], "evolve.seed");
  }
  if (j.contains("full_spectrum")) cfg.full_spectrum = get_as<bool>(j["full_spectrum"], "full_spectrum");
  if (j.contains("out_dir")) cfg.out_dir = get_as<std::string>(j["out_dir"], "out_dir");
}

json config_to_json(const RunConfig& cfg) {
  const SolverOptions& o = cfg.solver;
  json solver{{"tol", o.tol},
              {"max_iter", o.max_iter},
              {"step0", o.step0},
              {"backtrack", o.backtrack},
              {"recenter_every", o.recenter_every},
              {"seed_epsilon", o.seed_epsilon},
              {"oversampling", o.oversampling},
              {"sigma_min", o.sigma_min},
              {"seed_shift", o.seed_shift}};
  if (o.seed_alpha) solver["seed_alpha"] = *o.seed_alpha;
  json evolve{{"T", cfg.evolve.T}, {"dt", cfg.evolve.dt}, {"delta", cfg.evolve.delta}};
  if (cfg.evolve.seed) evolve["seed"] = *cfg.evolve.seed;
  return json{{"command", cfg.command},
              {"family", to_string(cfg.family)},
              {"p", cfg.p},
              {"lambdas", cfg.lambdas},
              {"grid", {{"L", cfg.grid.L > 0.0 ? json(cfg.grid.L) : json("auto")}, {"n", cfg.grid.n}}},
              {"solver", solver},
              {"evolve", evolve},
              {"full_spectrum", cfg.full_spectrum},
              {"out_dir", cfg.out_dir}};
}

void validate_config(const RunConfig& cfg) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), cfg.command) == names.end())
    fail(ErrorCode::Usage, "unknown command '" + cfg.command + "'");
  make_model(cfg.family, cfg.p);
  if (cfg.lambdas.empty()) fail(ErrorCode::Usage, "no lambda given");
  for (double l : cfg.lambdas)
    if (!(l > 0.0) || !std::isfinite(l)) fail(ErrorCode::Usage, "lambda must be positive, got " + num(l));
  if (cfg.grid.L != 0.0) make_grid(cfg.grid.L, cfg.grid.n);
  else make_grid(1.0, cfg.grid.n);
  cfg.solver.validate();
  if (!(cfg.evolve.T >= 0.0) || !(cfg.evolve.dt > 0.0)) fail(ErrorCode::Usage, "evolve needs T >= 0 and dt > 0");
  if (!(cfg.evolve.delta >= 0.0 && cfg.evolve.delta <= 0.1))
    fail(ErrorCode::BadDelta, "delta = " + num(cfg.evolve.delta) + " outside (0, 0.1]");
  if (cfg.out_dir.empty()) fail(ErrorCode::Usage, "empty out_dir");
}

std::string verification_table_csv(const std::vector<VerificationRow>& rows) {
  std::string out =
      "family,p,lambda,omega,m_value,el_residual_2,el_residual_4,pohozaev_r1,pohozaev_r2,pohozaev4_r1,"
      "pohozaev4_r2,kappa_fit,kappa_ref,kappa_rel_dev,n_minus,kernel_dim,kernel_overlap,vk_value,max_real_full,"
      "verdict,evolve_ratio,pass,failure\n";
  for (const auto& r : rows) {
    std::string failure = r.failure;
    for (char& c : failure)
      if (c == ',' || c == '\n' || c == '"') c = ';';
    bool ok = r.failure.empty();
    auto f = [&](double v) { return ok ? format_double(v) : std::string(); };
    out += r.family + "," + format_double(r.p) + "," + format_double(r.lambda) + "," + f(r.omega) + "," +
           f(r.m_value) + "," + f(r.el_residual_2) + "," + f(r.el_residual_4) + "," + f(r.pohozaev_r1) + "," +
           f(r.pohozaev_r2) + "," + f(r.pohozaev4_r1) + "," + f(r.pohozaev4_r2) + "," + f(r.kappa_fit) + "," +
           f(r.kappa_ref) + "," + f(r.kappa_rel_dev) + "," + (ok ? std::to_string(r.n_minus) : "") + "," +
           (ok ? std::to_string(r.kernel_dim) : "") + "," + f(r.kernel_overlap) + "," + f(r.vk_value) + "," +
           f(r.max_real_full) + "," + r.verdict + "," + (r.evolve_ratio ? format_double(*r.evolve_ratio) : "") +
           "," + (r.pass ? "true" : "false") + "," + failure + "\n";
  }
  return out;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Usage:
    case ErrorCode::InvalidExponent:
    case ErrorCode::NonPowerOfTwo:
    case ErrorCode::NonPositiveLength:
    case ErrorCode::BadEpsilon:
    case ErrorCode::BadAlpha:
    case ErrorCode::BadDelta:
    case ErrorCode::BadN:
    case ErrorCode::InsufficientSamples:
      return 2;
    default:
      return 3;
  }
}

int run_config(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate_config(cfg);
    fs::create_directories(cfg.out_dir);
    if (cfg.command == "solve") return cmd_solve(cfg, out);
    if (cfg.command == "sweep") return run_curve(cfg, out, false);
    if (cfg.command == "subadd") return run_curve(cfg, out, true);
    if (cfg.command == "stability") return cmd_stability(cfg, out);
    if (cfg.command == "evolve") return cmd_evolve(cfg, out);
    if (cfg.command == "pohozaev") return cmd_pohozaev(cfg, out);
    return cmd_verify_all(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Normalized solitary waves of the generalized Ostrovsky equation"};
  app.require_subcommand(1);

  std::string config_path, family, out_dir;
  double p = 0.0, L = 0.0, T = 0.0, dt = 0.0, delta = 0.0, tol = 0.0;
  std::vector<double> lambdas;
  int n = 0, oversampling = 0, max_iter = 0;
  std::uint64_t seed = 0;
  bool no_full = false;

  struct Flags {
    CLI::Option *config, *family, *p, *lambda, *L, *n, *tol, *max_iter, *oversampling, *T, *dt, *delta, *seed,
        *out, *no_full;
  };
  std::vector<std::pair<CLI::App*, Flags>> subs;
  for (const auto& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name, "");
    Flags f{};
    f.config = sub->add_option("--config", config_path, "JSON run configuration");
    f.family = sub->add_option("--family", family, "abs or signed");
    f.p = sub->add_option("--p", p, "exponent");
    f.lambda = sub->add_option("--lambda", lambdas, "constraint level(s), comma separated")->delimiter(',');
    f.L = sub->add_option("--L", L, "box half-length (default: automatic)");
    f.n = sub->add_option("--n", n, "grid nodes, a power of two");
    f.tol = sub->add_option("--tol", tol, "solver tolerance");
    f.max_iter = sub->add_option("--max-iter", max_iter, "solver iteration cap");
    f.oversampling = sub->add_option("--oversampling", oversampling, "quadrature oversampling factor");
    f.T = sub->add_option("--T", T, "evolution time");
    f.dt = sub->add_option("--dt", dt, "time step");
    f.delta = sub->add_option("--delta", delta, "relative perturbation amplitude");
    f.seed = sub->add_option("--seed", seed, "perturbation seed");
    f.out = sub->add_option("--out", out_dir, "output directory");
    f.no_full = sub->add_flag("--no-full-spectrum", no_full, "skip the non-symmetric eigenproblem");
    subs.emplace_back(sub, f);
  }
  app.get_subcommand("solve")->description("minimize the energy at one constraint level");
  app.get_subcommand("sweep")->description("cost curve over several constraint levels");
  app.get_subcommand("stability")->description("spectrum of the linearization and the stability verdict");
  app.get_subcommand("evolve")->description("time integration from a perturbed wave");
  app.get_subcommand("subadd")->description("strict subadditivity of the cost curve");
  app.get_subcommand("pohozaev")->description("Pohozaev identities of converged profiles");
  app.get_subcommand("verify-all")->description("full verification table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  RunConfig cfg;
  for (auto& [sub, f] : subs) {
    if (!sub->parsed()) continue;
    cfg.command = sub->get_name();
    try {
      if (f.config->count()) {
        std::ifstream in(config_path);
        if (!in) fail(ErrorCode::Usage, "cannot read config " + config_path);
        json j;
        try {
          j = json::parse(in);
        } catch (const json::exception& e) {
          fail(ErrorCode::Usage, std::string("config is not valid JSON: ") + e.what());
        }
        merge_config_json(cfg, j);
        if (j.contains("command") && j["command"] != cfg.command)
          fail(ErrorCode::Usage, "config command '" + j["command"].get<std::string>() + "' differs from '" +
                                     sub->get_name() + "'");
      }
      if (f.family->count()) cfg.family = family_from_string(family);
      if (f.p->count()) cfg.p = p;
      if (f.lambda->count()) cfg.lambdas = lambdas;
      if (f.L->count()) {
        if (!(L > 0.0)) fail(ErrorCode::NonPositiveLength, "--L must be positive");
        cfg.grid.L = L;
      }
      if (f.n->count()) cfg.grid.n = n;
      if (f.tol->count()) cfg.solver.tol = tol;
      if (f.max_iter->count()) cfg.solver.max_iter = max_iter;
      if (f.oversampling->count()) cfg.solver.oversampling = oversampling;
      if (f.T->count()) cfg.evolve.T = T;
      if (f.dt->count()) cfg.evolve.dt = dt;
      if (f.delta->count()) cfg.evolve.delta = delta;
      if (f.seed->count()) cfg.evolve.seed = seed;
      if (f.no_full->count()) cfg.full_spectrum = false;
      if (f.out->count()) {
        cfg.out_dir = out_dir;
      } else if (cfg.out_dir.empty()) {
        const char* env = std::getenv("OSTROVSKY_OUT_DIR");
        cfg.out_dir = env && *env ? env : "out";
      }
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return exit_code_for(e.code());
    }
  }
  return run_config(cfg, out, err);
}

}  // namespace ostrovsky
