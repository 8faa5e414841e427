#include "ostrovsky/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ostrovsky {

namespace {

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string field_to_csv(const Field& f) {
  std::string out = "x,value\n";
  for (int j = 0; j < f.grid.n; ++j)
    out += format_double(f.grid.x(j)) + "," + format_double(f.values[j]) + "\n";
  return out;
}

json field_to_json(const Field& f) {
  return json{{"grid", {{"L", f.grid.half_length}, {"n", f.grid.n}}}, {"values", f.values}};
}

Field field_from_json(const json& j) {
  Grid g = make_grid(j.at("grid").at("L").get<double>(), j.at("grid").at("n").get<int>());
  Field f{g, j.at("values").get<std::vector<double>>(), false};
  if (static_cast<int>(f.values.size()) != g.n) fail(ErrorCode::GridMismatch, "value count differs from n");
  f.mean_free = has_zero_mean(f);
  return f;
}

json profile_to_json(const WaveProfile& p) {
  json j;
  j["family"] = to_string(p.model.family);
  j["p"] = p.model.p;
  j["lambda"] = p.lambda;
  j["omega"] = p.omega;
  j["el_residual"] = p.el_residual;
  j["iterations"] = p.iterations;
  j["oversampling"] = p.oversampling;
  j["energy"] = p.energy;
  j["parity_defect"] = p.parity_defect;
  j["boundary_ratio"] = p.boundary_ratio;
  j["grid"] = {{"L", p.phi.grid.half_length}, {"n", p.phi.grid.n}};
  j["phi"] = p.phi.values;
  return j;
}

WaveProfile profile_from_json(const json& j) {
  WaveProfile p;
  p.model = make_model(family_from_string(j.at("family").get<std::string>()), j.at("p").get<double>());
  p.lambda = j.at("lambda").get<double>();
  p.omega = j.at("omega").get<double>();
  p.el_residual = j.value("el_residual", 0.0);
  p.iterations = j.value("iterations", 0);
  p.oversampling = j.value("oversampling", default_oversampling(p.model));
  p.energy = j.value("energy", 0.0);
  p.parity_defect = j.value("parity_defect", 0.0);
  p.boundary_ratio = j.value("boundary_ratio", 0.0);
  Grid g = make_grid(j.at("grid").at("L").get<double>(), j.at("grid").at("n").get<int>());
  p.phi = Field{g, j.at("phi").get<std::vector<double>>(), true};
  return p;
}

std::string profile_to_csv(const WaveProfile& p) {
  Field d = deriv(p.phi, 1);
  Field a = deriv(p.phi, -1);
  std::string out = "x,phi,dphi,antideriv\n";
  for (int j = 0; j < p.phi.grid.n; ++j)
    out += format_double(p.phi.grid.x(j)) + "," + format_double(p.phi.values[j]) + "," +
           format_double(d.values[j]) + "," + format_double(a.values[j]) + "\n";
  return out;
}

std::string cost_curve_to_csv(const CostCurve& c) {
  std::string out = "lambda,m_value,omega,el_residual\n";
  for (std::size_t i = 0; i < c.lambdas.size(); ++i)
    out += format_double(c.lambdas[i]) + "," + format_double(c.values[i]) + "," +
           format_double(c.omegas[i]) + "," + format_double(c.residuals[i]) + "\n";
  return out;
}

json subadditivity_to_json(const SubadditivityReport& r) {
  json t = json::array();
  for (const auto& x : r.triples)
    t.push_back({{"lambda", x.lambda}, {"alpha", x.alpha}, {"rest", x.rest}, {"margin", x.margin}, {"pass", x.pass}});
  return json{{"triples", t},
              {"ratios", r.ratios},
              {"ratio_decreasing", r.ratio_decreasing},
              {"pass", r.pass},
              {"failures", r.failures}};
}

json pohozaev_to_json(const PohozaevReport& r) {
  json j{{"r1", r.r1},
         {"r2", r.r2},
         {"variant_note", r.variant_note},
         {"grad_sq", r.grad_sq},
         {"anti_sq", r.anti_sq},
         {"nonlinear", r.nonlinear},
         {"lambda", r.lambda},
         {"omega", r.omega}};
  if (r.alt_r1) j["alt_r1"] = *r.alt_r1;
  if (r.alt_r2) j["alt_r2"] = *r.alt_r2;
  return j;
}

json decay_to_json(const DecayFit& f) {
  return json{{"kappa_left", f.kappa_left},   {"kappa_right", f.kappa_right},
              {"kappa_fit", f.kappa_fit},     {"kappa_ref", f.kappa_ref},
              {"rel_dev", f.rel_dev},         {"rel_dev_left", f.rel_dev_left},
              {"rel_dev_right", f.rel_dev_right}, {"window_lo", f.window_lo},
              {"window_hi", f.window_hi},     {"samples_left", f.samples_left},
              {"samples_right", f.samples_right}};
}

json spectrum_report_to_json(const SpectrumReport& r) {
  json j;
  j["dimension"] = r.dimension;
  j["n_minus"] = r.n_minus;
  j["kernel_dim"] = r.kernel_dim;
  j["positive"] = r.positive;
  j["theta"] = r.theta;
  j["kernel_overlap"] = r.kernel_overlap;
  j["kernel_translation_alignment"] = r.kernel_translation_alignment;
  j["translation_residual"] = r.translation_residual;
  j["quadratic_form"] = r.quadratic_form;
  j["quadratic_form_ref"] = r.quadratic_form_ref;
  j["symmetry_defect"] = r.symmetry_defect;
  j["vk_value"] = r.vk_value;
  j["vk_self_consistency"] = r.vk_self_consistency;
  j["vk_tol"] = r.vk_tol;
  j["nond_ok"] = r.nond_ok;
  j["max_real_full"] = r.full_computed ? json(r.max_real_full) : json(nullptr);
  if (r.full_computed) {
    j["full"] = {{"scale", r.full.scale},
                 {"max_real_all", r.full.max_real_all},
                 {"max_real_localized", r.full.max_real_localized},
                 {"unstable_localized", r.full.unstable_localized},
                 {"symmetry_defect", r.full.symmetry_defect},
                 {"max_residual_top10", r.full.max_residual_top10}};
  }
  j["verdict"] = to_string(r.verdict);
  j["reason"] = r.reason;
  std::vector<double> low(r.eigenvalues_lplus.begin(),
                          r.eigenvalues_lplus.begin() + std::min<std::size_t>(10, r.eigenvalues_lplus.size()));
  j["lowest_eigenvalues"] = low;
  return j;
}

std::string symmetric_eigenvalues_csv(const SpectrumReport& r) {
  std::string out = "value\n";
  for (double v : r.eigenvalues_lplus) out += format_double(v) + "\n";
  return out;
}

std::string full_eigenvalues_csv(const FullSpectrum& f) {
  std::string out = "re,im\n";
  for (std::size_t i = 0; i < f.re.size(); ++i) out += format_double(f.re[i]) + "," + format_double(f.im[i]) + "\n";
  return out;
}

std::string trace_to_csv(const EvolutionTrace& t) {
  std::string out = "t,mass,energy,orbital_distance\n";
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    std::string d = i < t.orbital_distance.size() ? format_double(t.orbital_distance[i]) : "";
    out += format_double(t.times[i]) + "," + format_double(t.mass[i]) + "," + format_double(t.energy[i]) +
           "," + d + "\n";
  }
  return out;
}

json perturbation_to_json(const PerturbationResult& r) {
  json j{{"ratio", nullable(r.ratio)},
         {"delta", r.delta},
         {"traveling_wave_mode", r.traveling_wave_mode},
         {"max_traveling_error", r.max_traveling_error},
         {"mass_drift", r.trace.mass_drift()},
         {"energy_drift", r.trace.energy_drift()},
         {"steps", r.trace.steps}};
  if (r.trace.blowup_time) j["blowup_time"] = *r.trace.blowup_time;
  return j;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Usage, "cannot write " + tmp.string());
    out << content;
    if (!out) fail(ErrorCode::Usage, "write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace ostrovsky
