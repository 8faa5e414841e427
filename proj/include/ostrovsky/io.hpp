#pragma once

#include <string>

#include "json.hpp"
#include "ostrovsky/diagnostics.hpp"
#include "ostrovsky/evolution.hpp"
#include "ostrovsky/solver.hpp"
#include "ostrovsky/stability.hpp"

namespace ostrovsky {

using json = nlohmann::json;

std::string format_double(double v);

std::string field_to_csv(const Field& f);
json field_to_json(const Field& f);
Field field_from_json(const json& j);

json profile_to_json(const WaveProfile& p);
WaveProfile profile_from_json(const json& j);
// columns x,phi,dphi,antideriv
std::string profile_to_csv(const WaveProfile& p);

std::string cost_curve_to_csv(const CostCurve& c);
json subadditivity_to_json(const SubadditivityReport& r);

json pohozaev_to_json(const PohozaevReport& r);
json decay_to_json(const DecayFit& f);

json spectrum_report_to_json(const SpectrumReport& r);
std::string symmetric_eigenvalues_csv(const SpectrumReport& r);
std::string full_eigenvalues_csv(const FullSpectrum& f);

std::string trace_to_csv(const EvolutionTrace& t);
json perturbation_to_json(const PerturbationResult& r);

// write to a temporary sibling and rename into place
void write_atomic(const std::string& path, const std::string& content);

}  // namespace ostrovsky
