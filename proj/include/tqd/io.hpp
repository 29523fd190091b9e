#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "tqd/correction.hpp"
#include "tqd/dynamics.hpp"

namespace tqd {

// Deterministic decimal rendering with 17 significant digits.
std::string format_double(double x);

nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m);
nlohmann::json correction_to_json(const CorrectionTerm& term);
nlohmann::json cp_to_json(const CPReport& report);
std::string error_json(ErrorCode code, const std::string& message);

// Header t,fidelity,trace_distance,trace_error,min_eig; one row per sample.
std::string trajectory_csv(const Trajectory& traj);

// Header t,re_0,im_0,...; per-block eigenvalues along the tracked path.
std::string eigenvalues_csv(const FramePath& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Flat key = value lines ('#' comments) or a flat JSON object; values are
// returned unparsed as strings. Rejects duplicate keys, nested structure,
// and malformed lines.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::string& path);

} // namespace tqd
