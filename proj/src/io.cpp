#include "tqd/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace tqd {

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m) {
    nlohmann::json re = nlohmann::json::array();
    nlohmann::json im = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
        nlohmann::json row_re = nlohmann::json::array();
        nlohmann::json row_im = nlohmann::json::array();
        for (int j = 0; j < m.cols(); ++j) {
            row_re.push_back(m(i, j).real());
            row_im.push_back(m(i, j).imag());
        }
        re.push_back(std::move(row_re));
        im.push_back(std::move(row_im));
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

namespace {

const char* kind_name(CorrectionKind kind) {
    switch (kind) {
    case CorrectionKind::general: return "general";
    case CorrectionKind::offdiag_formula: return "offdiag_formula";
    case CorrectionKind::unitary_frame: return "unitary_frame";
    case CorrectionKind::closed_system: return "closed_system";
    }
    return "unknown";
}

} // namespace

nlohmann::json correction_to_json(const CorrectionTerm& term) {
    nlohmann::json j;
    j["kind"] = kind_name(term.kind);
    j["supermatrix"] = matrix_to_json(term.supermatrix);
    j["hamiltonian_part"] =
        term.hamiltonian_part ? matrix_to_json(*term.hamiltonian_part) : nlohmann::json();
    return j;
}

nlohmann::json cp_to_json(const CPReport& report) {
    return {{"hamiltonian_component", matrix_to_json(report.hamiltonian_component)},
            {"kossakowski_matrix", matrix_to_json(report.kossakowski_matrix)},
            {"min_kossakowski_eigenvalue", report.min_kossakowski_eigenvalue},
            {"cp_conditional", report.cp_conditional},
            {"suggested_damping", report.suggested_damping},
            {"reconstruction_error", report.reconstruction_error}};
}

std::string error_json(ErrorCode code, const std::string& message) {
    nlohmann::json j = {{"error", {{"code", error_code_name(code)}, {"message", message}}}};
    return j.dump();
}

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t,fidelity,trace_distance,trace_error,min_eig\n";
    for (size_t i = 0; i < traj.times.size(); ++i) {
        out += format_double(traj.times[i]);
        out += ',';
        out += format_double(traj.fidelities[i]);
        out += ',';
        out += format_double(traj.trace_distances[i]);
        out += ',';
        out += format_double(traj.trace_errors[i]);
        out += ',';
        out += format_double(traj.min_eigenvalues[i]);
        out += '\n';
    }
    return out;
}

std::string eigenvalues_csv(const FramePath& path) {
    if (path.frames.empty())
        fail(ErrorCode::ConfigInvalid, "eigenvalues_csv: empty frame path");
    const int nb = path.frames.front().block_count();
    std::string out = "t";
    for (int b = 0; b < nb; ++b) {
        out += ",re_" + std::to_string(b) + ",im_" + std::to_string(b);
    }
    out += '\n';
    for (size_t k = 0; k < path.frames.size(); ++k) {
        out += format_double(path.times[k]);
        for (int b = 0; b < nb; ++b) {
            out += ',';
            out += format_double(path.frames[k].eigenvalues(b).real());
            out += ',';
            out += format_double(path.frames[k].eigenvalues(b).imag());
        }
        out += '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::ConfigInvalid, "cannot open for writing: " + path);
    f << content;
    if (!f) fail(ErrorCode::ConfigInvalid, "write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::ConfigInvalid, "cannot open for reading: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string strip_quotes(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

std::map<std::string, std::string> parse_json_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigInvalid, std::string("config JSON parse error: ") + e.what());
    }
    if (!j.is_object())
        fail(ErrorCode::ConfigInvalid, "config JSON must be a flat object");
    std::map<std::string, std::string> out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const nlohmann::json& v = it.value();
        if (v.is_string())
            out[it.key()] = v.get<std::string>();
        else if (v.is_boolean())
            out[it.key()] = v.get<bool>() ? "true" : "false";
        else if (v.is_number())
            out[it.key()] = v.dump();
        else
            fail(ErrorCode::ConfigInvalid,
                 "config key '" + it.key() + "' must be a scalar");
    }
    return out;
}

} // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return parse_json_config(text);

    std::map<std::string, std::string> out;
    std::istringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::ConfigInvalid,
                 "config line " + std::to_string(lineno) + " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = strip_quotes(trim(line.substr(eq + 1)));
        if (key.empty())
            fail(ErrorCode::ConfigInvalid,
                 "config line " + std::to_string(lineno) + " has an empty key");
        if (out.count(key))
            fail(ErrorCode::ConfigInvalid, "duplicate config key '" + key + "'");
        out[key] = value;
    }
    return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    return parse_config_text(read_text_file(path));
}

} // namespace tqd
