// System document parsing and the content hash that binds certificates to
// the system they were issued for.
#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "swcert/system.hpp"

namespace swcert {

/// Parse a system document:
/// {"state_dim": 2, "modes": [[[...],[...]], ...], "dwell": {"min": 1, "max": 3}}
inline SwitchedSystem load_system_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("malformed system document: ") + e.what());
    }
    try {
        if (!doc.is_object()) throw std::invalid_argument("malformed system document: top level must be an object");
        if (!doc.contains("state_dim") || !doc.contains("modes") || !doc.contains("dwell"))
            throw std::invalid_argument("malformed system document: requires state_dim, modes, dwell");
        const int n = doc.at("state_dim").get<int>();
        const auto& dwell = doc.at("dwell");
        const int lo = dwell.at("min").get<int>();
        const int hi = dwell.at("max").get<int>();
        std::vector<Matrix> modes;
        for (const auto& jmode : doc.at("modes")) {
            const int rows = static_cast<int>(jmode.size());
            if (rows == 0) throw std::invalid_argument("dimension mismatch: empty mode matrix");
            const int cols = static_cast<int>(jmode.at(0).size());
            if (cols == 0) throw std::invalid_argument("dimension mismatch: empty mode matrix row");
            Matrix m(rows, cols);
            for (int i = 0; i < rows; ++i) {
                const auto& row = jmode.at(i);
                if (static_cast<int>(row.size()) != cols)
                    throw std::invalid_argument("dimension mismatch: ragged rows in a mode matrix");
                for (int j = 0; j < cols; ++j) m(i, j) = row.at(j).get<double>();
            }
            modes.push_back(std::move(m));
        }
        return make_switched_system(n, std::move(modes), lo, hi);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed system document: ") + e.what());
    }
}

inline SwitchedSystem load_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open system file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return load_system_json(buf.str());
}

inline std::string save_system_json(const SwitchedSystem& sys) {
    nlohmann::json doc;
    doc["state_dim"] = sys.state_dim;
    nlohmann::json modes = nlohmann::json::array();
    for (const Matrix& m : sys.modes) {
        nlohmann::json jm = nlohmann::json::array();
        for (int i = 0; i < m.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
            jm.push_back(row);
        }
        modes.push_back(jm);
    }
    doc["modes"] = modes;
    doc["dwell"] = {{"min", sys.dwell_min}, {"max", sys.dwell_max}};
    return doc.dump();
}

namespace detail {

inline void fnv1a_append(std::uint64_t& h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
}

inline std::string format_exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/// Content hash of a system (FNV-1a over a canonical rendering). Certificates
/// carry this hash so a certificate cannot be replayed against a different
/// system document.
inline std::string system_content_hash(const SwitchedSystem& sys) {
    std::uint64_t h = 1469598103934665603ULL;
    detail::fnv1a_append(h, "n=" + std::to_string(sys.state_dim));
    detail::fnv1a_append(h, ";N=" + std::to_string(sys.num_modes()));
    detail::fnv1a_append(h, ";dwell=" + std::to_string(sys.dwell_min) + "," + std::to_string(sys.dwell_max));
    for (int m = 1; m <= sys.num_modes(); ++m) {
        detail::fnv1a_append(h, ";A" + std::to_string(m) + "=");
        const Matrix& a = sys.mode(m);
        for (int i = 0; i < a.rows(); ++i)
            for (int j = 0; j < a.cols(); ++j) {
                detail::fnv1a_append(h, detail::format_exact(a(i, j)));
                detail::fnv1a_append(h, ",");
            }
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace swcert
