#pragma once

/**
 * @file io.hpp
 * @brief JSON forms of matrices, states, channels and POVMs.
 *
 * Matrix: {"dim": d, "entries": [[[re, im], ...], ...]} row-major. Rectangular
 * matrices (Kraus operators) carry "rows" and "cols" instead of "dim".
 * State: matrix form plus "dims" and optional "classical".
 * Channel: {"kraus": [matrix, ...]}. POVM: {"elements": [matrix, ...]}.
 */

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "renyi/linalg.hpp"
#include "renyi/states.hpp"

namespace renyi {

using Json = nlohmann::json;

inline Json matrix_to_json(const Matrix &m) {
    Json entries = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back({m(i, j).real(), m(i, j).imag()});
        }
        entries.push_back(std::move(row));
    }
    Json out;
    if (m.rows() == m.cols()) {
        out["dim"] = m.rows();
    } else {
        out["rows"] = m.rows();
        out["cols"] = m.cols();
    }
    out["entries"] = std::move(entries);
    return out;
}

inline Matrix matrix_from_json(const Json &j) {
    if (!j.is_object() || !j.contains("entries") || !j["entries"].is_array()) {
        throw ValidationError("matrix JSON needs an \"entries\" array");
    }
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    if (j.contains("dim")) {
        rows = cols = j["dim"].get<Eigen::Index>();
    } else if (j.contains("rows") && j.contains("cols")) {
        rows = j["rows"].get<Eigen::Index>();
        cols = j["cols"].get<Eigen::Index>();
    } else {
        throw ValidationError("matrix JSON needs \"dim\" or \"rows\"/\"cols\"");
    }
    if (rows <= 0 || cols <= 0) {
        throw ValidationError("matrix dimensions must be positive");
    }
    const Json &e = j["entries"];
    if (static_cast<Eigen::Index>(e.size()) != rows) {
        throw ValidationError("matrix JSON has " + std::to_string(e.size()) + " rows, expected " +
                              std::to_string(rows));
    }
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Json &row = e[i];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw ValidationError("matrix JSON row " + std::to_string(i) + " must have " +
                                  std::to_string(cols) + " entries");
        }
        for (Eigen::Index k = 0; k < cols; ++k) {
            const Json &z = row[k];
            if (z.is_number()) {
                m(i, k) = Complex(z.get<double>(), 0.0);
            } else if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number()) {
                m(i, k) = Complex(z[0].get<double>(), z[1].get<double>());
            } else {
                throw ValidationError("entries[" + std::to_string(i) + "][" + std::to_string(k) +
                                      "] must be [re, im]");
            }
        }
    }
    return m;
}

inline Json state_to_json(const MultipartiteState &s) {
    Json out = matrix_to_json(s.matrix());
    out["dims"] = s.dims();
    if (!s.classical().empty()) {
        out["classical"] = s.classical();
    }
    return out;
}

/// Reads a state; `dims` defaults to a single system when absent.
inline MultipartiteState state_from_json(const Json &j) {
    const Matrix m = matrix_from_json(j);
    std::vector<int> dims{static_cast<int>(m.rows())};
    if (j.contains("dims")) {
        dims = j["dims"].get<std::vector<int>>();
    }
    std::vector<int> classical;
    if (j.contains("classical")) {
        classical = j["classical"].get<std::vector<int>>();
    }
    return {DensityOperator(HermitianOperator(m)), dims, classical};
}

inline Json channel_to_json(const QuantumChannel &c) {
    Json kraus = Json::array();
    for (const auto &k : c.kraus()) {
        kraus.push_back(matrix_to_json(k));
    }
    return {{"kraus", kraus}};
}

inline QuantumChannel channel_from_json(const Json &j) {
    if (!j.contains("kraus") || !j["kraus"].is_array()) {
        throw ValidationError("channel JSON needs a \"kraus\" array");
    }
    std::vector<Matrix> kraus;
    for (const auto &k : j["kraus"]) {
        kraus.push_back(matrix_from_json(k));
    }
    return QuantumChannel(std::move(kraus), 1e-8);
}

inline Json povm_to_json(const POVM &p) {
    Json elements = Json::array();
    for (const auto &e : p.elements()) {
        elements.push_back(matrix_to_json(e.matrix()));
    }
    return {{"elements", elements}};
}

inline POVM povm_from_json(const Json &j) {
    if (!j.contains("elements") || !j["elements"].is_array()) {
        throw ValidationError("POVM JSON needs an \"elements\" array");
    }
    std::vector<HermitianOperator> elements;
    for (const auto &e : j["elements"]) {
        elements.emplace_back(matrix_from_json(e));
    }
    return POVM(std::move(elements), 1e-8);
}

inline Json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot read " + path);
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error &e) {
        throw ValidationError("malformed JSON in " + path + ": " + e.what());
    }
}

inline void write_json_file(const std::string &path, const Json &j) {
    std::ofstream out(path);
    if (!out) {
        throw ValidationError("cannot write " + path);
    }
    out << j.dump(2) << '\n';
}

} // namespace renyi
