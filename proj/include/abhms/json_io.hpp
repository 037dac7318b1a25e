#pragma once

#include "aside.hpp"
#include "bside.hpp"
#include "error.hpp"
#include "mirror.hpp"
#include "siegel.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace abhms {

using json = nlohmann::ordered_json;

namespace detail {

inline const json& require_key(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) fail(ErrorKind::InvalidArgument, std::string("missing field \"") + key + "\"");
    return j.at(key);
}

inline double as_number(const json& j, const char* what) {
    if (!j.is_number()) fail(ErrorKind::InvalidArgument, std::string(what) + " must be a number");
    return j.get<double>();
}

} // namespace detail

inline json matrix_to_json(const RealMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline RealMatrix matrix_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) fail(ErrorKind::InvalidArgument, std::string(what) + " must be a non-empty array of rows");
    const auto n = static_cast<Eigen::Index>(j.size());
    RealMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
            fail(ErrorKind::DimensionMismatch, std::string(what) + " must be square");
        for (Eigen::Index c = 0; c < n; ++c) m(i, c) = detail::as_number(row[static_cast<std::size_t>(c)], what);
    }
    return m;
}

inline RealVector vector_from_json(const json& j, const char* what) {
    if (!j.is_array()) fail(ErrorKind::InvalidArgument, std::string(what) + " must be an array");
    RealVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = detail::as_number(j[i], what);
    return v;
}

inline json to_json(const SiegelPoint& tau) { return json{{"B", matrix_to_json(tau.B())}, {"Omega", matrix_to_json(tau.Omega())}}; }

inline SiegelPoint siegel_from_json(const json& j) {
    const RealMatrix B = matrix_from_json(detail::require_key(j, "B"), "B");
    const RealMatrix W = matrix_from_json(detail::require_key(j, "Omega"), "Omega");
    return validate_siegel(B, W);
}

/// Accepts g reals, 2g reals (real parts then imaginary parts), or g pairs [re, im].
inline ComplexVector complex_vector_from_json(const json& j, int g, const char* what) {
    if (!j.is_array()) fail(ErrorKind::InvalidArgument, std::string(what) + " must be an array");
    ComplexVector z(g);
    const auto n = j.size();
    if (n == static_cast<std::size_t>(g) && g > 0 && j[0].is_array()) {
        for (int i = 0; i < g; ++i) {
            const json& p = j[static_cast<std::size_t>(i)];
            if (!p.is_array() || p.size() != 2) fail(ErrorKind::InvalidArgument, std::string(what) + ": expected [re, im]");
            z[i] = {detail::as_number(p[0], what), detail::as_number(p[1], what)};
        }
    } else if (n == static_cast<std::size_t>(g)) {
        for (int i = 0; i < g; ++i) z[i] = detail::as_number(j[static_cast<std::size_t>(i)], what);
    } else if (n == 2 * static_cast<std::size_t>(g)) {
        for (int i = 0; i < g; ++i)
            z[i] = {detail::as_number(j[static_cast<std::size_t>(i)], what),
                    detail::as_number(j[static_cast<std::size_t>(g + i)], what)};
    } else {
        fail(ErrorKind::DimensionMismatch, std::string(what) + " has " + std::to_string(n) + " entries for g=" + std::to_string(g));
    }
    return z;
}

inline json cplx_to_json(cplx v) { return json{{"re", v.real()}, {"im", v.imag()}}; }

inline json index_to_json(const MultiIndex& idx) { return json(idx); }

inline json to_json(const TorusPoint& p) { return json{{"a", vec_json(p.a)}, {"b", vec_json(p.b)}}; }

inline json to_json(const SectionVector& s) {
    json coeffs = json::array();
    for (const auto& [idx, v] : s.coeffs) coeffs.push_back(json{{"index", index_to_json(idx)}, {"value", cplx_to_json(v)}});
    return json{{"level", s.level()}, {"dual", s.dual}, {"translate", to_json(s.label.translate)}, {"coeffs", std::move(coeffs)}};
}

inline json to_json(const Brane& br) {
    json slope = br.vertical() ? json("inf") : json(br.k());
    return json{{"slope", std::move(slope)}, {"a", vec_json(br.a)}, {"b", vec_json(br.b)}};
}

inline Brane brane_from_json(const SiegelPoint& tau, const json& j) {
    const json& s = detail::require_key(j, "slope");
    std::optional<int> slope;
    if (s.is_string()) {
        if (s.get<std::string>() != "inf") fail(ErrorKind::InvalidArgument, "slope must be an integer or \"inf\"");
    } else if (s.is_number_integer()) {
        slope = s.get<int>();
    } else {
        fail(ErrorKind::InvalidArgument, "slope must be an integer or \"inf\"");
    }
    const RealVector a = vector_from_json(detail::require_key(j, "a"), "a");
    const RealVector b = vector_from_json(detail::require_key(j, "b"), "b");
    return Brane::make(tau, slope, a, b);
}

inline json to_json(const FloerElement& e) {
    json coeffs = json::array();
    for (const auto& [idx, v] : e.coeffs) coeffs.push_back(json{{"key", index_to_json(idx)}, {"value", cplx_to_json(v)}});
    json out{{"source", to_json(e.source)}, {"target", to_json(e.target)}, {"degree", e.degree}, {"coeffs", std::move(coeffs)}};
    if (!e.note.empty()) out["note"] = e.note;
    return out;
}

inline json to_json(const VerificationReport& r) {
    json out{{"scenario", r.scenario}, {"g", r.g},         {"params", r.params},
             {"max_residual", r.max_residual}, {"tol", r.tol}, {"pass", r.pass}};
    out["seconds"] = r.seconds ? json(*r.seconds) : json(nullptr);
    return out;
}

} // namespace abhms
