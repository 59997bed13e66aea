#pragma once

#include <cstdio>
#include <sstream>
#include <string>

#include <json.hpp>

#include "newton.hpp"
#include "quasiarc.hpp"
#include "spectral.hpp"
#include "twod.hpp"

namespace siegel {

using json = nlohmann::ordered_json;

inline std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx cplx_from(const json& j) {
    if (!j.is_array() || j.size() != 2) throw error(errc::config, "complex number must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const cvec& a) {
    json out = json::array();
    for (auto z : a) out.push_back(to_json(z));
    return out;
}

inline json to_json(const TaylorDisk& f) {
    return {{"center", to_json(f.dom.c)}, {"radius", f.dom.r}, {"coeffs", to_json(f.a)}};
}

inline TaylorDisk taylor_from(const json& j) {
    Disk d{cplx_from(j.at("center")), j.at("radius").get<double>()};
    if (!(d.r > 0)) throw error(errc::config, "disk radius must be positive");
    const json& c = j.at("coeffs");
    if (c.empty()) throw error(errc::config, "empty coefficient list");
    TaylorDisk f(d, int(c.size()) - 1);
    for (size_t k = 0; k < c.size(); ++k) f.a[k] = cplx_from(c[k]);
    return f;
}

inline json to_json(const FactorPair& p) { return {{"phi", to_json(p.phi)}, {"psi", to_json(p.psi)}}; }

inline FactorPair pair_from(const json& j) { return {taylor_from(j.at("phi")), taylor_from(j.at("psi"))}; }

inline json to_json(const Certificate& c) {
    return {{"epsilon", c.epsilon}, {"contraction", c.contraction}, {"delta", c.delta}, {"verdict", c.verdict}};
}

inline json to_json(const BiSeries& s) {
    json rows = json::array();
    for (int j = 0; j <= s.nq; ++j) {
        json row = json::array();
        for (int k = 0; k <= s.ny; ++k) row.push_back(to_json(s.at(j, k)));
        rows.push_back(row);
    }
    return rows;
}

// components as F_i(x, y) = E_i(x^2, y) + x O_i(x^2, y); rows are powers of (x^2 - c)/r, columns powers of y/R
inline json to_json(const BiDiskMap& m) {
    json comps = json::array();
    for (int i = 0; i < 2; ++i) comps.push_back({{"even", to_json(m.E[i])}, {"odd", to_json(m.O[i])}});
    return {{"domain", {{"center", to_json(m.dom.c)}, {"radius", m.dom.r}, {"y_radius", m.R}}},
            {"components", comps}};
}

inline json to_json(const Pair2D& S) { return {{"A", to_json(S.A)}, {"B", to_json(S.B)}}; }

inline std::string spectrum_csv(const SpectrumReport& s) {
    std::ostringstream o;
    o << "index,re,im,modulus\n";
    for (size_t i = 0; i < s.eigenvalues.size(); ++i) {
        cplx z = s.eigenvalues[i];
        o << i << ',' << num(z.real()) << ',' << num(z.imag()) << ',' << num(std::abs(z)) << '\n';
    }
    return o.str();
}

inline std::string matrix_csv(const Mat& M) {
    std::ostringstream o;
    for (int i = 0; i < M.rows(); ++i) {
        for (int j = 0; j < M.cols(); ++j) o << (j ? "," : "") << num(M(i, j));
        o << '\n';
    }
    return o.str();
}

// level, word, type, flagged, then re/im of each boundary vertex
inline std::string partition_csv(const Partition& P) {
    std::ostringstream o;
    for (auto& pc : P.pieces) {
        o << P.level << ",\"" << pc.word.str() << "\"," << pc.type << ',' << int(pc.flagged);
        for (auto z : pc.boundary) o << ',' << num(z.real()) << ',' << num(z.imag());
        o << '\n';
    }
    return o.str();
}

inline std::string partition_jsonl(const Partition& P) {
    std::ostringstream o;
    for (auto& pc : P.pieces) {
        json j = {{"level", P.level}, {"word", pc.word.w}, {"type", std::string(1, pc.type)},
                  {"flagged", pc.flagged}, {"vertices", to_json(pc.boundary)}};
        o << j.dump() << '\n';
    }
    return o.str();
}

inline std::string arc_csv(const std::vector<ArcPoint>& pts) {
    std::ostringstream o;
    o << "t,re,im\n";
    for (auto& p : pts) o << num(p.t) << ',' << num(p.z.real()) << ',' << num(p.z.imag()) << '\n';
    return o.str();
}

}  // namespace siegel
