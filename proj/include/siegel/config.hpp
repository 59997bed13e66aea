#pragma once

#include <cstdint>
#include <string>

#include "io.hpp"

namespace siegel {

struct RunConfig {
    int n1 = 40, n2 = 50;
    Disk U = U_default, V = V_default;
    Disk U_ext{cplx(0.6, 0.09), 0.937};
    double r_psi_ext = 0.874;
    double tol = 1e-10;
    int max_iters = 25;
    int seed_level = 12;
    int rg_steps = 3;
    std::uint64_t seed = 0;
    double delta = 1e-6;
    int workers = 1;
    int level = 3;
    int depth = 5;
    int arc_resolution = 513;
    int arc_seed_level = 6;
    int twod_level = 2;
    std::string out = "out";
    bool dump_steps = false;

    SolveOptions solve_options() const {
        SolveOptions o;
        o.n1 = n1;
        o.n2 = n2;
        o.seed_level = seed_level;
        o.rg_steps = rg_steps;
        o.max_iters = max_iters;
        o.tol = tol;
        o.workers = workers;
        o.U = U;
        o.V = V;
        return o;
    }

    void validate() const {
        if (n1 < 4 || n2 < 4) throw error(errc::config, "truncation orders must be >= 4");
        if (!(U.r > 0) || !(V.r > 0) || !(U_ext.r > 0) || !(r_psi_ext > 0))
            throw error(errc::config, "disk radii must be positive");
        if (!(tol > 0)) throw error(errc::config, "tolerance must be positive");
        if (max_iters < 0) throw error(errc::config, "max_iters must be >= 0");
        if (workers < 1) throw error(errc::config, "workers must be >= 1");
        if (!(delta > 0)) throw error(errc::config, "delta must be positive");
    }
};

// flat keys; anything absent keeps its default
inline RunConfig config_from(const json& j) {
    if (!j.is_object()) throw error(errc::config, "config must be a JSON object");
    RunConfig c;
    auto get = [&](const char* k, auto& v) {
        if (j.contains(k)) v = j.at(k).get<std::decay_t<decltype(v)>>();
    };
    auto getc = [&](const char* k, cplx& v) {
        if (j.contains(k)) v = cplx_from(j.at(k));
    };
    get("n1", c.n1);
    get("n2", c.n2);
    getc("center_phi", c.U.c);
    get("radius_phi", c.U.r);
    getc("center_psi", c.V.c);
    get("radius_psi", c.V.r);
    getc("ext_center_phi", c.U_ext.c);
    get("ext_radius_phi", c.U_ext.r);
    get("ext_radius_psi", c.r_psi_ext);
    get("tol", c.tol);
    get("max_iters", c.max_iters);
    get("seed_level", c.seed_level);
    get("rg_steps", c.rg_steps);
    get("seed", c.seed);
    get("delta", c.delta);
    get("workers", c.workers);
    get("level", c.level);
    get("depth", c.depth);
    get("arc_resolution", c.arc_resolution);
    get("arc_seed_level", c.arc_seed_level);
    get("twod_level", c.twod_level);
    get("out", c.out);
    get("dump_steps", c.dump_steps);
    for (auto& [k, v] : j.items()) {
        static const char* known[] = {"n1", "n2", "center_phi", "radius_phi", "center_psi", "radius_psi",
                                      "ext_center_phi", "ext_radius_phi", "ext_radius_psi", "tol", "max_iters",
                                      "seed_level", "rg_steps", "seed", "delta", "workers", "level", "depth",
                                      "arc_resolution", "arc_seed_level", "twod_level", "out", "dump_steps"};
        bool ok = false;
        for (auto* q : known) ok = ok || k == q;
        if (!ok) throw error(errc::config, "unknown config key: " + k);
    }
    c.validate();
    return c;
}

inline json to_json(const RunConfig& c) {
    return {{"n1", c.n1},
            {"n2", c.n2},
            {"center_phi", to_json(c.U.c)},
            {"radius_phi", c.U.r},
            {"center_psi", to_json(c.V.c)},
            {"radius_psi", c.V.r},
            {"ext_center_phi", to_json(c.U_ext.c)},
            {"ext_radius_phi", c.U_ext.r},
            {"ext_radius_psi", c.r_psi_ext},
            {"tol", c.tol},
            {"max_iters", c.max_iters},
            {"seed_level", c.seed_level},
            {"rg_steps", c.rg_steps},
            {"seed", c.seed},
            {"delta", c.delta},
            {"level", c.level},
            {"depth", c.depth},
            {"arc_resolution", c.arc_resolution},
            {"arc_seed_level", c.arc_seed_level},
            {"twod_level", c.twod_level}};
}

}  // namespace siegel
