#pragma once

#include <map>
#include <mutex>

#include "siegel/newton.hpp"

namespace fixtures {

// converged fixed point per truncation, solved once per process
inline const siegel::SolveResult& fixed_point(int n1 = 40, int n2 = 50) {
    static std::map<std::pair<int, int>, siegel::SolveResult> cache;
    static std::mutex m;
    std::lock_guard<std::mutex> g(m);
    auto key = std::pair{n1, n2};
    auto it = cache.find(key);
    if (it == cache.end()) {
        siegel::SolveOptions o;
        o.n1 = n1;
        o.n2 = n2;
        it = cache.emplace(key, siegel::solve_fixed_point(o)).first;
    }
    return it->second;
}

inline const siegel::Mat& L0(int n1 = 40, int n2 = 50) {
    static std::map<std::pair<int, int>, siegel::Mat> cache;
    auto key = std::pair{n1, n2};
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, siegel::build_L0(fixed_point(n1, n2).pair)).first;
    return it->second;
}

inline const siegel::FactorPair& pair(int n1 = 40, int n2 = 50) { return fixed_point(n1, n2).pair; }

}  // namespace fixtures
