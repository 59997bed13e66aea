// siegel_renorm: fixed point, spectrum, certificate, cones, partitions, arc and 2D checks
//
// exit codes: 0 ok, 1 usage or numerical error, 2 not converged, 3 missing input, 4 verdict failure

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "siegel/config.hpp"

namespace fs = std::filesystem;
using namespace siegel;

namespace {

enum Exit { ok = 0, failure = 1, not_converged = 2, missing_input = 3, verdict_failed = 4 };

struct MissingInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const fs::path& p, const std::string& s) {
    fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << s;
}

void write_json(const fs::path& p, const json& j) { write_file(p, j.dump(2) + "\n"); }

json read_json(const fs::path& p) {
    std::ifstream f(p);
    if (!f) throw MissingInput("missing input file: " + p.string());
    return json::parse(f);
}

FactorPair load_fixpoint(const RunConfig& c) {
    json j = read_json(fs::path(c.out) / "fixpoint.json");
    if (!j.value("converged", false)) throw MissingInput("fixpoint.json holds a non-converged run");
    return pair_from(j.at("pair"));
}

json residual_json(const FactorPair& p) {
    auto r = residuals(p);
    return {{"r0", std::abs(r.r0)}, {"r1", std::abs(r.r1)}, {"r2", std::abs(r.r2)}, {"rnorm", std::abs(r.rnorm)}};
}

int cmd_fixpoint(const RunConfig& c) {
    fs::path out(c.out);
    auto on_step = [&](const SolveStep& s) {
        if (!c.dump_steps) return;
        char name[32];
        std::snprintf(name, sizeof name, "step_%03d.json", s.index);
        write_json(out / "steps" / name, {{"index", s.index},
                                          {"newton", s.newton},
                                          {"step", s.step},
                                          {"lambda", to_json(s.lambda)},
                                          {"pair", to_json(s.pair)}});
    };
    if (c.dump_steps && fs::exists(out / "steps")) fs::remove_all(out / "steps");
    SolveResult r = solve_fixed_point(c.solve_options(), on_step);
    double last = r.steps.empty() ? 0.0 : r.steps.back().step;
    json j = {{"config", to_json(c)},
              {"converged", r.converged},
              {"iterations", r.iterations},
              {"last_step", last},
              {"lambda", to_json(r.lambda)}};
    if (!r.converged) {
        j["status"] = "not converged";
        write_json(out / "fixpoint_diagnostic.json", j);
        std::cerr << "not converged after " << r.iterations << " iterations\n";
        return not_converged;
    }
    j["residuals"] = residual_json(r.pair);
    j["pair"] = to_json(r.pair);
    write_json(out / "fixpoint.json", j);
    std::cout << "lambda " << num(r.lambda.real()) << " " << num(r.lambda.imag()) << "\n";
    return ok;
}

int cmd_spectrum(const RunConfig& c) {
    FactorPair p = load_fixpoint(c);
    Mat L = build_L0(p, c.workers);
    SpectrumReport s = spectrum(L);
    ProjectedContraction pc = projected_contraction(L);
    fs::path out(c.out);
    write_file(out / "spectrum.csv", spectrum_csv(s));
    json unst = json::array();
    for (auto z : s.unstable) unst.push_back(to_json(z));
    bool pass = s.one_unstable_pair() && s.pairing_defect < 1e-6 && pc.norm_T3 < 1;
    write_json(out / "spectrum.json", {{"pairing_defect", s.pairing_defect},
                                       {"unstable", unst},
                                       {"max_stable_modulus", s.max_stable_modulus},
                                       {"power_iteration_modulus", power_iteration_modulus(L)},
                                       {"norm_T3", pc.norm_T3},
                                       {"norm_T3_unprojected", pc.norm_T3_unprojected},
                                       {"verdict", pass}});
    return pass ? ok : verdict_failed;
}

int cmd_certify(const RunConfig& c) {
    FactorPair p = load_fixpoint(c);
    Mat L = build_L0(p, c.workers);
    Certificate cert = certify(p, L, c.delta, c.seed);
    fs::path out(c.out);
    write_json(out / "certificate.json", to_json(cert));
    write_file(out / "L0.csv", matrix_csv(L));
    return cert.verdict ? ok : verdict_failed;
}

int cmd_cones(const RunConfig& c) {
    FactorPair p = load_fixpoint(c);
    cplx lam = scaling_factor(p);
    ConeReport cb = cone_bounds(p, lam);
    ConeCheck cc = cone_invariance_check(p, lam);
    double l2 = std::norm(lam);
    cplx C = p.deta(l2);
    double arith = std::acos(0.5967) - std::acos(0.71);
    bool pass = cb.item1_residual < 1e-6 && cb.item2_arg < 1.062 && cb.item3_tailsum < 0.075 && cc.ok() &&
                arith > 0.075;
    json m2 = json::array();
    for (double m : cc.margin_2n) m2.push_back(m);
    write_json(fs::path(c.out) / "cones.json",
               {{"lambda", to_json(lam)},
                {"item1", {{"value", to_json(cb.item1_value)}, {"residual", cb.item1_residual}}},
                {"item2_arg", cb.item2_arg},
                {"item3_tailsum", cb.item3_tailsum},
                {"item3_terms", cb.item3_terms},
                {"item4", {cb.item4_a, cb.item4_b}},
                {"C", {{"value", to_json(C)}, {"modulus", std::abs(C)}, {"arg", std::arg(C)}}},
                {"margins", {{"zero", cc.margin_0}, {"one", cc.margin_1}, {"powers", m2}}},
                {"angle_gap", arith},
                {"verdict", pass}});
    return pass ? ok : verdict_failed;
}

int cmd_partition(const RunConfig& c) {
    FactorPair p = load_fixpoint(c);
    Partition dyn = partition_dynamical(p, c.level, 128, c.workers);
    Partition model = partition_model(c.level);
    int flagged = 0;
    for (auto& pc : dyn.pieces) flagged += pc.flagged;
    fs::path out(c.out);
    write_file(out / "partition.csv", partition_csv(dyn));
    write_file(out / "partition.jsonl", partition_jsonl(dyn));
    auto cov = coverage(model);
    bool pass = dyn.pieces.size() == model.pieces.size() && flagged == 0;
    write_json(out / "partition.json", {{"level", c.level},
                                        {"domains", dyn.pieces.size()},
                                        {"model_intervals", model.pieces.size()},
                                        {"flagged", flagged},
                                        {"model_gap", cov.worst_gap},
                                        {"model_overlap", cov.worst_overlap},
                                        {"verdict", pass}});
    return pass ? ok : verdict_failed;
}

int cmd_arc(const RunConfig& c) {
    FactorPair p = load_fixpoint(c);
    auto pts = arc_points(p, c.depth, c.arc_resolution, c.workers, c.arc_seed_level);
    double diff = 0;
    if (c.depth >= 1) {
        auto prev = arc_points(p, c.depth - 1, c.arc_resolution, c.workers, c.arc_seed_level, false);
        for (size_t i = 0; i < pts.size(); ++i) diff = std::max(diff, std::abs(pts[i].z - prev[i].z));
    }
    double dmax = 0;
    for (auto& a : pts) dmax = std::max(dmax, a.diam);
    fs::path out(c.out);
    write_file(out / "arc.csv", arc_csv(pts));
    bool pass = diff < 1e-2;
    write_json(out / "arc.json", {{"depth", c.depth},
                                  {"points", pts.size()},
                                  {"previous_depth_difference", diff},
                                  {"max_domain_diameter", dmax},
                                  {"verdict", pass}});
    return pass ? ok : verdict_failed;
}

int cmd_twod(const RunConfig& c) {
    FactorPair p = load_fixpoint(c);
    Grid2D g = grid_for(p);
    Pair2D S = embed(p, g);
    PreRenorm2D pre(S, c.twod_level);
    double hres = 0;
    for (auto& q : boundary_grid(U_default, g.R, 16, 16)) {
        V2 P{pre.ell() * q[0], pre.ell() * q[1]};
        cplx z;
        V2 x = pre.H().inverse(P, &z);
        V2 b = pre.H().apply(x, z);
        hres = std::max({hres, std::abs(b[0] - P[0]), std::abs(b[1] - P[1])});
    }
    RG2DInfo info;
    Pair2D out2 = rg_2d(S, c.twod_level, g, &info, c.workers);
    double fixed = l1(reduce(out2) - p) + distance_to_embedding(out2);
    Projection2D pr;
    project_ac_2d(S, &pr);
    double pi2 = std::max({std::abs(pr.a), std::abs(pr.b), std::abs(pr.c)});

    Mat L = build_L0(p, c.workers);
    SpectrumReport s = spectrum(L);
    double mu = s.unstable.empty() ? 0.0 : std::abs(s.unstable[0]);
    Vec v = inverse_iteration(L, mu, Vec::Ones(L.rows()), 6);
    v /= v.lpNorm<1>();
    SpectralCoincidence sc = spectral_coincidence(p, unpack(v, p.n1(), p.n2(), p.phi.dom, p.psi.dom),
                                                  c.twod_level, 1e-6, c.workers);
    double expected = std::pow(mu, c.twod_level);
    double rel = std::abs(sc.unstable_growth / expected - 1);
    bool pass = hres < 1e-9 && fixed < 1e-7 && pi2 < 1e-10 && rel < 1e-3 && sc.y_ratio < 1;
    fs::path out(c.out);
    write_json(out / "twod.json", {{"level", c.twod_level},
                                   {"ell", to_json(info.ell)},
                                   {"H_inverse_residual", hres},
                                   {"fixed_distance", fixed},
                                   {"pi2_on_commuting", pi2},
                                   {"unstable_growth", sc.unstable_growth},
                                   {"expected_growth", expected},
                                   {"relative_error", rel},
                                   {"y_derivative_ratio", sc.y_ratio},
                                   {"verdict", pass}});
    write_json(out / "twod_image.json", to_json(out2));
    return pass ? ok : verdict_failed;
}

int cmd_export_domains(const RunConfig& c) {
    Disk Vt{c.V.c, c.r_psi_ext};
    json j = {{"U", {{"center", to_json(c.U.c)}, {"radius", c.U.r}}},
              {"V", {{"center", to_json(c.V.c)}, {"radius", c.V.r}}},
              {"U_ext", {{"center", to_json(c.U_ext.c)}, {"radius", c.U_ext.r}}},
              {"V_ext", {{"center", to_json(Vt.c)}, {"radius", Vt.r}}}};
    std::ostringstream csv;
    csv << "name,re,im\n";
    auto circle = [&](const char* name, const Disk& d) {
        for (int k = 0; k < 256; ++k) {
            cplx z = d.unscaled(std::polar(1.0, 2 * pi * k / 256));
            csv << name << ',' << num(z.real()) << ',' << num(z.imag()) << '\n';
        }
    };
    circle("U", c.U);
    circle("V", c.V);
    circle("U_ext", c.U_ext);
    circle("V_ext", Vt);
    for (auto [name, d] : {std::pair{"Z", c.U}, std::pair{"W", c.V}})
        for (cplx z : sqrt_preimage_boundary(d, 256)) csv << name << ',' << num(z.real()) << ',' << num(z.imag()) << '\n';
    fs::path out(c.out);
    write_json(out / "domains.json", j);
    write_file(out / "domains.csv", csv.str());
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Golden-mean Siegel disk renormalization"};
    app.require_subcommand(1);

    std::string config_path, out;
    int n1 = 0, n2 = 0, workers = 0, level = 0, depth = 0, max_iters = 0;
    double tol = 0;
    std::uint64_t seed = 0;
    bool dump = false;
    auto* o_config = app.add_option("--config", config_path, "flat JSON config file");
    auto* o_out = app.add_option("--out", out, "output directory");
    auto* o_n1 = app.add_option("--n1", n1, "truncation order of phi");
    auto* o_n2 = app.add_option("--n2", n2, "truncation order of psi");
    auto* o_tol = app.add_option("--tol", tol, "Newton step tolerance");
    auto* o_seed = app.add_option("--seed", seed, "random seed");
    auto* o_workers = app.add_option("--workers", workers, "worker threads");
    auto* o_level = app.add_option("--level", level, "partition level");
    auto* o_depth = app.add_option("--depth", depth, "arc depth");
    auto* o_iters = app.add_option("--max-iters", max_iters, "total iteration budget");
    auto* o_dump = app.add_flag("--dump-steps", dump, "write one JSON per iteration");
    for (auto* o : {o_config, o_out, o_n1, o_n2, o_tol, o_seed, o_workers, o_level, o_depth, o_iters, o_dump})
        o->configurable(false);

    std::map<std::string, int (*)(const RunConfig&)> cmds = {
        {"fixpoint", cmd_fixpoint}, {"spectrum", cmd_spectrum}, {"certify", cmd_certify},
        {"cones", cmd_cones},       {"partition", cmd_partition}, {"arc", cmd_arc},
        {"twod-check", cmd_twod},   {"export-domains", cmd_export_domains}};
    app.fallthrough();
    for (auto& [name, fn] : cmds) app.add_subcommand(name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : failure;
    }

    try {
        RunConfig c;
        if (o_config->count()) {
            std::ifstream f(config_path);
            if (!f) throw MissingInput("missing config file: " + config_path);
            c = config_from(json::parse(f));
        }
        if (o_out->count()) c.out = out;
        if (const char* env = std::getenv("SIEGEL_RENORM_OUT")) c.out = env;
        if (o_n1->count()) c.n1 = n1;
        if (o_n2->count()) c.n2 = n2;
        if (o_tol->count()) c.tol = tol;
        if (o_seed->count()) c.seed = seed;
        if (o_workers->count()) c.workers = workers;
        if (o_level->count()) c.level = level;
        if (o_depth->count()) c.depth = depth;
        if (o_iters->count()) c.max_iters = max_iters;
        if (o_dump->count()) c.dump_steps = dump;
        c.validate();
        return cmds.at(app.get_subcommands().front()->get_name())(c);
    } catch (const MissingInput& e) {
        std::cerr << e.what() << "\n";
        return missing_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return failure;
    }
}
