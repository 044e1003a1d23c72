#include "mrecon/baselines.hpp"
#include "mrecon/bounds.hpp"
#include "mrecon/embedding.hpp"
#include "mrecon/errors.hpp"
#include "mrecon/experiment.hpp"
#include "mrecon/io.hpp"
#include "mrecon/topology.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>

using namespace mrecon;
namespace fs = std::filesystem;

namespace {

void emit(const std::string& text, const std::string& path)
{
    if (path.empty())
        std::cout << text;
    else
        write_file(path, text);
}

nlohmann::json betti_json(const BettiVector& b)
{
    return {{"betti", b.betti}, {"field", b.field}};
}

// Bad settings are usage errors: exit 2 before any work starts.
template <class F>
int usage_guard(F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Manifold reconstruction from intrinsic distances"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "sample a dataset; print points and exact distances");
    ExperimentConfig gen_cfg;
    std::string gen_dataset = "segment", gen_out;
    gen->add_option("--dataset", gen_dataset, "segment|circle|sphere-grid|sphere-uniform|swiss-roll");
    gen->add_option("--k", gen_cfg.k, "sample size");
    gen->add_option("--seed", gen_cfg.seed, "random seed");
    gen->add_option("--out", gen_out, "directory for points.csv and distances.csv");

    // distances
    auto* dist = app.add_subcommand("distances", "distance matrix of a point CSV");
    std::string dist_points, dist_mode = "euclidean", dist_out;
    double dist_eps = 0.0;
    dist->add_option("--points", dist_points, "points CSV")->required();
    dist->add_option("--mode", dist_mode, "euclidean|graph")->check(CLI::IsMember({"euclidean", "graph"}));
    dist->add_option("--eps", dist_eps, "graph radius");
    dist->add_option("--out", dist_out, "output CSV (default stdout)");

    // embed
    auto* emb = app.add_subcommand("embed", "run the reconstruction pipeline");
    std::map<std::string, std::string> flags;
    std::string emb_config, emb_preset;
    bool dump_sdp = false;
    emb->add_option("--config", emb_config, "key=value file");
    emb->add_option("--preset", emb_preset, "named preset")
        ->check(CLI::IsMember(preset_names()));
    for (const char* f : {"dataset", "k", "eps", "n", "c2", "seed", "tol", "max-iter", "distance-source",
                          "recovered-metric", "graph-eps", "lower-rows-per-round", "out"})
        emb->add_option(std::string("--") + f, flags[f]);
    emb->add_flag("--dump-sdp", dump_sdp, "also write sdp_problem.json");

    // mds
    auto* mds = app.add_subcommand("mds", "classical multidimensional scaling");
    std::string mds_in, mds_out;
    int mds_r = 2;
    mds->add_option("--distances", mds_in, "distance CSV")->required();
    mds->add_option("--r-max", mds_r, "largest embedding dimension");
    mds->add_option("--out", mds_out, "points CSV (default stdout)");

    // mvu
    auto* mvu = app.add_subcommand("mvu", "maximum variance unfolding");
    std::string mvu_in, mvu_out;
    double mvu_eps = 0.0, mvu_tol = 1e-6;
    mvu->add_option("--distances", mvu_in, "distance CSV")->required();
    mvu->add_option("--eps", mvu_eps, "constraint radius")->required();
    mvu->add_option("--tol", mvu_tol, "feasibility tolerance");
    mvu->add_option("--out", mvu_out, "points CSV; the report goes to stdout");

    // cech
    auto* cech = app.add_subcommand("cech", "Cech complex Betti numbers and sandwich check");
    std::string cech_points, cech_manifold;
    double cech_sigma = 0.0, cech_alpha = 1.0, cech_diam = 0.0;
    int cech_pmax = 3;
    cech->add_option("--points", cech_points, "landmarks of the recovered cloud")->required();
    cech->add_option("--manifold", cech_manifold, "the same landmarks on the manifold");
    cech->add_option("--sigma", cech_sigma, "Cech radius")->required();
    cech->add_option("--p-max", cech_pmax, "dimension cap");
    cech->add_option("--alpha", cech_alpha, "reach (for the sandwich radii)");
    cech->add_option("--diameter", cech_diam, "intrinsic diameter (for the sandwich radii)");

    // constants
    auto* cst = app.add_subcommand("constants", "reach-derived constants");
    double c_alpha = 1.0, c_diam = 1.0, c_sigma = 0.0, c_eps = 0.0;
    cst->add_option("--alpha", c_alpha, "reach")->required();
    cst->add_option("--diameter", c_diam, "intrinsic diameter")->required();
    cst->add_option("--sigma", c_sigma, "Cech radius to check");
    cst->add_option("--eps", c_eps, "SDP radius for the radius check");

    // reproduce-all
    auto* rep = app.add_subcommand("reproduce-all", "all presets plus the two baseline demos");
    std::uint64_t rep_seed = 0;
    std::string rep_out = "runs";
    rep->add_option("--seed", rep_seed, "seed for the random presets");
    rep->add_option("--out", rep_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*gen) {
            if (const int rc = usage_guard([&] {
                    apply_setting(gen_cfg, "dataset", gen_dataset);
                    gen_cfg.n = 1;
                    validate(gen_cfg);
                }))
                return rc;
            const Instance ins = make_instance(gen_cfg);
            if (gen_out.empty()) {
                std::cout << points_to_csv(ins.sample.cloud) << "\n" << distances_to_csv(ins.sample.dist);
            } else {
                fs::create_directories(gen_out);
                write_points_csv((fs::path(gen_out) / "points.csv").string(), ins.sample.cloud);
                write_distances_csv((fs::path(gen_out) / "distances.csv").string(), ins.sample.dist);
            }
            return 0;
        }
        if (*dist) {
            const PointCloud pts = read_points_csv(dist_points);
            if (dist_mode == "graph" && !(dist_eps > 0.0))
                throw InvalidArgument("graph mode needs --eps");
            const RecoveredMetric m = dist_mode == "graph"
                                          ? RecoveredMetric::geodesic(NeighborRule::by_radius(dist_eps))
                                          : RecoveredMetric::euclidean();
            emit(distances_to_csv(recovered_distances(pts, m)), dist_out);
            return 0;
        }
        if (*emb) {
            ExperimentConfig cfg;
            if (const int rc = usage_guard([&] {
                    if (!emb_preset.empty())
                        cfg = preset(emb_preset);
                    if (!emb_config.empty())
                        cfg = parse_config(read_file(emb_config), cfg);
                    for (const auto& [key, value] : flags)
                        if (emb->count("--" + key))
                            apply_setting(cfg, key, value);
                    validate(cfg);
                }))
                return rc;
            if (dump_sdp) {
                const Instance ins = make_instance(cfg);
                const SdpProblem p = build_problem(ins.input, cfg.eps, cfg.resolved_c2());
                if (cfg.output_dir.empty()) {
                    std::cout << to_json(p) << "\n";
                } else {
                    fs::create_directories(cfg.output_dir);
                    write_file((fs::path(cfg.output_dir) / "sdp_problem.json").string(), to_json(p) + "\n");
                }
            }
            const ExperimentReport r = run_experiment(cfg);
            std::printf("%s: err=%.6g err_full_rank=%.6g t*=%.6g converged=%s psd_residual=%.2e "
                        "lower_violation=%.2e time=%.1fs\n",
                        cfg.name.c_str(), r.err, r.err_full_rank, r.solution.t_star,
                        r.solution.converged ? "yes" : "no", r.certificate.psd_residual,
                        r.certificate.lower_violation, r.seconds);
            if (!r.eps_in_regime)
                std::printf("note: eps = %g exceeds the guaranteed regime limit %g\n", cfg.eps, r.eps_limit);
            return r.solution.converged ? 0 : 1;
        }
        if (*mds) {
            const MdsResult r = classical_mds(read_distances_csv(mds_in), mds_r);
            emit(points_to_csv(r.points), mds_out);
            return 0;
        }
        if (*mvu) {
            const MvuResult r = mvu_embed(read_distances_csv(mvu_in), mvu_eps, mvu_tol);
            if (!mvu_out.empty())
                write_points_csv(mvu_out, r.points);
            nlohmann::json j = {{"max_residual", r.report.max_residual},
                                {"feasible", r.report.feasible},
                                {"variance", r.report.variance},
                                {"constraints", r.report.constraints},
                                {"iterations", r.report.iterations}};
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        if (*cech) {
            const PointCloud S = read_points_csv(cech_points);
            nlohmann::json j;
            j["betti"] = betti_json(betti(cech_complex(S, cech_sigma, cech_pmax)));
            if (!cech_manifold.empty()) {
                if (!(cech_diam > 0.0))
                    throw InvalidArgument("the sandwich check needs --diameter");
                const PointCloud M = read_points_csv(cech_manifold);
                const SandwichReport s =
                    sandwich_check(M, S, cech_sigma, make_constants(cech_alpha, cech_diam), cech_pmax);
                j["sandwich"] = {{"sigma", s.sigma},
                                 {"sigma_prime", s.sigma_prime},
                                 {"sigma_double_prime", s.sigma_double_prime},
                                 {"inner_ok", s.inner_ok},
                                 {"outer_ok", s.outer_ok},
                                 {"inner_witness", s.inner_witness},
                                 {"outer_witness", s.outer_witness},
                                 {"pass", s.pass()}};
            }
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        if (*cst) {
            const ReachConstants c = make_constants(c_alpha, c_diam);
            nlohmann::json j = {{"c1", c.c1}, {"c2", c.c2}, {"eps0", c.eps0}};
            if (c_sigma > 0.0) {
                j["sigma_prime"] = sigma_prime(c_sigma, c);
                j["sigma_double_prime"] = sigma_double_prime(c_sigma, c);
                if (c_eps > 0.0) {
                    const RadiusCheck r = cech_radius_check(c_sigma, c, c_eps);
                    j["radius_check"] = {{"margin_reach", r.margin_reach},
                                         {"margin_nerve", r.margin_nerve},
                                         {"margin_inner", r.margin_inner},
                                         {"pass", r.pass}};
                }
            }
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        if (*rep) {
            const ReproduceResult r = reproduce_all(rep_seed, rep_out);
            std::cout << summary_csv(r.rows);
            return r.exit_code;
        }
    } catch (const StageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
