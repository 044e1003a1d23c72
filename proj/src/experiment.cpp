#include "mrecon/experiment.hpp"

#include "mrecon/baselines.hpp"
#include "mrecon/errors.hpp"
#include "mrecon/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <numbers>
#include <sstream>

namespace mrecon {

namespace fs = std::filesystem;

double ExperimentConfig::resolved_c2() const
{
    return c2 > 0.0 ? c2 : 2.0 / std::numbers::pi;
}

std::string to_string(Dataset d)
{
    switch (d) {
    case Dataset::Segment: return "segment";
    case Dataset::Circle: return "circle";
    case Dataset::SphereGrid: return "sphere-grid";
    case Dataset::SphereUniform: return "sphere-uniform";
    case Dataset::SwissRoll: return "swiss-roll";
    }
    return "?";
}

std::string to_string(DistanceSource s)
{
    switch (s) {
    case DistanceSource::Exact: return "exact";
    case DistanceSource::Graph: return "graph";
    case DistanceSource::Euclidean: return "euclidean";
    }
    return "?";
}

std::string to_string(MetricKind m)
{
    return m == MetricKind::Graph ? "graph" : "euclidean";
}

namespace {

std::string normalize_key(std::string key)
{
    while (!key.empty() && key.front() == '-')
        key.erase(key.begin());
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

double to_double(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size())
        throw InvalidArgument("bad number for " + key + ": '" + v + "'");
    return x;
}

long long to_integer(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    long long x = 0;
    try {
        x = std::stoll(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size())
        throw InvalidArgument("bad integer for " + key + ": '" + v + "'");
    return x;
}

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

void apply_setting(ExperimentConfig& cfg, const std::string& raw_key, const std::string& value)
{
    const std::string key = normalize_key(raw_key);
    if (key == "dataset") {
        if (value == "segment") cfg.dataset = Dataset::Segment;
        else if (value == "circle") cfg.dataset = Dataset::Circle;
        else if (value == "sphere-grid") cfg.dataset = Dataset::SphereGrid;
        else if (value == "sphere-uniform") cfg.dataset = Dataset::SphereUniform;
        else if (value == "swiss-roll") cfg.dataset = Dataset::SwissRoll;
        else throw InvalidArgument("unknown dataset '" + value + "'");
    } else if (key == "k") {
        cfg.k = static_cast<int>(to_integer(key, value));
    } else if (key == "eps") {
        cfg.eps = to_double(key, value);
    } else if (key == "n") {
        cfg.n = static_cast<int>(to_integer(key, value));
    } else if (key == "c2") {
        cfg.c2 = to_double(key, value);
    } else if (key == "seed") {
        const long long s = to_integer(key, value);
        if (s < 0)
            throw InvalidArgument("seed must be nonnegative");
        cfg.seed = static_cast<std::uint64_t>(s);
        cfg.solver.seed = cfg.seed;
    } else if (key == "tol") {
        cfg.solver.tol = to_double(key, value);
    } else if (key == "max-iter") {
        cfg.solver.max_iter = static_cast<int>(to_integer(key, value));
    } else if (key == "lower-rows-per-round") {
        cfg.solver.lower_rows_per_round = static_cast<int>(to_integer(key, value));
    } else if (key == "distance-source") {
        if (value == "exact") cfg.distance_source = DistanceSource::Exact;
        else if (value == "graph") cfg.distance_source = DistanceSource::Graph;
        else if (value == "euclidean") cfg.distance_source = DistanceSource::Euclidean;
        else throw InvalidArgument("unknown distance source '" + value + "'");
    } else if (key == "recovered-metric") {
        if (value == "euclidean") cfg.recovered_metric = MetricKind::Euclidean;
        else if (value == "graph") cfg.recovered_metric = MetricKind::Graph;
        else throw InvalidArgument("unknown recovered metric '" + value + "'");
    } else if (key == "graph-eps") {
        cfg.graph_eps = to_double(key, value);
    } else if (key == "out" || key == "output-dir") {
        cfg.output_dir = value;
    } else if (key == "name" || key == "preset") {
        if (key == "preset") {
            const std::string out = cfg.output_dir;
            cfg = preset(value);
            cfg.output_dir = out;
        } else {
            cfg.name = value;
        }
    } else {
        throw InvalidArgument("unknown setting '" + raw_key + "'");
    }
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base)
{
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key=value");
        apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

void validate(const ExperimentConfig& cfg)
{
    if (cfg.k < 2)
        throw InvalidArgument("k must be at least 2");
    if (!(cfg.eps > 0.0))
        throw InvalidArgument("eps must be positive");
    if (cfg.n < 1 || cfg.n > cfg.k)
        throw InvalidArgument("n must lie in [1, k]");
    if (cfg.c2 < 0.0 || cfg.c2 > 1.0)
        throw InvalidArgument("c2 must lie in (0, 1]");
    if (cfg.graph_eps && !(*cfg.graph_eps > 0.0))
        throw InvalidArgument("graph-eps must be positive");
    if (!(cfg.solver.tol > 0.0) || cfg.solver.max_iter < 1)
        throw InvalidArgument("tol and max-iter must be positive");
    if (cfg.solver.lower_rows_per_round < 0)
        throw InvalidArgument("lower-rows-per-round must be nonnegative");
    if (cfg.dataset == Dataset::Circle && cfg.k < 3)
        throw InvalidArgument("circle needs k >= 3");
    if (cfg.dataset == Dataset::SwissRoll && cfg.distance_source == DistanceSource::Exact &&
        cfg.k < 2)
        throw InvalidArgument("swiss roll needs k >= 2");
}

std::vector<std::string> preset_names()
{
    return {"segment-paper", "sphere-grid-paper", "sphere-uniform-paper",
            "swissroll-euclidean-paper", "swissroll-geodesic-paper", "circle-100"};
}

ExperimentConfig preset(const std::string& name)
{
    ExperimentConfig c;
    c.name = name;
    if (name == "segment-paper") {
        c.dataset = Dataset::Segment;
        c.k = 100;
        c.eps = 0.2;
        c.n = 2;
    } else if (name == "sphere-grid-paper" || name == "sphere-uniform-paper") {
        c.dataset = name == "sphere-grid-paper" ? Dataset::SphereGrid : Dataset::SphereUniform;
        c.k = 100;
        c.eps = 0.6;
        c.n = 3;
        c.recovered_metric = MetricKind::Graph;
        if (c.dataset == Dataset::SphereUniform)
            c.seed = c.solver.seed = 1;
    } else if (name == "swissroll-euclidean-paper") {
        c.dataset = Dataset::SwissRoll;
        c.k = 100;
        c.eps = 3.0;
        c.n = 3;
        c.distance_source = DistanceSource::Euclidean;
    } else if (name == "swissroll-geodesic-paper") {
        c.dataset = Dataset::SwissRoll;
        c.k = 100;
        c.eps = 3.0;
        c.n = 2;
    } else if (name == "circle-100") {
        c.dataset = Dataset::Circle;
        c.k = 100;
        c.eps = 0.5;
        c.n = 2;
    } else {
        throw InvalidArgument("unknown preset '" + name + "'");
    }
    return c;
}

std::optional<double> published_err(const std::string& name)
{
    if (name == "segment-paper") return 9e-4;
    if (name == "sphere-grid-paper") return 0.13;
    if (name == "sphere-uniform-paper") return 0.16;
    if (name == "swissroll-euclidean-paper") return 0.4;
    if (name == "swissroll-geodesic-paper") return 0.28;
    return std::nullopt;
}

Instance make_instance(const ExperimentConfig& cfg)
{
    Instance ins;
    double alpha = 1.0, diameter = std::numbers::pi;
    switch (cfg.dataset) {
    case Dataset::Segment:
        ins.sample = gen_segment(cfg.k);
        alpha = std::numeric_limits<double>::infinity(); // convex, unbounded reach
        diameter = 1.0;
        break;
    case Dataset::Circle:
        ins.sample = gen_circle(cfg.k);
        break;
    case Dataset::SphereGrid:
        ins.sample = gen_sphere(cfg.k, SphereMode::Grid, cfg.seed);
        break;
    case Dataset::SphereUniform:
        ins.sample = gen_sphere(cfg.k, SphereMode::Uniform, cfg.seed);
        break;
    case Dataset::SwissRoll: {
        const SwissRoll roll = gen_swiss_roll(cfg.k, cfg.seed);
        ins.sample.cloud = roll.cloud;
        ins.sample.dist = swiss_roll_geodesics(roll);
        // successive turns of the spiral sit 2*pi apart
        alpha = std::numbers::pi;
        diameter = ins.sample.dist.d.maxCoeff();
        break;
    }
    }
    switch (cfg.distance_source) {
    case DistanceSource::Exact:
        ins.input = ins.sample.dist;
        break;
    case DistanceSource::Graph:
        ins.input = graph_geodesics(ins.sample.cloud, NeighborRule::by_radius(cfg.resolved_graph_eps()));
        break;
    case DistanceSource::Euclidean:
        ins.input = euclidean_distances(ins.sample.cloud);
        break;
    }
    ins.consts = make_constants(alpha, diameter);
    ins.consts.c2 = cfg.resolved_c2();
    return ins;
}

namespace {

nlohmann::json num_or_null(double v)
{
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json config_json(const ExperimentConfig& c)
{
    nlohmann::json j;
    j["name"] = c.name;
    j["dataset"] = to_string(c.dataset);
    j["k"] = c.k;
    j["eps"] = c.eps;
    j["n"] = c.n;
    j["c2"] = c.resolved_c2();
    j["distance_source"] = to_string(c.distance_source);
    j["recovered_metric"] = to_string(c.recovered_metric);
    j["graph_eps"] = c.resolved_graph_eps();
    j["seed"] = c.seed;
    j["solver"] = {{"tol", c.solver.tol},
                   {"max_iter", c.solver.max_iter},
                   {"seed", c.solver.seed},
                   {"lower_rows_per_round", c.solver.lower_rows_per_round},
                   {"warm_start", c.solver.warm_start.has_value()}};
    return j;
}

void mark_failed(const ExperimentConfig& cfg, const std::string& stage, const std::string& what)
{
    if (cfg.output_dir.empty())
        return;
    try {
        fs::create_directories(cfg.output_dir);
        write_file((fs::path(cfg.output_dir) / "FAILED").string(), stage + ": " + what + "\n");
    } catch (const std::exception&) {
        // the original failure is more useful than this one
    }
}

template <class F>
auto stage(const ExperimentConfig& cfg, const std::string& name, F&& f)
{
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        mark_failed(cfg, name, e.what());
        throw StageError(name, e.what());
    }
}

} // namespace

std::string ExperimentReport::to_json() const
{
    nlohmann::json j;
    j["config"] = config_json(config);
    j["eps_pairs"] = eps_pairs;
    j["t_star"] = solution.t_star;
    j["converged"] = solution.converged;
    j["iterations"] = solution.iterations;
    j["certificate"] = {{"min_eigenvalue", certificate.min_eigenvalue},
                        {"psd_residual", certificate.psd_residual},
                        {"interval_violation", certificate.interval_violation},
                        {"lower_violation", certificate.lower_violation},
                        {"achieved_objective", certificate.achieved_objective},
                        {"min_lower_ratio", certificate.min_lower_ratio},
                        {"passes", certificate.passes(config.solver.tol)}};
    nlohmann::json emb;
    emb["err"] = num_or_null(err);
    emb["err_full_rank"] = num_or_null(err_full_rank);
    emb["local_max_distortion"] = audit.local_max_distortion;
    emb["geodesic_max_distortion"] =
        audit.geodesic_max_distortion ? num_or_null(*audit.geodesic_max_distortion) : nullptr;
    emb["rank_dropped_mass"] = num_or_null(rank_dropped_mass);
    j["embedding"] = emb;
    j["audit"] = {{"local_max_distortion", audit.local_max_distortion},
                  {"theorem_band", audit.theorem_band},
                  {"tight_band", audit.tight_band},
                  {"within_theorem_band", audit.within_theorem_band},
                  {"within_tight_band", audit.within_tight_band},
                  {"min_ratio", num_or_null(audit.min_ratio)},
                  {"lower_bound_ok", audit.lower_bound_ok},
                  {"geodesic_within_band",
                   audit.geodesic_within_band ? nlohmann::json(*audit.geodesic_within_band)
                                              : nlohmann::json(nullptr)}};
    j["eps_regime"] = {{"limit", num_or_null(eps_limit)}, {"satisfied", eps_in_regime}};
    return j.dump(2) + "\n";
}

ExperimentReport run_experiment(const ExperimentConfig& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    stage(cfg, "config", [&] {
        validate(cfg);
        return 0;
    });
    ExperimentReport rep;
    rep.config = cfg;
    const fs::path out(cfg.output_dir);
    const bool write = !cfg.output_dir.empty();
    if (write)
        stage(cfg, "output", [&] {
            fs::create_directories(out);
            fs::remove(out / "FAILED");
            return 0;
        });

    const Instance ins = stage(cfg, "generate", [&] { return make_instance(cfg); });
    if (write)
        stage(cfg, "write", [&] {
            write_points_csv((out / "points.csv").string(), ins.sample.cloud);
            write_distances_csv((out / "distances.csv").string(), ins.input);
            return 0;
        });

    const SdpProblem prob =
        stage(cfg, "build_problem", [&] { return build_problem(ins.input, cfg.eps, cfg.resolved_c2()); });
    rep.eps_pairs = static_cast<int>(prob.eps_pairs.size());
    rep.solution = stage(cfg, "solve", [&] { return solve(prob, cfg.solver); });
    rep.certificate = certify(prob, rep.solution);

    const GramPoints gp = stage(cfg, "gram_to_points", [&] { return gram_to_points(rep.solution.gram, cfg.n); });
    const GramPoints full = gram_to_points(rep.solution.gram, cfg.k);
    rep.recovered = gp.points;
    rep.rank_dropped_mass = gp.rank_dropped_mass;

    const RecoveredMetric metric =
        cfg.recovered_metric == MetricKind::Graph
            ? RecoveredMetric::geodesic(NeighborRule::by_radius(cfg.resolved_graph_eps()))
            : RecoveredMetric::euclidean();
    const DistanceMatrix d_hat =
        stage(cfg, "recovered_distances", [&] { return recovered_distances(gp.points, metric); });
    rep.err = stage(cfg, "err_metric", [&] { return err_metric(d_hat, ins.input); });
    try {
        rep.err_full_rank = err_metric(recovered_distances(full.points, metric), ins.input);
    } catch (const GraphDisconnected&) {
        rep.err_full_rank = std::numeric_limits<double>::quiet_NaN();
    }

    std::optional<NeighborRule> geo;
    if (cfg.recovered_metric == MetricKind::Graph)
        geo = NeighborRule::by_radius(cfg.resolved_graph_eps());
    rep.audit = distortion_audit(gp.points, ins.input, cfg.eps, ins.consts, geo);
    rep.eps_limit = std::min(ins.consts.eps0, 1.0 / (ins.consts.c1 + 1.0));
    rep.eps_in_regime = cfg.eps < rep.eps_limit;

    if (write)
        stage(cfg, "write", [&] {
            write_points_csv((out / "recovered.csv").string(), gp.points);
            write_distances_csv((out / "recovered_distances.csv").string(), d_hat);
            write_file((out / "sdp_solution.json").string(), mrecon::to_json(rep.solution) + "\n");
            write_file((out / "report.json").string(), rep.to_json());
            return 0;
        });
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::string summary_csv(const std::vector<SummaryRow>& rows)
{
    std::string out = "experiment,k,eps,n,err,paper_err,converged\n";
    char buf[64];
    for (const SummaryRow& r : rows) {
        out += r.experiment + "," + std::to_string(r.k) + "," + r.eps + "," + std::to_string(r.n) + ",";
        if (r.failed) {
            out += "FAILED";
        } else {
            std::snprintf(buf, sizeof buf, "%.6g", r.err);
            out += buf;
        }
        out += ",";
        if (r.paper_err) {
            std::snprintf(buf, sizeof buf, "%.6g", *r.paper_err);
            out += buf;
        }
        out += r.converged ? ",true\n" : ",false\n";
    }
    return out;
}

namespace {

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

ReproduceResult reproduce_all(std::uint64_t seed, const std::string& output_dir)
{
    ReproduceResult res;
    const std::vector<std::string> names = {"segment-paper", "sphere-grid-paper",
                                            "sphere-uniform-paper", "swissroll-euclidean-paper",
                                            "swissroll-geodesic-paper"};
    for (const std::string& name : names) {
        ExperimentConfig cfg = preset(name);
        // the grid is deterministic; random presets take the requested seed
        if (cfg.dataset == Dataset::SphereUniform || cfg.dataset == Dataset::SwissRoll)
            cfg.seed = cfg.solver.seed = seed;
        if (!output_dir.empty())
            cfg.output_dir = (fs::path(output_dir) / name).string();
        SummaryRow row;
        row.experiment = name;
        row.k = cfg.k;
        row.eps = fmt(cfg.eps);
        row.n = cfg.n;
        row.paper_err = published_err(name);
        try {
            const ExperimentReport rep = run_experiment(cfg);
            row.err = rep.err;
            row.converged = rep.solution.converged;
            if (!row.converged)
                res.exit_code = std::max(res.exit_code, 1);
        } catch (const Error&) {
            row.failed = true;
            res.exit_code = 1;
        }
        res.rows.push_back(row);
    }

    {
        // MDS of the circle against the snowflake limit: err is the worst
        // coefficient deviation from sqrt(2)/j over j = 1, 3, 5
        SummaryRow row;
        row.experiment = "snowflake-mds";
        row.k = 200;
        row.n = 40;
        try {
            const auto coef = mds_circle_coefficients(200, 5);
            double worst = 0.0;
            for (const auto& c : coef)
                worst = std::max(worst, std::abs(c.amplitude - std::sqrt(2.0) / c.frequency));
            row.err = worst;
            row.converged = worst <= 0.05;
        } catch (const Error&) {
            row.failed = true;
            res.exit_code = 1;
        }
        res.rows.push_back(row);
    }
    {
        // MVU on 12 circle points: feasible with one-hop constraints, infeasible
        // with two-hop ones; err is the two-hop residual
        SummaryRow row;
        row.experiment = "mvu-circle";
        row.k = 12;
        const double step = 2.0 * std::numbers::pi / 12.0;
        row.eps = fmt(2.0 * step + 1e-9);
        row.n = 2;
        try {
            const Sample c = gen_circle(12);
            const MvuResult one = mvu_embed(c.dist, step + 1e-9, 1e-6);
            const MvuResult two = mvu_embed(c.dist, 2.0 * step + 1e-9, 1e-6);
            row.err = two.report.max_residual;
            row.converged = one.report.feasible && two.report.max_residual > 1e-3;
        } catch (const Error&) {
            row.failed = true;
            res.exit_code = 1;
        }
        res.rows.push_back(row);
    }
    if (!output_dir.empty()) {
        fs::create_directories(output_dir);
        write_file((fs::path(output_dir) / "summary.csv").string(), summary_csv(res.rows));
    }
    return res;
}

} // namespace mrecon
