// One PASS/FAIL line per acceptance criterion. The exit status is nonzero when
// a criterion fails that is not listed in known_failures below.

#include "mrecon/baselines.hpp"
#include "mrecon/bounds.hpp"
#include "mrecon/embedding.hpp"
#include "mrecon/errors.hpp"
#include "mrecon/experiment.hpp"
#include "mrecon/sdp.hpp"
#include "mrecon/topology.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>

using namespace mrecon;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

// The snowflake constant: with a_j = sqrt(2)/j the limit curve satisfies
// |g(t) - g(s)| = sqrt(pi |t - s|), half of 2 sqrt(pi) |t - s|^(1/2). Both
// halves of that criterion cannot hold at once; the coefficient half passes.
const std::set<std::string> known_failures = {"snowflake"};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

struct Corpus {
    std::string name;
    DistanceMatrix d;
    double eps, c2, t_ref;
};

std::vector<Corpus> load_corpus()
{
    std::ifstream in(MRECON_CORPUS);
    if (!in)
        throw InvalidArgument("cannot open " MRECON_CORPUS);
    const nlohmann::json j = nlohmann::json::parse(in);
    std::vector<Corpus> out;
    for (const auto& c : j.at("instances")) {
        const auto& rows = c.at("d");
        const Index k = static_cast<Index>(rows.size());
        Eigen::MatrixXd d(k, k);
        for (Index i = 0; i < k; ++i)
            for (Index m = 0; m < k; ++m)
                d(i, m) = rows[i][m].get<double>();
        out.push_back({c.at("name"), DistanceMatrix(d), c.at("eps"), c.at("c2"), c.at("t_ref")});
    }
    return out;
}

SdpProblem build(const Corpus& c, double scale = 1.0, double eps_factor = 1.0)
{
    BuildOptions o;
    o.allow_c2_override = c.c2 > 1.0;
    return build_problem(DistanceMatrix(scale * c.d.d), scale * c.eps * eps_factor, c.c2, o);
}

ExperimentReport run_preset(const std::string& name, std::optional<std::uint64_t> seed = {})
{
    ExperimentConfig c = preset(name);
    if (seed)
        c.seed = c.solver.seed = *seed;
    return run_experiment(c);
}

Outcome segment()
{
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentReport r = run_preset("segment-paper");
    const double s = seconds_since(t0);
    return {r.err <= 5e-3 && s <= 120, fmt("Err %.3g (<= 5e-3), %.1f s (<= 120 s)", r.err, s)};
}

Outcome sphere()
{
    const ExperimentReport grid = run_preset("sphere-grid-paper");
    const bool grid_ok = grid.err >= 0.03 && grid.err <= 0.25;
    int in_band = 0;
    std::string errs;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const double e = run_preset("sphere-uniform-paper", seed).err;
        in_band += e >= 0.03 && e <= 0.30;
        errs += (errs.empty() ? "" : " ") + fmt("%.3f", e);
    }
    return {grid_ok && in_band >= 3,
            fmt("grid Err %.3f in [0.03, 0.25]; uniform seeds 1-5: ", grid.err) + errs +
                fmt(", %g of 5 in [0.03, 0.30]", in_band)};
}

Outcome swiss()
{
    const double e = run_preset("swissroll-euclidean-paper").err;
    const double g = run_preset("swissroll-geodesic-paper").err;
    return {e >= 0.1 && e <= 0.6 && g >= 0.1 && g <= 0.45,
            fmt("euclidean input Err %.3f in [0.1, 0.6]; exact geodesics Err %.3f in [0.1, 0.45]", e, g)};
}

Outcome oracle()
{
    const std::vector<Corpus> corpus = load_corpus();
    double worst = 0.0;
    double t99 = -1.0;
    for (const Corpus& c : corpus) {
        const SdpSolution s = solve(build(c));
        worst = std::max(worst, std::abs(s.t_star - c.t_ref));
        if (c.c2 > 1.0)
            t99 = s.t_star;
    }
    return {corpus.size() == 20 && worst <= 1e-4 && std::abs(t99 - 99) <= 1e-4,
            fmt("%g instances, max |t* - t_ref| = %.2e (<= 1e-4); override triangle t* = %.6f",
                static_cast<double>(corpus.size()), worst, t99)};
}

Outcome certificates()
{
    const SolverConfig cfg;
    int uncertified = 0, non_monotone = 0, scale_off = 0;
    double worst_scale = 0.0;
    for (const Corpus& c : load_corpus()) {
        const SdpProblem p = build(c);
        const SdpSolution s = solve(p, cfg);
        const Certificate cert = certify(p, s);
        if (!s.converged || cert.psd_residual > cfg.tol || cert.interval_violation > cfg.tol ||
            cert.lower_violation > cfg.tol)
            ++uncertified;
        if (solve(build(c, 1.0, 1.5), cfg).t_star < s.t_star - 10 * cfg.tol)
            ++non_monotone;
        for (double scale : {0.01, 3.7}) {
            const double dt = std::abs(solve(build(c, scale), cfg).t_star - s.t_star);
            worst_scale = std::max(worst_scale, dt);
            scale_off += dt > 10 * cfg.tol;
        }
    }
    return {uncertified == 0 && non_monotone == 0 && scale_off == 0,
            fmt("uncertified %g, eps-monotonicity breaks %g, scale breaks %g (max |dt| %.1e)", uncertified,
                non_monotone, scale_off, worst_scale)};
}

Outcome distortion()
{
    const Sample c = gen_circle(100);
    const double eps = 0.5;
    const ReachConstants consts = make_constants(1.0, pi);
    const SolverConfig cfg;
    const bool in_regime = eps <= std::min(consts.alpha, 1 / (consts.c1 + 1));
    const SdpProblem p = build_problem(c.dist, eps, consts.c2);
    const SdpSolution s = solve(p, cfg);
    const bool certified = s.converged && certify(p, s).passes(cfg.tol);
    const GramPoints g = gram_to_points(s.gram, 100);
    const DistortionAudit a = distortion_audit(g.points, c.dist, eps, consts);
    const double witness = 1 - std::sin(eps / 2) / (eps / 2);
    const double dist = a.local_max_distortion;
    return {in_regime && certified && dist <= 3 * consts.c1 * eps && dist <= witness + 10 * cfg.tol,
            fmt("local distortion %.5f <= 3 C1 eps = %.4f and <= witness %.5f; certified %g", dist,
                3 * consts.c1 * eps, witness, certified)};
}

Outcome snowflake()
{
    const auto t0 = std::chrono::steady_clock::now();
    const int N = 200;
    double worst_a = 0.0;
    for (const CircleCoefficient& a : mds_circle_coefficients(N, 5))
        worst_a = std::max(worst_a, std::abs(a.amplitude - std::sqrt(2.0) / a.frequency));

    const MdsResult m = classical_mds(gen_circle(N).dist, 40);
    const DistanceMatrix e = euclidean_distances(m.points);
    double worst_rel = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j) {
            const double t = 2 * pi * i / N, s = 2 * pi * j / N;
            const double u = std::min(s - t, 2 * pi - (s - t));
            if (u < 8 * pi / N - 1e-12)
                continue;
            const double want = snowflake_distance(0.0, u);
            worst_rel = std::max(worst_rel, std::abs(e(i, j) - want) / want);
        }
    const double secs = seconds_since(t0);
    return {worst_a <= 0.05 && worst_rel <= 0.1 && secs <= 60,
            fmt("max |a_j - sqrt2/j| = %.4f (<= 0.05); max rel. gap to 2 sqrt(pi) |t-s|^1/2 = %.3f (<= 0.1); "
                "%.1f s",
                worst_a, worst_rel, secs)};
}

Outcome mvu()
{
    const Sample c = gen_circle(12);
    const double h = 2 * pi / 12;
    const MvuReport two = mvu_embed(c.dist, 2 * h + 1e-9, 1e-6).report;
    const MvuReport one = mvu_embed(c.dist, h + 1e-9, 1e-6).report;
    return {two.max_residual > 1e-3 && one.max_residual <= 1e-6,
            fmt("two-hop residual %.3g (> 1e-3); one-hop residual %.2g (<= 1e-6)", two.max_residual,
                one.max_residual)};
}

PointCloud rows(const PointCloud& p, const std::vector<int>& idx)
{
    Eigen::MatrixXd x(static_cast<Index>(idx.size()), p.dim());
    for (std::size_t i = 0; i < idx.size(); ++i)
        x.row(static_cast<Index>(i)) = p.coords.row(idx[i]);
    return PointCloud(x);
}

DistanceMatrix fibonacci_sphere_arcs(int k)
{
    const double golden = pi * (3 - std::sqrt(5.0));
    std::vector<Eigen::Vector3d> x(k);
    for (int i = 0; i < k; ++i) {
        const double z = 1 - (2 * i + 1.0) / k;
        const double r = std::sqrt(1 - z * z);
        x[i] = {r * std::cos(golden * i), r * std::sin(golden * i), z};
    }
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            d(i, j) = d(j, i) = std::atan2(x[i].cross(x[j]).norm(), x[i].dot(x[j]));
    return DistanceMatrix(d);
}

SimplicialComplex complex_of(int vertices, const std::vector<std::vector<int>>& simplices, int p_max)
{
    SimplicialComplex c;
    c.vertex_count = vertices;
    c.p_max = p_max;
    c.by_dim.assign(p_max + 1, {});
    for (int v = 0; v < vertices; ++v)
        c.by_dim[0].push_back({{v}, 0.0});
    for (const auto& s : simplices)
        c.by_dim[s.size() - 1].push_back({s, 0.0});
    return c;
}

Outcome topology()
{
    const auto t0 = std::chrono::steady_clock::now();
    const ReachConstants round = make_constants(1.0, pi);
    ReachConstants flat = make_constants(1.0, 1.0);
    flat.c2 = 2 / pi;
    const std::vector<long> circle = recover_betti(gen_circle(60).dist, 20, 0.22, 0.4, round, 2).betti;
    const std::vector<long> segment = recover_betti(gen_segment(50).dist, 10, 0.22, 0.4, flat, 2).betti;
    const std::vector<long> sphere = recover_betti(fibonacci_sphere_arcs(160), 160, 0.22, 0.4, round, 3).betti;
    const bool betti_ok = circle == std::vector<long>{1, 1} && segment == std::vector<long>{1, 0} &&
                          sphere == std::vector<long>{1, 0, 1};

    const Sample c = gen_circle(60);
    RecoveryOptions o;
    o.landmark_count = 30;
    o.sigma = 0.22;
    o.eps = 0.6;
    o.p_max = 2;
    const Recovery r = recover_topology(c.dist, round, o);
    const PointCloud on_m = rows(c.cloud, r.landmarks.indices);
    const PointCloud on_s = rows(r.recovered, r.landmarks.indices);
    const bool certified = sandwich_check(on_m, on_s, o.sigma, round, 2).pass();
    const bool caught = !sandwich_check(on_m, PointCloud(3.0 * on_s.coords), o.sigma, round, 2).pass();

    const bool fixtures =
        betti(complex_of(3, {{0, 1}, {0, 2}, {1, 2}}, 2)).betti == std::vector<long>{1, 1} &&
        betti(complex_of(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}, {0, 1, 2}, {0, 1, 3}, {0, 2, 3},
                             {1, 2, 3}},
                         3))
                .betti == std::vector<long>{1, 0, 1};

    double worst_trip = 0.0;
    for (const ReachConstants& k : {round, make_constants(0.2, 9.0), make_constants(30.0, 1.0)})
        for (double s = 1e-6; s <= 1e3; s *= 1.7) {
            worst_trip = std::max(worst_trip, std::abs(sigma_prime(sigma_double_prime(s, k), k) - s) / s);
            worst_trip = std::max(worst_trip, std::abs(sigma_double_prime(sigma_prime(s, k), k) - s) / s);
        }
    const double secs = seconds_since(t0);
    auto str = [](const std::vector<long>& b) {
        std::string s = "(";
        for (std::size_t i = 0; i < b.size(); ++i)
            s += (i ? "," : "") + std::to_string(b[i]);
        return s + ")";
    };
    return {betti_ok && certified && caught && fixtures && worst_trip <= 1e-12 && secs <= 300,
            "circle " + str(circle) + ", sphere " + str(sphere) + ", segment " + str(segment) +
                fmt("; sandwich certified %g, x3 detected %g; fixtures %g", certified, caught, fixtures) +
                fmt("; round trip %.1e; %.1f s", worst_trip, secs)};
}

Outcome chord_arc()
{
    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> n01;
    const int pairs = 10000;
    Eigen::MatrixXd p(2 * pairs, 3);
    for (Index i = 0; i < p.rows(); ++i) {
        Eigen::Vector3d v(n01(rng), n01(rng), n01(rng));
        p.row(i) = v.normalized();
    }
    const ReachConstants c = make_constants(1.0, pi);
    long violations = 0;
    for (int q = 0; q < pairs; ++q) {
        const Eigen::Vector3d u = p.row(2 * q), v = p.row(2 * q + 1);
        const double ang = std::atan2(u.cross(v).norm(), u.dot(v));
        Eigen::MatrixXd x(2, 3);
        x << u.transpose(), v.transpose();
        Eigen::MatrixXd d(2, 2);
        d << 0, ang, ang, 0;
        violations += verify_chord_arc(PointCloud(x), DistanceMatrix(d), c).violations;
    }
    return {violations == 0, fmt("%g random unit-sphere pairs, %g violations", pairs, violations)};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"segment", segment},       {"sphere", sphere},         {"swiss-roll", swiss},
        {"oracle", oracle},         {"certificates", certificates}, {"distortion", distortion},
        {"snowflake", snowflake},   {"mvu", mvu},               {"topology", topology},
        {"chord-arc", chord_arc},
    };
    int unexpected = 0, known = 0;
    for (const auto& [name, run] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const bool expected = known_failures.count(name) > 0;
        std::string tag;
        if (!o.pass)
            (expected ? ++known : ++unexpected);
        if (!o.pass && expected)
            tag = " [known: inconsistent constant]";
        std::printf("%s %-13s %s (%.1f s)%s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
                    seconds_since(t0), tag.c_str());
        std::fflush(stdout);
    }
    std::printf("%d unexpected failure(s), %d known\n", unexpected, known);
    return unexpected == 0 ? 0 : 1;
}
