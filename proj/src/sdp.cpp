#include "mrecon/sdp.hpp"

#include "mrecon/conic.hpp"
#include "mrecon/errors.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace mrecon {

std::vector<Pair> SdpProblem::all_pairs() const
{
    std::vector<Pair> out;
    out.reserve(static_cast<size_t>(k) * (k - 1) / 2);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            out.push_back({i, j});
    return out;
}

SdpProblem build_problem(const DistanceMatrix& d, double eps, double c2, const BuildOptions& opts)
{
    if (!(eps > 0.0))
        throw InvalidArgument("eps must be positive");
    if (!(c2 > 0.0) || (!opts.allow_c2_override && c2 > 1.0))
        throw InvalidArgument("c2 must lie in (0, 1]");
    validate(d);
    SdpProblem p;
    p.k = static_cast<int>(d.size());
    p.d2 = d.d.cwiseProduct(d.d);
    p.c2sq = c2 * c2;
    p.eps = eps;
    for (int i = 0; i < p.k; ++i)
        for (int j = i + 1; j < p.k; ++j)
            if (d(i, j) < eps)
                p.eps_pairs.push_back({i, j});
    if (p.eps_pairs.empty())
        throw EmptyObjective("no pair closer than eps = " + std::to_string(eps));
    return p;
}

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& s)
{
    if (s.rows() != s.cols())
        throw InvalidArgument("project_psd needs a square matrix");
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InvalidArgument("project_psd needs a symmetric matrix");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (s + s.transpose()));
    const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

namespace {

inline double sqdist(const Eigen::MatrixXd& K, int i, int j)
{
    return K(i, i) + K(j, j) - 2.0 * K(i, j);
}

} // namespace

Certificate certify(const SdpProblem& p, const SdpSolution& s)
{
    if (s.gram.rows() != p.k || s.gram.cols() != p.k)
        throw InvalidArgument("gram size does not match problem");
    const Eigen::MatrixXd& K = s.gram;
    Certificate c;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (K + K.transpose()),
                                                      Eigen::EigenvaluesOnly);
    c.min_eigenvalue = es.eigenvalues()(0);
    c.psd_residual = std::max(0.0, -c.min_eigenvalue);
    for (auto [i, j] : p.eps_pairs) {
        const double dev = std::abs(sqdist(K, i, j) / p.d2(i, j) - 1.0);
        c.achieved_objective = std::max(c.achieved_objective, dev);
        c.interval_violation = std::max(c.interval_violation, dev - s.t_star);
    }
    c.min_lower_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < p.k; ++i)
        for (int j = i + 1; j < p.k; ++j) {
            const double ratio = sqdist(K, i, j) / p.d2(i, j);
            c.min_lower_ratio = std::min(c.min_lower_ratio, ratio);
            c.lower_violation = std::max(c.lower_violation, p.c2sq - ratio);
        }
    return c;
}

SdpSolution solve(const SdpProblem& p, const SolverConfig& cfg)
{
    if (!(cfg.tol > 0.0) || cfg.max_iter < 1)
        throw InvalidArgument("solver tolerance and iteration cap must be positive");
    if (cfg.lower_rows_per_round < 0)
        throw InvalidArgument("lower_rows_per_round must be nonnegative");
    const int k = p.k;
    // relative distortion is scale free, so work with distances of size <= 1
    const double scale2 = p.d2.maxCoeff();
    const Eigen::MatrixXd d2 = p.d2 / scale2;

    std::vector<Pair> pairs = p.eps_pairs;
    std::set<Pair> lower_rows;
    if (cfg.warm_start) {
        // lower bounds the warm start leans on are likely active at the optimum
        const Eigen::MatrixXd& K0 = *cfg.warm_start;
        if (K0.rows() != k || K0.cols() != k)
            throw InvalidArgument("warm start has the wrong size");
        double lo = std::numeric_limits<double>::infinity();
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
                lo = std::min(lo, sqdist(K0, i, j) / p.d2(i, j));
        if (lo > 0.0)
            for (int i = 0; i < k; ++i)
                for (int j = i + 1; j < k; ++j)
                    if (sqdist(K0, i, j) / p.d2(i, j) < 1.5 * lo)
                        lower_rows.insert({i, j});
    }

    conic::Options opt;
    opt.tol = std::min(1e-9, 1e-3 * cfg.tol);
    opt.max_iter = std::min(cfg.max_iter, 150);
    if (cfg.warm_start) {
        opt.start = *cfg.warm_start / scale2;
    } else {
        std::vector<double> near;
        for (auto [i, j] : p.eps_pairs)
            near.push_back(d2(i, j));
        std::nth_element(near.begin(), near.begin() + near.size() / 2, near.end());
        const double xi = 0.5 * near[near.size() / 2];
        const Eigen::MatrixXd H =
            Eigen::MatrixXd::Identity(k, k) - Eigen::MatrixXd::Constant(k, k, 1.0 / k);
        opt.start = xi * H;
    }

    SdpSolution sol;
    conic::Result res;
    double merit = std::numeric_limits<double>::infinity();
    for (int round = 0; round < 60; ++round) {
        conic::Problem cp;
        cp.k = k;
        cp.trace_weight = 0.0;
        cp.t_weight = 1.0;
        std::set<Pair> in_eps(p.eps_pairs.begin(), p.eps_pairs.end());
        std::vector<Pair> plist = p.eps_pairs;
        for (const Pair& q : lower_rows)
            if (!in_eps.count(q))
                plist.push_back(q);
        cp.pairs = plist;
        for (int q = 0; q < static_cast<int>(plist.size()); ++q) {
            const auto [i, j] = plist[q];
            const double dd = d2(i, j);
            if (in_eps.count(plist[q])) {
                // rows divided by d² so residuals are relative distortions
                cp.rows.push_back({q, 1.0 / dd, +1, -1.0, 1.0});
                cp.rows.push_back({q, 1.0 / dd, -1, +1.0, 1.0});
            }
            if (lower_rows.count(plist[q]))
                cp.rows.push_back({q, 1.0 / dd, -1, 0.0, p.c2sq});
        }
        res = conic::solve(cp, opt);
        sol.iterations += res.iterations;
        merit = res.merit();

        std::vector<std::pair<double, Pair>> violated;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) {
                const double ratio = sqdist(res.K, i, j) / d2(i, j);
                if (!lower_rows.count({i, j}) && ratio < p.c2sq - 0.01 * cfg.tol)
                    violated.push_back({ratio, {i, j}});
            }
        if (violated.empty())
            break;
        const auto cap = static_cast<std::size_t>(cfg.lower_rows_per_round);
        if (cap > 0 && violated.size() > cap) {
            std::nth_element(violated.begin(), violated.begin() + cap, violated.end());
            violated.resize(cap);
        }
        for (const auto& v : violated)
            lower_rows.insert(v.second);
    }

    sol.gram = res.K * scale2;
    // report the objective the returned matrix actually achieves
    sol.t_star = certify(p, sol).achieved_objective;
    const Certificate c0 = certify(p, sol);
    sol.psd_residual = c0.psd_residual;
    sol.primal_residual = std::max(c0.interval_violation, c0.lower_violation);
    sol.converged = merit <= cfg.tol && c0.passes(cfg.tol);
    return sol;
}

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

nlohmann::json pairs_json(const std::vector<Pair>& ps)
{
    nlohmann::json out = nlohmann::json::array();
    for (auto [i, j] : ps)
        out.push_back({i, j});
    return out;
}

} // namespace

std::string to_json(const SdpProblem& p)
{
    nlohmann::json j;
    j["k"] = p.k;
    j["d2"] = matrix_json(p.d2);
    j["eps_pairs"] = pairs_json(p.eps_pairs);
    j["all_pairs"] = pairs_json(p.all_pairs());
    j["c2sq"] = p.c2sq;
    j["eps"] = p.eps;
    return j.dump(1);
}

std::string to_json(const SdpSolution& s)
{
    nlohmann::json j;
    j["t_star"] = s.t_star;
    j["gram"] = matrix_json(s.gram);
    j["primal_residual"] = s.primal_residual;
    j["psd_residual"] = s.psd_residual;
    j["iterations"] = s.iterations;
    j["converged"] = s.converged;
    return j.dump(1);
}

} // namespace mrecon
