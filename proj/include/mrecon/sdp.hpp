#pragma once

#include "mrecon/geometry.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mrecon {

using Pair = std::pair<int, int>;

struct SdpProblem {
    int k = 0;
    Eigen::MatrixXd d2;          // squared distances
    std::vector<Pair> eps_pairs; // 0 < d < eps, i < j
    double c2sq = 0.0;
    double eps = 0.0;

    // every unordered pair i < j, in lexicographic order
    std::vector<Pair> all_pairs() const;
};

struct SdpSolution {
    double t_star = 0.0;
    Eigen::MatrixXd gram;
    double primal_residual = 0.0; // max relative constraint violation
    double psd_residual = 0.0;    // |most negative eigenvalue| of gram, 0 if PSD
    int iterations = 0;
    bool converged = false;
};

struct SolverConfig {
    double tol = 1e-6;
    int max_iter = 50000;
    std::optional<Eigen::MatrixXd> warm_start;
    std::uint64_t seed = 0; // the solver is deterministic; kept for reproducible configs
    // Lower-bound pairs enter a working set in rounds, most violated first.
    // 0 adds every violated pair each round; that shapes the central path
    // better on flat optimal faces but the Schur system grows with k².
    int lower_rows_per_round = 0;
};

struct BuildOptions {
    // Permit c2 > 1 (used only to validate the solver against closed forms).
    bool allow_c2_override = false;
};

SdpProblem build_problem(const DistanceMatrix& d, double eps, double c2,
                         const BuildOptions& opts = {});

SdpSolution solve(const SdpProblem& p, const SolverConfig& cfg = {});

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& s);

struct Certificate {
    double min_eigenvalue = 0.0;
    double psd_residual = 0.0;
    double interval_violation = 0.0; // max over eps pairs of (|e/d² - 1| - t_star)+
    double lower_violation = 0.0;    // max over all pairs of (c2² - e/d²)+
    double achieved_objective = 0.0; // max over eps pairs of |e/d² - 1|
    double min_lower_ratio = 0.0;    // min over all pairs of e/d²

    bool passes(double tol) const
    {
        return psd_residual <= tol && interval_violation <= tol && lower_violation <= tol;
    }
};

Certificate certify(const SdpProblem& p, const SdpSolution& s);

std::string to_json(const SdpProblem& p);
std::string to_json(const SdpSolution& s);

} // namespace mrecon
