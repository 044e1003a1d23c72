#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

// Primal-dual interior-point engine for the small family of semidefinite
// programs used here.  The matrix variable is a centered Gram matrix K
// (K·1 = 0, K ⪰ 0); every linear row touches K only through a squared
// distance K_ii + K_jj - 2 K_ij:
//
//   minimize    c_t·t + w·tr(K)
//   subject to  a_r·(K_ii + K_jj - 2K_ij) + s_r·x_r + g_r·t = b_r     for every row r
//               x_r ≥ 0 (rows with s_r = ±1), t ≥ 0, K ⪰ 0.
//
// Rows with s_r = 0 are equalities.  The iterate is kept in an orthonormal
// basis of 1⊥ so that both primal and dual cones have interior points.
namespace mrecon::conic {

struct Row {
    int pair = 0;      // index into Problem::pairs
    double coef = 1.0;
    int slack = 0;     // +1, -1 or 0
    double tcoef = 0.0;
    double rhs = 0.0;
};

struct Problem {
    int k = 0;
    std::vector<std::pair<int, int>> pairs;
    std::vector<Row> rows;
    double trace_weight = 0.0;
    double t_weight = 1.0;
    bool has_t = true;
};

struct Options {
    double tol = 1e-9;
    int max_iter = 120;
    double step_fraction = 0.98;
    // k×k guess for K; it only sets the starting point
    std::optional<Eigen::MatrixXd> start;
};

struct Result {
    Eigen::MatrixXd K; // k×k, centered
    double t = 0.0;
    int iterations = 0;
    double primal_infeasibility = 0.0;
    double dual_infeasibility = 0.0;
    double relative_gap = 0.0;
    bool converged = false;

    double merit() const;
};

Result solve(const Problem& p, const Options& opt);

// k×(k-1) matrix with orthonormal columns spanning the complement of 1.
Eigen::MatrixXd centered_basis(int k);

} // namespace mrecon::conic
