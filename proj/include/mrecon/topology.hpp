#pragma once

#include "mrecon/bounds.hpp"
#include "mrecon/geometry.hpp"
#include "mrecon/sdp.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mrecon {

struct Ball {
    Eigen::VectorXd center;
    double radius = 0.0;
};

// Smallest ball containing the given rows of `points` (Welzl recursion).
Ball min_enclosing_ball(const PointCloud& points, const std::vector<int>& subset);

struct Simplex {
    std::vector<int> vertices; // ascending
    double radius = 0.0;       // enclosing-ball radius
};

struct SimplicialComplex {
    int vertex_count = 0;
    int p_max = 0;
    double r = 0.0;
    std::vector<std::vector<Simplex>> by_dim; // by_dim[p] holds the p-simplices

    std::size_t size() const;
    bool contains(const std::vector<int>& vertices) const;
};

SimplicialComplex cech_complex(const PointCloud& landmarks, double r, int p_max);

struct BettiVector {
    std::vector<long> betti; // beta_0 .. beta_{p_max-1}
    std::string field = "Q";
};

BettiVector betti(const SimplicialComplex& c);

// Rank over Q of the boundary map from p-simplices to (p-1)-simplices.
long boundary_rank(const SimplicialComplex& c, int p);

struct SandwichReport {
    double sigma = 0.0;
    double sigma_prime = 0.0;
    double sigma_double_prime = 0.0;
    std::size_t inner_size = 0;  // |C_M(sigma'')|
    std::size_t middle_size = 0; // |C_S(sigma)|
    std::size_t outer_size = 0;  // |C_M(sigma')|
    bool inner_ok = true;        // C_M(sigma'') within C_S(sigma)
    bool outer_ok = true;        // C_S(sigma) within C_M(sigma')
    std::vector<int> inner_witness; // first simplex breaking an inclusion
    std::vector<int> outer_witness;
    bool pass() const { return inner_ok && outer_ok; }
};

SandwichReport sandwich_check(const PointCloud& landmarks_M, const PointCloud& landmarks_S,
                              double sigma, const ReachConstants& consts, int p_max);

struct Landmarks {
    std::vector<int> indices;
    double delta = 0.0; // max distance from a sample to its nearest landmark
};

// Greedy farthest-point selection in d, starting from sample 0.
Landmarks farthest_point_landmarks(const DistanceMatrix& d, int count);

// Landmark pipelines run on a few hundred samples; cap the working set growth.
inline SolverConfig recovery_solver()
{
    SolverConfig c;
    c.lower_rows_per_round = 400;
    return c;
}

struct RecoveryOptions {
    int landmark_count = 0;
    double sigma = 0.0;
    double eps = 0.0;
    int p_max = 3;
    int n = 0; // embedding dimension; 0 keeps the full rank of the Gram matrix
    SolverConfig solver = recovery_solver();
};

struct Recovery {
    BettiVector betti;
    Landmarks landmarks;
    PointCloud recovered;   // all samples
    SdpSolution solution;
    RadiusCheck radius;
};

Recovery recover_topology(const DistanceMatrix& d, const ReachConstants& consts,
                          const RecoveryOptions& opts);

BettiVector recover_betti(const DistanceMatrix& d, int landmark_count, double sigma, double eps,
                          const ReachConstants& consts, int p_max, const SolverConfig& cfg = recovery_solver());

} // namespace mrecon
