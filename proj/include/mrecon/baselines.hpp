#pragma once

#include "mrecon/geometry.hpp"

#include <vector>

namespace mrecon {

struct MdsResult {
    PointCloud points;
    std::vector<double> eigenvalues; // retained, descending, > 0
    int r = 0;
};

MdsResult classical_mds(const DistanceMatrix& d, int r_max);

// sum over ordered pairs of (d_ij^2 - |x_i - x_j|^2)
double stress(const PointCloud& points, const DistanceMatrix& d);

// Limit curve distance 2 sqrt(pi) |t - s|^(1/2).
double snowflake_distance(double t, double s);

struct CircleCoefficient {
    int frequency = 0;
    double amplitude = 0.0;
};

// Amplitudes a_j^N of the MDS eigencoordinate pairs of N equally spaced circle
// points, for odd j <= j_max.
std::vector<CircleCoefficient> mds_circle_coefficients(int N, int j_max);

struct MvuReport {
    double max_residual = 0.0; // max over constrained pairs of | |x_i-x_j|^2 / d^2 - 1 |
    bool feasible = false;     // max_residual <= tol
    double variance = 0.0;     // sum over ordered pairs of |x_i - x_j|^2
    int constraints = 0;
    int iterations = 0;
};

struct MvuResult {
    PointCloud points;
    MvuReport report;
};

// Maximum variance unfolding: maximize the variance subject to
// |x_i - x_j|^2 = d_ij^2 for every pair with d_ij <= eps.
MvuResult mvu_embed(const DistanceMatrix& d, double eps, double tol);

} // namespace mrecon
