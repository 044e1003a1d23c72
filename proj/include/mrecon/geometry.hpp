#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <tuple>
#include <utility>
#include <vector>

namespace mrecon {

using Index = Eigen::Index;

// k points in R^n, one per row.
struct PointCloud {
    Eigen::MatrixXd coords;

    PointCloud() = default;
    explicit PointCloud(Eigen::MatrixXd c) : coords(std::move(c)) {}

    Index count() const { return coords.rows(); }
    Index dim() const { return coords.cols(); }
    Eigen::VectorXd point(Index i) const { return coords.row(i).transpose(); }
};

struct DistanceMatrix {
    Eigen::MatrixXd d;

    DistanceMatrix() = default;
    explicit DistanceMatrix(Eigen::MatrixXd m) : d(std::move(m)) {}

    Index size() const { return d.rows(); }
    double operator()(Index i, Index j) const { return d(i, j); }
};

// Throws InvalidArgument unless d is square, symmetric, zero on the diagonal
// and positive elsewhere.
void validate(const DistanceMatrix& d);

DistanceMatrix euclidean_distances(const PointCloud& cloud);

struct NeighborRule {
    enum class Kind { Radius, Nearest };
    Kind kind = Kind::Radius;
    double radius = 0.0;
    int neighbors = 0;

    static NeighborRule by_radius(double eps) { return {Kind::Radius, eps, 0}; }
    static NeighborRule by_count(int m) { return {Kind::Nearest, 0.0, m}; }
};

struct Edge {
    int i;
    int j;
    double w;
};

struct NeighborGraph {
    int k = 0;
    NeighborRule rule;
    std::vector<Edge> edges; // i < j
};

NeighborGraph neighbor_graph(const PointCloud& cloud, const NeighborRule& rule);

// All-pairs shortest paths on the neighbor graph (Dijkstra from every source).
DistanceMatrix graph_geodesics(const PointCloud& cloud, const NeighborRule& rule);

struct Sample {
    PointCloud cloud;
    DistanceMatrix dist;
};

Sample gen_segment(int k);
Sample gen_circle(int n);

enum class SphereMode { Grid, Uniform };
Sample gen_sphere(int k, SphereMode mode, std::uint64_t seed);

struct SwissRoll {
    PointCloud cloud;
    Eigen::VectorXd t;
    Eigen::VectorXd y;
};

SwissRoll gen_swiss_roll(int k, std::uint64_t seed);
SwissRoll swiss_roll_from_params(const Eigen::VectorXd& t, const Eigen::VectorXd& y);

// Arclength of the roll's spiral from 0 to t.
double swiss_arclength(double t);

// Intrinsic distances on the roll: it unrolls isometrically onto the strip
// (s(t), y), where geodesics are straight.
DistanceMatrix swiss_roll_geodesics(const SwissRoll& roll);

} // namespace mrecon
