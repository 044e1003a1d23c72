#pragma once

#include "mrecon/bounds.hpp"
#include "mrecon/geometry.hpp"

#include <optional>

namespace mrecon {

struct GramPoints {
    PointCloud points;
    double rank_dropped_mass = 0.0; // discarded eigenvalue mass / kept mass
};

// Factor a PSD Gram matrix into k points in R^n using its n leading eigenpairs.
GramPoints gram_to_points(const Eigen::MatrixXd& K, int n);

// (1/k) sqrt(sum over ordered pairs i != j of ((d_hat - d) / d)^2)
double err_metric(const DistanceMatrix& d_hat, const DistanceMatrix& d);

struct RecoveredMetric {
    enum class Kind { Euclidean, Geodesic };
    Kind kind = Kind::Euclidean;
    NeighborRule rule;

    static RecoveredMetric euclidean() { return {}; }
    static RecoveredMetric geodesic(NeighborRule r) { return {Kind::Geodesic, r}; }
};

DistanceMatrix recovered_distances(const PointCloud& points, const RecoveredMetric& mode);

struct DistortionAudit {
    double local_max_distortion = 0.0; // max over d < eps of ||x_i - x_j| / d - 1|
    double theorem_band = 0.0;         // 3 c1 eps
    double tight_band = 0.0;           // c1 eps
    bool within_theorem_band = false;
    bool within_tight_band = false;
    double min_ratio = 0.0;            // min over all pairs of |x_i - x_j| / d
    bool lower_bound_ok = false;       // min_ratio >= c2
    std::optional<double> geodesic_max_distortion;
    std::optional<bool> geodesic_within_band;
};

// Never throws on a bad embedding; it only reports.
DistortionAudit distortion_audit(const PointCloud& points, const DistanceMatrix& d, double eps,
                                 const ReachConstants& consts,
                                 std::optional<NeighborRule> geodesic_rule = std::nullopt);

struct EmbeddingReport {
    PointCloud points;
    double err = 0.0;           // at the target dimension
    double err_full_rank = 0.0; // before truncation
    double local_max_distortion = 0.0;
    std::optional<double> geodesic_max_distortion;
    double rank_dropped_mass = 0.0;
};

} // namespace mrecon
