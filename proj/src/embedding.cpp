#include "mrecon/embedding.hpp"

#include "mrecon/errors.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace mrecon {

GramPoints gram_to_points(const Eigen::MatrixXd& K, int n)
{
    const Index k = K.rows();
    if (K.cols() != k || k == 0)
        throw InvalidArgument("gram matrix must be square and nonempty");
    if (n < 1 || n > k)
        throw InvalidArgument("target dimension must lie in [1, k]");
    const double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
    if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw InvalidArgument("gram matrix is not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (K + K.transpose()));
    const Eigen::VectorXd lam = es.eigenvalues(); // ascending
    const double top = std::max(lam(k - 1), 0.0);
    if (lam(0) < -1e-6 * std::max(top, 1e-300) && lam(0) < -1e-12)
        throw InvalidArgument("gram matrix is not positive semidefinite; run certify first");

    GramPoints out;
    Eigen::MatrixXd X(k, n);
    double kept = 0.0, dropped = 0.0;
    for (Index c = 0; c < k; ++c) {
        const double l = std::max(lam(k - 1 - c), 0.0);
        if (c < n) {
            Eigen::VectorXd v = es.eigenvectors().col(k - 1 - c);
            // deterministic sign: largest entry positive
            Index at;
            v.cwiseAbs().maxCoeff(&at);
            if (v(at) < 0.0)
                v = -v;
            X.col(c) = std::sqrt(l) * v;
            kept += l;
        } else {
            dropped += l;
        }
    }
    out.points = PointCloud(X);
    out.rank_dropped_mass = kept > 0.0 ? dropped / kept : (dropped > 0.0 ? INFINITY : 0.0);
    return out;
}

double err_metric(const DistanceMatrix& d_hat, const DistanceMatrix& d)
{
    const Index k = d.size();
    if (d_hat.d.rows() != k || d_hat.d.cols() != k || d.d.cols() != k)
        throw InvalidArgument("distance matrices differ in size");
    double sum = 0.0;
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j) {
            if (i == j)
                continue;
            if (!(d(i, j) > 0.0))
                throw InvalidArgument("reference distances must be positive off the diagonal");
            const double r = (d_hat(i, j) - d(i, j)) / d(i, j);
            sum += r * r;
        }
    return std::sqrt(sum) / static_cast<double>(k);
}

DistanceMatrix recovered_distances(const PointCloud& points, const RecoveredMetric& mode)
{
    if (points.count() < 2)
        throw InvalidArgument("need at least two points");
    if (mode.kind == RecoveredMetric::Kind::Euclidean)
        return euclidean_distances(points);
    return graph_geodesics(points, mode.rule);
}

DistortionAudit distortion_audit(const PointCloud& points, const DistanceMatrix& d, double eps,
                                 const ReachConstants& consts,
                                 std::optional<NeighborRule> geodesic_rule)
{
    DistortionAudit a;
    a.theorem_band = 3.0 * consts.c1 * eps;
    a.tight_band = consts.c1 * eps;
    a.min_ratio = std::numeric_limits<double>::infinity();
    const Index k = points.count();
    if (d.size() != k)
        return a;
    for (Index i = 0; i < k; ++i)
        for (Index j = i + 1; j < k; ++j) {
            const double e = (points.coords.row(i) - points.coords.row(j)).norm();
            const double r = e / d(i, j);
            a.min_ratio = std::min(a.min_ratio, r);
            if (d(i, j) < eps)
                a.local_max_distortion = std::max(a.local_max_distortion, std::abs(r - 1.0));
        }
    a.within_theorem_band = a.local_max_distortion <= a.theorem_band;
    a.within_tight_band = a.local_max_distortion <= a.tight_band;
    a.lower_bound_ok = a.min_ratio >= consts.c2;
    if (geodesic_rule) {
        try {
            const DistanceMatrix g = graph_geodesics(points, *geodesic_rule);
            double worst = 0.0;
            for (Index i = 0; i < k; ++i)
                for (Index j = i + 1; j < k; ++j)
                    worst = std::max(worst, std::abs(g(i, j) / d(i, j) - 1.0));
            a.geodesic_max_distortion = worst;
            a.geodesic_within_band = worst <= a.theorem_band;
        } catch (const GraphDisconnected&) {
            a.geodesic_within_band = false;
        }
    }
    return a;
}

} // namespace mrecon
