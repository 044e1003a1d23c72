#include "mrecon/baselines.hpp"

#include "mrecon/conic.hpp"
#include "mrecon/embedding.hpp"
#include "mrecon/errors.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <numeric>

namespace mrecon {

MdsResult classical_mds(const DistanceMatrix& d, int r_max)
{
    validate(d);
    const Index k = d.size();
    if (r_max < 1 || r_max > k)
        throw InvalidArgument("r_max must lie in [1, k]");
    const Eigen::MatrixXd A = d.d.cwiseProduct(d.d);
    const Eigen::MatrixXd H =
        Eigen::MatrixXd::Identity(k, k) - Eigen::MatrixXd::Constant(k, k, 1.0 / k);
    const Eigen::MatrixXd B = -0.5 * H * A * H;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (B + B.transpose()));
    const Eigen::VectorXd& lam = es.eigenvalues();
    const double top = lam.cwiseAbs().maxCoeff();
    const double cut = 1e-9 * top;

    MdsResult out;
    std::vector<Index> keep;
    for (Index c = k - 1; c >= 0 && static_cast<int>(keep.size()) < r_max; --c)
        if (lam(c) > cut)
            keep.push_back(c);
    if (keep.empty())
        throw DegenerateSpectrum("no positive eigenvalue above 1e-9 * max|lambda|");
    out.r = static_cast<int>(keep.size());
    Eigen::MatrixXd X(k, out.r);
    for (int c = 0; c < out.r; ++c) {
        Eigen::VectorXd v = es.eigenvectors().col(keep[c]);
        Index at;
        v.cwiseAbs().maxCoeff(&at);
        if (v(at) < 0.0)
            v = -v;
        X.col(c) = std::sqrt(lam(keep[c])) * v;
        out.eigenvalues.push_back(lam(keep[c]));
    }
    out.points = PointCloud(X);
    return out;
}

double stress(const PointCloud& points, const DistanceMatrix& d)
{
    const Index k = points.count();
    if (d.size() != k)
        throw InvalidArgument("point count and distance matrix size differ");
    double s = 0.0;
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j)
            if (i != j)
                s += d(i, j) * d(i, j) - (points.coords.row(i) - points.coords.row(j)).squaredNorm();
    return s;
}

double snowflake_distance(double t, double s)
{
    return 2.0 * std::sqrt(std::numbers::pi) * std::sqrt(std::abs(t - s));
}

std::vector<CircleCoefficient> mds_circle_coefficients(int N, int j_max)
{
    if (j_max < 1 || j_max % 2 == 0)
        throw InvalidArgument("j_max must be a positive odd number");
    if (N < 2 * j_max)
        throw InvalidArgument("need N >= 2 j_max");
    const Sample circle = gen_circle(N);
    // enough eigenpairs to reach frequency j_max, plus slack
    const int r_max = std::min(N, 2 * j_max + 4);
    const MdsResult mds = classical_mds(circle.dist, r_max);

    // frequency of each eigenvector from its discrete Fourier spectrum
    std::map<int, std::vector<double>> by_freq;
    for (int c = 0; c < mds.r; ++c) {
        const Eigen::VectorXd v = mds.points.coords.col(c) / std::sqrt(mds.eigenvalues[c]);
        int best = -1;
        double best_pow = -1.0, total = 0.0;
        for (int f = 0; f <= N / 2; ++f) {
            std::complex<double> acc(0.0, 0.0);
            for (int n = 0; n < N; ++n)
                acc += v(n) * std::polar(1.0, -2.0 * std::numbers::pi * f * n / N);
            const double pw = std::norm(acc);
            total += pw;
            if (pw > best_pow) {
                best_pow = pw;
                best = f;
            }
        }
        if (best_pow < 0.9 * total)
            throw DegenerateSpectrum("eigenvector " + std::to_string(c) +
                                     " mixes several frequencies");
        by_freq[best].push_back(mds.eigenvalues[c]);
    }

    std::vector<CircleCoefficient> out;
    for (int j = 1; j <= j_max; j += 2) {
        auto it = by_freq.find(j);
        if (it == by_freq.end() || it->second.size() != 2)
            throw DegenerateSpectrum("frequency " + std::to_string(j) +
                                     " does not carry exactly one eigenpair");
        // root-mean amplitude of the cos/sin pair
        const double a2 = (2.0 * it->second[0] / N + 2.0 * it->second[1] / N) / 2.0;
        out.push_back({j, std::sqrt(a2)});
    }
    return out;
}

MvuResult mvu_embed(const DistanceMatrix& d, double eps, double tol)
{
    if (!(eps > 0.0))
        throw InvalidArgument("eps must be positive");
    if (!(tol > 0.0))
        throw InvalidArgument("tol must be positive");
    validate(d);
    const int k = static_cast<int>(d.size());
    const double scale2 = d.d.cwiseProduct(d.d).maxCoeff();

    conic::Problem cp;
    cp.k = k;
    cp.has_t = false;
    cp.trace_weight = -1.0; // maximize tr K, i.e. the variance of a centered cloud
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if (d(i, j) <= eps) {
                const double dd = d(i, j) * d(i, j) / scale2;
                const int q = static_cast<int>(cp.pairs.size());
                cp.pairs.push_back({i, j});
                cp.rows.push_back({q, 1.0 / dd, 0, 0.0, 1.0});
            }
    if (cp.rows.empty())
        throw NoConstraints("no pair within eps = " + std::to_string(eps));
    // separate components can drift apart forever
    std::vector<int> root(k);
    std::iota(root.begin(), root.end(), 0);
    auto find = [&](int v) {
        while (root[v] != v)
            v = root[v] = root[root[v]];
        return v;
    };
    for (auto [i, j] : cp.pairs)
        root[find(i)] = find(j);
    for (int i = 1; i < k; ++i)
        if (find(i) != find(0))
            throw InvalidArgument("constraint graph is disconnected (points 0 and " +
                                  std::to_string(i) + "); the variance is unbounded");

    conic::Options opt;
    opt.tol = std::min(1e-9, 1e-3 * tol);
    const conic::Result res = conic::solve(cp, opt);
    const Eigen::MatrixXd K = res.K * scale2;

    MvuResult out;
    out.report.constraints = static_cast<int>(cp.rows.size());
    out.report.iterations = res.iterations;
    for (auto [i, j] : cp.pairs) {
        const double e = K(i, i) + K(j, j) - 2.0 * K(i, j);
        out.report.max_residual =
            std::max(out.report.max_residual, std::abs(e / (d(i, j) * d(i, j)) - 1.0));
    }
    out.report.feasible = out.report.max_residual <= tol;
    out.report.variance = 2.0 * k * K.trace();
    // drop the numerically empty directions
    const Eigen::MatrixXd X = gram_to_points(K, k).points.coords;
    const Eigen::VectorXd mass = X.colwise().squaredNorm();
    int r = 1;
    while (r < k && mass(r) > 1e-9 * mass(0))
        ++r;
    out.points = PointCloud(X.leftCols(r));
    return out;
}

} // namespace mrecon
