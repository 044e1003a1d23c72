#include "mrecon/geometry.hpp"

#include "mrecon/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <random>

namespace mrecon {

void validate(const DistanceMatrix& dm)
{
    const auto& d = dm.d;
    if (d.rows() != d.cols())
        throw InvalidArgument("distance matrix is not square");
    for (Index i = 0; i < d.rows(); ++i) {
        if (d(i, i) != 0.0)
            throw InvalidArgument("nonzero diagonal at " + std::to_string(i));
        for (Index j = i + 1; j < d.cols(); ++j) {
            if (!std::isfinite(d(i, j)) || d(i, j) != d(j, i))
                throw InvalidArgument("asymmetric or non-finite entry at (" + std::to_string(i) +
                                      "," + std::to_string(j) + ")");
            if (d(i, j) <= 0.0)
                throw InvalidArgument("duplicate points " + std::to_string(i) + " and " +
                                      std::to_string(j));
        }
    }
}

DistanceMatrix euclidean_distances(const PointCloud& cloud)
{
    const Index k = cloud.count();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k, k);
    for (Index i = 0; i < k; ++i)
        for (Index j = i + 1; j < k; ++j)
            d(i, j) = d(j, i) = (cloud.coords.row(i) - cloud.coords.row(j)).norm();
    return DistanceMatrix(std::move(d));
}

NeighborGraph neighbor_graph(const PointCloud& cloud, const NeighborRule& rule)
{
    const int k = static_cast<int>(cloud.count());
    if (k < 2)
        throw InvalidArgument("neighbor graph needs at least two points");
    if (rule.kind == NeighborRule::Kind::Radius && !(rule.radius > 0.0))
        throw InvalidArgument("neighbor radius must be positive");
    if (rule.kind == NeighborRule::Kind::Nearest && rule.neighbors < 1)
        throw InvalidArgument("neighbor count must be at least 1");

    const DistanceMatrix e = euclidean_distances(cloud);
    NeighborGraph g;
    g.k = k;
    g.rule = rule;
    if (rule.kind == NeighborRule::Kind::Radius) {
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
                if (e(i, j) <= rule.radius)
                    g.edges.push_back({i, j, e(i, j)});
        return g;
    }

    // symmetric kNN: keep (i,j) if either endpoint lists the other
    std::vector<std::vector<char>> adj(k, std::vector<char>(k, 0));
    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j)
            order[j] = j;
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return e(i, a) < e(i, b); });
        int taken = 0;
        for (int j : order) {
            if (j == i)
                continue;
            if (taken++ >= rule.neighbors)
                break;
            adj[i][j] = adj[j][i] = 1;
        }
    }
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if (adj[i][j])
                g.edges.push_back({i, j, e(i, j)});
    return g;
}

DistanceMatrix graph_geodesics(const PointCloud& cloud, const NeighborRule& rule)
{
    const NeighborGraph g = neighbor_graph(cloud, rule);
    const int k = g.k;
    std::vector<std::vector<std::pair<int, double>>> adj(k);
    for (const Edge& e : g.edges) {
        adj[e.i].push_back({e.j, e.w});
        adj[e.j].push_back({e.i, e.w});
    }

    const double inf = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd d(k, k);
    using Item = std::pair<double, int>;
    for (int s = 0; s < k; ++s) {
        std::vector<double> dist(k, inf);
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist[s] = 0.0;
        heap.push({0.0, s});
        while (!heap.empty()) {
            auto [du, u] = heap.top();
            heap.pop();
            if (du > dist[u])
                continue;
            for (auto [v, w] : adj[u]) {
                if (du + w < dist[v]) {
                    dist[v] = du + w;
                    heap.push({dist[v], v});
                }
            }
        }
        for (int t = 0; t < k; ++t) {
            if (dist[t] == inf)
                throw GraphDisconnected(s, t);
            d(s, t) = dist[t];
        }
    }
    // the two Dijkstra runs may round differently; keep the matrix exactly symmetric
    for (int i = 0; i < k; ++i) {
        d(i, i) = 0.0;
        for (int j = i + 1; j < k; ++j)
            d(i, j) = d(j, i) = std::min(d(i, j), d(j, i));
    }
    return DistanceMatrix(std::move(d));
}

Sample gen_segment(int k)
{
    if (k < 2)
        throw InvalidArgument("segment needs k >= 2");
    Eigen::MatrixXd x(k, 1);
    Eigen::MatrixXd d(k, k);
    for (int i = 0; i < k; ++i) {
        x(i, 0) = static_cast<double>(i) / (k - 1);
        for (int j = 0; j < k; ++j)
            d(i, j) = static_cast<double>(std::abs(i - j)) / (k - 1);
    }
    return {PointCloud(std::move(x)), DistanceMatrix(std::move(d))};
}

Sample gen_circle(int n)
{
    if (n < 3)
        throw InvalidArgument("circle needs N >= 3");
    const double two_pi = 2.0 * std::numbers::pi;
    Eigen::MatrixXd x(n, 2);
    Eigen::MatrixXd d(n, n);
    for (int i = 0; i < n; ++i) {
        const double th = two_pi * i / n;
        x(i, 0) = std::cos(th);
        x(i, 1) = std::sin(th);
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            // arc length via the integer step count keeps d exactly symmetric
            const int steps = std::min(std::abs(i - j), n - std::abs(i - j));
            d(i, j) = two_pi * steps / n;
        }
    return {PointCloud(std::move(x)), DistanceMatrix(std::move(d))};
}

namespace {

DistanceMatrix great_circle(const Eigen::MatrixXd& x)
{
    const Index k = x.rows();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k, k);
    for (Index i = 0; i < k; ++i)
        for (Index j = i + 1; j < k; ++j) {
            // atan2 form is accurate for nearby and antipodal pairs alike
            const Eigen::Vector3d a = x.row(i).transpose();
            const Eigen::Vector3d b = x.row(j).transpose();
            d(i, j) = d(j, i) = std::atan2(a.cross(b).norm(), a.dot(b));
        }
    return DistanceMatrix(std::move(d));
}

} // namespace

Sample gen_sphere(int k, SphereMode mode, std::uint64_t seed)
{
    if (k < 4)
        throw InvalidArgument("sphere needs k >= 4");
    Eigen::MatrixXd x;
    if (mode == SphereMode::Grid) {
        // rings at the midpoints of equal colatitude bands, equal longitude steps
        const int rings = std::max(2, static_cast<int>(std::lround(std::sqrt(double(k)))));
        const int per_ring = std::max(3, static_cast<int>(std::lround(double(k) / rings)));
        x.resize(rings * per_ring, 3);
        int row = 0;
        for (int r = 0; r < rings; ++r) {
            const double theta = (r + 0.5) * std::numbers::pi / rings;
            for (int m = 0; m < per_ring; ++m) {
                const double phi = 2.0 * std::numbers::pi * m / per_ring;
                x.row(row++) << std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                    std::cos(theta);
            }
        }
    } else {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        x.resize(k, 3);
        for (int i = 0; i < k; ++i) {
            Eigen::Vector3d v;
            do {
                v << normal(rng), normal(rng), normal(rng);
            } while (v.norm() < 1e-12);
            x.row(i) = v.normalized().transpose();
        }
    }
    DistanceMatrix d = great_circle(x);
    return {PointCloud(std::move(x)), std::move(d)};
}

SwissRoll swiss_roll_from_params(const Eigen::VectorXd& t, const Eigen::VectorXd& y)
{
    const Index k = t.size();
    Eigen::MatrixXd x(k, 3);
    for (Index i = 0; i < k; ++i)
        x.row(i) << t(i) * std::cos(t(i)), y(i), t(i) * std::sin(t(i));
    return {PointCloud(std::move(x)), t, y};
}

SwissRoll gen_swiss_roll(int k, std::uint64_t seed)
{
    if (k < 4)
        throw InvalidArgument("swiss roll needs k >= 4");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::VectorXd t(k), y(k);
    for (int i = 0; i < k; ++i)
        t(i) = 1.5 * std::numbers::pi * (1.0 + 2.0 * unif(rng));
    for (int i = 0; i < k; ++i)
        y(i) = 21.0 * unif(rng);
    return swiss_roll_from_params(t, y);
}

double swiss_arclength(double t)
{
    return 0.5 * (t * std::sqrt(1.0 + t * t) + std::asinh(t));
}

DistanceMatrix swiss_roll_geodesics(const SwissRoll& roll)
{
    const Index k = roll.t.size();
    Eigen::VectorXd s(k);
    for (Index i = 0; i < k; ++i)
        s(i) = swiss_arclength(roll.t(i));
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k, k);
    for (Index i = 0; i < k; ++i)
        for (Index j = i + 1; j < k; ++j)
            d(i, j) = d(j, i) = std::hypot(s(i) - s(j), roll.y(i) - roll.y(j));
    return DistanceMatrix(std::move(d));
}

} // namespace mrecon
