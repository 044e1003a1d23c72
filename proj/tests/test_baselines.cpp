#include <doctest.h>

#include "mrecon/baselines.hpp"
#include "mrecon/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace mrecon;
using std::numbers::pi;

namespace {

Eigen::MatrixXd random_points(int k, int n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    Eigen::MatrixXd c(k, n);
    for (Index i = 0; i < c.size(); ++i)
        c.data()[i] = n01(rng);
    return c;
}

DistanceMatrix distances_of(const PointCloud& p) { return euclidean_distances(p); }

double max_distance_error(const PointCloud& p, const DistanceMatrix& d)
{
    return (distances_of(p).d - d.d).cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("MDS reproduces small Euclidean inputs")
{
    Eigen::MatrixXd two(2, 2);
    two << 0, 1, 1, 0;
    const MdsResult r2 = classical_mds(DistanceMatrix(two), 1);
    CHECK(r2.r == 1);
    CHECK(distances_of(r2.points)(0, 1) == doctest::Approx(1.0).epsilon(1e-14));

    Eigen::MatrixXd tri = Eigen::MatrixXd::Ones(3, 3) - Eigen::MatrixXd::Identity(3, 3);
    const MdsResult r3 = classical_mds(DistanceMatrix(tri), 2);
    CHECK(r3.r == 2);
    CHECK(max_distance_error(r3.points, DistanceMatrix(tri)) <= 1e-10);

    CHECK_THROWS_AS(classical_mds(DistanceMatrix(tri), 0), InvalidArgument);
    CHECK_THROWS_AS(classical_mds(DistanceMatrix(tri), 4), InvalidArgument);
}

TEST_CASE("MDS on random Euclidean point sets")
{
    for (int k : {4, 9, 20}) {
        for (int n : {1, 2, 3, 5}) {
            const PointCloud p(random_points(k, n, 100 * k + n));
            const DistanceMatrix d = distances_of(p);
            const MdsResult r = classical_mds(d, k);
            REQUIRE(max_distance_error(r.points, d) <= 1e-8);
            REQUIRE(r.r <= std::min(k - 1, n));
            for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
                REQUIRE(r.eigenvalues[i] > 0.0);
                if (i > 0)
                    REQUIRE(r.eigenvalues[i] <= r.eigenvalues[i - 1]);
            }
            // centered output
            REQUIRE(r.points.coords.colwise().sum().cwiseAbs().maxCoeff() <= 1e-9);
        }
    }
}

TEST_CASE("MDS distances ignore rotations of the input")
{
    const Eigen::MatrixXd x = random_points(12, 3, 5);
    Eigen::Matrix3d q = Eigen::HouseholderQR<Eigen::Matrix3d>(random_points(3, 3, 6)).householderQ();
    const Eigen::MatrixXd y = (x * q.transpose()).rowwise() + Eigen::RowVector3d(3, -1, 2);
    const MdsResult a = classical_mds(distances_of(PointCloud(x)), 12);
    const MdsResult b = classical_mds(distances_of(PointCloud(y)), 12);
    CHECK((distances_of(a.points).d - distances_of(b.points).d).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("stress")
{
    Eigen::MatrixXd d(2, 2);
    d << 0, 1, 1, 0;
    CHECK(stress(PointCloud(Eigen::MatrixXd::Zero(2, 1)), DistanceMatrix(d)) == doctest::Approx(2.0));
    Eigen::MatrixXd x(2, 1);
    x << 0, 1;
    CHECK(stress(PointCloud(x), DistanceMatrix(d)) == doctest::Approx(0.0));

    const PointCloud p(random_points(8, 2, 3));
    const DistanceMatrix dd = distances_of(p);
    double sum_d2 = dd.d.cwiseProduct(dd.d).sum();
    for (double c : {0.5, 2.0}) {
        const PointCloud scaled(c * p.coords);
        CHECK(stress(scaled, dd) == doctest::Approx(sum_d2 - c * c * sum_d2));
    }
    CHECK_THROWS_AS(stress(p, DistanceMatrix(d)), InvalidArgument);
}

TEST_CASE("snowflake limit distance")
{
    CHECK(snowflake_distance(1.0, 1.0) == 0.0);
    CHECK(snowflake_distance(0.0, pi) == doctest::Approx(2 * pi));
    CHECK(snowflake_distance(pi / 2, 0.0) == doctest::Approx(pi * std::sqrt(2.0)));
    CHECK(snowflake_distance(0.3, 1.2) == snowflake_distance(1.2, 0.3));
}

TEST_CASE("MDS circle coefficients approach sqrt(2)/j")
{
    const std::vector<CircleCoefficient> a = mds_circle_coefficients(200, 5);
    REQUIRE(a.size() == 3);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const int j = static_cast<int>(2 * i + 1);
        CHECK(a[i].frequency == j);
        CHECK(std::abs(a[i].amplitude - std::sqrt(2.0) / j) <= 0.05);
    }
    CHECK(a[0].amplitude / a[1].amplitude == doctest::Approx(3.0).epsilon(0.05));
    CHECK_THROWS_AS(mds_circle_coefficients(200, 4), InvalidArgument);
    CHECK_THROWS_AS(mds_circle_coefficients(8, 5), InvalidArgument);
}

TEST_CASE("MDS circle curve has the snowflake shape")
{
    // A pair (a cos jt, a sin jt) adds 2a^2 (1 - cos ju) to the squared distance
    // at separation u. With a_j = sqrt(2)/j and, for 0 <= u <= pi, the sum over
    // odd j of (1 - cos ju)/j^2 equal to pi u/4, the limit distance is sqrt(pi u).
    const int N = 200;
    const MdsResult r = classical_mds(gen_circle(N).dist, 40);
    const DistanceMatrix e = euclidean_distances(r.points);
    double worst = 0.0;
    for (int j = 4; j <= N / 2; ++j) {
        const double u = 2 * pi * j / N;
        worst = std::max(worst, std::abs(e(0, j) / std::sqrt(pi * u) - 1.0));
    }
    CHECK(worst <= 0.1);
}

TEST_CASE("MVU keeps a feasible chain straight")
{
    Eigen::MatrixXd x(3, 1);
    x << 0, 1, 2;
    const DistanceMatrix d = euclidean_distances(PointCloud(x));
    const MvuResult m = mvu_embed(d, 1.1, 1e-6);
    const DistanceMatrix got = euclidean_distances(m.points);
    CHECK(m.report.feasible);
    CHECK(m.report.constraints == 2);
    CHECK(got(0, 1) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(got(1, 2) == doctest::Approx(1.0).epsilon(1e-6));
    // ordered pairs of the input: 2 * (1 + 1 + 4)
    CHECK(m.report.variance >= 12.0 - 1e-6);
    CHECK(got(0, 2) == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("MVU on the 12-cycle")
{
    const Sample c = gen_circle(12);
    const double h = 2 * pi / 12;

    const MvuResult one = mvu_embed(c.dist, h + 1e-9, 1e-6);
    CHECK(one.report.feasible);
    CHECK(one.report.constraints == 12);
    CHECK(one.report.max_residual <= 1e-6);
    const DistanceMatrix e = euclidean_distances(one.points);
    for (int i = 0; i < 12; ++i)
        CHECK(e(i, (i + 1) % 12) == doctest::Approx(h).epsilon(1e-6));
    // the regular 12-gon with side h is the variance maximizer
    const double radius = h / (2 * std::sin(pi / 12));
    CHECK(one.report.variance == doctest::Approx(2.0 * 12 * 12 * radius * radius).epsilon(1e-6));

    const MvuResult two = mvu_embed(c.dist, 2 * h + 1e-9, 1e-6);
    CHECK_FALSE(two.report.feasible);
    CHECK(two.report.constraints == 24);
    CHECK(two.report.max_residual > 1e-3);
}

TEST_CASE("MVU beats any feasible configuration")
{
    const PointCloud p(random_points(10, 2, 77));
    const DistanceMatrix d = euclidean_distances(p);
    const MvuResult m = mvu_embed(d, 3.0, 1e-6);
    const Eigen::MatrixXd centered = p.coords.rowwise() - p.coords.colwise().mean();
    const double identity_variance = 2.0 * 10 * centered.squaredNorm();
    CHECK(m.report.feasible);
    CHECK(m.report.variance >= identity_variance - 1e-6 * identity_variance);
}

TEST_CASE("MVU straightens a zigzag chain")
{
    Eigen::MatrixXd z(6, 2);
    for (int i = 0; i < 6; ++i)
        z.row(i) << i, 0.5 * (i % 2);
    const MvuResult m = mvu_embed(euclidean_distances(PointCloud(z)), 1.2, 1e-6);
    CHECK(m.report.feasible);
    CHECK(m.report.constraints == 5);
    // collinear at spacing sqrt(1.25): 2 * 1.25 * sum over gaps g of (6 - g) g^2
    CHECK(m.report.variance == doctest::Approx(262.5).epsilon(1e-5));
}

TEST_CASE("MVU errors")
{
    const Sample c = gen_circle(6);
    CHECK_THROWS_AS(mvu_embed(c.dist, 0.5, 1e-6), NoConstraints);
    CHECK_THROWS_AS(mvu_embed(c.dist, 0.0, 1e-6), InvalidArgument);
    CHECK_THROWS_AS(mvu_embed(c.dist, 1.0, 0.0), InvalidArgument);
    // two far clusters: nothing bounds their separation
    Eigen::MatrixXd x(4, 1);
    x << 0, 1, 10, 11;
    CHECK_THROWS_AS(mvu_embed(euclidean_distances(PointCloud(x)), 1.5, 1e-6), InvalidArgument);
}
