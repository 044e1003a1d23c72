#include "mrecon/bounds.hpp"

#include "mrecon/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mrecon {

double c1(double alpha)
{
    if (!(alpha > 0.0))
        throw InvalidArgument("reach must be positive");
    return 1.0 / (3.0 * alpha * std::sqrt(3.0));
}

double c2(double alpha, double diameter)
{
    if (!(alpha > 0.0) || !(diameter > 0.0))
        throw InvalidArgument("reach and diameter must be positive");
    return std::min(2.0 / std::numbers::pi, 2.0 * alpha / diameter);
}

ReachConstants make_constants(double alpha, double diameter)
{
    ReachConstants c;
    c.alpha = alpha;
    c.diameter = diameter;
    c.c1 = c1(alpha);
    c.c2 = c2(alpha, diameter);
    c.eps0 = alpha;
    return c;
}

double sigma_prime(double sigma, const ReachConstants& c)
{
    if (!(sigma > 0.0))
        throw InvalidArgument("sigma must be positive");
    return (1.0 + c.c1 * sigma / c.c2) * sigma / c.c2;
}

double sigma_double_prime(double sigma, const ReachConstants& c)
{
    if (!(sigma > 0.0))
        throw InvalidArgument("sigma must be positive");
    // positive root of (c1/c2^2) s^2 + s/c2 - sigma = 0 without cancellation
    const double b = 1.0 / c.c2;
    const double a = c.c1 / (c.c2 * c.c2);
    return 2.0 * sigma / (b + std::sqrt(b * b + 4.0 * sigma * a));
}

double cech_reach_fraction()
{
    return 0.5 * std::sqrt(3.0 / 5.0);
}

RadiusCheck cech_radius_check(double sigma, const ReachConstants& c, double eps)
{
    RadiusCheck r;
    r.sigma_prime = sigma_prime(sigma, c);
    r.sigma_double_prime = sigma_double_prime(sigma, c);
    r.margin_reach = c.c2 * c.alpha - sigma;
    r.margin_nerve = cech_reach_fraction() * c.alpha - r.sigma_prime;
    r.margin_inner = c.c2 * eps - r.sigma_double_prime;
    r.pass = r.margin_reach >= 0.0 && r.margin_nerve > 0.0 && r.sigma_double_prime > 0.0 &&
             r.margin_inner > 0.0;
    return r;
}

ChordArcReport verify_chord_arc(const PointCloud& cloud, const DistanceMatrix& dm,
                                const ReachConstants& c, double slack)
{
    const Index k = cloud.count();
    if (dm.size() != k)
        throw InvalidArgument("cloud and distance matrix sizes differ");
    ChordArcReport rep;
    rep.worst_upper_margin = -std::numeric_limits<double>::infinity();
    rep.worst_lower_margin = std::numeric_limits<double>::infinity();
    rep.worst_ratio_margin = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < k; ++i) {
        for (Index j = i + 1; j < k; ++j) {
            const double chord = (cloud.coords.row(i) - cloud.coords.row(j)).norm();
            const double d = dm(i, j);
            ++rep.pairs_checked;
            bool bad = false;
            const double ratio = chord / d - c.c2;
            rep.worst_ratio_margin = std::min(rep.worst_ratio_margin, ratio);
            if (ratio < -slack)
                bad = true;
            if (d <= c.alpha) {
                const double up = (d / chord - 1.0) - c.c1 * chord;
                const double lo = d / chord - 1.0;
                rep.worst_upper_margin = std::max(rep.worst_upper_margin, up);
                rep.worst_lower_margin = std::min(rep.worst_lower_margin, lo);
                if (up > slack || lo < -slack)
                    bad = true;
            }
            if (bad) {
                if (rep.violations == 0) {
                    rep.bad_i = static_cast<int>(i);
                    rep.bad_j = static_cast<int>(j);
                }
                ++rep.violations;
            }
        }
    }
    return rep;
}

} // namespace mrecon
