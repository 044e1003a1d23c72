#pragma once

#include "mrecon/geometry.hpp"

namespace mrecon {

struct ReachConstants {
    double alpha = 1.0;    // reach
    double diameter = 1.0; // intrinsic diameter
    double c1 = 0.0;
    double c2 = 0.0;
    double eps0 = 0.0;
};

double c1(double alpha);
double c2(double alpha, double diameter);
ReachConstants make_constants(double alpha, double diameter);

double sigma_prime(double sigma, const ReachConstants& c);
double sigma_double_prime(double sigma, const ReachConstants& c);

// Upper bound on the Cech radius relative to the reach: 1/2 * sqrt(3/5).
double cech_reach_fraction();

struct RadiusCheck {
    double sigma_prime = 0.0;
    double sigma_double_prime = 0.0;
    double margin_reach = 0.0;  // c2*alpha - sigma, must be >= 0
    double margin_nerve = 0.0;  // 0.5*sqrt(3/5)*alpha - sigma', must be > 0
    double margin_inner = 0.0;  // c2*eps - sigma'', must be > 0
    bool pass = false;
};

RadiusCheck cech_radius_check(double sigma, const ReachConstants& c, double eps);

struct ChordArcReport {
    // max over pairs with d <= alpha of (d/|u-v| - 1) - c1*|u-v|; must be <= 0
    double worst_upper_margin = 0.0;
    // min over pairs with d <= alpha of d/|u-v| - 1; must be >= 0
    double worst_lower_margin = 0.0;
    // min over all pairs of |u-v|/d - c2; must be >= 0
    double worst_ratio_margin = 0.0;
    long pairs_checked = 0;
    long violations = 0;
    int bad_i = -1;
    int bad_j = -1;
    bool pass() const { return violations == 0; }
};

ChordArcReport verify_chord_arc(const PointCloud& cloud, const DistanceMatrix& dm,
                                const ReachConstants& c, double slack = 1e-12);

} // namespace mrecon
