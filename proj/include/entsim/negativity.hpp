#pragma once

#include "entsim/params.hpp"

#include <vector>

namespace entsim {

struct NegativityReport {
    double nu_tilde = 0;  // minimal symplectic eigenvalue of the PT state
    double log_neg = 0;   // E_N = -ln(2 nu)
    bool entangled = false;
};

/// Minimal symplectic eigenvalue of the partially transposed two-mode state,
/// nu = sqrt((sigma - sqrt(sigma^2 - 4 |S+||S-|)) / 2) with
/// sigma = S11+ S22- + S22+ S11- - 2 S12+ S12-.
/// Throws when the radicand is negative beyond roundoff (-1e-12).
double symplectic_nu(const CovBlock& plus, const CovBlock& minus);

NegativityReport log_negativity(const CovBlock& plus, const CovBlock& minus);

/// Trapezoidal mean of a uniformly sampled scalar over exactly one period.
double period_average(const std::vector<double>& t, const std::vector<double>& values,
                      double period);

} // namespace entsim
