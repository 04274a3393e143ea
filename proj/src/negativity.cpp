#include "entsim/negativity.hpp"

#include <cmath>
#include <stdexcept>

namespace entsim {

double symplectic_nu(const CovBlock& plus, const CovBlock& minus) {
    const double dp = plus.det(), dm = minus.det();
    if (!(dp > 0) || !(dm > 0))
        throw std::invalid_argument("symplectic_nu: blocks must have positive determinant");
    const double sigma = plus.s11 * minus.s22 + plus.s22 * minus.s11 - 2.0 * plus.s12 * minus.s12;
    double radicand = sigma * sigma - 4.0 * dp * dm;
    const double scale = std::max(1.0, sigma * sigma);
    if (radicand < -1e-12 * scale)
        throw std::invalid_argument("symplectic_nu: inconsistent blocks (negative radicand)");
    if (radicand < 0) radicand = 0;
    // sigma - sqrt(sigma^2 - 4 dp dm) cancels catastrophically for strongly
    // squeezed states; the conjugate form is exact in that limit
    return std::sqrt(2.0 * dp * dm / (sigma + std::sqrt(radicand)));
}

NegativityReport log_negativity(const CovBlock& plus, const CovBlock& minus) {
    NegativityReport r;
    r.nu_tilde = symplectic_nu(plus, minus);
    r.log_neg = -std::log(2.0 * r.nu_tilde);
    r.entangled = r.log_neg > 0;
    return r;
}

double period_average(const std::vector<double>& t, const std::vector<double>& values,
                      double period) {
    if (t.size() != values.size() || t.size() < 65)
        throw std::invalid_argument("period_average: need >= 64 uniform samples over one period");
    const double span = t.back() - t.front();
    if (std::abs(span - period) > 1e-9 * period)
        throw std::invalid_argument("period_average: sample span does not match the period");
    double acc = 0;
    for (std::size_t i = 1; i < t.size(); ++i)
        acc += 0.5 * (values[i] + values[i - 1]) * (t[i] - t[i - 1]);
    return acc / span;
}

} // namespace entsim
