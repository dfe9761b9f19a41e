#include "pplla/chisq.hpp"

#include "pplla/types.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

namespace pplla {

namespace {

void check_dof(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw InputError("chi-square degrees of freedom must be positive");
}

double chisq_pdf(double x, double r) {
    if (x <= 0.0) return 0.0;
    const double k = 0.5 * r;
    return std::exp((k - 1.0) * std::log(x) - 0.5 * x - k * std::log(2.0) - std::lgamma(k));
}

}  // namespace

double central_chisq_cdf(double x, double r) {
    check_dof(r);
    if (std::isnan(x)) throw InputError("chi-square CDF at NaN");
    if (x <= 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    return boost::math::gamma_p(0.5 * r, 0.5 * x);
}

double chisq_upper_quantile(double alpha, double r) {
    check_dof(r);
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
    const double target = 1.0 - alpha;
    double lo = 0.0;
    double hi = std::max(1.0, r);
    while (central_chisq_cdf(hi, r) < target) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (central_chisq_cdf(mid, r) < target) lo = mid; else hi = mid;
    }
    double q = 0.5 * (lo + hi);
    for (int it = 0; it < 5; ++it) {
        const double f = central_chisq_cdf(q, r) - target;
        const double d = chisq_pdf(q, r);
        if (d <= 0.0) break;
        const double next = q - f / d;
        if (!(next > lo && next < hi)) break;
        q = next;
        if (std::abs(f) < 1e-15) break;
    }
    return q;
}

double noncentral_chisq_cdf(double x, double r, double nu) {
    check_dof(r);
    if (!(nu >= 0.0) || !std::isfinite(nu)) throw InputError("noncentrality must be >= 0");
    if (x <= 0.0) return 0.0;
    if (nu == 0.0) return central_chisq_cdf(x, r);
    const double half = 0.5 * nu;
    const double log_half = std::log(half);
    double mass = 0.0;
    double acc = 0.0;
    constexpr long kMaxTerms = 1000000;
    for (long j = 0; j < kMaxTerms; ++j) {
        const double dj = static_cast<double>(j);
        const double w = std::exp(-half + dj * log_half - std::lgamma(dj + 1.0));
        mass += w;
        acc += w * central_chisq_cdf(x, r + 2.0 * dj);
        if (dj > half && 1.0 - mass < 1e-12) return std::min(acc, 1.0);
    }
    throw SolverError("noncentral chi-square series did not terminate");
}

}  // namespace pplla
