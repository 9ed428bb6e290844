#ifndef TIPP_BOUNDS_HPP
#define TIPP_BOUNDS_HPP

#include <cmath>

#include "errors.hpp"
#include "planners.hpp"

namespace tipp {

/// Inputs of the loss bounds and cost models. lengthscale_norm_h is the
/// horizontal length-scale in units of column spacing; eta = noise/signal.
struct BoundInputs {
    int k = 1;
    int n = 1;
    int m = 1;
    int r = 1;
    double lengthscale_norm_h = 1.0;
    double eta = 0.0;

    /// Kernel correlation at horizontal distance m+1 columns.
    [[nodiscard]] double xi() const noexcept {
        const double d = static_cast<double>(m + 1);
        return std::exp(-d * d / (2.0 * lengthscale_norm_h * lengthscale_norm_h));
    }
};

namespace detail {

inline double bound_log_term(const BoundInputs& b) {
    if (!(b.lengthscale_norm_h > 0.0)) throw Error(ErrorKind::InvalidArgument, "normalized length-scale must be > 0");
    if (!std::isfinite(b.eta) || b.eta < 0.0) throw Error(ErrorKind::InvalidArgument, "eta must be >= 0");
    if (b.eta == 0.0) throw Error(ErrorKind::DegenerateNoise, "loss bound is unbounded for eta = 0");
    const double xi = b.xi();
    return std::log1p(xi * xi / (b.eta * (1.0 + b.eta)));
}

} // namespace detail

/// Entropy loss bound of MEPP(m): [k(n-m)]^2 log(1 + xi^2 / (eta(1+eta))).
inline double epsilon_mepp(const BoundInputs& b) {
    if (b.k < 1 || b.n < 1 || b.m < 1 || b.m > b.n)
        throw Error(ErrorKind::InvalidArgument, "epsilon_mepp needs k, n >= 1 and 1 <= m <= n");
    const double log_term = detail::bound_log_term(b);
    const double span = static_cast<double>(b.k) * static_cast<double>(b.n - b.m);
    return span * span * log_term;
}

/// Mutual-information loss bound of M2IPP(m):
/// k(n-2m) [rn + k(n-2m)/2] log(1 + xi^2 / (eta(1+eta))).
inline double epsilon_m2ipp(const BoundInputs& b) {
    if (b.k < 1 || b.n < 1 || b.m < 1 || 2 * b.m > b.n || b.r < 1)
        throw Error(ErrorKind::InvalidArgument, "epsilon_m2ipp needs k, n, r >= 1 and 1 <= 2m <= n");
    const double log_term = detail::bound_log_term(b);
    const double span = static_cast<double>(b.k) * static_cast<double>(b.n - 2 * b.m);
    return span * (static_cast<double>(b.r) * b.n + 0.5 * span) * log_term;
}

/// Dominant-term operation counts. Order-of-magnitude guards only; returned
/// as double because the exhaustive counts overflow 64-bit integers.
inline double cost_model(Algorithm algo, const BoundInputs& b) {
    const double chi = static_cast<double>(binomial(b.r, b.k));
    const double n = b.n;
    const double k = b.k;
    const double m = b.m;
    const double r = b.r;
    switch (algo) {
    case Algorithm::MeppM: return std::pow(chi, m + 1) * (n + std::pow(k * m, 3));
    case Algorithm::M2ippM: return std::pow(chi, 2 * m + 1) * (n + 2.0 * std::pow(r * (2 * m + 1), 3));
    case Algorithm::ExactMepp: return std::pow(chi, n) * std::pow(k * n, 3);
    case Algorithm::ExactM2ipp: return std::pow(chi, n) * std::pow(r * n, 3);
    case Algorithm::Gmepp: return chi * n * std::pow(k * n, 3);
    case Algorithm::Gm2ipp: return chi * n * std::pow(r * n, 3);
    }
    return 0.0;
}

} // namespace tipp

#endif
