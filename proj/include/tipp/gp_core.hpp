#ifndef TIPP_GP_CORE_HPP
#define TIPP_GP_CORE_HPP

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace tipp {

/// Squared-exponential GP hyperparameters with separate length-scales along
/// (horizontal) and across (vertical) the transect, plus a constant prior mean.
struct GpHyperParams {
    double signal_variance = 1.0;
    double noise_variance = 0.0;
    double lengthscale_h = 1.0;
    double lengthscale_v = 1.0;
    double prior_mean = 0.0;

    /// Noise-to-signal ratio.
    [[nodiscard]] double eta() const noexcept { return noise_variance / signal_variance; }

    void validate() const {
        auto finite_pos = [](double v) { return std::isfinite(v) && v > 0.0; };
        if (!finite_pos(signal_variance) || !finite_pos(lengthscale_h) || !finite_pos(lengthscale_v) ||
            !std::isfinite(noise_variance) || noise_variance < 0.0 || !std::isfinite(prior_mean)) {
            throw Error(ErrorKind::InvalidArgument, "invalid GP hyperparameters");
        }
    }
};

struct Location {
    double horizontal = 0.0;
    double vertical = 0.0;

    friend bool operator==(const Location&, const Location&) = default;
};

using CovMatrix = Eigen::MatrixXd;
using Locations = std::vector<Location>;

inline constexpr double kJitterScale = 1e-10;
inline constexpr int kJitterRetries = 3;

/// Squared-exponential covariance. The noise term applies only to
/// coordinate-identical locations.
inline double kernel(const Location& x, const Location& x2, const GpHyperParams& p) noexcept {
    const double dh = (x.horizontal - x2.horizontal) / p.lengthscale_h;
    const double dv = (x.vertical - x2.vertical) / p.lengthscale_v;
    double value = p.signal_variance * std::exp(-0.5 * (dh * dh + dv * dv));
    if (x == x2) value += p.noise_variance;
    return value;
}

inline CovMatrix cross_cov(std::span<const Location> a, std::span<const Location> b, const GpHyperParams& p) {
    CovMatrix out(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = kernel(a[i], b[j], p);
    return out;
}

inline CovMatrix cov_matrix(std::span<const Location> locs, const GpHyperParams& p) {
    const auto n = static_cast<Eigen::Index>(locs.size());
    CovMatrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out(i, i) = kernel(locs[i], locs[i], p);
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = kernel(locs[i], locs[j], p);
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

namespace detail {

/// Cholesky factorization with escalating diagonal jitter: 1e-10, 1e-9, 1e-8
/// times the mean diagonal, then SingularSystem.
inline Eigen::LLT<Eigen::MatrixXd> robust_cholesky(const Eigen::MatrixXd& a) {
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) return llt;

    const double dim = static_cast<double>(a.rows());
    double jitter = kJitterScale * std::abs(a.trace()) / dim;
    for (int attempt = 0; attempt < kJitterRetries; ++attempt, jitter *= 10.0) {
        Eigen::MatrixXd shifted = a;
        shifted.diagonal().array() += jitter;
        llt.compute(shifted);
        if (llt.info() == Eigen::Success) return llt;
    }
    throw Error(ErrorKind::SingularSystem,
                "Cholesky failed on " + std::to_string(a.rows()) + "x" + std::to_string(a.rows()) + " matrix");
}

inline double log_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
    const auto diag = llt.matrixLLT().diagonal();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        if (!(diag(i) > 0.0) || !std::isfinite(diag(i)))
            throw Error(ErrorKind::SingularSystem, "non-positive Cholesky pivot");
        acc += std::log(diag(i));
    }
    return 2.0 * acc;
}

inline Locations concat(std::span<const Location> a, std::span<const Location> b) {
    Locations out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

} // namespace detail

/// Posterior covariance of u given observations at s. Independent of the
/// measurement values; an empty s returns the prior covariance.
inline CovMatrix posterior_cov(std::span<const Location> u, std::span<const Location> s, const GpHyperParams& p) {
    if (u.empty()) throw Error(ErrorKind::InvalidArgument, "posterior_cov: empty target set");
    CovMatrix prior = cov_matrix(u, p);
    if (s.empty()) return prior;

    const auto llt = detail::robust_cholesky(cov_matrix(s, p));
    // A = L^{-1} Sigma_su, so Sigma_us Sigma_ss^{-1} Sigma_su = A^T A.
    const Eigen::MatrixXd a = llt.matrixL().solve(cross_cov(s, u, p));
    CovMatrix post = prior;
    post.noalias() -= a.transpose() * a;
    return 0.5 * (post + post.transpose());
}

inline Eigen::VectorXd posterior_mean(std::span<const Location> u, std::span<const Location> s,
                                      const Eigen::VectorXd& z_s, const GpHyperParams& p) {
    if (s.empty()) throw Error(ErrorKind::InvalidArgument, "posterior_mean: no observations");
    if (static_cast<std::size_t>(z_s.size()) != s.size())
        throw Error(ErrorKind::DimensionMismatch, "posterior_mean: |z_s| != |s|");

    const auto llt = detail::robust_cholesky(cov_matrix(s, p));
    const Eigen::VectorXd alpha = llt.solve((z_s.array() - p.prior_mean).matrix());
    Eigen::VectorXd mean = cross_cov(u, s, p) * alpha;
    mean.array() += p.prior_mean;
    return mean;
}

/// Differential entropy (nats) of a Gaussian with covariance c.
inline double joint_entropy(const CovMatrix& c) {
    if (c.rows() == 0 || c.rows() != c.cols()) throw Error(ErrorKind::InvalidArgument, "joint_entropy: bad matrix");
    const double dim = static_cast<double>(c.rows());
    const double log_2pie = std::log(2.0 * std::numbers::pi * std::numbers::e);
    return 0.5 * (dim * log_2pie + detail::log_det(detail::robust_cholesky(c)));
}

/// H(Z_a | Z_b); b may be empty.
inline double conditional_entropy(std::span<const Location> a, std::span<const Location> b, const GpHyperParams& p) {
    return joint_entropy(posterior_cov(a, b, p));
}

/// Holds the factorization of one conditioning set so that many target sets
/// can be conditioned on it without refactorizing.
class GpConditioner {
public:
    GpConditioner(std::span<const Location> given, const GpHyperParams& p)
        : given_(given.begin(), given.end()), params_(p) {
        if (!given_.empty()) llt_ = detail::robust_cholesky(cov_matrix(given_, params_));
    }

    [[nodiscard]] std::size_t size() const noexcept { return given_.size(); }

    [[nodiscard]] CovMatrix posterior_cov(std::span<const Location> u) const {
        if (u.empty()) throw Error(ErrorKind::InvalidArgument, "posterior_cov: empty target set");
        CovMatrix prior = cov_matrix(u, params_);
        if (given_.empty()) return prior;
        const Eigen::MatrixXd a = llt_.matrixL().solve(cross_cov(given_, u, params_));
        prior.noalias() -= a.transpose() * a;
        return 0.5 * (prior + prior.transpose());
    }

    [[nodiscard]] double conditional_entropy(std::span<const Location> u) const {
        return joint_entropy(posterior_cov(u));
    }

private:
    Locations given_;
    GpHyperParams params_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// I(Z_a; Z_b | Z_given) = H(b | given) - H(b | given, a).
inline double mutual_information(std::span<const Location> a, std::span<const Location> b,
                                 std::span<const Location> given, const GpHyperParams& p) {
    if (a.empty() || b.empty()) throw Error(ErrorKind::InvalidArgument, "mutual_information: empty set");
    for (const auto& x : a)
        for (const auto& y : b)
            if (x == y) throw Error(ErrorKind::OverlappingSets, "mutual_information: sets share a location");
    const Locations given_and_a = detail::concat(given, a);
    return conditional_entropy(b, given, p) - conditional_entropy(b, given_and_a, p);
}

} // namespace tipp

#endif
