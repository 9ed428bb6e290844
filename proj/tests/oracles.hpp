// Test-only reference implementations. They use explicit inverses, cofactor
// determinants and exhaustive enumeration over absolute grid columns, and
// share nothing with the library's Cholesky or DP code paths.
#ifndef TIPP_TESTS_ORACLES_HPP
#define TIPP_TESTS_ORACLES_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include <tipp/tipp.hpp>

namespace oracle {

using tipp::GpHyperParams;
using tipp::Location;
using tipp::Locations;
using tipp::Path;
using tipp::StageAction;
using tipp::TransectGrid;

inline double kernel(const Location& a, const Location& b, const GpHyperParams& p) {
    const double dh = a.horizontal - b.horizontal;
    const double dv = a.vertical - b.vertical;
    const double q = dh * dh / (p.lengthscale_h * p.lengthscale_h) + dv * dv / (p.lengthscale_v * p.lengthscale_v);
    return p.signal_variance * std::exp(-q / 2.0) +
           ((a.horizontal == b.horizontal && a.vertical == b.vertical) ? p.noise_variance : 0.0);
}

inline Eigen::MatrixXd cov(const Locations& a, const Locations& b, const GpHyperParams& p) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = oracle::kernel(a[i], b[j], p);
    return out;
}

/// Schur complement with an explicit inverse.
inline Eigen::MatrixXd posterior_cov(const Locations& u, const Locations& s, const GpHyperParams& p) {
    Eigen::MatrixXd kuu = cov(u, u, p);
    if (s.empty()) return kuu;
    const Eigen::MatrixXd kss_inv = cov(s, s, p).inverse();
    return kuu - cov(u, s, p) * kss_inv * cov(s, u, p);
}

/// Laplace cofactor expansion; only for small matrices.
inline double cofactor_det(const Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows();
    if (n == 1) return a(0, 0);
    if (n == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::MatrixXd minor(n - 1, n - 1);
        for (Eigen::Index r = 1; r < n; ++r) {
            Eigen::Index cc = 0;
            for (Eigen::Index c = 0; c < n; ++c) {
                if (c == j) continue;
                minor(r - 1, cc++) = a(r, c);
            }
        }
        acc += ((j % 2 == 0) ? 1.0 : -1.0) * a(0, j) * cofactor_det(minor);
    }
    return acc;
}

inline double det(const Eigen::MatrixXd& a) {
    return a.rows() <= 6 ? cofactor_det(a) : a.partialPivLu().determinant();
}

inline double entropy_of(const Eigen::MatrixXd& c) {
    const double k = static_cast<double>(c.rows());
    return 0.5 * std::log(std::pow(2.0 * std::numbers::pi * std::numbers::e, k) * det(c));
}

inline double cond_entropy(const Locations& a, const Locations& b, const GpHyperParams& p) {
    return entropy_of(posterior_cov(a, b, p));
}

inline Locations join(Locations a, const Locations& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

/// I(A;B|C) = 1/2 log(det S_{B|C} / det S_{B|C,A}).
inline double mutual_info(const Locations& a, const Locations& b, const Locations& c, const GpHyperParams& p) {
    return 0.5 * std::log(det(posterior_cov(b, c, p)) / det(posterior_cov(b, join(c, a), p)));
}

// --- grid helpers over absolute 1-indexed columns -------------------------

inline Locations sampled(const TransectGrid& g, const Path& path, int from, int to) {
    Locations out;
    for (int c = from; c <= to; ++c)
        for (int row : path.actions[static_cast<std::size_t>(c - 1)].rows)
            out.push_back({(c - 1) * g.spacing_h, (row - 1) * g.spacing_v});
    return out;
}

inline Locations unsampled(const TransectGrid& g, const Path& path, int from, int to) {
    Locations out;
    for (int c = from; c <= to; ++c) {
        const auto& rows = path.actions[static_cast<std::size_t>(c - 1)].rows;
        for (int row = 1; row <= g.rows; ++row)
            if (std::find(rows.begin(), rows.end(), row) == rows.end())
                out.push_back({(c - 1) * g.spacing_h, (row - 1) * g.spacing_v});
    }
    return out;
}

inline double true_entropy(const TransectGrid& g, const Path& path, const GpHyperParams& p) {
    const auto x = sampled(g, path, 1, g.cols);
    return entropy_of(cov(x, x, p));
}

inline double true_mi(const TransectGrid& g, const Path& path, const GpHyperParams& p) {
    return mutual_info(sampled(g, path, 1, g.cols), unsampled(g, path, 1, g.cols), {}, p);
}

/// H(x_{1:m}) + sum_{i=m+1}^{n} H(x_i | x_{i-m:i-1}).
inline double mepp_surrogate(const TransectGrid& g, const Path& path, int m, const GpHyperParams& p) {
    const auto head = sampled(g, path, 1, m);
    double acc = entropy_of(cov(head, head, p));
    for (int i = m + 1; i <= g.cols; ++i) acc += cond_entropy(sampled(g, path, i, i), sampled(g, path, i - m, i - 1), p);
    return acc;
}

/// I(x_{1:m}; u_{1:2m}) + sum_{i=2m+1}^{n-1} I(x_{i-m}; u_{i-2m:i} | x_{i-2m:i-m-1})
///   + I(x_{n-m:n}; u_{n-2m:n} | x_{n-2m:n-m-1}).
inline double m2ipp_surrogate(const TransectGrid& g, const Path& path, int m, const GpHyperParams& p) {
    const int n = g.cols;
    double acc = mutual_info(sampled(g, path, 1, m), unsampled(g, path, 1, 2 * m), {}, p);
    for (int i = 2 * m + 1; i <= n - 1; ++i)
        acc += mutual_info(sampled(g, path, i - m, i - m), unsampled(g, path, i - 2 * m, i),
                           sampled(g, path, i - 2 * m, i - m - 1), p);
    acc += mutual_info(sampled(g, path, n - m, n), unsampled(g, path, n - 2 * m, n),
                       sampled(g, path, n - 2 * m, n - m - 1), p);
    return acc;
}

/// Every k-subset of [1, r] by bitmask, sorted lexicographically.
inline std::vector<StageAction> subsets(int r, int k) {
    std::vector<StageAction> out;
    for (unsigned mask = 0; mask < (1u << r); ++mask) {
        if (std::popcount(mask) != static_cast<int>(k)) continue;
        StageAction a;
        for (int b = 0; b < r; ++b)
            if (mask & (1u << b)) a.rows.push_back(b + 1);
        out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// All paths in lexicographic order.
inline std::vector<Path> all_paths(int r, int k, int n) {
    const auto acts = subsets(r, k);
    std::vector<Path> out;
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    while (true) {
        Path p;
        for (auto i : idx) p.actions.push_back(acts[i]);
        out.push_back(std::move(p));
        int pos = n - 1;
        while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == acts.size()) idx[static_cast<std::size_t>(pos--)] = 0;
        if (pos < 0) break;
    }
    return out;
}

/// First maximizer under the same 1e-12 replacement rule the planners use.
inline Path argmax_path(const std::vector<Path>& paths, const std::function<double(const Path&)>& score,
                        double* best_value = nullptr) {
    double best = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const double v = score(paths[i]);
        if (i == 0 || v > best + 1e-12) {
            best = v;
            arg = i;
        }
    }
    if (best_value) *best_value = best;
    return paths[arg];
}

// --- random instances ------------------------------------------------------

struct Instance {
    TransectGrid grid;
    GpHyperParams params;
};

/// Random small instance. Length-scales are drawn in units of the spacing.
inline Instance random_instance(std::mt19937_64& rng, int r, int n, double eta_lo = 0.01, double eta_hi = 1.0) {
    std::uniform_real_distribution<double> spacing(1.0, 10.0);
    std::uniform_real_distribution<double> scale(0.4, 3.0);
    std::uniform_real_distribution<double> sig(0.1, 5.0);
    std::uniform_real_distribution<double> log_eta(std::log(eta_lo), std::log(eta_hi));
    Instance inst;
    inst.grid = {r, n, spacing(rng), spacing(rng)};
    inst.params.signal_variance = sig(rng);
    inst.params.noise_variance = inst.params.signal_variance * std::exp(log_eta(rng));
    inst.params.lengthscale_h = scale(rng) * inst.grid.spacing_h;
    inst.params.lengthscale_v = scale(rng) * inst.grid.spacing_v;
    inst.params.prior_mean = 0.0;
    return inst;
}

inline tipp::PlanRequest request(const Instance& inst, int k, tipp::Algorithm algo, int m = 1) {
    tipp::PlanRequest req;
    req.grid = inst.grid;
    req.params = inst.params;
    req.k = k;
    req.algorithm = algo;
    req.m = m;
    req.threads = 1;
    return req;
}

} // namespace oracle

#endif
