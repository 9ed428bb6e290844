#ifndef TIPP_FIELDS_HPP
#define TIPP_FIELDS_HPP

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "gp_core.hpp"
#include "metrics.hpp"
#include "parallel.hpp"
#include "transect.hpp"

namespace tipp {

inline constexpr std::size_t kMaxSampledCells = 4096;

struct FieldSpec {
    TransectGrid grid;
    GpHyperParams params;
    std::uint64_t seed = 0;
};

/// Portable standard-normal stream: std::mt19937_64 (output fully specified by
/// the C++ standard) seeded with `seed`; each pair of draws takes two 64-bit
/// outputs u1, u2, maps them to [0,1) as (x >> 11) * 2^-53, and applies the
/// Box-Muller transform r = sqrt(-2 ln(1 - u1)), returning r cos(2 pi u2)
/// then r sin(2 pi u2).
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = unit();
        const double u2 = unit();
        const double radius = std::sqrt(-2.0 * std::log(1.0 - u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Draws z = mu + L w over the grid in column-major order, with L the
/// Cholesky factor of the full covariance (noise included).
inline FieldRealization sample_field(const FieldSpec& spec) {
    spec.grid.validate();
    spec.params.validate();
    if (spec.grid.size() > kMaxSampledCells)
        throw Error(ErrorKind::TooLarge, "sample_field supports at most " + std::to_string(kMaxSampledCells) + " cells");

    const Locations locs = spec.grid.all_locations();
    const auto llt = detail::robust_cholesky(cov_matrix(locs, spec.params));
    NormalStream normals(spec.seed);
    Eigen::VectorXd w(static_cast<Eigen::Index>(locs.size()));
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = normals.next();
    const Eigen::VectorXd z = llt.matrixL() * w;

    FieldRealization out{spec.grid, Eigen::MatrixXd(spec.grid.rows, spec.grid.cols)};
    for (int c = 0; c < spec.grid.cols; ++c)
        for (int r = 0; r < spec.grid.rows; ++r)
            out.values(r, c) = spec.params.prior_mean + z(static_cast<Eigen::Index>(c) * spec.grid.rows + r);
    return out;
}

// ---------------------------------------------------------------------------
// Field file: "# transect r=<int> n=<int> w1=<decimal> w2=<decimal>" then r
// lines of n comma-separated values, row 1 first, 17 significant digits.

inline std::string format_decimal(double v) {
    char buf[40];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
    return {buf, static_cast<std::size_t>(len)};
}

inline void write_field(std::ostream& os, const FieldRealization& field) {
    field.validate();
    const auto& g = field.grid;
    os << "# transect r=" << g.rows << " n=" << g.cols << " w1=" << format_decimal(g.spacing_h)
       << " w2=" << format_decimal(g.spacing_v) << '\n';
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            if (c > 0) os << ',';
            os << format_decimal(field.values(r, c));
        }
        os << '\n';
    }
}

namespace detail {

[[noreturn]] inline void parse_fail(std::string_view source, std::size_t line, std::size_t column,
                                    const std::string& msg) {
    throw Error(ErrorKind::ParseError, std::string(source) + ":" + std::to_string(line) + ":" +
                                           std::to_string(column) + ": " + msg);
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(std::string_view text, std::string_view source, std::size_t line, std::size_t column) {
    text = trim(text);
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
        parse_fail(source, line, column, "bad number '" + std::string(text) + "'");
    return value;
}

inline TransectGrid parse_field_header(std::string_view line, std::string_view source) {
    constexpr std::string_view prefix = "# transect ";
    if (!line.starts_with(prefix)) parse_fail(source, 1, 1, "expected '# transect' header");
    TransectGrid g;
    bool seen[4] = {false, false, false, false};
    std::size_t pos = prefix.size();
    while (pos < line.size()) {
        const std::size_t end = std::min(line.find(' ', pos), line.size());
        const std::string_view tok = line.substr(pos, end - pos);
        const std::size_t col = pos + 1;
        pos = end + 1;
        if (tok.empty()) continue;
        const auto eq = tok.find('=');
        if (eq == std::string_view::npos) parse_fail(source, 1, col, "expected key=value");
        const auto key = tok.substr(0, eq);
        const auto val = tok.substr(eq + 1);
        if (key == "r") { g.rows = parse_number<int>(val, source, 1, col); seen[0] = true; }
        else if (key == "n") { g.cols = parse_number<int>(val, source, 1, col); seen[1] = true; }
        else if (key == "w1") { g.spacing_h = parse_number<double>(val, source, 1, col); seen[2] = true; }
        else if (key == "w2") { g.spacing_v = parse_number<double>(val, source, 1, col); seen[3] = true; }
        else parse_fail(source, 1, col, "unknown header key '" + std::string(key) + "'");
    }
    if (!(seen[0] && seen[1] && seen[2] && seen[3])) parse_fail(source, 1, 1, "header needs r, n, w1 and w2");
    try {
        g.validate();
    } catch (const Error& e) {
        parse_fail(source, 1, 1, e.what());
    }
    return g;
}

} // namespace detail

inline FieldRealization read_field(std::istream& is, std::string_view source = "<field>") {
    std::string line;
    if (!std::getline(is, line)) detail::parse_fail(source, 1, 1, "empty field file");
    const TransectGrid g = detail::parse_field_header(detail::trim(line), source);

    FieldRealization out{g, Eigen::MatrixXd(g.rows, g.cols)};
    int row = 0;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string_view text = detail::trim(line);
        if (text.empty()) continue;
        if (row == g.rows)
            throw Error(ErrorKind::DimensionMismatch,
                        std::string(source) + ":" + std::to_string(line_no) + ": more than r=" + std::to_string(g.rows) + " rows");
        int col = 0;
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = std::min(text.find(',', pos), text.size());
            if (col == g.cols)
                detail::parse_fail(source, line_no, pos + 1, "ragged row: more than n=" + std::to_string(g.cols) + " values");
            out.values(row, col) = detail::parse_number<double>(text.substr(pos, comma - pos), source, line_no, pos + 1);
            ++col;
            if (comma == text.size()) break;
            pos = comma + 1;
        }
        if (col != g.cols)
            detail::parse_fail(source, line_no, text.size(),
                               "ragged row: " + std::to_string(col) + " values, expected n=" + std::to_string(g.cols));
        ++row;
    }
    if (row != g.rows)
        throw Error(ErrorKind::DimensionMismatch,
                    std::string(source) + ": " + std::to_string(row) + " rows, header says r=" + std::to_string(g.rows));
    out.validate();
    return out;
}

inline FieldRealization load_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
    return read_field(in, path);
}

inline void save_field_csv(const std::string& path, const FieldRealization& field) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
    write_field(out, field);
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

// ---------------------------------------------------------------------------
// Likelihood and fitting.

inline double log_marginal_likelihood(std::span<const Location> locs, const Eigen::VectorXd& z,
                                      const GpHyperParams& params) {
    if (locs.empty() || static_cast<std::size_t>(z.size()) != locs.size())
        throw Error(ErrorKind::DimensionMismatch, "log_marginal_likelihood: sizes differ");
    const auto llt = detail::robust_cholesky(cov_matrix(locs, params));
    const Eigen::VectorXd centered = (z.array() - params.prior_mean).matrix();
    const Eigen::VectorXd half = llt.matrixL().solve(centered);
    const double n = static_cast<double>(locs.size());
    return -0.5 * half.squaredNorm() - 0.5 * detail::log_det(llt) - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

inline double log_marginal_likelihood(const FieldRealization& field, const GpHyperParams& params) {
    field.validate();
    params.validate();
    const Locations locs = field.grid.all_locations();
    Eigen::VectorXd z(static_cast<Eigen::Index>(locs.size()));
    for (int c = 0; c < field.grid.cols; ++c)
        for (int r = 0; r < field.grid.rows; ++r)
            z(static_cast<Eigen::Index>(c) * field.grid.rows + r) = field.values(r, c);
    return log_marginal_likelihood(locs, z, params);
}

struct SearchRange {
    double lo = 1.0;
    double hi = 1.0;
};

/// Derivative-free MLE settings: a log-spaced grid of `points` values per
/// axis, then `rounds` of per-axis log-spaced refinement around the incumbent.
struct MleSearch {
    SearchRange signal_variance;
    SearchRange noise_variance;
    SearchRange lengthscale_h;
    SearchRange lengthscale_v;
    int points = 8;
    int rounds = 3;
    std::optional<double> prior_mean; ///< defaults to the field's sample mean
    unsigned threads = 0;
};

/// Ranges scaled from the data: variances around the sample variance,
/// length-scales from a quarter spacing to four times the grid extent.
inline MleSearch default_search(const FieldRealization& field) {
    field.validate();
    const double mean = field.values.mean();
    double var = (field.values.array() - mean).square().mean();
    if (!(var > 0.0)) var = 1.0;
    const auto& g = field.grid;
    MleSearch s;
    s.signal_variance = {0.05 * var, 5.0 * var};
    s.noise_variance = {1e-4 * var, var};
    s.lengthscale_h = {0.25 * g.spacing_h, 4.0 * g.spacing_h * g.cols};
    s.lengthscale_v = {0.25 * g.spacing_v, 4.0 * g.spacing_v * g.rows};
    return s;
}

namespace detail {

inline std::vector<double> log_spaced(double lo, double hi, int points) {
    if (lo == hi || points <= 1) return {lo};
    std::vector<double> out(static_cast<std::size_t>(points));
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (points - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

inline void check_range(const SearchRange& r, const char* name) {
    if (!(r.lo > 0.0) || !(r.hi >= r.lo) || !std::isfinite(r.hi))
        throw Error(ErrorKind::InvalidArgument, std::string("search range for ") + name + " must satisfy 0 < lo <= hi");
}

inline GpHyperParams from_axes(const std::array<double, 4>& v, double mean) {
    return {v[0], v[1], v[2], v[3], mean};
}

} // namespace detail

/// Maximizes the log marginal likelihood over the search box. Ties and
/// evaluation order are fixed, so the result is deterministic.
inline GpHyperParams fit_mle(const FieldRealization& field, const MleSearch& search) {
    field.validate();
    detail::check_range(search.signal_variance, "signal variance");
    detail::check_range(search.noise_variance, "noise variance");
    detail::check_range(search.lengthscale_h, "horizontal length-scale");
    detail::check_range(search.lengthscale_v, "vertical length-scale");
    if (search.points < 1 || search.rounds < 0) throw Error(ErrorKind::InvalidArgument, "bad search resolution");

    const double mean = search.prior_mean.value_or(field.values.mean());
    const std::array<SearchRange, 4> ranges{search.signal_variance, search.noise_variance, search.lengthscale_h,
                                            search.lengthscale_v};
    std::array<std::vector<double>, 4> axes;
    for (std::size_t d = 0; d < 4; ++d) axes[d] = detail::log_spaced(ranges[d].lo, ranges[d].hi, search.points);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto evaluate = [&](const std::array<double, 4>& v) {
        try {
            return log_marginal_likelihood(field, detail::from_axes(v, mean));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::SingularSystem) throw;
            return nan;
        }
    };

    const std::size_t total = axes[0].size() * axes[1].size() * axes[2].size() * axes[3].size();
    std::vector<double> scores(total);
    auto point_of = [&](std::size_t idx) {
        std::array<double, 4> v{};
        for (int d = 3; d >= 0; --d) {
            const auto& ax = axes[static_cast<std::size_t>(d)];
            v[static_cast<std::size_t>(d)] = ax[idx % ax.size()];
            idx /= ax.size();
        }
        return v;
    };
    detail::parallel_for(total, search.threads, [&](std::size_t i) { scores[i] = evaluate(point_of(i)); });

    std::optional<std::size_t> best_idx;
    for (std::size_t i = 0; i < total; ++i)
        if (!std::isnan(scores[i]) && (!best_idx || scores[i] > scores[*best_idx])) best_idx = i;
    if (!best_idx) throw Error(ErrorKind::SearchFailed, "every candidate hyperparameter set was singular");

    std::array<double, 4> best = point_of(*best_idx);
    double best_score = scores[*best_idx];

    // Multiplicative half-width of the refinement bracket per axis.
    std::array<double, 4> step{};
    for (std::size_t d = 0; d < 4; ++d)
        step[d] = axes[d].size() > 1 ? axes[d][1] / axes[d][0] : 1.0;

    for (int round = 0; round < search.rounds; ++round) {
        for (std::size_t d = 0; d < 4; ++d) {
            if (step[d] <= 1.0) continue;
            const double lo = std::max(ranges[d].lo, best[d] / step[d]);
            const double hi = std::min(ranges[d].hi, best[d] * step[d]);
            const auto candidates = detail::log_spaced(lo, hi, search.points);
            std::vector<double> cand_scores(candidates.size());
            detail::parallel_for(candidates.size(), search.threads, [&](std::size_t i) {
                auto v = best;
                v[d] = candidates[i];
                cand_scores[i] = evaluate(v);
            });
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                if (!std::isnan(cand_scores[i]) && cand_scores[i] > best_score) {
                    best_score = cand_scores[i];
                    best[d] = candidates[i];
                }
            }
            step[d] = std::exp(2.0 * std::log(step[d]) / std::max(1, search.points - 1));
        }
    }
    return detail::from_axes(best, mean);
}

} // namespace tipp

#endif
