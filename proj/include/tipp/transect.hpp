#ifndef TIPP_TRANSECT_HPP
#define TIPP_TRANSECT_HPP

#include <algorithm>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "gp_core.hpp"

namespace tipp {

/// r x n lattice of sampling locations. Columns and rows are 1-indexed;
/// column 1 is the leftmost stage and row 1 the top row.
struct TransectGrid {
    int rows = 1;
    int cols = 1;
    double spacing_h = 1.0;
    double spacing_v = 1.0;

    void validate() const {
        if (rows < 1 || cols < 1) throw Error(ErrorKind::InvalidArgument, "grid needs rows >= 1 and cols >= 1");
        if (!(spacing_h > 0.0) || !(spacing_v > 0.0) || !std::isfinite(spacing_h) || !std::isfinite(spacing_v))
            throw Error(ErrorKind::InvalidArgument, "grid spacings must be positive");
    }

    [[nodiscard]] Location location(int col, int row) const {
        if (col < 1 || col > cols || row < 1 || row > rows)
            throw Error(ErrorKind::OutOfRange, "grid cell (" + std::to_string(col) + "," + std::to_string(row) + ")");
        return {static_cast<double>(col - 1) * spacing_h, static_cast<double>(row - 1) * spacing_v};
    }

    [[nodiscard]] std::size_t size() const noexcept {
        return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    }

    /// Every location, column-major (column 1 top to bottom first).
    [[nodiscard]] Locations all_locations() const {
        Locations out;
        out.reserve(size());
        for (int c = 1; c <= cols; ++c)
            for (int r = 1; r <= rows; ++r) out.push_back(location(c, r));
        return out;
    }

    friend bool operator==(const TransectGrid&, const TransectGrid&) = default;
};

/// Rows sampled by the team in one column, strictly increasing.
struct StageAction {
    std::vector<int> rows;

    [[nodiscard]] std::size_t size() const noexcept { return rows.size(); }

    friend auto operator<=>(const StageAction&, const StageAction&) = default;
    friend bool operator==(const StageAction&, const StageAction&) = default;
};

struct Path {
    std::vector<StageAction> actions;

    [[nodiscard]] std::size_t length() const noexcept { return actions.size(); }
    [[nodiscard]] std::size_t robots() const noexcept { return actions.empty() ? 0 : actions.front().size(); }

    friend auto operator<=>(const Path&, const Path&) = default;
    friend bool operator==(const Path&, const Path&) = default;
};

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t acc = 1;
    for (int i = 1; i <= k; ++i) acc = acc * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return acc;
}

/// All C(r,k) sorted k-subsets of [1, r] in lexicographic order.
inline std::vector<StageAction> enumerate_actions(int r, int k) {
    if (r < 1 || k < 1 || k > r)
        throw Error(ErrorKind::InvalidArity, "need 1 <= k <= r, got r=" + std::to_string(r) + " k=" + std::to_string(k));
    std::vector<StageAction> out;
    out.reserve(binomial(r, k));
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i + 1;
    while (true) {
        out.push_back(StageAction{idx});
        int pos = k - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == r - k + pos + 1) --pos;
        if (pos < 0) break;
        ++idx[static_cast<std::size_t>(pos)];
        for (int j = pos + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

inline void validate_action(const StageAction& a, int r) {
    if (a.rows.empty() || static_cast<int>(a.rows.size()) > r)
        throw Error(ErrorKind::InvalidArity, "action size must be in [1, r]");
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        if (a.rows[i] < 1 || a.rows[i] > r) throw Error(ErrorKind::OutOfRange, "action row out of range");
        if (i > 0 && a.rows[i] <= a.rows[i - 1])
            throw Error(ErrorKind::InvalidArgument, "action rows must be strictly increasing");
    }
}

inline Locations action_locations(const TransectGrid& g, int col, const StageAction& a) {
    Locations out;
    out.reserve(a.rows.size());
    for (int row : a.rows) out.push_back(g.location(col, row));
    return out;
}

/// Rows of [1, r] not in a, sorted. Empty when the action covers the column.
inline StageAction complement(const StageAction& a, int r) {
    StageAction out;
    out.rows.reserve(static_cast<std::size_t>(std::max(0, r - static_cast<int>(a.rows.size()))));
    for (int row = 1; row <= r; ++row)
        if (!std::binary_search(a.rows.begin(), a.rows.end(), row)) out.rows.push_back(row);
    return out;
}

/// Actions for stages max(1, i-m) .. i-1 (1-indexed stage i).
inline std::vector<StageAction> window(const Path& p, int i, int m) {
    if (i < 1 || i > static_cast<int>(p.length()))
        throw Error(ErrorKind::OutOfRange, "window stage out of range");
    const int first = std::max(1, i - m);
    return {p.actions.begin() + (first - 1), p.actions.begin() + (i - 1)};
}

inline void validate_path(const Path& p, const TransectGrid& g) {
    if (static_cast<int>(p.length()) != g.cols)
        throw Error(ErrorKind::DimensionMismatch,
                    "path has " + std::to_string(p.length()) + " stages, grid has " + std::to_string(g.cols) + " columns");
    const std::size_t k = p.robots();
    for (const auto& a : p.actions) {
        validate_action(a, g.rows);
        if (a.size() != k) throw Error(ErrorKind::InvalidArgument, "path actions differ in robot count");
    }
}

/// Sampled locations of a path in stage order.
inline Locations path_locations(const TransectGrid& g, const Path& p) {
    Locations out;
    for (std::size_t i = 0; i < p.length(); ++i) {
        const auto locs = action_locations(g, static_cast<int>(i) + 1, p.actions[i]);
        out.insert(out.end(), locs.begin(), locs.end());
    }
    return out;
}

/// Locations not sampled by the path, column-major.
inline Locations unobserved_locations(const TransectGrid& g, const Path& p) {
    Locations out;
    for (std::size_t i = 0; i < p.length(); ++i) {
        const auto locs = action_locations(g, static_cast<int>(i) + 1, complement(p.actions[i], g.rows));
        out.insert(out.end(), locs.begin(), locs.end());
    }
    return out;
}

} // namespace tipp

#endif
