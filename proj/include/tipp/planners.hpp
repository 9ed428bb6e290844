#ifndef TIPP_PLANNERS_HPP
#define TIPP_PLANNERS_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "gp_core.hpp"
#include "parallel.hpp"
#include "transect.hpp"

namespace tipp {

enum class Algorithm { MeppM, M2ippM, Gmepp, Gm2ipp, ExactMepp, ExactM2ipp };

constexpr std::string_view algorithm_name(Algorithm a) noexcept {
    switch (a) {
    case Algorithm::MeppM: return "mepp";
    case Algorithm::M2ippM: return "m2ipp";
    case Algorithm::Gmepp: return "gmepp";
    case Algorithm::Gm2ipp: return "gm2ipp";
    case Algorithm::ExactMepp: return "exact-mepp";
    case Algorithm::ExactM2ipp: return "exact-m2ipp";
    }
    return "unknown";
}

inline Algorithm parse_algorithm(std::string_view name) {
    for (auto a : {Algorithm::MeppM, Algorithm::M2ippM, Algorithm::Gmepp, Algorithm::Gm2ipp, Algorithm::ExactMepp,
                   Algorithm::ExactM2ipp})
        if (algorithm_name(a) == name) return a;
    throw Error(ErrorKind::InvalidArgument, "unknown algorithm '" + std::string(name) + "'");
}

constexpr bool uses_mutual_information(Algorithm a) noexcept {
    return a == Algorithm::M2ippM || a == Algorithm::Gm2ipp || a == Algorithm::ExactM2ipp;
}

/// Candidates replace the incumbent only when better by more than this, so
/// the first maximizer in lexicographic order wins near-ties.
inline constexpr double kTieTolerance = 1e-12;
inline constexpr std::uint64_t kDefaultBudget = 10'000'000;

struct PlanRequest {
    TransectGrid grid;
    GpHyperParams params;
    int k = 1;
    Algorithm algorithm = Algorithm::MeppM;
    int m = 1;
    std::uint64_t budget_guard = kDefaultBudget;
    unsigned threads = 0; ///< 0 = hardware concurrency
};

/// Per-stage DP slice indexed by window code.
struct StagePolicy {
    std::vector<double> value;
    std::vector<std::uint32_t> best_next;
};

/// DP value/policy table. Windows are sequences of `arity` actions (oldest
/// first) encoded base chi with the oldest action most significant, so code
/// order equals lexicographic window order.
class ValueTable {
public:
    ValueTable(std::vector<StageAction> actions, int arity, int first_stage, int last_stage)
        : actions_(std::move(actions)), arity_(arity), first_stage_(first_stage), last_stage_(last_stage) {
        windows_ = 1;
        for (int i = 0; i < arity_; ++i) windows_ *= actions_.size();
        stages_.resize(static_cast<std::size_t>(last_stage_ - first_stage_ + 1));
    }

    [[nodiscard]] int arity() const noexcept { return arity_; }
    [[nodiscard]] std::size_t chi() const noexcept { return actions_.size(); }
    [[nodiscard]] std::uint64_t windows() const noexcept { return windows_; }
    [[nodiscard]] int first_stage() const noexcept { return first_stage_; }
    [[nodiscard]] int last_stage() const noexcept { return last_stage_; }
    [[nodiscard]] const std::vector<StageAction>& actions() const noexcept { return actions_; }

    [[nodiscard]] StagePolicy& stage(int i) { return stages_.at(stage_index(i)); }
    [[nodiscard]] const StagePolicy& stage(int i) const { return stages_.at(stage_index(i)); }

    [[nodiscard]] std::uint64_t encode(std::span<const StageAction> window) const {
        if (static_cast<int>(window.size()) != arity_)
            throw Error(ErrorKind::UnknownWindow, "window length " + std::to_string(window.size()) +
                                                      " != table arity " + std::to_string(arity_));
        std::uint64_t code = 0;
        for (const auto& a : window) {
            const auto it = std::lower_bound(actions_.begin(), actions_.end(), a);
            if (it == actions_.end() || *it != a) throw Error(ErrorKind::UnknownWindow, "action not in table");
            code = code * actions_.size() + static_cast<std::uint64_t>(it - actions_.begin());
        }
        return code;
    }

    [[nodiscard]] std::vector<StageAction> decode(std::uint64_t code) const {
        std::vector<StageAction> out(static_cast<std::size_t>(arity_));
        for (int i = arity_ - 1; i >= 0; --i) {
            out[static_cast<std::size_t>(i)] = actions_[code % actions_.size()];
            code /= actions_.size();
        }
        return out;
    }

    /// Window after appending action a.
    [[nodiscard]] std::uint64_t shift(std::uint64_t code, std::uint32_t a) const noexcept {
        return (code % (windows_ / actions_.size())) * actions_.size() + a;
    }

private:
    [[nodiscard]] std::size_t stage_index(int i) const {
        if (i < first_stage_ || i > last_stage_) throw Error(ErrorKind::OutOfRange, "stage outside policy table");
        return static_cast<std::size_t>(i - first_stage_);
    }

    std::vector<StageAction> actions_;
    int arity_;
    int first_stage_;
    int last_stage_;
    std::uint64_t windows_;
    std::vector<StagePolicy> stages_;
};

/// Best next action at `stage` given the `arity` preceding actions. Works for
/// any window, including ones the planned path never visits.
inline StageAction query_policy(const ValueTable& table, int stage, std::span<const StageAction> window) {
    const auto code = table.encode(window);
    return table.actions()[table.stage(stage).best_next[code]];
}

/// Instrumentation. `*_evals` count information terms consumed by the
/// planner; for the DP planners interior terms are served from one
/// stationary table, so `*_computations` counts the distinct terms actually
/// computed. `linalg_work` sums cubed dimensions of every factorization.
struct PlanCounters {
    std::uint64_t entropy_evals = 0;
    std::uint64_t entropy_computations = 0;
    std::uint64_t mi_evals = 0;
    std::uint64_t mi_computations = 0;
    double linalg_work = 0.0;
};

struct PlanResult {
    Algorithm algorithm = Algorithm::MeppM;
    Path path;
    double objective = 0.0; ///< nats, the planner's own criterion
    PlanCounters counters;
    double wall_time = 0.0; ///< seconds
    std::optional<ValueTable> policy;
};

namespace detail {

inline std::uint64_t saturating_pow(std::uint64_t base, int exp) noexcept {
    std::uint64_t acc = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && acc > std::numeric_limits<std::uint64_t>::max() / base)
            return std::numeric_limits<std::uint64_t>::max();
        acc *= base;
    }
    return acc;
}

inline double cube(std::size_t d) noexcept {
    const double x = static_cast<double>(d);
    return x * x * x;
}

/// Factorizations behind I(A; B | C) = H(B | C) - H(B | C, A).
inline double mi_work(std::size_t a, std::size_t b, std::size_t c) noexcept {
    return cube(c) + cube(c + a) + 2.0 * cube(b);
}

inline void check_budget(std::uint64_t needed, std::uint64_t guard, std::string_view what) {
    if (needed > guard)
        throw Error(ErrorKind::BudgetExceeded,
                    std::string(what) + " needs " +
                        (needed == std::numeric_limits<std::uint64_t>::max() ? std::string("more than 2^64")
                                                                              : std::to_string(needed)) +
                        " entries, budget is " + std::to_string(guard));
}

inline void validate_request(const PlanRequest& req) {
    req.grid.validate();
    req.params.validate();
    if (req.k < 1 || req.k > req.grid.rows)
        throw Error(ErrorKind::InvalidArity, "robots per column must be in [1, rows]");
    if (uses_mutual_information(req.algorithm) && req.k == req.grid.rows)
        throw Error(ErrorKind::NoUnobserved, "k = r leaves no unobserved locations");
    const int n = req.grid.cols;
    if (req.algorithm == Algorithm::MeppM && (req.m < 1 || req.m >= n))
        throw Error(ErrorKind::InvalidArgument, "MEPP(m) needs 1 <= m < n");
    if (req.algorithm == Algorithm::M2ippM && (req.m < 1 || 2 * req.m >= n))
        throw Error(ErrorKind::InvalidArgument, "M2IPP(m) needs 1 <= m and 2m < n");
}

/// Sampled and unobserved locations of every action in each of the first
/// `columns` grid columns.
struct ActionGeometry {
    std::vector<StageAction> actions;
    std::vector<std::vector<Locations>> sampled;
    std::vector<std::vector<Locations>> unobserved;

    ActionGeometry(const TransectGrid& g, int k, int columns) : actions(enumerate_actions(g.rows, k)) {
        sampled.resize(static_cast<std::size_t>(columns));
        unobserved.resize(static_cast<std::size_t>(columns));
        for (int c = 0; c < columns; ++c) {
            for (const auto& a : actions) {
                sampled[static_cast<std::size_t>(c)].push_back(action_locations(g, c + 1, a));
                unobserved[static_cast<std::size_t>(c)].push_back(action_locations(g, c + 1, complement(a, g.rows)));
            }
        }
    }

    [[nodiscard]] std::size_t chi() const noexcept { return actions.size(); }

    /// Appends the locations of actions digits[c] in columns [from, to).
    void gather(std::span<const std::uint32_t> digits, int from, int to, bool observed, Locations& out) const {
        const auto& src = observed ? sampled : unobserved;
        for (int c = from; c < to; ++c) {
            const auto& locs = src[static_cast<std::size_t>(c)][digits[static_cast<std::size_t>(c)]];
            out.insert(out.end(), locs.begin(), locs.end());
        }
    }
};

inline std::vector<std::uint32_t> digits_of(std::uint64_t code, std::size_t chi, int count) {
    std::vector<std::uint32_t> d(static_cast<std::size_t>(count));
    for (int i = count - 1; i >= 0; --i) {
        d[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(code % chi);
        code /= chi;
    }
    return d;
}

/// One backward-induction step: out(w) = max_a term(w, a) + next(shift(w, a)).
inline void max_compose(const ValueTable& table, const std::vector<double>& term, const std::vector<double>* next,
                        StagePolicy& out, unsigned threads) {
    const std::uint64_t windows = table.windows();
    const std::size_t chi = table.chi();
    out.value.assign(windows, 0.0);
    out.best_next.assign(windows, 0);
    parallel_for(windows, threads, [&](std::size_t w) {
        double best = 0.0;
        std::uint32_t arg = 0;
        for (std::uint32_t a = 0; a < chi; ++a) {
            double v = term[w * chi + a];
            if (next) v += (*next)[table.shift(w, a)];
            if (a == 0 || v > best + kTieTolerance) {
                best = v;
                arg = a;
            }
        }
        out.value[w] = best;
        out.best_next[w] = arg;
    });
}

/// First maximizer of first(w) + tail(w) over all windows.
inline std::uint64_t argmax_first_block(const std::vector<double>& first, const std::vector<double>& tail,
                                        double& best) {
    std::uint64_t arg = 0;
    for (std::uint64_t w = 0; w < first.size(); ++w) {
        const double v = first[w] + tail[w];
        if (w == 0 || v > best + kTieTolerance) {
            best = v;
            arg = w;
        }
    }
    return arg;
}

inline Path unroll_policy(const ValueTable& table, std::uint64_t first_window) {
    Path path;
    path.actions = table.decode(first_window);
    std::uint64_t w = first_window;
    for (int i = table.first_stage(); i <= table.last_stage(); ++i) {
        const std::uint32_t a = table.stage(i).best_next[w];
        path.actions.push_back(table.actions()[a]);
        w = table.shift(w, a);
    }
    return path;
}

class Stopwatch {
public:
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

} // namespace detail

/// MEPP(m): backward induction over windows of m actions. The conditional
/// entropy H(x_i | x_{i-m:i-1}) depends only on relative geometry, so a
/// single chi^{m+1} table serves every stage m+1..n.
///
/// Counting: entropy_computations = chi^{m+1} + chi^m;
/// entropy_evals = chi^{m+1} * (n - m) + chi^m.
inline PlanResult solve_mepp_m(const PlanRequest& req) {
    PlanRequest r = req;
    r.algorithm = Algorithm::MeppM;
    detail::validate_request(r);
    detail::Stopwatch clock;

    const int n = r.grid.cols;
    const int m = r.m;
    const std::size_t chi = binomial(r.grid.rows, r.k);
    detail::check_budget(detail::saturating_pow(chi, m + 1), r.budget_guard, "MEPP(m) stage table");

    const detail::ActionGeometry geo(r.grid, r.k, m + 1);
    ValueTable table(geo.actions, m, m + 1, n);
    const std::uint64_t windows = table.windows();

    std::vector<double> term(windows * chi);
    std::vector<double> first(windows);
    detail::parallel_for(windows, r.threads, [&](std::size_t w) {
        const auto digits = detail::digits_of(w, chi, m);
        Locations history;
        geo.gather(digits, 0, m, true, history);
        first[w] = joint_entropy(cov_matrix(history, r.params));
        const GpConditioner cond(history, r.params);
        for (std::size_t a = 0; a < chi; ++a) term[w * chi + a] = cond.conditional_entropy(geo.sampled[m][a]);
    });

    detail::max_compose(table, term, nullptr, table.stage(n), r.threads);
    for (int i = n - 1; i >= m + 1; --i) detail::max_compose(table, term, &table.stage(i + 1).value, table.stage(i), r.threads);

    PlanResult out;
    out.algorithm = Algorithm::MeppM;
    const std::uint64_t w0 = detail::argmax_first_block(first, table.stage(m + 1).value, out.objective);
    out.path = detail::unroll_policy(table, w0);

    const auto km = static_cast<std::size_t>(r.k * m);
    const auto k = static_cast<std::size_t>(r.k);
    out.counters.entropy_computations = windows * chi + windows;
    out.counters.entropy_evals = windows * chi * static_cast<std::uint64_t>(n - m) + windows;
    out.counters.linalg_work = static_cast<double>(windows) * (2.0 * detail::cube(km) + chi * detail::cube(k));
    out.policy = std::move(table);
    out.wall_time = clock.seconds();
    return out;
}

/// M2IPP(m): backward induction over windows of 2m actions. Interior stages
/// use I(x_{i-m}; u_{i-2m:i} | x_{i-2m:i-m-1}); the last stage uses
/// I(x_{n-m:n}; u_{n-2m:n} | x_{n-2m:n-m-1}); the first 2m stages are chosen
/// jointly with I(x_{1:m}; u_{1:2m}). Both stage terms are stationary and are
/// tabulated once over chi^{2m+1} entries.
///
/// Counting: mi_computations = chi^{2m+1} * (1 + [n > 2m+1]) + chi^{2m};
/// mi_evals = chi^{2m+1} * (n - 2m) + chi^{2m}.
inline PlanResult solve_m2ipp_m(const PlanRequest& req) {
    PlanRequest r = req;
    r.algorithm = Algorithm::M2ippM;
    detail::validate_request(r);
    detail::Stopwatch clock;

    const int n = r.grid.cols;
    const int m = r.m;
    const int arity = 2 * m;
    const std::size_t chi = binomial(r.grid.rows, r.k);
    detail::check_budget(detail::saturating_pow(chi, arity + 1), r.budget_guard, "M2IPP(m) stage table");

    const detail::ActionGeometry geo(r.grid, r.k, arity + 1);
    ValueTable table(geo.actions, arity, arity + 1, n);
    const std::uint64_t windows = table.windows();
    const bool has_interior = n > arity + 1;

    std::vector<double> interior(has_interior ? windows * chi : 0);
    std::vector<double> terminal(windows * chi);
    std::vector<double> first(windows);
    detail::parallel_for(windows, r.threads, [&](std::size_t w) {
        auto digits = detail::digits_of(w, chi, arity);
        {
            Locations x_head;
            Locations u_block;
            geo.gather(digits, 0, m, true, x_head);
            geo.gather(digits, 0, arity, false, u_block);
            first[w] = mutual_information(x_head, u_block, {}, r.params);
        }
        Locations given;
        geo.gather(digits, 0, m, true, given);
        digits.push_back(0);
        for (std::uint32_t a = 0; a < chi; ++a) {
            digits.back() = a;
            Locations u_block;
            geo.gather(digits, 0, arity + 1, false, u_block);
            if (has_interior) {
                const auto& x_mid = geo.sampled[static_cast<std::size_t>(m)][digits[static_cast<std::size_t>(m)]];
                interior[w * chi + a] = mutual_information(x_mid, u_block, given, r.params);
            }
            Locations x_tail;
            geo.gather(digits, m, arity + 1, true, x_tail);
            terminal[w * chi + a] = mutual_information(x_tail, u_block, given, r.params);
        }
    });

    detail::max_compose(table, terminal, nullptr, table.stage(n), r.threads);
    for (int i = n - 1; i >= arity + 1; --i)
        detail::max_compose(table, interior, &table.stage(i + 1).value, table.stage(i), r.threads);

    PlanResult out;
    out.algorithm = Algorithm::M2ippM;
    const std::uint64_t w0 = detail::argmax_first_block(first, table.stage(arity + 1).value, out.objective);
    out.path = detail::unroll_policy(table, w0);

    const std::uint64_t stage_terms = windows * chi;
    out.counters.mi_computations = stage_terms * (has_interior ? 2 : 1) + windows;
    out.counters.mi_evals = stage_terms * static_cast<std::uint64_t>(n - arity) + windows;
    const auto k = static_cast<std::size_t>(r.k);
    const auto km = k * static_cast<std::size_t>(m);
    const auto free_rows = static_cast<std::size_t>(r.grid.rows - r.k);
    const auto u_block = free_rows * static_cast<std::size_t>(arity + 1);
    out.counters.linalg_work =
        static_cast<double>(windows) * detail::mi_work(km, free_rows * static_cast<std::size_t>(arity), 0) +
        static_cast<double>(stage_terms) * detail::mi_work(km + k, u_block, km);
    if (has_interior) out.counters.linalg_work += static_cast<double>(stage_terms) * detail::mi_work(k, u_block, km);
    out.policy = std::move(table);
    out.wall_time = clock.seconds();
    return out;
}

/// Exhaustive maximum-entropy path: depth-first over all chi^n paths in
/// lexicographic order, accumulating the chain-rule terms of H(x_{1:n}).
inline PlanResult solve_exact_mepp(const PlanRequest& req) {
    PlanRequest r = req;
    r.algorithm = Algorithm::ExactMepp;
    detail::validate_request(r);
    detail::Stopwatch clock;

    const int n = r.grid.cols;
    const std::size_t chi = binomial(r.grid.rows, r.k);
    detail::check_budget(detail::saturating_pow(chi, n), r.budget_guard, "exact MEPP enumeration");
    const detail::ActionGeometry geo(r.grid, r.k, n);

    PlanResult out;
    out.algorithm = Algorithm::ExactMepp;
    std::vector<std::uint32_t> current(static_cast<std::size_t>(n));
    std::vector<std::uint32_t> best_path;
    double best = 0.0;
    bool have_best = false;

    auto dfs = [&](auto&& self, int stage, const Locations& prefix, double acc) -> void {
        if (stage == n) {
            if (!have_best || acc > best + kTieTolerance) {
                best = acc;
                best_path = current;
                have_best = true;
            }
            return;
        }
        const GpConditioner cond(prefix, r.params);
        out.counters.linalg_work += detail::cube(prefix.size());
        for (std::uint32_t a = 0; a < chi; ++a) {
            const auto& locs = geo.sampled[static_cast<std::size_t>(stage)][a];
            const double h = cond.conditional_entropy(locs);
            ++out.counters.entropy_evals;
            out.counters.linalg_work += detail::cube(locs.size());
            current[static_cast<std::size_t>(stage)] = a;
            Locations next = prefix;
            next.insert(next.end(), locs.begin(), locs.end());
            self(self, stage + 1, next, acc + h);
        }
    };
    dfs(dfs, 0, Locations{}, 0.0);

    out.counters.entropy_computations = out.counters.entropy_evals;
    for (auto a : best_path) out.path.actions.push_back(geo.actions[a]);
    out.objective = best;
    out.wall_time = clock.seconds();
    return out;
}

/// Exhaustive maximum mutual information path over all chi^n paths.
inline PlanResult solve_exact_m2ipp(const PlanRequest& req) {
    PlanRequest r = req;
    r.algorithm = Algorithm::ExactM2ipp;
    detail::validate_request(r);
    detail::Stopwatch clock;

    const int n = r.grid.cols;
    const std::size_t chi = binomial(r.grid.rows, r.k);
    const std::uint64_t paths = detail::saturating_pow(chi, n);
    detail::check_budget(paths, r.budget_guard, "exact M2IPP enumeration");
    const detail::ActionGeometry geo(r.grid, r.k, n);

    std::vector<double> value(paths);
    detail::parallel_for(paths, r.threads, [&](std::size_t code) {
        const auto digits = detail::digits_of(code, chi, n);
        Locations x;
        Locations u;
        geo.gather(digits, 0, n, true, x);
        geo.gather(digits, 0, n, false, u);
        value[code] = mutual_information(x, u, {}, r.params);
    });

    PlanResult out;
    out.algorithm = Algorithm::ExactM2ipp;
    std::uint64_t arg = 0;
    for (std::uint64_t c = 0; c < paths; ++c) {
        if (c == 0 || value[c] > out.objective + kTieTolerance) {
            out.objective = value[c];
            arg = c;
        }
    }
    for (auto a : detail::digits_of(arg, chi, n)) out.path.actions.push_back(geo.actions[a]);
    out.counters.mi_evals = paths;
    out.counters.mi_computations = paths;
    const auto sampled = static_cast<std::size_t>(r.k * n);
    out.counters.linalg_work = static_cast<double>(paths) * detail::mi_work(sampled, r.grid.size() - sampled, 0);
    out.wall_time = clock.seconds();
    return out;
}

/// Greedy maximum entropy: stage i maximizes H(x_i | x_{1:i-1}) conditioning
/// on the whole history, so per-stage cost grows with i.
inline PlanResult solve_gmepp(const PlanRequest& req) {
    PlanRequest r = req;
    r.algorithm = Algorithm::Gmepp;
    detail::validate_request(r);
    detail::Stopwatch clock;

    const int n = r.grid.cols;
    const detail::ActionGeometry geo(r.grid, r.k, n);
    const std::size_t chi = geo.chi();

    PlanResult out;
    out.algorithm = Algorithm::Gmepp;
    Locations history;
    for (int i = 0; i < n; ++i) {
        const GpConditioner cond(history, r.params);
        out.counters.linalg_work += detail::cube(history.size());
        double best = 0.0;
        std::uint32_t arg = 0;
        for (std::uint32_t a = 0; a < chi; ++a) {
            const auto& locs = geo.sampled[static_cast<std::size_t>(i)][a];
            const double h = cond.conditional_entropy(locs);
            out.counters.linalg_work += detail::cube(locs.size());
            if (a == 0 || h > best + kTieTolerance) {
                best = h;
                arg = a;
            }
        }
        out.counters.entropy_evals += chi;
        out.objective += best;
        out.path.actions.push_back(geo.actions[arg]);
        const auto& chosen = geo.sampled[static_cast<std::size_t>(i)][arg];
        history.insert(history.end(), chosen.begin(), chosen.end());
    }
    out.counters.entropy_computations = out.counters.entropy_evals;
    out.wall_time = clock.seconds();
    return out;
}

/// Every grid location except those sampled by `prefix`, which covers
/// columns 1..prefix.size(); column-major order. Size is rn - k * |prefix|.
inline Locations grid_complement(const TransectGrid& g, std::span<const StageAction> prefix) {
    Locations out;
    for (int c = 1; c <= g.cols; ++c) {
        const auto idx = static_cast<std::size_t>(c - 1);
        const StageAction rest = idx < prefix.size() ? complement(prefix[idx], g.rows) : complement(StageAction{}, g.rows);
        for (int row : rest.rows) out.push_back(g.location(c, row));
    }
    return out;
}

/// Greedy maximum mutual information: stage i maximizes I(x_{1:i}; rest of
/// the grid), where the rest excludes the candidate x_i as well.
inline PlanResult solve_gm2ipp(const PlanRequest& req) {
    PlanRequest r = req;
    r.algorithm = Algorithm::Gm2ipp;
    detail::validate_request(r);
    detail::Stopwatch clock;

    const int n = r.grid.cols;
    const auto actions = enumerate_actions(r.grid.rows, r.k);
    const std::size_t chi = actions.size();
    const std::size_t total = r.grid.size();

    PlanResult out;
    out.algorithm = Algorithm::Gm2ipp;
    for (int i = 0; i < n; ++i) {
        std::vector<double> value(chi);
        detail::parallel_for(chi, r.threads, [&](std::size_t a) {
            std::vector<StageAction> prefix = out.path.actions;
            prefix.push_back(actions[a]);
            Locations x;
            for (std::size_t c = 0; c < prefix.size(); ++c) {
                const auto locs = action_locations(r.grid, static_cast<int>(c) + 1, prefix[c]);
                x.insert(x.end(), locs.begin(), locs.end());
            }
            value[a] = mutual_information(x, grid_complement(r.grid, prefix), {}, r.params);
        });
        double best = 0.0;
        std::uint32_t arg = 0;
        for (std::uint32_t a = 0; a < chi; ++a) {
            if (a == 0 || value[a] > best + kTieTolerance) {
                best = value[a];
                arg = a;
            }
        }
        out.counters.mi_evals += chi;
        const auto sampled = static_cast<std::size_t>(r.k * (i + 1));
        out.counters.linalg_work += static_cast<double>(chi) * detail::mi_work(sampled, total - sampled, 0);
        out.path.actions.push_back(actions[arg]);
        out.objective = best;
    }
    out.counters.mi_computations = out.counters.mi_evals;
    out.wall_time = clock.seconds();
    return out;
}

inline PlanResult plan(const PlanRequest& req) {
    switch (req.algorithm) {
    case Algorithm::MeppM: return solve_mepp_m(req);
    case Algorithm::M2ippM: return solve_m2ipp_m(req);
    case Algorithm::Gmepp: return solve_gmepp(req);
    case Algorithm::Gm2ipp: return solve_gm2ipp(req);
    case Algorithm::ExactMepp: return solve_exact_mepp(req);
    case Algorithm::ExactM2ipp: return solve_exact_m2ipp(req);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown algorithm");
}

} // namespace tipp

#endif
