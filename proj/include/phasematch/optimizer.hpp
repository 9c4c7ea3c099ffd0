// optimizer.hpp
// Global maximization of the two-phase objective over the torus [-pi, pi]^2,
// alpha sweeps, and detection of the phase-matching cutoff.
//
// optimize_phases: coarse grid scan, then Nelder-Mead from the best grid
// local maxima and from seeded random points, then a Newton polish using the
// analytic Hessian. The objective is a trigonometric polynomial, so the
// walk runs unconstrained on R^2 and results are wrapped at the end.

#pragma once

#include "phasematch/objective.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace phasematch {

struct OptimizerConfig {
    int coarse_grid = 181;        // points per axis, endpoints included
    int restarts = 16;            // random starts on top of the grid seeds
    double refine_tol = 1e-10;    // relative spread of simplex values at convergence
    int max_refine_iters = 500;
    std::uint64_t rng_seed = 20240601;
    int grid_seeds = 8;           // grid local maxima used as starts

    void validate() const {
        if (coarse_grid < 3) throw std::invalid_argument("OptimizerConfig: coarse_grid must be >= 3");
        if (restarts < 1) throw std::invalid_argument("OptimizerConfig: restarts must be >= 1");
        if (!(refine_tol > 0.0)) throw std::invalid_argument("OptimizerConfig: refine_tol must be > 0");
        if (max_refine_iters < 1) throw std::invalid_argument("OptimizerConfig: max_refine_iters must be >= 1");
        if (grid_seeds < 1) throw std::invalid_argument("OptimizerConfig: grid_seeds must be >= 1");
    }
};

struct OptimizationResult {
    PhasePair best;
    PhasePair twin;
    double objective_value = 0.0;
    double post_probability = 0.0;
    int starts_converged = 0;
    std::uint64_t evaluations = 0;
};

/// Picks the representative of {p, -p} with psi >= 0, or phi >= 0 when psi is 0.
inline PhasePair canonical_phases(const PhasePair& p) {
    constexpr double kZero = 1e-12;
    if (std::abs(p.psi) <= kZero) return p.phi >= 0.0 ? p : p.negated();
    return p.psi > 0.0 ? p : p.negated();
}

/// Both phases round to pi at two decimals after moving negative angles onto
/// the +pi branch, so -3.14159 and 3.14159 both count as pi.
inline bool is_phase_matched(const PhasePair& p) {
    auto on_plus_branch = [](double a) { return a < 0.0 ? a + kTwoPi : a; };
    const double target = round_to(kPi, 2);
    return round_to(on_plus_branch(p.psi), 2) == target && round_to(on_plus_branch(p.phi), 2) == target;
}

namespace detail {

inline double objective_scale(const ObjectiveContext& ctx) noexcept {
    return 1.0 + 2.0 * std::abs(ctx.lead()) + std::abs(ctx.diffusion()) + 2.0 * std::abs(ctx.cross());
}

inline OptimizationResult make_result(const ObjectiveContext& ctx, const PhasePair& raw, double value) {
    OptimizationResult r;
    r.best = canonical_phases(raw);
    r.twin = r.best.negated();
    r.objective_value = value;
    r.post_probability = objective_probability(ctx, r.best);
    return r;
}

struct Point {
    double psi;
    double phi;
    double value;
};

struct RefineOutcome {
    Point point;
    bool converged;
    std::uint64_t evaluations;
};

// Nelder-Mead maximization in the plane.
inline RefineOutcome nelder_mead(const ObjectiveContext& ctx, double psi0, double phi0, double step,
                                 const OptimizerConfig& cfg) {
    std::uint64_t evals = 0;
    auto f = [&](double a, double b) {
        ++evals;
        return objective_G(ctx, a, b);
    };
    std::array<Point, 3> s{{{psi0, phi0, 0.0}, {psi0 + step, phi0, 0.0}, {psi0, phi0 + step, 0.0}}};
    for (auto& p : s) p.value = f(p.psi, p.phi);

    const double scale = objective_scale(ctx);
    bool converged = false;
    for (int it = 0; it < cfg.max_refine_iters; ++it) {
        std::sort(s.begin(), s.end(), [](const Point& x, const Point& y) { return x.value > y.value; });
        if (s[0].value - s[2].value <= cfg.refine_tol * scale) {
            converged = true;
            break;
        }
        const double cx = 0.5 * (s[0].psi + s[1].psi);
        const double cy = 0.5 * (s[0].phi + s[1].phi);
        auto along = [&](double t) {
            Point p{cx + t * (s[2].psi - cx), cy + t * (s[2].phi - cy), 0.0};
            p.value = f(p.psi, p.phi);
            return p;
        };
        const Point reflected = along(-1.0);
        if (reflected.value > s[0].value) {
            const Point expanded = along(-2.0);
            s[2] = expanded.value > reflected.value ? expanded : reflected;
        } else if (reflected.value > s[1].value) {
            s[2] = reflected;
        } else {
            const Point contracted = reflected.value > s[2].value ? along(-0.5) : along(0.5);
            if (contracted.value > std::max(reflected.value, s[2].value)) {
                s[2] = contracted;
            } else {
                for (int k = 1; k < 3; ++k) {
                    s[k].psi = 0.5 * (s[0].psi + s[k].psi);
                    s[k].phi = 0.5 * (s[0].phi + s[k].phi);
                    s[k].value = f(s[k].psi, s[k].phi);
                }
            }
        }
    }
    const Point best = *std::max_element(s.begin(), s.end(),
                                         [](const Point& x, const Point& y) { return x.value < y.value; });
    return {best, converged, evals};
}

// Newton iterations on the gradient; falls back to backtracking gradient
// ascent where the Hessian is not negative definite.
inline Point newton_polish(const ObjectiveContext& ctx, Point p, std::uint64_t& evals) {
    const double scale = objective_scale(ctx);
    for (int it = 0; it < 50; ++it) {
        const Gradient g = objective_gradient(ctx, p.psi, p.phi);
        if (g.max_abs() <= 1e-14 * scale) break;
        const Hessian2 h = objective_hessian(ctx, p.psi, p.phi);
        double dpsi = 0.0;
        double dphi = 0.0;
        const double det = h.determinant();
        if (h.psi_psi < 0.0 && det > 1e-14 * scale * scale) {
            dpsi = -(h.phi_phi * g.d_psi - h.psi_phi * g.d_phi) / det;
            dphi = -(-h.psi_phi * g.d_psi + h.psi_psi * g.d_phi) / det;
        } else {
            dpsi = g.d_psi / scale;
            dphi = g.d_phi / scale;
        }
        bool moved = false;
        for (double t = 1.0; t > 1e-6; t *= 0.5) {
            const double a = p.psi + t * dpsi;
            const double b = p.phi + t * dphi;
            const double v = objective_G(ctx, a, b);
            ++evals;
            const Gradient gn = objective_gradient(ctx, a, b);
            if (v >= p.value - 1e-15 * scale && gn.max_abs() < g.max_abs()) {
                p = {a, b, v};
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    return p;
}

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline double grid_coordinate(int i, int grid) noexcept {
    if (i == grid - 1) return kPi;
    return -kPi + kTwoPi * static_cast<double>(i) / static_cast<double>(grid - 1);
}

} // namespace detail

/// Exhaustive evaluation on a grid x grid lattice over [-pi, pi]^2
/// (endpoints included). Returns the lattice maximum, first hit on ties.
inline OptimizationResult brute_force_phases(const ObjectiveContext& ctx, int grid) {
    if (grid < 3) throw std::invalid_argument("brute_force_phases: grid must be >= 3");
    std::vector<double> axis(static_cast<std::size_t>(grid));
    for (int i = 0; i < grid; ++i) axis[static_cast<std::size_t>(i)] = detail::grid_coordinate(i, grid);

    double best_value = -std::numeric_limits<double>::infinity();
    double best_psi = 0.0;
    double best_phi = 0.0;
    std::uint64_t evals = 0;
    for (double psi : axis) {
        for (double phi : axis) {
            const double v = objective_G(ctx, psi, phi);
            ++evals;
            if (v > best_value) {
                best_value = v;
                best_psi = psi;
                best_phi = phi;
            }
        }
    }
    OptimizationResult r = detail::make_result(ctx, PhasePair(best_psi, best_phi), best_value);
    r.evaluations = evals;
    return r;
}

/// Global maximizer of objective_G over the torus.
///
/// When sin 2alpha vanishes phi drops out: psi is pi or 0 by the sign of
/// cos 2alpha and phi is reported as pi for alpha < pi/4, 0 otherwise.
inline OptimizationResult optimize_phases(const ObjectiveContext& ctx, const OptimizerConfig& cfg) {
    cfg.validate();

    if (ctx.phi_degenerate()) {
        const bool low = ctx.alpha() < kPi / 4;
        const PhasePair p(ctx.diffusion() > 0.0 ? kPi : 0.0, low ? kPi : 0.0);
        OptimizationResult r = detail::make_result(ctx, p, objective_G(ctx, p));
        r.evaluations = 1;
        return r;
    }

    const int grid = cfg.coarse_grid;
    const int cells = grid - 1;  // the last row/column duplicates the first on the torus
    std::vector<double> axis(static_cast<std::size_t>(cells));
    for (int i = 0; i < cells; ++i) axis[static_cast<std::size_t>(i)] = detail::grid_coordinate(i, grid);

    std::vector<double> values(static_cast<std::size_t>(cells) * static_cast<std::size_t>(cells));
    auto at = [&](int i, int j) -> double& {
        return values[static_cast<std::size_t>(((i % cells + cells) % cells) * cells + ((j % cells + cells) % cells))];
    };
    std::uint64_t evals = 0;
    for (int i = 0; i < cells; ++i)
        for (int j = 0; j < cells; ++j) {
            at(i, j) = objective_G(ctx, axis[static_cast<std::size_t>(i)], axis[static_cast<std::size_t>(j)]);
            ++evals;
        }

    // Seeds: discrete local maxima of the periodic grid, best first.
    std::vector<detail::Point> seeds;
    for (int i = 0; i < cells; ++i) {
        for (int j = 0; j < cells; ++j) {
            const double v = at(i, j);
            bool is_max = true;
            for (int di = -1; di <= 1 && is_max; ++di)
                for (int dj = -1; dj <= 1; ++dj)
                    if ((di != 0 || dj != 0) && at(i + di, j + dj) > v) {
                        is_max = false;
                        break;
                    }
            if (is_max) seeds.push_back({axis[static_cast<std::size_t>(i)], axis[static_cast<std::size_t>(j)], v});
        }
    }
    std::stable_sort(seeds.begin(), seeds.end(),
                     [](const detail::Point& a, const detail::Point& b) { return a.value > b.value; });
    if (seeds.size() > static_cast<std::size_t>(cfg.grid_seeds)) seeds.resize(static_cast<std::size_t>(cfg.grid_seeds));

    std::mt19937_64 rng(cfg.rng_seed);
    std::uniform_real_distribution<double> uniform(-kPi, kPi);
    for (int k = 0; k < cfg.restarts; ++k) {
        const double a = uniform(rng);
        const double b = uniform(rng);
        seeds.push_back({a, b, objective_G(ctx, a, b)});
        ++evals;
    }

    const double step = 0.5 * kTwoPi / static_cast<double>(cells);
    detail::Point best = seeds.front();
    int converged = 0;
    for (const auto& seed : seeds) {
        detail::RefineOutcome out = detail::nelder_mead(ctx, seed.psi, seed.phi, step, cfg);
        evals += out.evaluations;
        if (out.converged) ++converged;
        const detail::Point polished = detail::newton_polish(ctx, out.point, evals);
        if (polished.value > best.value) best = polished;
    }

    OptimizationResult r = detail::make_result(ctx, PhasePair(best.psi, best.phi), best.value);
    r.starts_converged = converged;
    r.evaluations = evals;
    return r;
}

struct SweepRow {
    double alpha = 0.0;
    double psi_opt = 0.0;
    double phi_opt = 0.0;
    double probability_before = 0.0;
    double probability_after = 0.0;

    bool phase_matched() const { return is_phase_matched(PhasePair(psi_opt, phi_opt)); }

    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepResult {
    std::uint64_t set_size = 0;
    std::vector<SweepRow> rows;

    std::size_t matched_rows() const {
        return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(),
                                                      [](const SweepRow& r) { return r.phase_matched(); }));
    }
};

/// Seed for row `index`; independent of evaluation order.
inline std::uint64_t row_seed(std::uint64_t base, std::size_t index) noexcept {
    return detail::splitmix64(base ^ detail::splitmix64(static_cast<std::uint64_t>(index)));
}

/// Evenly spaced alpha over [0, pi/2] (both endpoints), one optimization per
/// row. Rows are independent and may run on `threads` workers (0 = hardware
/// concurrency); output order and values do not depend on the thread count.
inline SweepResult sweep_alpha(std::uint64_t set_size, int num_points, const OptimizerConfig& cfg,
                               unsigned threads = 0) {
    if (num_points < 2) throw std::invalid_argument("sweep_alpha: num_points must be >= 2");
    if (set_size < 2) throw std::invalid_argument("sweep_alpha: N must be >= 2");
    cfg.validate();

    SweepResult out;
    out.set_size = set_size;
    out.rows.resize(static_cast<std::size_t>(num_points));

    auto run_row = [&](std::size_t i) {
        const double alpha = (i + 1 == out.rows.size())
                                 ? kPi / 2
                                 : (kPi / 2) * static_cast<double>(i) / static_cast<double>(num_points - 1);
        OptimizerConfig row_cfg = cfg;
        row_cfg.rng_seed = row_seed(cfg.rng_seed, i);
        const ObjectiveContext ctx(alpha, set_size);
        const OptimizationResult r = optimize_phases(ctx, row_cfg);
        const double s = std::sin(alpha);
        out.rows[i] = {alpha, r.best.psi, r.best.phi, s * s, r.post_probability};
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(num_points));
    if (threads <= 1) {
        for (std::size_t i = 0; i < out.rows.size(); ++i) run_row(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < out.rows.size(); i = next++) run_row(i);
        });
    pool.clear();  // joins
    return out;
}

struct CutoffReport {
    std::uint64_t set_size = 0;
    double alpha_cutoff = 0.0;           // first alpha where phase matching breaks (last alpha if never)
    double probability_at_cutoff = 0.0;  // sin^2(alpha_cutoff)
    double last_matched_alpha = 0.0;     // largest alpha of the matched prefix
    double last_matched_probability = 0.0;
    std::size_t matched_rows = 0;        // across the whole sweep, not only the prefix
    std::size_t total_rows = 0;
};

struct NoPhaseMatchedPrefix : std::runtime_error {
    NoPhaseMatchedPrefix() : std::runtime_error("detect_cutoff: first sweep row is not phase matched") {}
};

/// Locates where the phase-matched prefix of a sweep ends. Every row with
/// alpha strictly below alpha_cutoff rounds to (pi, pi).
inline CutoffReport detect_cutoff(const SweepResult& sweep) {
    const auto& rows = sweep.rows;
    if (rows.empty()) throw std::invalid_argument("detect_cutoff: empty sweep");
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].alpha < rows[i - 1].alpha) throw std::invalid_argument("detect_cutoff: rows not sorted by alpha");
    if (!rows.front().phase_matched()) throw NoPhaseMatchedPrefix();

    std::size_t first_break = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (!rows[i].phase_matched()) {
            first_break = i;
            break;
        }
    const std::size_t last_matched = first_break - 1;
    const std::size_t cutoff = first_break == rows.size() ? rows.size() - 1 : first_break;

    auto prob = [](double a) {
        const double s = std::sin(a);
        return s * s;
    };
    CutoffReport rep;
    rep.set_size = sweep.set_size;
    rep.alpha_cutoff = rows[cutoff].alpha;
    rep.probability_at_cutoff = prob(rep.alpha_cutoff);
    rep.last_matched_alpha = rows[last_matched].alpha;
    rep.last_matched_probability = prob(rep.last_matched_alpha);
    rep.matched_rows = sweep.matched_rows();
    rep.total_rows = rows.size();
    return rep;
}

} // namespace phasematch
