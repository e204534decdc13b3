#include "gert/planner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <vector>

#include "gert/estimator.hpp"
#include "gert/normal.hpp"

namespace gert {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// absorb sub-1e-9 floating-point noise before snapping to integers
std::int64_t floor_i(double x) { return static_cast<std::int64_t>(std::floor(x + 1e-9)); }
std::int64_t ceil_i(double x) { return static_cast<std::int64_t>(std::ceil(x - 1e-9)); }

void check_r(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("load factor r must be > 0");
}

void check_tm(std::int64_t t_m) {
    if (t_m < 1) throw DomainError("population bound t_m must be >= 1");
}

}  // namespace

double k1(double r) {
    check_r(r);
    return 1.0 / std::expm1(r);
}

double k2(double r) {
    check_r(r);
    return std::expm1(r);
}

double k(double r) { return std::max(k1(r), k2(r)); }

double epsilon_max(const AccuracySpec& spec) {
    spec.validate();
    return 1.0 - spec.alpha;
}

double epsilon_for(std::int64_t f, double r) {
    if (f < 1) throw DomainError("frame size f must be >= 1");
    return std::sqrt(k(r) / static_cast<double>(f));
}

FBounds f_bounds(double r, std::int64_t t_m, const AccuracySpec& spec) {
    check_r(r);
    check_tm(t_m);
    const double emax = epsilon_max(spec);
    FBounds b;
    b.f_max = floor_i(static_cast<double>(t_m) / r);
    b.f_min = std::max<std::int64_t>(1, ceil_i(k(r) / (emax * emax)));
    if (b.f_min > b.f_max)
        throw InfeasibleError("no frame size supports this load at the requested accuracy");
    return b;
}

double persistence_for(std::int64_t f, double r, std::int64_t t_m) {
    check_r(r);
    check_tm(t_m);
    if (f < 1) throw DomainError("frame size f must be >= 1");
    double p = r * static_cast<double>(f) / static_cast<double>(t_m);
    if (p > 1.0) {
        if (p > 1.0 + 1e-9) throw DomainError("load not realizable: persistence would exceed 1");
        p = 1.0;
    }
    return p;
}

void rounds_from_moments(double z_star, double sigma_sq, double gap_left, double gap_right,
                         double& n_left, double& n_right) {
    n_left = z_star * z_star * sigma_sq / (gap_left * gap_left);
    n_right = z_star * z_star * sigma_sq / (gap_right * gap_right);
}

RoundsBreakdown rounds_breakdown(std::int64_t f, double p, std::int64_t t_m,
                                 const AccuracySpec& spec, double epsilon) {
    spec.validate();
    check_tm(t_m);
    if (!(epsilon >= 0.0)) throw DomainError("epsilon must be >= 0");
    if (spec.alpha + epsilon >= 1.0)
        throw InfeasibleError("alpha + epsilon >= 1 leaves no tail mass for the interval");
    const ChannelParams ch{f, p};
    ch.validate();

    RoundsBreakdown rb;
    rb.z_star = inverse_q((1.0 - spec.alpha - epsilon) / 2.0);
    const double tm = static_cast<double>(t_m);
    rb.mu = g(tm, ch);
    rb.sigma_sq = variance_z(tm, ch);
    const double gap_left = g((1.0 - spec.beta) * tm, ch) - rb.mu;
    const double gap_right = g((1.0 + spec.beta) * tm, ch) - rb.mu;
    rounds_from_moments(rb.z_star, rb.sigma_sq, gap_left, gap_right, rb.n_left, rb.n_right);
    if (!std::isfinite(rb.n_left) || !std::isfinite(rb.n_right))
        throw DomainError("accuracy band degenerates at these parameters");
    rb.n = std::max<std::int64_t>(1, ceil_i(std::max(rb.n_left, rb.n_right)));
    return rb;
}

std::int64_t rounds_required(std::int64_t f, double p, std::int64_t t_m,
                             const AccuracySpec& spec, double epsilon) {
    return rounds_breakdown(f, p, t_m, spec, epsilon).n;
}

double r_max(std::int64_t t_m, const AccuracySpec& spec, double tol) {
    check_tm(t_m);
    if (!(tol > 0.0)) throw DomainError("tolerance must be > 0");
    const double emax = epsilon_max(spec);
    const double c = emax * emax * static_cast<double>(t_m);
    // min over r of r*k(r) is ln 2, attained at r = ln 2; below that bound the
    // feasible set is empty for every load factor
    if (c < kLn2 * (1.0 - 1e-12))
        throw InfeasibleError("(1-alpha)^2 * t_m < ln 2: no load factor is feasible");
    auto h = [&](double r) { return c / r - k(r); };
    double lo = kLn2;
    if (h(lo) < 0.0) return lo;  // boundary case, only r = ln 2 feasible
    double hi = 2.0 * lo;
    while (h(hi) >= 0.0) hi *= 2.0;  // k2 grows exponentially, terminates quickly
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) >= 0.0 ? lo : hi) = mid;
    }
    return lo;
}

namespace {

// loads beyond this are provably never optimal: with p0 <= e^-r the cost
// lower bound below already exceeds z*^2 * (1 - e^-r) * e^r slots, north of
// 10^7 at r = 16, far above any plan found in the feasible region under it
constexpr double kWaecRCap = 16.0;

struct Candidate {
    double cost = std::numeric_limits<double>::infinity();
    std::int64_t f = 0;
    std::int64_t n = 0;
    double p = 0.0;
    double eps = 0.0;
    double zs = 0.0;

    bool valid() const { return f != 0; }
};

bool better_f(const Candidate& a, const Candidate& b) {
    if (!a.valid()) return false;
    if (!b.valid()) return true;
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.f < b.f;
}

// Single (r, f) candidate, evaluated with exactly the arithmetic of the
// public rounds_breakdown so a recomputation reproduces plan.n bit for bit.
Candidate eval_f(double r, std::int64_t f, std::int64_t t_m, const AccuracySpec& spec,
                 PlanMode mode, double l) {
    Candidate c;
    try {
        const double p = persistence_for(f, r, t_m);
        const double eps = mode == PlanMode::Waec ? 0.0 : epsilon_for(f, r);
        if (spec.alpha + eps >= 1.0) return c;
        const RoundsBreakdown rb = rounds_breakdown(f, p, t_m, spec, eps);
        c.f = f;
        c.n = rb.n;
        c.p = p;
        c.eps = eps;
        c.zs = rb.z_star;
        c.cost = (static_cast<double>(f) + l) * static_cast<double>(rb.n);
    } catch (const DomainError&) {
        c = Candidate{};
    } catch (const InfeasibleError&) {
        c = Candidate{};
    }
    return c;
}

struct FRange {
    std::int64_t f_min = 0;
    std::int64_t f_max = -1;

    bool empty() const { return f_min > f_max; }
};

FRange f_range_for(double r, std::int64_t t_m, const AccuracySpec& spec, PlanMode mode) {
    FRange fr;
    if (mode == PlanMode::Gert) {
        try {
            const FBounds b = f_bounds(r, t_m, spec);
            fr.f_min = b.f_min;
            fr.f_max = b.f_max;
        } catch (const InfeasibleError&) {
        }
    } else {
        fr.f_min = 1;
        fr.f_max = floor_i(static_cast<double>(t_m) / r);
    }
    return fr;
}

// Best candidate along one load factor. Grid points come from a nested
// dyadic grid (endpoints included) so a finer grid strictly extends a coarser
// one. n is non-increasing in f, so per round count the cheapest frame sits
// at the left edge of its n-plateau; every plateau touched by a grid point is
// slid to that edge via binary search, which makes refining the grid only
// ever improve the winner. A +/-3 scan around the grid winner stays as a
// cheap extra probe of adjacent plateaus.
Candidate eval_r(double r, std::int64_t t_m, const AccuracySpec& spec, const PlannerConfig& cfg,
                 PlanMode mode, double l, const FRange& fr) {
    int levels = 0;
    while ((std::int64_t{2} << levels) + 1 <= cfg.f_grid_max_points) ++levels;
    const std::int64_t segs = std::int64_t{1} << levels;
    const std::int64_t span = fr.f_max - fr.f_min;

    Candidate best;
    std::vector<Candidate> grid;
    grid.reserve(static_cast<std::size_t>(segs) + 1);
    std::int64_t prev = -1;
    for (std::int64_t j = 0; j <= segs; ++j) {
        const auto f = fr.f_min + static_cast<std::int64_t>(
                                      static_cast<__int128>(span) * j / segs);
        if (f == prev) continue;
        prev = f;
        Candidate c = eval_f(r, f, t_m, spec, mode, l);
        if (!c.valid()) continue;
        grid.push_back(c);
        if (better_f(c, best)) best = c;
    }
    if (!best.valid()) return best;

    const std::int64_t lo_f = std::max(fr.f_min, best.f - 3);
    const std::int64_t hi_f = std::min(fr.f_max, best.f + 3);
    for (std::int64_t f = lo_f; f <= hi_f; ++f) {
        if (f == best.f) continue;
        Candidate c = eval_f(r, f, t_m, spec, mode, l);
        if (better_f(c, best)) best = c;
    }

    std::int64_t last_n = -1;
    for (const Candidate& gc : grid) {
        if (gc.n == last_n) continue;  // same plateau, edge already found
        last_n = gc.n;
        std::int64_t lo = fr.f_min, hi = gc.f;
        while (lo < hi) {
            const std::int64_t mid = lo + (hi - lo) / 2;
            const Candidate c = eval_f(r, mid, t_m, spec, mode, l);
            if (c.valid() && c.n <= gc.n)
                hi = mid;
            else
                lo = mid + 1;
        }
        if (lo < gc.f) {
            Candidate c = eval_f(r, lo, t_m, spec, mode, l);
            if (better_f(c, best)) best = c;
        }
    }
    return best;
}

// True lower bound on any candidate's cost at load r. Uses the smallest
// usable z* (at f_max) and the fact that (f + l) * n >= z*^2 (1-mu^2)/gap^2
// regardless of f; safe to prune on with a strict relative margin.
double cost_lower_bound(double r, std::int64_t t_m, const AccuracySpec& spec, PlanMode mode,
                        double l, const FRange& fr) {
    const double inf = std::numeric_limits<double>::infinity();
    double eps_min = 0.0;
    if (mode == PlanMode::Gert) {
        eps_min = epsilon_for(fr.f_max, r);
        if (spec.alpha + eps_min >= 1.0) return inf;
    }
    const double z_min = inverse_q((1.0 - spec.alpha - eps_min) / 2.0);
    const double tm = static_cast<double>(t_m);
    const double lq = std::log1p(-r / tm);  // log of (1 - p/f), identical for all f here
    const double p0 = std::exp(tm * lq);
    const double mu = 1.0 - 2.0 * p0;
    const double gl = (1.0 - 2.0 * std::exp((1.0 - spec.beta) * tm * lq)) - mu;
    const double gr = (1.0 - 2.0 * std::exp((1.0 + spec.beta) * tm * lq)) - mu;
    const double gap_sq = std::min(gl * gl, gr * gr);
    if (!(gap_sq > 0.0)) return inf;
    const double spread = z_min * z_min * (4.0 * p0 * (1.0 - p0)) / gap_sq;
    return std::max(spread, static_cast<double>(fr.f_min) + l);
}

std::vector<double> r_grid(double step, double r_hi, std::initializer_list<double> anchors) {
    std::vector<double> rs;
    for (std::int64_t i = 1;; ++i) {
        const double r = step * static_cast<double>(i);
        if (r > r_hi * (1.0 + 1e-12)) break;
        rs.push_back(std::min(r, r_hi));
    }
    if (rs.empty() || rs.back() < r_hi - 1e-12) rs.push_back(r_hi);
    for (const double a : anchors) {
        if (!(a > 0.0) || a > r_hi) continue;
        const auto it = std::lower_bound(rs.begin(), rs.end(), a);
        if (it != rs.end() && *it == a) continue;
        rs.insert(it, a);
    }
    return rs;
}

FramePlan plan_impl(std::int64_t t_m, const AccuracySpec& spec, const PlannerConfig& cfg,
                    PlanMode mode, bool pruned_parallel) {
    spec.validate();
    cfg.validate();
    check_tm(t_m);
    const double l = cfg.inter_frame_gap_slots;

    const double r_hi = mode == PlanMode::Gert
                            ? r_max(t_m, spec, cfg.r_max_tol)
                            : std::min(static_cast<double>(t_m), kWaecRCap);
    // Near the feasibility edge the admissible load window around ln 2 can be
    // narrower than the grid step, so the grid always carries two anchors: the
    // frame-condition minimizer and the load at which the smallest admissible
    // frame size becomes reachable.
    double r_feas = 0.0;
    if (mode == PlanMode::Gert) {
        const double em = epsilon_max(spec);
        const double eps2 = em * em;
        const std::int64_t f_star = std::max<std::int64_t>(1, ceil_i(1.0 / eps2));
        r_feas = std::log1p(1.0 / (eps2 * static_cast<double>(f_star)));
    }
    const std::vector<double> rs = r_grid(cfg.r_grid_step, r_hi, {kLn2, r_feas});
    std::vector<Candidate> per_r(rs.size());

    if (pruned_parallel) {
        std::atomic<double> best_cost{std::numeric_limits<double>::infinity()};
#pragma omp parallel for schedule(dynamic, 8)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(rs.size()); ++i) {
            const FRange fr = f_range_for(rs[i], t_m, spec, mode);
            if (fr.empty()) continue;
            const double lb = cost_lower_bound(rs[i], t_m, spec, mode, l, fr);
            if (lb > best_cost.load(std::memory_order_relaxed) * (1.0 + 1e-9) + 1e-9) continue;
            const Candidate c = eval_r(rs[i], t_m, spec, cfg, mode, l, fr);
            per_r[i] = c;
            if (c.valid()) {
                double cur = best_cost.load(std::memory_order_relaxed);
                while (c.cost < cur &&
                       !best_cost.compare_exchange_weak(cur, c.cost, std::memory_order_relaxed)) {
                }
            }
        }
    } else {
        for (std::size_t i = 0; i < rs.size(); ++i) {
            const FRange fr = f_range_for(rs[i], t_m, spec, mode);
            if (fr.empty()) continue;
            per_r[i] = eval_r(rs[i], t_m, spec, cfg, mode, l, fr);
        }
    }

    std::size_t best_i = 0;
    Candidate best;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const Candidate& c = per_r[i];
        if (!c.valid()) continue;
        if (!best.valid() || c.cost < best.cost || (c.cost == best.cost && c.f < best.f)) {
            best = c;
            best_i = i;
        }
    }
    if (!best.valid()) throw InfeasibleError("no feasible (r, f) pair for this population bound");

    FramePlan fp;
    fp.r = rs[best_i];
    fp.f = best.f;
    fp.p = best.p;
    fp.n = best.n;
    fp.epsilon = best.eps;
    fp.z_star = best.zs;
    fp.t_m = t_m;
    fp.cost = best.cost;
    return fp;
}

}  // namespace

FramePlan plan(std::int64_t t_m, const AccuracySpec& spec, const PlannerConfig& cfg,
               PlanMode mode) {
    return plan_impl(t_m, spec, cfg, mode, true);
}

FramePlan plan_serial(std::int64_t t_m, const AccuracySpec& spec, const PlannerConfig& cfg,
                      PlanMode mode) {
    return plan_impl(t_m, spec, cfg, mode, false);
}

}  // namespace gert
