#pragma once

#include <cstdint>

#include "gert/types.hpp"

namespace gert {

// A fully resolved reading configuration: run n frames of f slots with
// persistence p, planned against population bound t_m. cost counts slots,
// (f + l) * n, where l is the per-frame protocol gap.
struct FramePlan {
    double r = 0.0;        // load factor t_m * p / f
    std::int64_t f = 1;
    double p = 1.0;
    std::int64_t n = 1;
    double epsilon = 0.0;  // normal-approximation error allowance (0 in WAEC mode)
    double z_star = 0.0;   // two-sided normal quantile used for n
    std::int64_t t_m = 1;
    double cost = 0.0;
};

struct PlannerConfig {
    double r_grid_step = 0.01;
    int f_grid_max_points = 256;
    double inter_frame_gap_slots = 3.33;  // l: fixed per-frame overhead in slots
    double r_max_tol = 1e-6;

    void validate() const {
        if (!(r_grid_step > 0.0)) throw DomainError("r_grid_step must be > 0");
        if (f_grid_max_points < 2) throw DomainError("f_grid_max_points must be >= 2");
        if (!(inter_frame_gap_slots >= 0.0)) throw DomainError("inter_frame_gap_slots must be >= 0");
        if (!(r_max_tol > 0.0)) throw DomainError("r_max_tol must be > 0");
    }
};

// WAEC drops the normal-approximation allowance: epsilon is forced to 0 and
// the frame-size floor to 1, trading guaranteed coverage for fewer slots.
enum class PlanMode { Gert, Waec };

// Frame-size condition constants, k(r) = max(k1(r), k2(r)); a frame of f
// slots supports the normal approximation at load r when eps^2 * f >= k(r).
// k1 decreases, k2 increases, k1*k2 = 1, and they cross at r = ln 2.
double k1(double r);
double k2(double r);
double k(double r);

double epsilon_max(const AccuracySpec& spec);            // 1 - alpha
double epsilon_for(std::int64_t f, double r);            // sqrt(k(r)/f)

struct FBounds {
    std::int64_t f_min = 1;
    std::int64_t f_max = 1;
};

// Feasible frame sizes at load r: f_min from the approximation condition at
// the largest usable epsilon, f_max from p <= 1. Throws InfeasibleError when
// the range is empty.
FBounds f_bounds(double r, std::int64_t t_m, const AccuracySpec& spec);

// Persistence that realizes load r at frame size f: p = r * f / t_m.
double persistence_for(std::int64_t f, double r, std::int64_t t_m);

// Rounds needed so the z_star-sigma interval around E[z_bar] stays inside
// [g((1-beta) t_m), g((1+beta) t_m)]:
//   n_side = z_star^2 * sigma^2 / (g((1 +/- beta) t_m) - mu)^2,  n = ceil(max).
struct RoundsBreakdown {
    std::int64_t n = 1;
    double n_left = 0.0;
    double n_right = 0.0;
    double z_star = 0.0;
    double mu = 0.0;
    double sigma_sq = 0.0;
};

// Pre-ceiling round counts from already-computed moments; exposed so the
// scaling behaviour is testable in isolation.
void rounds_from_moments(double z_star, double sigma_sq, double gap_left, double gap_right,
                         double& n_left, double& n_right);

RoundsBreakdown rounds_breakdown(std::int64_t f, double p, std::int64_t t_m,
                                 const AccuracySpec& spec, double epsilon);

std::int64_t rounds_required(std::int64_t f, double p, std::int64_t t_m,
                             const AccuracySpec& spec, double epsilon);

// Largest load factor with a non-empty feasible frame-size range:
// sup { r > 0 : (1-alpha)^2 * (t_m / r) >= k(r) }, found by bisection.
// Throws InfeasibleError when (1-alpha)^2 * t_m < ln 2, in which case no load
// factor is feasible at all.
double r_max(std::int64_t t_m, const AccuracySpec& spec, double tol = 1e-6);

// Grid search over load factors (step cfg.r_grid_step) and frame sizes
// (nested dyadic grid of at most cfg.f_grid_max_points spanning
// [f_min, f_max], endpoints included, refined around the best point),
// minimizing (f + l) * n. Ties break toward smaller f, then smaller r.
FramePlan plan(std::int64_t t_m, const AccuracySpec& spec, const PlannerConfig& cfg = {},
               PlanMode mode = PlanMode::Gert);

// Exhaustive single-threaded reference: same grids and candidate math, no
// pruning, no parallelism. Kept for tests and the benchmark.
FramePlan plan_serial(std::int64_t t_m, const AccuracySpec& spec, const PlannerConfig& cfg = {},
                      PlanMode mode = PlanMode::Gert);

}  // namespace gert
