#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gert/planner.hpp"
#include "gert/sim.hpp"
#include "gert/types.hpp"

namespace gert {

struct ExperimentSpec {
    std::vector<std::int64_t> t_values;
    int trials = 500;
    AccuracySpec accuracy;
    std::uint64_t master_seed = 1;
    PlanMode mode = PlanMode::Gert;
    std::optional<std::int64_t> tm_override;  // skip the probe, plan for this bound
    PlannerConfig planner;
    ProbeConfig probe;

    void validate() const {
        accuracy.validate();
        planner.validate();
        probe.validate();
        if (t_values.empty()) throw EmptyInput("t_values must not be empty");
        for (auto t : t_values)
            if (t < 0) throw DomainError("population t must be >= 0");
        if (trials < 1) throw DomainError("trials must be >= 1");
        if (tm_override && *tm_override < 1) throw DomainError("tm override must be >= 1");
    }
};

// One trial of the full pipeline. t_hat is NaN when the trial saturated.
// slots = probe_slots + (f + l) * n, the probe term dropped when tm_override
// bypassed the probe.
struct TrialRecord {
    std::int64_t t = 0;
    int trial = 0;
    std::int64_t t_m = 0;
    double r = 0.0;
    std::int64_t f = 1;
    double p = 1.0;
    std::int64_t n = 1;
    double epsilon = 0.0;
    double t_hat = 0.0;
    double z_bar = 0.0;
    double slots = 0.0;
    bool within_beta = false;
};

struct SummaryRow {
    std::int64_t t = 0;
    double reliability = 0.0;
    double slots_mean = 0.0;
    double slots_std = 0.0;
    int trials = 0;
};

// probe (or take the override) -> plan -> run rounds -> estimate.
// When the probed bound is too small for any feasible plan it is grown
// deterministically until planning succeeds, so tiny populations still
// estimate instead of erroring.
TrialRecord run_trial(std::int64_t t, const ExperimentSpec& spec, int trial);

// All (t, trial) pairs, output sorted by (t, trial). The parallel version
// distributes trials across OpenMP threads and fills a preallocated slot per
// trial, so its records are byte-identical to the serial reference.
std::vector<TrialRecord> run_experiment(const ExperimentSpec& spec);
std::vector<TrialRecord> run_experiment_serial(const ExperimentSpec& spec);

// Per-population reliability and slot-cost statistics (sample std, n-1).
std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records);

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

// Path variants throw std::runtime_error naming the path on write failure.
void write_records_csv(const std::string& path, const std::vector<TrialRecord>& records);
void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);

bool all_saturated(const std::vector<TrialRecord>& records);

}  // namespace gert
