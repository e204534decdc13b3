#include "gert/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include "gert/csv.hpp"

namespace gert {

namespace {

std::int64_t grow_bound(std::int64_t t_m) {
    return std::max(t_m + 1, static_cast<std::int64_t>(std::ceil(1.3 * static_cast<double>(t_m))));
}

struct PlannedBound {
    std::int64_t t_m = 1;
    FramePlan plan;
};

// Probed bounds can land below the smallest population the accuracy spec can
// plan for; grow such a bound deterministically until planning succeeds.
// Explicit overrides are the caller's pin and are never grown.
PlannedBound plan_bound(std::int64_t t_m0, const ExperimentSpec& spec, bool allow_growth) {
    PlannedBound pb;
    pb.t_m = t_m0;
    for (int attempt = 0;; ++attempt) {
        try {
            pb.plan = plan(pb.t_m, spec.accuracy, spec.planner, spec.mode);
            return pb;
        } catch (const InfeasibleError&) {
            if (!allow_growth || attempt >= 64) throw;
            pb.t_m = grow_bound(pb.t_m);
        }
    }
}

struct PlanCache {
    std::mutex mu;
    std::map<std::int64_t, PlannedBound> by_bound;
};

PlannedBound plan_bound_cached(std::int64_t t_m0, const ExperimentSpec& spec, bool allow_growth,
                               PlanCache* cache) {
    if (cache) {
        std::lock_guard<std::mutex> lock(cache->mu);
        auto it = cache->by_bound.find(t_m0);
        if (it != cache->by_bound.end()) return it->second;
    }
    PlannedBound pb = plan_bound(t_m0, spec, allow_growth);
    if (cache) {
        std::lock_guard<std::mutex> lock(cache->mu);
        cache->by_bound.emplace(t_m0, pb);
    }
    return pb;
}

TrialRecord run_trial_impl(std::int64_t t, const ExperimentSpec& spec, int trial,
                           PlanCache* cache) {
    if (t < 0) throw DomainError("population t must be >= 0");
    if (trial < 0) throw DomainError("trial index must be >= 0");

    const SimSeed seed{spec.master_seed};
    const bool probed = !spec.tm_override.has_value();
    const std::int64_t t_m0 =
        probed ? fm_probe(t, spec.probe, seed, static_cast<std::uint64_t>(trial))
               : *spec.tm_override;
    const PlannedBound pb = plan_bound_cached(t_m0, spec, probed, cache);

    const ChannelParams ch{pb.plan.f, pb.plan.p};
    const auto rounds =
        run_rounds(t, ch, static_cast<int>(pb.plan.n), seed, static_cast<std::uint64_t>(trial));
    const EstimateResult est = estimate(rounds, ch);

    TrialRecord rec;
    rec.t = t;
    rec.trial = trial;
    rec.t_m = pb.t_m;
    rec.r = pb.plan.r;
    rec.f = pb.plan.f;
    rec.p = pb.plan.p;
    rec.n = pb.plan.n;
    rec.epsilon = pb.plan.epsilon;
    rec.z_bar = est.z_bar;
    if (est.saturated) {
        rec.t_hat = std::numeric_limits<double>::quiet_NaN();
        rec.within_beta = false;
    } else {
        rec.t_hat = *est.t_hat;
        rec.within_beta =
            std::abs(rec.t_hat - static_cast<double>(t)) <= spec.accuracy.beta * static_cast<double>(t);
    }
    rec.slots = (probed ? static_cast<double>(spec.probe.probe_slots) : 0.0) + pb.plan.cost;
    return rec;
}

std::vector<TrialRecord> run_experiment_impl(const ExperimentSpec& spec, bool parallel) {
    spec.validate();
    const auto trials = static_cast<std::int64_t>(spec.trials);
    const auto total = static_cast<std::int64_t>(spec.t_values.size()) * trials;
    std::vector<TrialRecord> recs(static_cast<std::size_t>(total));
    PlanCache cache;

    if (parallel) {
        // exceptions cannot cross an OpenMP region; capture the first and
        // rethrow once all threads have drained
        std::exception_ptr error;
        std::mutex error_mu;
        std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic, 4)
        for (std::int64_t idx = 0; idx < total; ++idx) {
            if (failed.load(std::memory_order_relaxed)) continue;
            try {
                const auto ti = static_cast<std::size_t>(idx / trials);
                const int trial = static_cast<int>(idx % trials);
                recs[static_cast<std::size_t>(idx)] =
                    run_trial_impl(spec.t_values[ti], spec, trial, &cache);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
            }
        }
        if (error) std::rethrow_exception(error);
    } else {
        for (std::int64_t idx = 0; idx < total; ++idx) {
            const auto ti = static_cast<std::size_t>(idx / trials);
            const int trial = static_cast<int>(idx % trials);
            recs[static_cast<std::size_t>(idx)] =
                run_trial_impl(spec.t_values[ti], spec, trial, &cache);
        }
    }

    std::stable_sort(recs.begin(), recs.end(), [](const TrialRecord& a, const TrialRecord& b) {
        if (a.t != b.t) return a.t < b.t;
        return a.trial < b.trial;
    });
    return recs;
}

}  // namespace

TrialRecord run_trial(std::int64_t t, const ExperimentSpec& spec, int trial) {
    spec.validate();
    return run_trial_impl(t, spec, trial, nullptr);
}

std::vector<TrialRecord> run_experiment(const ExperimentSpec& spec) {
    return run_experiment_impl(spec, true);
}

std::vector<TrialRecord> run_experiment_serial(const ExperimentSpec& spec) {
    return run_experiment_impl(spec, false);
}

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records) {
    std::vector<SummaryRow> rows;
    std::size_t i = 0;
    while (i < records.size()) {
        std::size_t j = i;
        while (j < records.size() && records[j].t == records[i].t) ++j;
        const auto count = j - i;

        SummaryRow row;
        row.t = records[i].t;
        row.trials = static_cast<int>(count);
        std::size_t hits = 0;
        double sum = 0.0;
        for (std::size_t k = i; k < j; ++k) {
            hits += records[k].within_beta ? 1 : 0;
            sum += records[k].slots;
        }
        row.reliability = static_cast<double>(hits) / static_cast<double>(count);
        row.slots_mean = sum / static_cast<double>(count);
        if (count > 1) {
            double ss = 0.0;
            for (std::size_t k = i; k < j; ++k) {
                const double d = records[k].slots - row.slots_mean;
                ss += d * d;
            }
            row.slots_std = std::sqrt(ss / static_cast<double>(count - 1));
        }
        rows.push_back(row);
        i = j;
    }
    return rows;
}

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
    out << "t,trial,tm,r,f,p,n,epsilon,t_hat,z_bar,slots,within_beta\n";
    for (const auto& r : records) {
        out << fmt_int(r.t) << ',' << fmt_int(r.trial) << ',' << fmt_int(r.t_m) << ','
            << fmt_double(r.r) << ',' << fmt_int(r.f) << ',' << fmt_double(r.p) << ','
            << fmt_int(r.n) << ',' << fmt_double(r.epsilon) << ',' << fmt_double(r.t_hat) << ','
            << fmt_double(r.z_bar) << ',' << fmt_double(r.slots) << ','
            << (r.within_beta ? '1' : '0') << '\n';
    }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << "t,reliability,slots_mean,slots_std,trials\n";
    for (const auto& r : rows) {
        out << fmt_int(r.t) << ',' << fmt_double(r.reliability) << ','
            << fmt_double(r.slots_mean) << ',' << fmt_double(r.slots_std) << ','
            << fmt_int(r.trials) << '\n';
    }
}

namespace {

template <typename Rows, typename Writer>
void write_file(const std::string& path, const Rows& rows, Writer writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    writer(out, rows);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

void write_records_csv(const std::string& path, const std::vector<TrialRecord>& records) {
    write_file(path, records,
               [](std::ostream& o, const std::vector<TrialRecord>& r) { write_records_csv(o, r); });
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
    write_file(path, rows,
               [](std::ostream& o, const std::vector<SummaryRow>& r) { write_summary_csv(o, r); });
}

bool all_saturated(const std::vector<TrialRecord>& records) {
    if (records.empty()) return false;
    for (const auto& r : records)
        if (!std::isnan(r.t_hat)) return false;
    return true;
}

}  // namespace gert
