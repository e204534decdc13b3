#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gert/csv.hpp"
#include "gert/experiment.hpp"
#include "gert/planner.hpp"
#include "gert/sim.hpp"

namespace {

using namespace gert;

void print_plan_kv(const FramePlan& fp) {
    std::cout << "r=" << fmt_double(fp.r) << '\n'
              << "f=" << fmt_int(fp.f) << '\n'
              << "p=" << fmt_double(fp.p) << '\n'
              << "n=" << fmt_int(fp.n) << '\n'
              << "epsilon=" << fmt_double(fp.epsilon) << '\n'
              << "z_star=" << fmt_double(fp.z_star) << '\n'
              << "t_m=" << fmt_int(fp.t_m) << '\n'
              << "cost=" << fmt_double(fp.cost) << '\n';
}

void print_plan_csv(const FramePlan& fp) {
    std::cout << "r,f,p,n,epsilon,z_star,t_m,cost\n"
              << fmt_double(fp.r) << ',' << fmt_int(fp.f) << ',' << fmt_double(fp.p) << ','
              << fmt_int(fp.n) << ',' << fmt_double(fp.epsilon) << ',' << fmt_double(fp.z_star)
              << ',' << fmt_int(fp.t_m) << ',' << fmt_double(fp.cost) << '\n';
}

struct PlannerFlags {
    double l = PlannerConfig{}.inter_frame_gap_slots;
    double r_step = PlannerConfig{}.r_grid_step;
    int f_grid_points = PlannerConfig{}.f_grid_max_points;

    void attach(CLI::App* cmd) {
        cmd->add_option("--l", l, "Inter-frame gap in slot units")->capture_default_str();
        cmd->add_option("--r-step", r_step, "Load-factor grid step")->capture_default_str();
        cmd->add_option("--f-grid-points", f_grid_points, "Max frame-size grid points per load")
            ->capture_default_str();
    }

    PlannerConfig config() const {
        PlannerConfig cfg;
        cfg.inter_frame_gap_slots = l;
        cfg.r_grid_step = r_step;
        cfg.f_grid_max_points = f_grid_points;
        return cfg;
    }
};

struct ProbeFlags {
    int probe_slots = ProbeConfig{}.probe_slots;
    double safety_multiplier = ProbeConfig{}.safety_multiplier;
    double fm_correction = ProbeConfig{}.fm_correction;

    void attach(CLI::App* cmd) {
        cmd->add_option("--probe-slots", probe_slots, "Slots in the probe frame")
            ->capture_default_str();
        cmd->add_option("--safety-multiplier", safety_multiplier,
                        "Headroom applied to the probe's population bound")
            ->capture_default_str();
        cmd->add_option("--fm-correction", fm_correction, "First-empty-slot bias correction")
            ->capture_default_str();
    }

    ProbeConfig config() const {
        ProbeConfig cfg;
        cfg.probe_slots = probe_slots;
        cfg.safety_multiplier = safety_multiplier;
        cfg.fm_correction = fm_correction;
        return cfg;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GERT RFID tag-population estimation toolkit"};
    app.require_subcommand(1);
    std::function<int()> action;

    // plan
    auto* plan_cmd = app.add_subcommand("plan", "Choose (r, f, p, n) for a population bound");
    {
        static std::int64_t tm = 0;
        static double alpha = 0.95, beta = 0.05;
        static bool waec = false, as_csv = false;
        static PlannerFlags pf;
        plan_cmd->add_option("--tm", tm, "Population upper bound")->required();
        plan_cmd->add_option("--alpha", alpha, "Required reliability")->capture_default_str();
        plan_cmd->add_option("--beta", beta, "Relative error half-width")->capture_default_str();
        plan_cmd->add_flag("--waec", waec, "Ignore the normal-approximation allowance");
        plan_cmd->add_flag("--csv", as_csv, "Emit one CSV row instead of key=value lines");
        pf.attach(plan_cmd);
        plan_cmd->callback([&] {
            action = [] {
                const FramePlan fp = plan(tm, AccuracySpec{alpha, beta}, pf.config(),
                                          waec ? PlanMode::Waec : PlanMode::Gert);
                if (as_csv)
                    print_plan_csv(fp);
                else
                    print_plan_kv(fp);
                return 0;
            };
        });
    }

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Run Aloha rounds and print per-round counts");
    {
        static std::int64_t t = 0, f = 0;
        static double p = 1.0;
        static int rounds = 1;
        static std::uint64_t seed = 1, trial = 0;
        sim_cmd->add_option("--t", t, "True population")->required();
        sim_cmd->add_option("--f", f, "Frame size in slots")->required();
        sim_cmd->add_option("--p", p, "Persistence probability")->required();
        sim_cmd->add_option("--rounds", rounds, "Number of frames")->capture_default_str();
        sim_cmd->add_option("--seed", seed, "Master seed")->capture_default_str();
        sim_cmd->add_option("--trial", trial, "Trial stream index")->capture_default_str();
        sim_cmd->callback([&] {
            action = [] {
                const ChannelParams ch{f, p};
                const auto obs = run_rounds(t, ch, rounds, SimSeed{seed}, trial);
                std::cout << "round,N0,Nn,z\n";
                for (std::size_t j = 0; j < obs.size(); ++j)
                    std::cout << fmt_int(static_cast<std::int64_t>(j)) << ','
                              << fmt_int(obs[j].n_zero) << ',' << fmt_int(obs[j].n_nonempty)
                              << ',' << fmt_double(obs[j].z) << '\n';
                return 0;
            };
        });
    }

    // probe
    auto* probe_cmd = app.add_subcommand("probe", "Probe a rough population upper bound");
    {
        static std::int64_t t = 0;
        static std::uint64_t seed = 1, trial = 0;
        static ProbeFlags pr;
        probe_cmd->add_option("--t", t, "True population")->required();
        probe_cmd->add_option("--seed", seed, "Master seed")->capture_default_str();
        probe_cmd->add_option("--trial", trial, "Trial stream index")->capture_default_str();
        pr.attach(probe_cmd);
        probe_cmd->callback([&] {
            action = [] {
                std::cout << fmt_int(fm_probe(t, pr.config(), SimSeed{seed}, trial)) << '\n';
                return 0;
            };
        });
    }

    // estimate
    auto* est_cmd = app.add_subcommand("estimate", "One live probe-plan-simulate-invert pass");
    {
        static std::int64_t t = 0;
        static double alpha = 0.95, beta = 0.05;
        static std::uint64_t seed = 1, trial = 0;
        static bool waec = false;
        static std::int64_t tm_override = -1;
        static PlannerFlags pf;
        static ProbeFlags pr;
        est_cmd->add_option("--t", t, "True population")->required();
        est_cmd->add_option("--alpha", alpha, "Required reliability")->capture_default_str();
        est_cmd->add_option("--beta", beta, "Relative error half-width")->capture_default_str();
        est_cmd->add_option("--seed", seed, "Master seed")->capture_default_str();
        est_cmd->add_option("--trial", trial, "Trial stream index")->capture_default_str();
        est_cmd->add_option("--tm", tm_override, "Skip the probe and plan for this bound");
        est_cmd->add_flag("--waec", waec, "Ignore the normal-approximation allowance");
        pf.attach(est_cmd);
        pr.attach(est_cmd);
        est_cmd->callback([&] {
            action = [] {
                ExperimentSpec es;
                es.t_values = {t};
                es.trials = 1;
                es.accuracy = AccuracySpec{alpha, beta};
                es.master_seed = seed;
                es.mode = waec ? PlanMode::Waec : PlanMode::Gert;
                if (tm_override >= 0) es.tm_override = tm_override;
                es.planner = pf.config();
                es.probe = pr.config();
                const TrialRecord rec = run_trial(t, es, static_cast<int>(trial));
                const bool saturated = std::isnan(rec.t_hat);
                std::cout << "t=" << fmt_int(rec.t) << '\n'
                          << "t_m=" << fmt_int(rec.t_m) << '\n'
                          << "r=" << fmt_double(rec.r) << '\n'
                          << "f=" << fmt_int(rec.f) << '\n'
                          << "p=" << fmt_double(rec.p) << '\n'
                          << "n=" << fmt_int(rec.n) << '\n'
                          << "epsilon=" << fmt_double(rec.epsilon) << '\n'
                          << "z_bar=" << fmt_double(rec.z_bar) << '\n'
                          << "t_hat=" << fmt_double(rec.t_hat) << '\n'
                          << "saturated=" << (saturated ? '1' : '0') << '\n'
                          << "slots=" << fmt_double(rec.slots) << '\n'
                          << "within_beta=" << (rec.within_beta ? '1' : '0') << '\n';
                return saturated ? 3 : 0;
            };
        });
    }

    // experiment
    auto* exp_cmd = app.add_subcommand("experiment", "Monte Carlo reliability and cost matrix");
    {
        static std::vector<std::int64_t> t_list;
        static double alpha = 0.95, beta = 0.05;
        static int trials = 500;
        static std::uint64_t seed = 1;
        static std::string out, summary_out;
        static bool waec = false, serial = false;
        static std::int64_t tm_override = -1;
        static PlannerFlags pf;
        static ProbeFlags pr;
        exp_cmd->add_option("--t-list", t_list, "Comma-separated true populations")
            ->required()
            ->delimiter(',');
        exp_cmd->add_option("--alpha", alpha, "Required reliability")->capture_default_str();
        exp_cmd->add_option("--beta", beta, "Relative error half-width")->capture_default_str();
        exp_cmd->add_option("--trials", trials, "Trials per population")->capture_default_str();
        exp_cmd->add_option("--seed", seed, "Master seed")->capture_default_str();
        exp_cmd->add_option("--out", out, "Records CSV path")->required();
        exp_cmd->add_option("--summary-out", summary_out, "Summary CSV path");
        exp_cmd->add_option("--tm", tm_override, "Skip the probe and plan for this bound");
        exp_cmd->add_flag("--waec", waec, "Ignore the normal-approximation allowance");
        exp_cmd->add_flag("--serial", serial, "Run trials on one thread");
        pf.attach(exp_cmd);
        pr.attach(exp_cmd);
        exp_cmd->callback([&] {
            action = [] {
                ExperimentSpec es;
                es.t_values = t_list;
                es.trials = trials;
                es.accuracy = AccuracySpec{alpha, beta};
                es.master_seed = seed;
                es.mode = waec ? PlanMode::Waec : PlanMode::Gert;
                if (tm_override >= 0) es.tm_override = tm_override;
                es.planner = pf.config();
                es.probe = pr.config();
                const auto records = serial ? run_experiment_serial(es) : run_experiment(es);
                write_records_csv(out, records);
                if (!summary_out.empty()) write_summary_csv(summary_out, summarize(records));
                return all_saturated(records) ? 3 : 0;
            };
        });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        return action();
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return 2;
    } catch (const SaturatedError& e) {
        std::cerr << "saturated: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
