#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "petic/model.hpp"
#include "petic/scenario.hpp"
#include "petic/trigger.hpp"

namespace petic {

// Counter-based Gaussian stream: the increment for step s of a run depends
// only on (run_seed, s), so record decimation and parallel scheduling can
// never change a path. splitmix64 underneath, Box-Muller on top.
uint64_t splitmix64(uint64_t& state);
uint64_t derive_run_seed(uint64_t master_seed, int run_index);
double standard_normal(uint64_t run_seed, uint64_t step_index);

// One explicit Euler-Maruyama step; dW ~ Normal(0, h) on the single shared
// Wiener channel.
Eigen::VectorXd em_step(const Eigen::VectorXd& y, double t, double h, double dW,
                        const StackedSystem& sys);

// One sample path. Samples are right-continuous: the value stored AT an
// event instant is the post-impulse state.
struct Trajectory {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> y;
    std::vector<double> norm_sq;
    std::vector<Eigen::VectorXd> energy; // tau_i(t) per agent at each sample
    EventLog events;

    bool blew_up = false;
    double blowup_time = 0.0;
    std::string diagnostics; // last event / last W ratio on blowup

    // Reconstructed error state z_i = Theta_i * y_i at every sample.
    std::vector<Eigen::VectorXd> z_series(const StackedSystem& sys, int agent) const;
};

// Ensemble reduction. mean_sq is the arithmetic mean of |y(t)|^2 over the
// non-excluded runs; the reduction is associative/commutative so the result
// is independent of completion order.
struct EnsembleStats {
    std::vector<double> t;
    std::vector<double> mean_sq;
    std::vector<int> trigger_counts; // per included run
    double min_gap = 0.0;
    double max_gap = 0.0;
    double mean_gap = 0.0;
    int excluded = 0;
    int total_runs = 0;
    std::vector<EventLog> logs; // per included run
};

Trajectory run_trajectory(const Scenario& scenario, uint64_t run_seed);

// Runs n_runs independent trajectories (seeds derived deterministically from
// the master seed) and reduces. Runs that blow up are excluded and counted;
// more than 10% exclusions raises BlowupError.
EnsembleStats run_ensemble(const Scenario& scenario, const SimParams& sim);

// Fixed-period comparison: impulses fire unconditionally at every
// Delta-instant (no trigger evaluation). Used by the baseline command.
Trajectory run_fixed_period(const Scenario& scenario, uint64_t run_seed);

} // namespace petic
