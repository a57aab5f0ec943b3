#include "petic/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "petic/errors.hpp"
#include "petic/impulse.hpp"

namespace petic {

uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

uint64_t derive_run_seed(uint64_t master_seed, int run_index) {
    uint64_t state = master_seed;
    uint64_t out = 0;
    for (int i = 0; i <= run_index; ++i) out = splitmix64(state);
    return out;
}

double standard_normal(uint64_t run_seed, uint64_t step_index) {
    uint64_t state = run_seed ^ (0xD1B54A32D192ED03ull * (step_index + 1));
    const uint64_t a = splitmix64(state);
    const uint64_t b = splitmix64(state);
    // u1 in (0,1], u2 in [0,1)
    const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::VectorXd em_step(const Eigen::VectorXd& y, double t, double h, double dW,
                        const StackedSystem& sys) {
    Eigen::VectorXd next = y + eval_drift(sys, y, t) * h + eval_diffusion(sys, y, t) * dW;
    if (!next.allFinite()) throw BlowupError(t + h);
    return next;
}

std::vector<Eigen::VectorXd> Trajectory::z_series(const StackedSystem& sys, int agent) const {
    std::vector<Eigen::VectorXd> out;
    out.reserve(y.size());
    for (const Eigen::VectorXd& yi : y)
        out.push_back(sys.Theta.middleRows(sys.z_offset[agent], sys.n_i[agent]) * yi);
    return out;
}

namespace {

constexpr double kBlowupThreshold = 1e12;

struct RunConfig {
    long long n_steps;
    long long steps_per_delta;
    long long delay_steps;
    bool controlled;
    bool delayed;
    bool fixed_period; // impulse at every Delta-instant, no trigger check
};

Trajectory simulate(const Scenario& scenario, const StackedSystem& sys, uint64_t run_seed,
                    const RunConfig& rc) {
    const double h = scenario.sim.step;
    const int stride = scenario.sim.record_stride;

    Trajectory traj;
    Eigen::VectorXd y = scenario.initial_virtual_state();

    auto record = [&](double t, const Eigen::VectorXd& state) {
        traj.t.push_back(t);
        traj.y.push_back(state);
        traj.norm_sq.push_back(state.squaredNorm());
        Eigen::VectorXd taus(sys.n_agents);
        for (int i = 0; i < sys.n_agents; ++i) taus(i) = sys.energy[i].value(t);
        traj.energy.push_back(taus);
    };
    record(0.0, y);

    double w_ref = lyapunov_weight(0.0, y, scenario.trigger);
    bool first_event = true;
    long long last_event_step = 0;
    double last_w_ratio = 0.0;

    // Delay ring buffer keeps the flowed (pre-impulse) state of the most
    // recent delay_steps+1 grid points. The lookback index of a trigger
    // instant never lands on another impulse instant because tau_s < Delta.
    std::vector<Eigen::VectorXd> ring;
    if (rc.delayed) {
        ring.assign(static_cast<size_t>(rc.delay_steps) + 1, y);
    }

    try {
        for (long long s = 1; s <= rc.n_steps; ++s) {
            const double t_prev = static_cast<double>(s - 1) * h;
            const double dW = standard_normal(run_seed, static_cast<uint64_t>(s)) * std::sqrt(h);
            y = em_step(y, t_prev, h, dW, sys);
            const double t = static_cast<double>(s) * h;
            if (y.cwiseAbs().maxCoeff() > kBlowupThreshold) throw BlowupError(t);

            if (rc.delayed) ring[static_cast<size_t>(s % (rc.delay_steps + 1))] = y;

            if (rc.controlled && s % rc.steps_per_delta == 0) {
                bool fire = rc.fixed_period;
                double w_now = 0.0;
                if (!rc.fixed_period) {
                    w_now = lyapunov_weight(t, y, scenario.trigger);
                    fire = should_trigger(w_now, w_ref, first_event, scenario.trigger);
                }
                if (fire) {
                    if (rc.delayed) {
                        const long long back = s - rc.delay_steps;
                        const Eigen::VectorXd& y_delayed =
                            ring[static_cast<size_t>(back % (rc.delay_steps + 1))];
                        y = impulse_with_delay(y_delayed, t, sys);
                    } else {
                        y = impulse_no_delay(y, t, sys);
                    }
                    Event ev;
                    ev.index = traj.events.count();
                    ev.step = s;
                    ev.t = t;
                    ev.gap = t - static_cast<double>(last_event_step) * h;
                    ev.w_ratio = w_ref > 0.0 ? w_now / w_ref : 0.0;
                    traj.events.events.push_back(ev);
                    last_event_step = s;
                    last_w_ratio = ev.w_ratio;
                    // the post-jump, right-continuous value is the new reference
                    w_ref = lyapunov_weight(t, y, scenario.trigger);
                    first_event = false;
                    if (y.cwiseAbs().maxCoeff() > kBlowupThreshold) throw BlowupError(t);
                }
            }
            if (s % stride == 0) record(t, y);
        }
    } catch (const BlowupError& e) {
        traj.blew_up = true;
        traj.blowup_time = e.time();
        std::ostringstream msg;
        msg << "diverged at t = " << e.time() << " after " << traj.events.count() << " events";
        if (traj.events.count() > 0) {
            msg << " (last event t = " << traj.events.events.back().t
                << ", W ratio = " << last_w_ratio << ")";
        }
        traj.diagnostics = msg.str();
    }
    return traj;
}

RunConfig make_run_config(const Scenario& scenario, bool fixed_period) {
    RunConfig rc;
    rc.n_steps = std::llround(scenario.sim.horizon / scenario.sim.step);
    rc.steps_per_delta = std::llround(scenario.trigger.delta / scenario.sim.step);
    rc.delayed = scenario.mode == ControlMode::Delayed;
    rc.delay_steps =
        rc.delayed ? std::llround(scenario.actuation_delay / scenario.sim.step) : 0;
    rc.controlled = scenario.mode != ControlMode::Uncontrolled;
    rc.fixed_period = fixed_period;
    return rc;
}

} // namespace

Trajectory run_trajectory(const Scenario& scenario, uint64_t run_seed) {
    StackedSystem sys = scenario.build();
    return simulate(scenario, sys, run_seed, make_run_config(scenario, false));
}

Trajectory run_fixed_period(const Scenario& scenario, uint64_t run_seed) {
    StackedSystem sys = scenario.build();
    RunConfig rc = make_run_config(scenario, true);
    rc.controlled = true; // baseline always actuates
    return simulate(scenario, sys, run_seed, rc);
}

EnsembleStats run_ensemble(const Scenario& scenario, const SimParams& sim) {
    Scenario sc = scenario;
    sc.sim = sim;
    StackedSystem sys = sc.build();
    const RunConfig rc = make_run_config(sc, false);

    const int n_runs = sim.n_runs;
    std::vector<Trajectory> runs(static_cast<size_t>(n_runs));

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int workers = static_cast<int>(std::min<unsigned>(hw, static_cast<unsigned>(n_runs)));
    std::vector<std::future<void>> futures;
    futures.reserve(static_cast<size_t>(workers));
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w) {
        futures.push_back(std::async(std::launch::async, [&]() {
            while (true) {
                const int idx = next.fetch_add(1);
                if (idx >= n_runs) break;
                runs[static_cast<size_t>(idx)] =
                    simulate(sc, sys, derive_run_seed(sim.master_seed, idx), rc);
            }
        }));
    }
    for (auto& f : futures) f.get();

    // deterministic reduction in run-index order
    EnsembleStats stats;
    stats.total_runs = n_runs;
    size_t grid = 0;
    for (const Trajectory& traj : runs)
        if (!traj.blew_up) grid = std::max(grid, traj.t.size());

    stats.t.assign(grid, 0.0);
    stats.mean_sq.assign(grid, 0.0);
    double gap_sum = 0.0;
    long long gap_count = 0;
    stats.min_gap = std::numeric_limits<double>::infinity();
    stats.max_gap = 0.0;

    int included = 0;
    for (const Trajectory& traj : runs) {
        if (traj.blew_up) {
            ++stats.excluded;
            continue;
        }
        ++included;
        for (size_t i = 0; i < grid; ++i) {
            stats.t[i] = traj.t[i];
            stats.mean_sq[i] += traj.norm_sq[i];
        }
        stats.trigger_counts.push_back(traj.events.count());
        stats.logs.push_back(traj.events);
        for (const Event& e : traj.events.events) {
            gap_sum += e.gap;
            ++gap_count;
            stats.min_gap = std::min(stats.min_gap, e.gap);
            stats.max_gap = std::max(stats.max_gap, e.gap);
        }
    }
    if (stats.excluded > 0 && 10 * stats.excluded > n_runs)
        throw BlowupError(0.0, "ensemble failure: " + std::to_string(stats.excluded) + " of " +
                                   std::to_string(n_runs) + " runs diverged (>10%)");

    if (included > 0)
        for (size_t i = 0; i < grid; ++i) stats.mean_sq[i] /= included;
    stats.mean_gap = gap_count > 0 ? gap_sum / static_cast<double>(gap_count) : 0.0;
    if (gap_count == 0) stats.min_gap = 0.0;
    return stats;
}

} // namespace petic
