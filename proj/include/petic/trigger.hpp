#pragma once

#include <Eigen/Dense>
#include <vector>

namespace petic {

// Periodic event-triggering mechanism constants. The trigger compares the
// weighted Lyapunov value W(t,y) = e^(gamma*t) * y'Py against psi-multiples
// of its value at the last reference instant, checked only on the
// Delta-grid.
struct TriggerParams {
    double delta = 0.0; // sampling period, > 0
    double psi1 = 1.0;  // first-event threshold, >= 1
    double psi2 = 1.0;  // subsequent threshold, >= 1
    double gamma = 0.0; // decay weight, > 0
    Eigen::MatrixXd P;  // dim x dim symmetric positive definite

    void validate(int dim) const; // throws ConfigError
};

double lyapunov_weight(double t, const Eigen::VectorXd& y, const TriggerParams& params);

// Strict inequality W_now > psi * W_ref, psi = psi1 for the first event and
// psi2 afterwards. Negative W inputs violate an internal invariant.
bool should_trigger(double w_now, double w_ref, bool is_first, const TriggerParams& params);

struct Event {
    int index = 0;       // ordinal s (0-based)
    long long step = 0;  // integrator step of the instant (exact grid bookkeeping)
    double t = 0.0;      // instant t_s
    double gap = 0.0;    // t_s - t_{s-1} (t_{-1} := 0)
    double w_ratio = 0.0; // W_now / W_ref at the trigger
};

// Ordered trigger history of one trajectory. Instants are strictly
// increasing, each gap a positive integer multiple of Delta, and t_0 >= Delta
// (the first check happens at iota = 1, never at 0).
struct EventLog {
    std::vector<Event> events;

    bool empty() const { return events.empty(); }
    int count() const { return static_cast<int>(events.size()); }

    // Structural Zeno-freeness check; uses the integer step records so no
    // floating-point grid drift can produce false verdicts.
    void validate(double delta, long long steps_per_delta) const;

    double min_gap() const;
    double max_gap() const;
};

} // namespace petic
