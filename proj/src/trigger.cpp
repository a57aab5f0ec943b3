#include "petic/trigger.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "petic/errors.hpp"

namespace petic {

void TriggerParams::validate(int dim) const {
    if (!(delta > 0.0)) throw ConfigError("[trigger] delta", "sampling period must be > 0");
    if (!(psi1 >= 1.0)) throw ConfigError("[trigger] psi1", "psi1 >= 1 required");
    if (!(psi2 >= 1.0)) throw ConfigError("[trigger] psi2", "psi2 >= 1 required");
    if (!(gamma > 0.0)) throw ConfigError("[trigger] gamma", "gamma must be > 0");
    if (P.rows() != dim || P.cols() != dim)
        throw ConfigError("[trigger] p", "P must be dim x dim");
    if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw ConfigError("[trigger] p", "P must be symmetric (tolerance 1e-12)");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw ConfigError("[trigger] p", "P must be positive definite");
}

double lyapunov_weight(double t, const Eigen::VectorXd& y, const TriggerParams& params) {
    return std::exp(params.gamma * t) * y.dot(params.P * y);
}

bool should_trigger(double w_now, double w_ref, bool is_first, const TriggerParams& params) {
    if (w_now < 0.0 || w_ref < 0.0)
        throw std::logic_error("should_trigger: negative Lyapunov weight");
    const double psi = is_first ? params.psi1 : params.psi2;
    return w_now > psi * w_ref;
}

void EventLog::validate(double delta, long long steps_per_delta) const {
    long long prev_step = 0;
    for (size_t i = 0; i < events.size(); ++i) {
        const Event& e = events[i];
        const long long gap_steps = e.step - prev_step;
        if (gap_steps <= 0)
            throw std::logic_error("EventLog: instants not strictly increasing");
        if (gap_steps % steps_per_delta != 0)
            throw std::logic_error("EventLog: gap is not a multiple of Delta");
        if (gap_steps < steps_per_delta)
            throw std::logic_error("EventLog: inter-event gap below Delta");
        prev_step = e.step;
    }
    (void)delta;
}

double EventLog::min_gap() const {
    double g = std::numeric_limits<double>::infinity();
    for (const Event& e : events) g = std::min(g, e.gap);
    return g;
}

double EventLog::max_gap() const {
    double g = 0.0;
    for (const Event& e : events) g = std::max(g, e.gap);
    return g;
}

} // namespace petic
