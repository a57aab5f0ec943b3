#include "petic/impulse.hpp"

#include "petic/errors.hpp"

namespace petic {

Eigen::VectorXd impulse_no_delay(const Eigen::VectorXd& y_minus, double t_s,
                                 const StackedSystem& sys) {
    for (int i = 0; i < sys.n_agents; ++i)
        if (sys.gains(i) >= 0.0)
            throw ConfigError("[agent." + std::to_string(i + 1) + "] gain",
                              "no-delay impulsive gains must be negative");
    return y_minus +
           sys.exp_neg_alpha_gamma(t_s).cwiseProduct(sys.KH_PhiTheta * y_minus);
}

Eigen::VectorXd impulse_with_delay(const Eigen::VectorXd& y_delayed, double t_s,
                                   const StackedSystem& sys) {
    return sys.exp_neg_alpha_gamma(t_s).cwiseProduct(sys.KH_PhiTheta * y_delayed);
}

} // namespace petic
