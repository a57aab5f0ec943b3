#pragma once

#include <Eigen/Dense>

#include "petic/model.hpp"

namespace petic {

// Jump without actuation delay (additive form):
//   y(t_s) = y(t_s-) + e^(-alpha*Gamma(t_s)) * K * H~ * Phi*Theta * y(t_s-).
// The state is right-continuous at t_s. Gains must all be negative; any
// k_i >= 0 is a configuration error.
Eigen::VectorXd impulse_no_delay(const Eigen::VectorXd& y_minus, double t_s,
                                 const StackedSystem& sys);

// Jump with actuation delay (replacement form, no additive term):
//   y(t_s) = e^(-alpha*Gamma(t_s)) * K~ * H~ * Phi*Theta * y(t_s- - tau_s).
// Depends only on the delayed state; gains are unrestricted in sign.
Eigen::VectorXd impulse_with_delay(const Eigen::VectorXd& y_delayed, double t_s,
                                   const StackedSystem& sys);

} // namespace petic
