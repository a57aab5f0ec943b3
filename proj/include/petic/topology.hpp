#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "petic/energy.hpp"

namespace petic {

// Directed follower graph with energy-scaled weights.
//
// Base weights abar_ij and leader links bbar_i are scaled at runtime by
// e^(-alpha*tau_i(t)). The information-exchange matrix is H = -L + B with
// l_ii = sum_j abar_ij, l_ij = -abar_ij, B = diag(bbar). A scenario may
// supply H directly (h_override), in which case it is used verbatim and
// abar/bbar stay empty.
//
// All types here are immutable after construction and safe to share
// across parallel simulation runs.
struct TopologySpec {
    int n_agents = 0;
    double alpha = 0.0;                      // energy sensitivity, > 0
    Eigen::MatrixXd abar;                    // N x N, >= 0, zero diagonal
    Eigen::VectorXd bbar;                    // N, >= 0
    std::optional<Eigen::MatrixXd> h_override;

    void validate() const; // throws ConfigError on violation
};

// a_ij(t) = abar_ij * e^(-alpha*tau_i); the same formula serves
// b_i(t) = bbar_i * e^(-alpha*tau_i). Throws std::domain_error for tau < 0.
double edge_weight(double abar_ij, double alpha, double tau_i);

// H = -L + B derived from the spec, or the override verbatim.
Eigen::MatrixXd information_matrix(const TopologySpec& spec);

// Diagonal of Gamma(t) = diag(tau_1(t),...,tau_N(t)) (x) I_m under the
// agent-major stacking used everywhere in this codebase: entry i*m+c is
// tau_i(t). (The source convention I_m (x) diag(tau_i) is the same
// operator under the component-major ordering; see model.hpp.)
Eigen::VectorXd gamma_diagonal(const std::vector<EnergyProfile>& profiles, double t, int m);

// Full mN x mN diagonal matrix form of the above.
Eigen::MatrixXd gamma_matrix(const std::vector<EnergyProfile>& profiles, double t, int m);

} // namespace petic
