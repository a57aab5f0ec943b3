#include "petic/topology.hpp"

#include <cmath>
#include <stdexcept>

#include "petic/errors.hpp"

namespace petic {

void TopologySpec::validate() const {
    if (n_agents <= 0)
        throw ConfigError("[topology]", "n_agents must be positive");
    if (!(alpha > 0.0))
        throw ConfigError("[topology] alpha", "alpha must be > 0");
    if (h_override) {
        if (h_override->rows() != n_agents || h_override->cols() != n_agents)
            throw ConfigError("[topology] h", "H must be N x N");
        return; // override takes precedence; abar/bbar unused
    }
    if (abar.rows() != n_agents || abar.cols() != n_agents)
        throw ConfigError("[topology] abar", "abar must be N x N");
    if (bbar.size() != n_agents)
        throw ConfigError("[topology] bbar", "bbar must have N entries");
    for (int i = 0; i < n_agents; ++i) {
        if (abar(i, i) != 0.0)
            throw ConfigError("[topology] abar", "diagonal must be zero");
        for (int j = 0; j < n_agents; ++j)
            if (abar(i, j) < 0.0)
                throw ConfigError("[topology] abar", "weights must be >= 0");
        if (bbar(i) < 0.0)
            throw ConfigError("[topology] bbar", "leader weights must be >= 0");
    }
    if (bbar.maxCoeff() <= 0.0)
        throw ConfigError("[topology] bbar", "B must not be the zero matrix");
}

double edge_weight(double abar_ij, double alpha, double tau_i) {
    if (tau_i < 0.0)
        throw std::domain_error("edge_weight: energy consumption cannot be negative");
    if (abar_ij < 0.0)
        throw std::domain_error("edge_weight: base weight must be >= 0");
    if (!(alpha > 0.0))
        throw std::domain_error("edge_weight: alpha must be > 0");
    return abar_ij * std::exp(-alpha * tau_i);
}

Eigen::MatrixXd information_matrix(const TopologySpec& spec) {
    if (spec.h_override) return *spec.h_override;
    const int n = spec.n_agents;
    Eigen::MatrixXd laplacian = -spec.abar;
    for (int i = 0; i < n; ++i) laplacian(i, i) = spec.abar.row(i).sum();
    Eigen::MatrixXd h = -laplacian;
    h.diagonal() += spec.bbar;
    return h;
}

Eigen::VectorXd gamma_diagonal(const std::vector<EnergyProfile>& profiles, double t, int m) {
    const int n = static_cast<int>(profiles.size());
    Eigen::VectorXd diag(n * m);
    for (int i = 0; i < n; ++i)
        diag.segment(static_cast<Eigen::Index>(i) * m, m).setConstant(profiles[i].value(t));
    return diag;
}

Eigen::MatrixXd gamma_matrix(const std::vector<EnergyProfile>& profiles, double t, int m) {
    return gamma_diagonal(profiles, t, m).asDiagonal();
}

} // namespace petic
