#pragma once

#include <Eigen/Dense>
#include <vector>

#include "petic/energy.hpp"
#include "petic/nonlinearity.hpp"
#include "petic/topology.hpp"

namespace petic {

// Leader dx0 = [C0 x0 + f(x0)]dt + D0 x0 dw.
struct LeaderSpec {
    int n0 = 0;
    Eigen::MatrixXd C0;
    Eigen::MatrixXd D0;
    NonlinearitySpec f; // f(0) = 0 by catalogue construction
    Eigen::VectorXd x0; // initial state

    void validate() const;
};

// One follower: dynamics, the matching matrix Xi against the leader,
// the virtual-space embedding pair (Phi, Theta), impulsive gain, desired
// relative position (formation offset) and its energy profile.
struct AgentSpec {
    int n = 0;
    Eigen::MatrixXd C;
    Eigen::MatrixXd D;
    Eigen::MatrixXd Xi;    // n x n0
    Eigen::MatrixXd Phi;   // m x n, rank n
    Eigen::MatrixXd Theta; // n x m, Theta*Phi = I_n
    NonlinearitySpec f;
    double gain = 0.0;
    Eigen::VectorXd offset; // n, zero when no formation
    EnergyProfile energy;
    Eigen::VectorXd x0; // initial state

    double lipschitz() const { return f.lipschitz(); }
};

struct MatchingResult {
    bool passed = false;
    double residual = 0.0; // max-abs-entry over both identities
};

// Xi*C0 = C*Xi and Xi*D0 = D*Xi within tol.
MatchingResult check_matching(const AgentSpec& agent, const LeaderSpec& leader,
                              double tol = 1e-10);

struct EmbeddingResult {
    bool passed = false;
    int rank = 0;          // numerical rank of Phi (svd threshold 1e-10*sigma_max)
    double residual = 0.0; // max-abs-entry of Theta*Phi - I
};

// rank(Phi) = n and Theta*Phi = I_n within tol. Throws ConfigError when m < n.
EmbeddingResult check_embedding(const AgentSpec& agent, int m, double tol = 1e-10);

// z = x - Xi*x0 - offset.
Eigen::VectorXd error_state(const Eigen::VectorXd& x_i, const Eigen::VectorXd& x0,
                            const AgentSpec& agent);

Eigen::VectorXd lift(const AgentSpec& agent, const Eigen::VectorXd& z);
Eigen::VectorXd project(const AgentSpec& agent, const Eigen::VectorXd& y);

// The block-assembled mN-dimensional virtual system.
//
// Stacking convention: y = [y_1; ...; y_N] (agent-major). Graph-level
// matrices lift as H (x) I_m, K = diag(k_i) (x) I_m and
// Gamma(t) = diag(tau_i(t)) (x) I_m. The source convention (component-major,
// I_m (x) H) is the same linear operator conjugated by the fixed perfect
// shuffle between the two orderings; a property test pins the equivalence.
//
// Flow:  dy = [PhiCTheta*y + Phi*f(Theta*y)]dt
//             + [PhiDTheta*y + diffusion_affine]dw      (one shared scalar w)
// Jumps: see impulse.hpp.
//
// Immutable after build; eval_drift/eval_diffusion are pure and safe for
// concurrent callers.
struct StackedSystem {
    int m = 0;
    int n_agents = 0;
    int state_dim = 0; // sum of n_i

    Eigen::MatrixXd Phi;   // dim x state_dim
    Eigen::MatrixXd Theta; // state_dim x dim
    Eigen::MatrixXd C;     // state_dim x state_dim (block diagonal)
    Eigen::MatrixXd D;
    Eigen::MatrixXd H; // N x N information-exchange matrix

    Eigen::MatrixXd PhiCTheta; // dim x dim
    Eigen::MatrixXd PhiDTheta;
    Eigen::MatrixXd KH_PhiTheta; // K * (H (x) I_m) * Phi*Theta
    Eigen::MatrixXd LnTheta;     // diag(L_fi * I_ni) * Theta, state_dim x dim

    Eigen::VectorXd gains;            // N
    Eigen::VectorXd diffusion_affine; // dim; stacked Phi_i*D_i*offset_i
    double alpha = 0.0;
    std::vector<EnergyProfile> energy;
    std::vector<NonlinearitySpec> nonlinearities; // per agent, act on z_i
    std::vector<int> z_offset;                    // prefix sums of n_i
    std::vector<int> n_i;

    int dim() const { return m * n_agents; }
    bool has_offsets = false;

    // e^(-alpha*Gamma(t)) as its diagonal (agent-major).
    Eigen::VectorXd exp_neg_alpha_gamma(double t) const;

    // Stacked f(z) for z = Theta*y.
    Eigen::VectorXd eval_f(const Eigen::VectorXd& z) const;
};

// Assembles the stacked system. Preconditions: every agent passes
// check_embedding, n_i <= m, topology size matches. Violations raise
// ConfigError naming the agent and the broken assumption.
StackedSystem build_stacked(const LeaderSpec& leader, const std::vector<AgentSpec>& agents,
                            const TopologySpec& topo, int m);

// Throw BlowupError(t) if y is non-finite, otherwise evaluate the flow terms.
Eigen::VectorXd eval_drift(const StackedSystem& sys, const Eigen::VectorXd& y, double t);
Eigen::VectorXd eval_diffusion(const StackedSystem& sys, const Eigen::VectorXd& y, double t);

// Perfect shuffle P with (P*y_agent_major) = y_component_major; dim = m*n.
// Test helper for the ordering-equivalence property.
Eigen::MatrixXd stacking_permutation(int m, int n_agents);

} // namespace petic
