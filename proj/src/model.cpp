#include "petic/model.hpp"

#include <cmath>
#include <string>

#include "petic/errors.hpp"

namespace petic {

void LeaderSpec::validate() const {
    if (n0 <= 0) throw ConfigError("[leader] n", "dimension must be positive");
    if (C0.rows() != n0 || C0.cols() != n0)
        throw ConfigError("[leader] C", "C0 must be n0 x n0");
    if (D0.rows() != n0 || D0.cols() != n0)
        throw ConfigError("[leader] D", "D0 must be n0 x n0");
    if (x0.size() != n0) throw ConfigError("[leader] x0", "initial state must have n0 entries");
    f.validate(n0);
}

MatchingResult check_matching(const AgentSpec& agent, const LeaderSpec& leader, double tol) {
    if (agent.Xi.rows() != agent.n || agent.Xi.cols() != leader.n0)
        throw ConfigError("agent Xi", "Xi must be n_i x n0 (Assumption 2)");
    const double rc = (agent.Xi * leader.C0 - agent.C * agent.Xi).cwiseAbs().maxCoeff();
    const double rd = (agent.Xi * leader.D0 - agent.D * agent.Xi).cwiseAbs().maxCoeff();
    const double residual = std::max(rc, rd);
    return {residual <= tol, residual};
}

EmbeddingResult check_embedding(const AgentSpec& agent, int m, double tol) {
    if (m < agent.n)
        throw ConfigError("agent Phi", "virtual dimension m must satisfy m >= n_i");
    if (agent.Phi.rows() != m || agent.Phi.cols() != agent.n)
        throw ConfigError("agent Phi", "Phi must be m x n_i (Assumption 4)");
    if (agent.Theta.rows() != agent.n || agent.Theta.cols() != m)
        throw ConfigError("agent Theta", "Theta must be n_i x m (Assumption 4)");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(agent.Phi);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double thresh = 1e-10 * (sv.size() > 0 ? sv(0) : 0.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > thresh) ++rank;

    const double residual =
        (agent.Theta * agent.Phi - Eigen::MatrixXd::Identity(agent.n, agent.n))
            .cwiseAbs()
            .maxCoeff();
    return {rank == agent.n && residual <= tol, rank, residual};
}

Eigen::VectorXd error_state(const Eigen::VectorXd& x_i, const Eigen::VectorXd& x0,
                            const AgentSpec& agent) {
    Eigen::VectorXd z = x_i - agent.Xi * x0;
    if (agent.offset.size() > 0) z -= agent.offset;
    return z;
}

Eigen::VectorXd lift(const AgentSpec& agent, const Eigen::VectorXd& z) {
    return agent.Phi * z;
}

Eigen::VectorXd project(const AgentSpec& agent, const Eigen::VectorXd& y) {
    return agent.Theta * y;
}

Eigen::VectorXd StackedSystem::exp_neg_alpha_gamma(double t) const {
    Eigen::VectorXd diag = gamma_diagonal(energy, t, m);
    return (-alpha * diag.array()).exp();
}

Eigen::VectorXd StackedSystem::eval_f(const Eigen::VectorXd& z) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(z.size());
    for (int i = 0; i < n_agents; ++i) {
        if (nonlinearities[i].is_zero()) continue;
        Eigen::VectorXd zi = z.segment(z_offset[i], n_i[i]);
        Eigen::VectorXd fi = Eigen::VectorXd::Zero(n_i[i]);
        nonlinearities[i].accumulate(zi, fi);
        out.segment(z_offset[i], n_i[i]) = fi;
    }
    return out;
}

StackedSystem build_stacked(const LeaderSpec& leader, const std::vector<AgentSpec>& agents,
                            const TopologySpec& topo, int m) {
    const int n_agents = static_cast<int>(agents.size());
    if (topo.n_agents != n_agents)
        throw ConfigError("[topology]", "agent count does not match topology size");

    int state_dim = 0;
    for (int i = 0; i < n_agents; ++i) {
        const AgentSpec& a = agents[i];
        const std::string who = "[agent." + std::to_string(i + 1) + "]";
        if (a.n > m)
            throw ConfigError(who, "n_i exceeds virtual dimension m (Assumption 4)");
        EmbeddingResult emb = check_embedding(a, m);
        if (!emb.passed)
            throw ConfigError(who, "embedding failed: rank(Phi) = " + std::to_string(emb.rank) +
                                       ", |Theta*Phi - I| = " + std::to_string(emb.residual) +
                                       " (Assumption 4)");
        if (a.Xi.rows() != a.n || a.Xi.cols() != leader.n0)
            throw ConfigError(who, "Xi must be n_i x n0 (Assumption 2)");
        state_dim += a.n;
    }

    StackedSystem sys;
    sys.m = m;
    sys.n_agents = n_agents;
    sys.state_dim = state_dim;
    sys.alpha = topo.alpha;
    sys.H = information_matrix(topo);

    const int dim = m * n_agents;
    sys.Phi = Eigen::MatrixXd::Zero(dim, state_dim);
    sys.Theta = Eigen::MatrixXd::Zero(state_dim, dim);
    sys.C = Eigen::MatrixXd::Zero(state_dim, state_dim);
    sys.D = Eigen::MatrixXd::Zero(state_dim, state_dim);
    sys.LnTheta = Eigen::MatrixXd::Zero(state_dim, dim);
    sys.gains.resize(n_agents);
    sys.diffusion_affine = Eigen::VectorXd::Zero(dim);

    int zoff = 0;
    for (int i = 0; i < n_agents; ++i) {
        const AgentSpec& a = agents[i];
        sys.z_offset.push_back(zoff);
        sys.n_i.push_back(a.n);
        sys.energy.push_back(a.energy);
        sys.nonlinearities.push_back(a.f);
        sys.gains(i) = a.gain;

        sys.Phi.block(static_cast<Eigen::Index>(i) * m, zoff, m, a.n) = a.Phi;
        sys.Theta.block(zoff, static_cast<Eigen::Index>(i) * m, a.n, m) = a.Theta;
        sys.C.block(zoff, zoff, a.n, a.n) = a.C;
        sys.D.block(zoff, zoff, a.n, a.n) = a.D;
        sys.LnTheta.block(zoff, static_cast<Eigen::Index>(i) * m, a.n, m) =
            a.lipschitz() * a.Theta;

        if (a.offset.size() > 0 && a.offset.cwiseAbs().maxCoeff() > 0.0) {
            sys.has_offsets = true;
            sys.diffusion_affine.segment(static_cast<Eigen::Index>(i) * m, m) =
                a.Phi * (a.D * a.offset);
        }
        zoff += a.n;
    }

    sys.PhiCTheta = sys.Phi * sys.C * sys.Theta;
    sys.PhiDTheta = sys.Phi * sys.D * sys.Theta;

    // K * (H (x) I_m) * Phi*Theta, assembled blockwise: block (i,j) is
    // k_i * H(i,j) * Phi_j*Theta_j.
    Eigen::MatrixXd phitheta = sys.Phi * sys.Theta;
    Eigen::MatrixXd khpt = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < n_agents; ++i)
        for (int j = 0; j < n_agents; ++j) {
            const double w = sys.gains(i) * sys.H(i, j);
            if (w == 0.0) continue;
            khpt.block(static_cast<Eigen::Index>(i) * m, static_cast<Eigen::Index>(j) * m, m, m) =
                w * phitheta.block(static_cast<Eigen::Index>(j) * m,
                                   static_cast<Eigen::Index>(j) * m, m, m);
        }
    sys.KH_PhiTheta = khpt;
    return sys;
}

namespace {
void require_finite(const Eigen::VectorXd& y, double t) {
    if (!y.allFinite()) throw BlowupError(t);
}
} // namespace

Eigen::VectorXd eval_drift(const StackedSystem& sys, const Eigen::VectorXd& y, double t) {
    require_finite(y, t);
    Eigen::VectorXd z = sys.Theta * y;
    return sys.PhiCTheta * y + sys.Phi * sys.eval_f(z);
}

Eigen::VectorXd eval_diffusion(const StackedSystem& sys, const Eigen::VectorXd& y, double t) {
    require_finite(y, t);
    Eigen::VectorXd out = sys.PhiDTheta * y;
    if (sys.has_offsets) out += sys.diffusion_affine;
    return out;
}

Eigen::MatrixXd stacking_permutation(int m, int n_agents) {
    const int dim = m * n_agents;
    Eigen::MatrixXd perm = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < n_agents; ++i)
        for (int c = 0; c < m; ++c)
            perm(c * n_agents + i, i * m + c) = 1.0; // component-major row <- agent-major col
    return perm;
}

} // namespace petic
