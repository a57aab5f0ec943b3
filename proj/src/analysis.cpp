#include "petic/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>

#include "petic/errors.hpp"

namespace petic {

double generalized_max_eigenvalue(const Eigen::MatrixXd& S, const Eigen::MatrixXd& P) {
    Eigen::MatrixXd sym = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pcheck(P, Eigen::EigenvaluesOnly);
    if (pcheck.eigenvalues().minCoeff() <= 0.0)
        throw ConfigError("[trigger] p", "P must be positive definite");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, P,
                                                                     Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    return solver.eigenvalues().maxCoeff();
}

double compute_lambda(const StackedSystem& sys, const Eigen::MatrixXd& P) {
    const Eigen::MatrixXd& A = sys.PhiCTheta;
    const Eigen::MatrixXd& G = sys.PhiDTheta;
    Eigen::MatrixXd S = P * A + A.transpose() * P + G.transpose() * P * G +
                        P.transpose() * P + sys.LnTheta.transpose() * sys.LnTheta;
    return std::max(0.0, generalized_max_eigenvalue(S, P));
}

double compute_lambda1(const StackedSystem& sys, const Eigen::MatrixXd& P, double alpha,
                       double tau) {
    const int dim = sys.dim();
    Eigen::MatrixXd A = std::exp(alpha * tau) * Eigen::MatrixXd::Identity(dim, dim) +
                        sys.KH_PhiTheta;
    return generalized_max_eigenvalue(A.transpose() * P * A, P);
}

double compute_lambda1_tilde(const StackedSystem& sys, const Eigen::MatrixXd& P) {
    const Eigen::MatrixXd& A = sys.KH_PhiTheta;
    return generalized_max_eigenvalue(A.transpose() * P * A, P);
}

namespace {

double condition_number(const Eigen::MatrixXd& P) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
}

Certificate make_certificate(double gamma_bar, double lambda, const TriggerParams& params) {
    Certificate cert;
    cert.gamma_bar = gamma_bar;
    cert.feasible = gamma_bar > 0.0;
    cert.gamma_certified = cert.feasible && params.gamma <= gamma_bar;
    cert.M = params.psi1 * std::exp((lambda + params.gamma) * params.delta) *
             condition_number(params.P);
    return cert;
}

} // namespace

Certificate certify_no_delay(double lambda, double lambda1, const TriggerParams& params,
                             double alpha, double tau) {
    double gamma_bar;
    if (lambda1 <= 0.0) {
        gamma_bar = kGammaBarCap; // perfect annihilation: ln 0 -> -inf
    } else {
        gamma_bar = (2.0 * alpha * tau - std::log(params.psi2) - std::log(lambda1) -
                     lambda * params.delta) /
                    params.delta;
    }
    return make_certificate(gamma_bar, lambda, params);
}

Certificate certify_delayed(double lambda, double lambda1_tilde, const TriggerParams& params,
                            double alpha, double beta) {
    double gamma_bar;
    if (lambda1_tilde <= 0.0) {
        gamma_bar = kGammaBarCap;
    } else {
        gamma_bar = ((2.0 * alpha * beta - lambda) * params.delta - std::log(params.psi2) -
                     std::log(lambda1_tilde)) /
                    (2.0 * params.delta);
    }
    return make_certificate(gamma_bar, lambda, params);
}

DecayVerdict decay_check(const EnsembleStats& stats, double gamma, double M, double slack) {
    if (stats.t.empty() || stats.mean_sq.empty())
        throw std::invalid_argument("decay_check: empty ensemble statistics");

    DecayVerdict verdict;
    const double initial = stats.mean_sq.front();
    double worst = 0.0;
    for (size_t i = 0; i < stats.t.size(); ++i) {
        const double bound = M * std::exp(-gamma * stats.t[i]) * initial;
        const double ratio = bound > 0.0 ? stats.mean_sq[i] / bound
                                         : (stats.mean_sq[i] > 0.0 ? std::numeric_limits<double>::infinity()
                                                                   : 0.0);
        worst = std::max(worst, ratio);
    }
    // margin = remaining headroom; exactly `slack` when the data sits on the
    // bound curve itself, >= 1 iff the check passes
    verdict.margin = worst > 0.0 ? slack / worst : std::numeric_limits<double>::infinity();
    verdict.passed = worst <= slack;

    // least-squares slope of ln mean_sq over t, skipping zero samples
    double st = 0, sv = 0, stt = 0, stv = 0;
    long long count = 0;
    for (size_t i = 0; i < stats.t.size(); ++i) {
        if (stats.mean_sq[i] <= 0.0) continue;
        const double v = std::log(stats.mean_sq[i]);
        st += stats.t[i];
        sv += v;
        stt += stats.t[i] * stats.t[i];
        stv += stats.t[i] * v;
        ++count;
    }
    if (count >= 2) {
        const double denom = count * stt - st * st;
        verdict.ls_exponent = denom != 0.0 ? (count * stv - st * sv) / denom : 0.0;
    }
    return verdict;
}

TriggerStats trigger_report(const std::vector<EventLog>& logs, double delta, double horizon) {
    if (logs.empty()) throw std::invalid_argument("trigger_report: no event logs");
    TriggerStats ts;
    ts.baseline = static_cast<long long>(std::floor(horizon / delta + 1e-9));
    double sum = 0.0;
    for (const EventLog& log : logs) {
        ts.counts.push_back(log.count());
        sum += log.count();
    }
    ts.mean_count = sum / static_cast<double>(logs.size());
    ts.reduction = ts.baseline > 0 ? 1.0 - ts.mean_count / static_cast<double>(ts.baseline) : 0.0;
    return ts;
}

namespace {

// Sampled Assumption-3 check: |f(z)| <= L_f |z| over random draws.
AssumptionCheck check_lipschitz_sampled(const AgentSpec& agent, int index) {
    AssumptionCheck chk;
    chk.name = "A3 lipschitz agent " + std::to_string(index + 1);
    const double lf = agent.lipschitz();
    chk.passed = true;
    double worst = 0.0;
    uint64_t rng_state = 0x5EEDD15C0DEull + static_cast<uint64_t>(index);
    for (int k = 0; k < 1000; ++k) {
        Eigen::VectorXd z(agent.n);
        for (int j = 0; j < agent.n; ++j) {
            const uint64_t bits = splitmix64(rng_state);
            z(j) = (static_cast<double>(bits >> 11) * 0x1.0p-53 - 0.5) * 20.0;
        }
        const double fn = agent.f.eval(z).norm();
        const double zn = z.norm();
        if (zn > 0.0) worst = std::max(worst, fn / zn);
        if (fn > lf * zn + 1e-12) chk.passed = false;
    }
    chk.residual = worst;
    std::ostringstream os;
    os << "max sampled |f(z)|/|z| = " << worst << " vs L_f = " << lf;
    chk.detail = os.str();
    return chk;
}

} // namespace

CertificateReport verify_scenario(const Scenario& scenario) {
    StackedSystem sys = scenario.build();
    CertificateReport report;
    report.delayed = scenario.mode == ControlMode::Delayed;
    report.gamma_used = scenario.trigger.gamma;
    report.alpha = scenario.topology.alpha;

    // Assumption 2 (matching) -- reported, never fatal here.
    for (size_t i = 0; i < scenario.agents.size(); ++i) {
        MatchingResult mr = check_matching(scenario.agents[i], scenario.leader);
        AssumptionCheck chk;
        chk.name = "A2 matching agent " + std::to_string(i + 1);
        chk.passed = mr.passed;
        chk.residual = mr.residual;
        std::ostringstream os;
        os << "max |Xi*C0 - C*Xi|, |Xi*D0 - D*Xi| = " << mr.residual;
        chk.detail = os.str();
        if (!mr.passed) report.matching_ok = false;
        report.assumptions.push_back(chk);
    }

    // Assumption 4 (embedding) -- build() already enforces it; record residuals.
    for (size_t i = 0; i < scenario.agents.size(); ++i) {
        EmbeddingResult er = check_embedding(scenario.agents[i], scenario.m);
        AssumptionCheck chk;
        chk.name = "A4 embedding agent " + std::to_string(i + 1);
        chk.passed = er.passed;
        chk.residual = er.residual;
        chk.detail = "rank " + std::to_string(er.rank) + "/" + std::to_string(scenario.agents[i].n);
        report.assumptions.push_back(chk);
    }

    // Assumption 3 sampled per agent.
    for (size_t i = 0; i < scenario.agents.size(); ++i)
        report.assumptions.push_back(check_lipschitz_sampled(scenario.agents[i], static_cast<int>(i)));

    report.lambda = compute_lambda(sys, scenario.trigger.P);

    Certificate cert;
    if (report.delayed) {
        // Assumption 7 floor tau_i(t) >= beta_i t holds by construction for
        // the affine family; Assumption 9 uses beta = max beta_i.
        double beta = 0.0;
        for (const AgentSpec& a : scenario.agents) beta = std::max(beta, a.energy.beta);
        report.beta_max = beta;
        report.lambda1 = compute_lambda1_tilde(sys, scenario.trigger.P);
        cert = certify_delayed(report.lambda, report.lambda1, scenario.trigger,
                               scenario.topology.alpha, beta);
        AssumptionCheck a8;
        a8.name = "A8 actuation delay";
        a8.passed = scenario.actuation_delay < scenario.trigger.delta;
        a8.residual = scenario.actuation_delay;
        a8.detail = "tau_s < Delta";
        report.assumptions.push_back(a8);
        AssumptionCheck a9;
        a9.name = "A9 certificate";
        a9.passed = cert.feasible;
        a9.residual = cert.gamma_bar;
        a9.detail = "(2*alpha*beta - lambda)*Delta - ln psi2 - ln lambda1~ > 0";
        report.assumptions.push_back(a9);
    } else {
        // Assumption 5 floor: for tau0 + beta*t the floor is min tau0.
        double tau = std::numeric_limits<double>::infinity();
        for (const AgentSpec& a : scenario.agents) tau = std::min(tau, a.energy.tau0);
        report.tau_floor = tau;
        report.lambda1 = compute_lambda1(sys, scenario.trigger.P, scenario.topology.alpha, tau);
        cert = certify_no_delay(report.lambda, report.lambda1, scenario.trigger,
                                scenario.topology.alpha, tau);
        AssumptionCheck a5;
        a5.name = "A5 energy floor";
        a5.passed = tau >= 0.0;
        a5.residual = tau;
        a5.detail = "tau_i(t) >= tau with tau = min tau0";
        report.assumptions.push_back(a5);
        AssumptionCheck a6;
        a6.name = "A6 certificate";
        a6.passed = cert.feasible;
        a6.residual = cert.gamma_bar;
        a6.detail = "2*alpha*tau - ln psi2 - ln lambda1 - lambda*Delta > 0";
        report.assumptions.push_back(a6);
    }

    report.gamma_bar = cert.gamma_bar;
    report.M = cert.M;
    report.feasible = cert.feasible;
    report.gamma_certified = cert.gamma_certified;
    return report;
}

} // namespace petic
