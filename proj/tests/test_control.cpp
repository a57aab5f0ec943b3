#include <doctest.h>

#include <cmath>

#include "petic/errors.hpp"
#include "petic/impulse.hpp"
#include "petic/model.hpp"
#include "petic/trigger.hpp"

using namespace petic;

namespace {

TriggerParams make_params(int dim, double p_scale = 1.0) {
    TriggerParams params;
    params.delta = 0.01;
    params.psi1 = 1.4;
    params.psi2 = 1.001;
    params.gamma = 0.0019;
    params.P = p_scale * Eigen::MatrixXd::Identity(dim, dim);
    return params;
}

// N scalar agents with explicit gains/topology for jump-map tests.
StackedSystem scalar_stack(const std::vector<double>& gains, const Eigen::MatrixXd& h,
                           double alpha, double tau0) {
    LeaderSpec leader;
    leader.n0 = 1;
    leader.C0 = Eigen::MatrixXd::Zero(1, 1);
    leader.D0 = Eigen::MatrixXd::Zero(1, 1);
    leader.x0 = Eigen::VectorXd::Zero(1);
    std::vector<AgentSpec> agents;
    for (double k : gains) {
        AgentSpec a;
        a.n = 1;
        a.C = Eigen::MatrixXd::Zero(1, 1);
        a.D = Eigen::MatrixXd::Zero(1, 1);
        a.Xi = Eigen::MatrixXd::Identity(1, 1);
        a.Phi = Eigen::MatrixXd::Identity(1, 1);
        a.Theta = Eigen::MatrixXd::Identity(1, 1);
        a.gain = k;
        a.offset = Eigen::VectorXd::Zero(1);
        a.x0 = Eigen::VectorXd::Zero(1);
        a.energy = EnergyProfile{tau0, 0.0};
        agents.push_back(a);
    }
    TopologySpec topo;
    topo.n_agents = static_cast<int>(gains.size());
    topo.alpha = alpha;
    topo.h_override = h;
    return build_stacked(leader, agents, topo, 1);
}

} // namespace

TEST_CASE("Lyapunov weight") {
    SUBCASE("zero state weighs nothing at any time") {
        TriggerParams params = make_params(2);
        CHECK(lyapunov_weight(0.0, Eigen::VectorXd::Zero(2), params) == 0.0);
        CHECK(lyapunov_weight(17.0, Eigen::VectorXd::Zero(2), params) == 0.0);
    }
    SUBCASE("t = 0 with identity P is plain norm squared") {
        TriggerParams params = make_params(2);
        Eigen::VectorXd y(2);
        y << 3, 4;
        CHECK(lyapunov_weight(0.0, y, params) == doctest::Approx(25.0).epsilon(1e-15));
    }
    SUBCASE("scaled P and positive time") {
        TriggerParams params = make_params(2, 0.95);
        Eigen::VectorXd y(2);
        y << 1, 0;
        CHECK(lyapunov_weight(1.0, y, params) ==
              doctest::Approx(0.9518067158365244).epsilon(1e-14));
    }
}

TEST_CASE("trigger predicate") {
    TriggerParams params = make_params(1);
    SUBCASE("strict inequality at the boundary") {
        params.psi2 = 1.001;
        CHECK_FALSE(should_trigger(1.0, 1.0, false, params));
        CHECK_FALSE(should_trigger(1.001, 1.0, false, params));
    }
    SUBCASE("zero reference never fires") {
        CHECK_FALSE(should_trigger(0.0, 0.0, true, params));
        CHECK_FALSE(should_trigger(0.0, 0.0, false, params));
    }
    SUBCASE("first event uses psi1") {
        params.psi1 = 1.4;
        CHECK(should_trigger(1.5, 1.0, true, params));
        CHECK_FALSE(should_trigger(1.3, 1.0, true, params));
    }
    SUBCASE("psi = 1 reduces to strict-increase detection") {
        params.psi2 = 1.0;
        CHECK(should_trigger(1.0 + 1e-12, 1.0, false, params));
        CHECK_FALSE(should_trigger(1.0, 1.0, false, params));
    }
    SUBCASE("negative weights are an internal invariant violation") {
        CHECK_THROWS_AS(should_trigger(-1.0, 1.0, false, params), std::logic_error);
    }
}

TEST_CASE("no-delay impulse") {
    SUBCASE("zero state is a fixed point") {
        StackedSystem sys = scalar_stack({-0.5}, Eigen::MatrixXd::Identity(1, 1), 1.0, 0.0);
        CHECK(impulse_no_delay(Eigen::VectorXd::Zero(1), 0.0, sys).isZero(0.0));
    }
    SUBCASE("zero information matrix makes the jump an identity") {
        StackedSystem sys = scalar_stack({-0.5}, Eigen::MatrixXd::Zero(1, 1), 1.0, 0.0);
        Eigen::VectorXd y = Eigen::VectorXd::Constant(1, 3.25);
        CHECK(impulse_no_delay(y, 1.0, sys) == y);
    }
    SUBCASE("scalar contraction 1 + k") {
        // e^(-alpha*tau) = 1 at tau = 0
        StackedSystem sys = scalar_stack({-0.5}, Eigen::MatrixXd::Identity(1, 1), 1.0, 0.0);
        Eigen::VectorXd y = Eigen::VectorXd::Constant(1, 2.0);
        CHECK(impulse_no_delay(y, 0.0, sys)(0) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("jump is linear in the state") {
        Eigen::MatrixXd h(2, 2);
        h << 1, 0, 1, 1;
        StackedSystem sys = scalar_stack({-0.3, -0.4}, h, 2.0, 0.1);
        Eigen::VectorXd y(2);
        y << 1.5, -2.0;
        Eigen::VectorXd scaled = impulse_no_delay(3.0 * y, 0.5, sys);
        Eigen::VectorXd base = impulse_no_delay(y, 0.5, sys);
        CHECK((scaled - 3.0 * base).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("nonnegative gains are a configuration error") {
        StackedSystem sys = scalar_stack({0.0}, Eigen::MatrixXd::Identity(1, 1), 1.0, 0.0);
        CHECK_THROWS_AS(impulse_no_delay(Eigen::VectorXd::Ones(1), 0.0, sys), ConfigError);
    }
}

TEST_CASE("delayed impulse") {
    SUBCASE("replacement semantics: output depends only on the delayed state") {
        StackedSystem sys = scalar_stack({0.55}, Eigen::MatrixXd::Identity(1, 1),
                                         std::log(10.0), 1.0);
        // e^(-alpha*tau) = 0.1
        Eigen::VectorXd y_delayed = Eigen::VectorXd::Constant(1, 2.0);
        CHECK(impulse_with_delay(y_delayed, 0.0, sys)(0) ==
              doctest::Approx(0.11 * 2.0).epsilon(1e-12));
    }
    SUBCASE("zero delayed state resets no matter what the current state is") {
        StackedSystem sys = scalar_stack({0.55}, Eigen::MatrixXd::Identity(1, 1), 1.0, 0.0);
        CHECK(impulse_with_delay(Eigen::VectorXd::Zero(1), 3.0, sys).isZero(0.0));
    }
    SUBCASE("zero gains give a full reset") {
        StackedSystem sys = scalar_stack({0.0}, Eigen::MatrixXd::Identity(1, 1), 1.0, 0.0);
        CHECK(impulse_with_delay(Eigen::VectorXd::Constant(1, 9.0), 0.0, sys).isZero(0.0));
    }
}

TEST_CASE("jump maps commute with the stacking shuffle") {
    Eigen::MatrixXd h(2, 2);
    h << 1, 0, 1, -1;
    LeaderSpec leader;
    leader.n0 = 2;
    leader.C0 = Eigen::MatrixXd::Zero(2, 2);
    leader.D0 = Eigen::MatrixXd::Zero(2, 2);
    leader.x0 = Eigen::VectorXd::Zero(2);
    std::vector<AgentSpec> agents;
    for (double k : {-0.3, -0.7}) {
        AgentSpec a;
        a.n = 2;
        a.C = Eigen::MatrixXd::Zero(2, 2);
        a.D = Eigen::MatrixXd::Zero(2, 2);
        a.Xi = Eigen::MatrixXd::Identity(2, 2);
        a.Phi = Eigen::MatrixXd::Identity(2, 2);
        a.Theta = Eigen::MatrixXd::Identity(2, 2);
        a.gain = k;
        a.offset = Eigen::VectorXd::Zero(2);
        a.x0 = Eigen::VectorXd::Zero(2);
        a.energy = EnergyProfile{0.2, 0.01};
        agents.push_back(a);
    }
    TopologySpec topo;
    topo.n_agents = 2;
    topo.alpha = 1.5;
    topo.h_override = h;
    StackedSystem sys = build_stacked(leader, agents, topo, 2);

    const int m = 2, n = 2;
    Eigen::MatrixXd perm = stacking_permutation(m, n);
    Eigen::VectorXd y(4);
    y << 1, -2, 3, 0.5;
    const double t = 0.7;

    // component-major route: permute, apply the permuted jump matrix, permute back
    Eigen::VectorXd e = sys.exp_neg_alpha_gamma(t);
    Eigen::MatrixXd jump_am =
        Eigen::MatrixXd(e.asDiagonal()) * sys.KH_PhiTheta + Eigen::MatrixXd::Identity(4, 4);
    Eigen::MatrixXd jump_cm = perm * jump_am * perm.transpose();
    Eigen::VectorXd direct = impulse_no_delay(y, t, sys);
    Eigen::VectorXd roundabout = perm.transpose() * (jump_cm * (perm * y));
    CHECK((direct - roundabout).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("event log invariants") {
    EventLog log;
    // steps_per_delta = 3
    log.events.push_back(Event{0, 3, 0.03, 0.03, 1.5});
    log.events.push_back(Event{1, 9, 0.09, 0.06, 1.2});
    CHECK_NOTHROW(log.validate(0.01, 3));
    CHECK(log.min_gap() == doctest::Approx(0.03));
    CHECK(log.max_gap() == doctest::Approx(0.06));

    SUBCASE("gap below Delta is rejected") {
        log.events.push_back(Event{2, 10, 0.10, 0.01, 1.0});
        CHECK_THROWS_AS(log.validate(0.01, 3), std::logic_error);
    }
    SUBCASE("non-increasing instants are rejected") {
        log.events.push_back(Event{2, 9, 0.09, 0.0, 1.0});
        CHECK_THROWS_AS(log.validate(0.01, 3), std::logic_error);
    }
}

TEST_CASE("trigger parameter validation") {
    TriggerParams params = make_params(2);
    CHECK_NOTHROW(params.validate(2));
    SUBCASE("psi2 below one") {
        params.psi2 = 0.5;
        CHECK_THROWS_WITH_AS(params.validate(2), doctest::Contains("psi2"), ConfigError);
    }
    SUBCASE("asymmetric P") {
        params.P(0, 1) = 1e-6;
        CHECK_THROWS_AS(params.validate(2), ConfigError);
    }
    SUBCASE("indefinite P") {
        params.P = -Eigen::MatrixXd::Identity(2, 2);
        CHECK_THROWS_AS(params.validate(2), ConfigError);
    }
}
