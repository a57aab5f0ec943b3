#include <doctest.h>

#include <cmath>

#include "petic/errors.hpp"
#include "petic/simulator.hpp"
#include "test_helpers.hpp"

using namespace petic;
using petic_test::scalar_scenario;

TEST_CASE("counter RNG is a pure function of (seed, step)") {
    CHECK(standard_normal(42, 7) == standard_normal(42, 7));
    CHECK(standard_normal(42, 7) != standard_normal(42, 8));
    CHECK(standard_normal(42, 7) != standard_normal(43, 7));

    // moment sanity
    double sum = 0.0, sum_sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = standard_normal(123, static_cast<uint64_t>(i));
        sum += x;
        sum_sq += x * x;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sum_sq / n - 1.0) < 0.02);
}

TEST_CASE("derived run seeds differ per run and repeat per master seed") {
    CHECK(derive_run_seed(1, 0) == derive_run_seed(1, 0));
    CHECK(derive_run_seed(1, 0) != derive_run_seed(1, 1));
    CHECK(derive_run_seed(1, 0) != derive_run_seed(2, 0));
}

TEST_CASE("single Euler-Maruyama steps") {
    Scenario s = scalar_scenario(-1.0, 0.0, -0.5, 1.0, 1.0, ControlMode::Uncontrolled);
    StackedSystem sys = s.build();
    SUBCASE("origin is stationary") {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(1);
        CHECK(em_step(y, 0.0, 0.1, 0.37, sys).isZero(0.0));
    }
    SUBCASE("one explicit step of dy = -y dt") {
        Eigen::VectorXd y = Eigen::VectorXd::Ones(1);
        CHECK(em_step(y, 0.0, 0.1, 0.0, sys)(0) == doctest::Approx(0.9).epsilon(1e-15));
    }
}

TEST_CASE("deterministic linear flow converges to the matrix-exponential solution at O(h)") {
    // stable 4x4 built from a fixed eigenbasis so the dense-output solution
    // V e^{mu t} V^-1 y0 is exact by construction
    Eigen::MatrixXd v(4, 4);
    v << 1, 1, 0, 2, 0, 1, 1, -1, 1, 0, 1, 1, -1, 1, 0, 1;
    Eigen::VectorXd mu(4);
    mu << -0.5, -1.0, -1.5, -2.0;
    Eigen::MatrixXd vinv = v.inverse();
    Eigen::MatrixXd a = v * mu.asDiagonal() * vinv;

    Scenario s = scalar_scenario(0, 0, -0.5, 1.0, 0.0, ControlMode::Uncontrolled);
    s.m = 4;
    s.leader.n0 = 4;
    s.leader.C0 = Eigen::MatrixXd::Zero(4, 4);
    s.leader.D0 = Eigen::MatrixXd::Zero(4, 4);
    s.leader.x0 = Eigen::VectorXd::Zero(4);
    AgentSpec& agent = s.agents[0];
    agent.n = 4;
    agent.C = a;
    agent.D = Eigen::MatrixXd::Zero(4, 4);
    agent.Xi = Eigen::MatrixXd::Zero(4, 4);
    agent.Phi = Eigen::MatrixXd::Identity(4, 4);
    agent.Theta = Eigen::MatrixXd::Identity(4, 4);
    agent.offset = Eigen::VectorXd::Zero(4);
    agent.x0.resize(4);
    agent.x0 << 1.0, -2.0, 0.5, 3.0;
    s.trigger.P = Eigen::MatrixXd::Identity(4, 4);
    s.trigger.delta = 0.1;
    s.sim.horizon = 1.0;

    auto max_error = [&](double h) {
        s.sim.step = h;
        s.validate();
        Trajectory traj = run_trajectory(s, 1);
        double worst = 0.0;
        for (size_t k = 0; k < traj.t.size(); ++k) {
            Eigen::VectorXd exact =
                v * (mu.array() * traj.t[k]).exp().matrix().asDiagonal() * vinv * agent.x0;
            worst = std::max(worst, (traj.y[k] - exact).cwiseAbs().maxCoeff());
        }
        return worst;
    };

    const double e1 = max_error(0.05);
    const double e2 = max_error(0.025);
    const double e3 = max_error(0.0125);
    CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.5));
    CHECK(e2 / e3 == doctest::Approx(2.0).epsilon(0.5));
    CHECK(e1 < 0.05); // error <= C*h with a modest constant
}

TEST_CASE("zero initial state never triggers and stays at the origin") {
    Scenario s = scalar_scenario(2.0, 1.5, -0.5, 1.0, 0.0, ControlMode::NoDelay);
    Trajectory traj = run_trajectory(s, 3);
    CHECK(traj.events.empty());
    CHECK_FALSE(traj.blew_up);
    for (const auto& y : traj.y) CHECK(y.isZero(0.0));
}

TEST_CASE("trajectories are bit-for-bit deterministic in (scenario, seed)") {
    Scenario s = scalar_scenario(0.5, 0.8, -0.5, 1.0, 1.0, ControlMode::NoDelay);
    Trajectory a = run_trajectory(s, 11);
    Trajectory b = run_trajectory(s, 11);
    REQUIRE(a.t.size() == b.t.size());
    for (size_t k = 0; k < a.t.size(); ++k) CHECK(a.y[k] == b.y[k]);
    CHECK(a.events.count() == b.events.count());

    Trajectory c = run_trajectory(s, 12);
    bool any_diff = false;
    for (size_t k = 0; k < a.t.size() && !any_diff; ++k) any_diff = a.y[k] != c.y[k];
    CHECK(any_diff);
}

TEST_CASE("zero information matrix makes the controlled path coincide with the uncontrolled one") {
    Scenario controlled = scalar_scenario(0.5, 0.8, -0.5, 0.0, 1.0, ControlMode::NoDelay);
    Scenario open_loop = scalar_scenario(0.5, 0.8, -0.5, 0.0, 1.0, ControlMode::Uncontrolled);
    Trajectory a = run_trajectory(controlled, 21);
    Trajectory b = run_trajectory(open_loop, 21);
    REQUIRE(a.t.size() == b.t.size());
    for (size_t k = 0; k < a.t.size(); ++k) CHECK(a.y[k] == b.y[k]);
}

TEST_CASE("right-continuous samples at event instants") {
    // strongly contracting jump on a growing deterministic flow: the stored
    // sample at t_s must be the post-impulse value
    Scenario s = scalar_scenario(1.0, 0.0, -0.9, 1.0, 1.0, ControlMode::NoDelay);
    s.trigger.psi1 = 1.0;
    s.trigger.psi2 = 1.0;
    Trajectory traj = run_trajectory(s, 5);
    REQUIRE_FALSE(traj.events.empty());
    const Event& ev = traj.events.events.front();
    // locate the sample at the event instant
    size_t idx = 0;
    for (; idx < traj.t.size(); ++idx)
        if (traj.t[idx] == ev.t) break;
    REQUIRE(idx < traj.t.size());
    // pre-impulse flow value would be ~ (1 + h)^steps; post-impulse is 0.1 of it
    const double pre = traj.y[idx - 1](0) * (1.0 + s.sim.step * 1.0);
    CHECK(traj.y[idx](0) == doctest::Approx(0.1 * pre).epsilon(1e-9));
}

TEST_CASE("delay buffer consumes the state exactly tau_s/h grid points back") {
    const double h = 0.01, a = 1.0, gain = 0.55;
    const int lag = 3;
    Scenario s = scalar_scenario(a, 0.0, gain, 1.0, 1.0, ControlMode::Delayed);
    s.sim.step = h;
    s.sim.horizon = 0.5;
    s.trigger.delta = 0.05;
    s.trigger.psi1 = 1.0;
    s.trigger.psi2 = 1.0;
    s.actuation_delay = lag * h;
    s.validate();
    Trajectory traj = run_trajectory(s, 9);
    REQUIRE_FALSE(traj.events.empty());
    const Event& ev = traj.events.events.front();

    // replicate the exact deterministic recurrence
    std::vector<double> flow{1.0};
    for (int k = 1; k <= ev.step; ++k)
        flow.push_back(flow.back() + (a * flow.back()) * h + 0.0);
    const double expected_post = gain * 1.0 * flow[static_cast<size_t>(ev.step - lag)];

    size_t idx = 0;
    for (; idx < traj.t.size(); ++idx)
        if (traj.t[idx] == ev.t) break;
    REQUIRE(idx < traj.t.size());
    CHECK(traj.y[idx](0) == doctest::Approx(expected_post).epsilon(1e-15));
}

TEST_CASE("ensemble of one reduces to the single trajectory") {
    Scenario s = scalar_scenario(0.5, 0.4, -0.5, 1.0, 1.0, ControlMode::NoDelay);
    s.sim.n_runs = 1;
    EnsembleStats stats = run_ensemble(s, s.sim);
    Trajectory traj = run_trajectory(s, derive_run_seed(s.sim.master_seed, 0));
    REQUIRE(stats.mean_sq.size() == traj.norm_sq.size());
    for (size_t k = 0; k < stats.mean_sq.size(); ++k)
        CHECK(stats.mean_sq[k] == traj.norm_sq[k]);
    CHECK(stats.trigger_counts.size() == 1);
    CHECK(stats.trigger_counts[0] == traj.events.count());
}

TEST_CASE("ensembles are reproducible and order-independent") {
    Scenario s = scalar_scenario(0.5, 0.4, -0.5, 1.0, 1.0, ControlMode::NoDelay);
    s.sim.n_runs = 16;
    EnsembleStats a = run_ensemble(s, s.sim);
    EnsembleStats b = run_ensemble(s, s.sim);
    REQUIRE(a.mean_sq.size() == b.mean_sq.size());
    for (size_t k = 0; k < a.mean_sq.size(); ++k) CHECK(a.mean_sq[k] == b.mean_sq[k]);
    CHECK(a.trigger_counts == b.trigger_counts);
}

TEST_CASE("divergence is detected, reported and excluded") {
    Scenario s = scalar_scenario(40.0, 0.0, -0.5, 0.0, 1.0, ControlMode::Uncontrolled);
    s.sim.step = 0.01;
    s.sim.horizon = 10.0;
    s.trigger.delta = 0.1;
    s.validate();
    Trajectory traj = run_trajectory(s, 2);
    CHECK(traj.blew_up);
    CHECK(traj.blowup_time > 0.0);
    CHECK_FALSE(traj.diagnostics.empty());

    s.sim.n_runs = 4;
    CHECK_THROWS_AS(run_ensemble(s, s.sim), BlowupError); // 100% exclusions
}

TEST_CASE("fixed-period baseline actuates at every grid instant") {
    Scenario s = scalar_scenario(-1.0, 0.0, -0.5, 1.0, 1.0, ControlMode::NoDelay);
    s.sim.step = 0.01;
    s.sim.horizon = 1.0;
    s.trigger.delta = 0.1;
    s.validate();
    Trajectory traj = run_fixed_period(s, 1);
    CHECK(traj.events.count() == 10);
    traj.events.validate(s.trigger.delta, 10);
}

TEST_CASE("event instants live on the Delta grid with gaps of at least Delta") {
    Scenario s = scalar_scenario(1.5, 0.9, -0.8, 1.0, 1.0, ControlMode::NoDelay);
    s.sim.step = 0.005;
    s.sim.horizon = 2.0;
    s.trigger.delta = 0.02;
    s.validate();
    for (uint64_t seed = 0; seed < 8; ++seed) {
        Trajectory traj = run_trajectory(s, seed);
        CHECK_NOTHROW(traj.events.validate(s.trigger.delta, 4));
        if (!traj.events.empty()) CHECK(traj.events.events.front().t >= s.trigger.delta);
    }
}
