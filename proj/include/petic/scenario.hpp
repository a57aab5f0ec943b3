#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "petic/model.hpp"
#include "petic/topology.hpp"
#include "petic/trigger.hpp"

namespace petic {

enum class ControlMode { NoDelay, Delayed, Uncontrolled };

std::string to_string(ControlMode mode);

// Integrator/ensemble parameters. Delta must be an integer multiple of the
// step so trigger checks land exactly on the grid; in delayed mode the
// actuation delay must be an integer multiple of the step as well.
struct SimParams {
    double step = 0.0;
    double horizon = 0.0;
    int n_runs = 1;
    uint64_t master_seed = 0;
    int record_stride = 1;
};

// Fully validated experiment description.
struct Scenario {
    LeaderSpec leader;
    std::vector<AgentSpec> agents;
    TopologySpec topology;
    int m = 0;
    TriggerParams trigger;
    ControlMode mode = ControlMode::NoDelay;
    double actuation_delay = 0.0;
    SimParams sim;

    int dim() const { return m * static_cast<int>(agents.size()); }

    // y(0): stacked Phi_i * (x_i(0) - Xi_i*x0(0) - offset_i).
    Eigen::VectorXd initial_virtual_state() const;

    StackedSystem build() const;

    // Structural validation; throws ConfigError naming the offending field
    // and the violated assumption. Matching (Assumption 2) is NOT enforced
    // here -- it is reported by the verification pass and only fatal under
    // --strict.
    void validate() const;
};

Scenario parse_scenario(const std::string& text, const std::string& origin);
Scenario load_scenario(const std::string& path);

// Canonical config-text form; parse_scenario(serialize_scenario(s)) equals s
// field for field.
std::string serialize_scenario(const Scenario& s);

bool scenario_equal(const Scenario& a, const Scenario& b);

} // namespace petic
