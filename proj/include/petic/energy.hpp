#pragma once

#include <stdexcept>

namespace petic {

// Per-agent energy consumption tau_i(t) = tau0 + beta*t.
// Deterministic in t only, nonnegative and nondecreasing; it never reads
// system state. Only the affine family is built in -- tests inject
// constants through beta = 0.
struct EnergyProfile {
    double tau0 = 0.0; // base consumption, >= 0
    double beta = 0.0; // minimum power slope per second, >= 0

    double value(double t) const { return tau0 + beta * t; }

    void validate() const {
        if (tau0 < 0.0) throw std::invalid_argument("energy tau0 must be >= 0");
        if (beta < 0.0) throw std::invalid_argument("energy beta must be >= 0");
    }
};

} // namespace petic
