#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace petic {

// One additive term: out[output] += coef * sin(freq * z[input]).
struct SineTerm {
    int output = 0;
    double coef = 0.0;
    double freq = 0.0;
    int input = 0;
};

// Catalogue of agent nonlinearities. Only `zero` and `sine_bank` exist;
// both satisfy f(0) = 0 by construction. Anything else is rejected at
// config time. The Lipschitz constant is either the supplied value
// (given data, not required to dominate the derived one) or the derived
// max over outputs of sum |coef*freq|.
struct NonlinearitySpec {
    enum class Kind { Zero, SineBank };

    Kind kind = Kind::Zero;
    std::vector<SineTerm> terms;
    std::optional<double> lipschitz_override;

    bool is_zero() const { return kind == Kind::Zero || terms.empty(); }

    // Adds f(z) into out (out must be pre-sized to dim and zero-filled by
    // the caller when a fresh evaluation is wanted).
    void accumulate(const Eigen::VectorXd& z, Eigen::VectorXd& out) const;
    Eigen::VectorXd eval(const Eigen::VectorXd& z) const;

    double lipschitz() const;
    void validate(int dim) const; // index ranges, override > 0
};

} // namespace petic
