#include "petic/nonlinearity.hpp"

#include <cmath>
#include <map>

#include "petic/errors.hpp"

namespace petic {

void NonlinearitySpec::accumulate(const Eigen::VectorXd& z, Eigen::VectorXd& out) const {
    if (is_zero()) return;
    for (const auto& term : terms)
        out(term.output) += term.coef * std::sin(term.freq * z(term.input));
}

Eigen::VectorXd NonlinearitySpec::eval(const Eigen::VectorXd& z) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(z.size());
    accumulate(z, out);
    return out;
}

double NonlinearitySpec::lipschitz() const {
    if (lipschitz_override) return *lipschitz_override;
    if (is_zero()) return 0.0;
    // max over outputs of the summed |coef*freq| contributions
    std::map<int, double> per_output;
    for (const auto& term : terms)
        per_output[term.output] += std::abs(term.coef * term.freq);
    double lf = 0.0;
    for (const auto& [out, sum] : per_output) lf = std::max(lf, sum);
    return lf;
}

void NonlinearitySpec::validate(int dim) const {
    if (lipschitz_override && !(*lipschitz_override > 0.0))
        throw ConfigError("nonlinearity lipschitz", "override must be > 0");
    if (kind == Kind::Zero && !terms.empty())
        throw ConfigError("nonlinearity", "zero kind cannot carry sine terms");
    for (const auto& term : terms) {
        if (term.output < 0 || term.output >= dim)
            throw ConfigError("nonlinearity", "output index out of range");
        if (term.input < 0 || term.input >= dim)
            throw ConfigError("nonlinearity", "input index out of range");
    }
}

} // namespace petic
