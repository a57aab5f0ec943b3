#include "petic/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "petic/config.hpp"
#include "petic/errors.hpp"

namespace petic {

std::string to_string(ControlMode mode) {
    switch (mode) {
        case ControlMode::NoDelay: return "no_delay";
        case ControlMode::Delayed: return "delayed";
        case ControlMode::Uncontrolled: return "uncontrolled";
    }
    return "?";
}

Eigen::VectorXd Scenario::initial_virtual_state() const {
    Eigen::VectorXd y0(dim());
    for (size_t i = 0; i < agents.size(); ++i) {
        const AgentSpec& a = agents[i];
        y0.segment(static_cast<Eigen::Index>(i) * m, m) =
            lift(a, error_state(a.x0, leader.x0, a));
    }
    return y0;
}

StackedSystem Scenario::build() const {
    return build_stacked(leader, agents, topology, m);
}

namespace {

bool divides_exactly(double big, double small) {
    const double ratio = big / small;
    return std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, std::abs(ratio));
}

NonlinearitySpec parse_nonlinearity(const config::Section& sec, const std::string& key, int dim) {
    NonlinearitySpec f;
    if (!sec.has(key)) return f; // zero
    const config::Value& raw = sec.get_raw(key);
    if (raw.is_string()) {
        const std::string kind = std::get<std::string>(raw.data);
        if (kind != "zero")
            throw ConfigError(sec.path() + " " + key,
                              "unsupported nonlinearity '" + kind + "' (catalogue: zero, sine_bank)",
                              raw.line);
        return f;
    }
    if (!raw.is_array())
        throw ConfigError(sec.path() + " " + key, "expected \"zero\" or sine-bank entries",
                          raw.line);
    f.kind = NonlinearitySpec::Kind::SineBank;
    for (const config::Value& item : std::get<config::Array>(raw.data)) {
        if (!item.is_array())
            throw ConfigError(sec.path() + " " + key,
                              "each entry must be [output, coef, freq, input]", item.line);
        const config::Array& quad = std::get<config::Array>(item.data);
        if (quad.size() != 4)
            throw ConfigError(sec.path() + " " + key,
                              "each entry must be [output, coef, freq, input]", item.line);
        auto num = [&](size_t i) {
            if (quad[i].is_int()) return static_cast<double>(std::get<int64_t>(quad[i].data));
            if (std::holds_alternative<double>(quad[i].data)) return std::get<double>(quad[i].data);
            throw ConfigError(sec.path() + " " + key, "entry fields must be numbers", item.line);
        };
        f.terms.push_back(SineTerm{static_cast<int>(num(0)), num(1), num(2),
                                   static_cast<int>(num(3))});
    }
    f.validate(dim);
    return f;
}

} // namespace

void Scenario::validate() const {
    const int n_agents = static_cast<int>(agents.size());
    if (n_agents == 0) throw ConfigError("[agent.*]", "at least one agent required");
    if (m <= 0) throw ConfigError("[virtual] m", "virtual dimension must be positive");

    leader.validate();
    topology.validate();
    if (topology.n_agents != n_agents)
        throw ConfigError("[topology]", "size does not match the number of agents");

    for (int i = 0; i < n_agents; ++i) {
        const AgentSpec& a = agents[i];
        const std::string who = "[agent." + std::to_string(i + 1) + "]";
        if (a.n <= 0) throw ConfigError(who + " n", "dimension must be positive");
        if (a.n > m) throw ConfigError(who + " n", "n_i must satisfy m >= n_i (Assumption 4)");
        if (a.C.rows() != a.n || a.C.cols() != a.n)
            throw ConfigError(who + " C", "C must be n x n");
        if (a.D.rows() != a.n || a.D.cols() != a.n)
            throw ConfigError(who + " D", "D must be n x n");
        if (a.Xi.rows() != a.n || a.Xi.cols() != leader.n0)
            throw ConfigError(who + " Xi", "Xi must be n x n0 (Assumption 2)");
        if (a.x0.size() != a.n)
            throw ConfigError(who + " x0", "initial state must have n entries");
        if (a.offset.size() != a.n)
            throw ConfigError(who + " offset", "offset must have n entries");
        a.f.validate(a.n);
        try {
            a.energy.validate();
        } catch (const std::exception& e) {
            throw ConfigError(who + ".energy", e.what());
        }
        EmbeddingResult emb = check_embedding(a, m);
        if (!emb.passed)
            throw ConfigError(who + " Phi",
                              "rank(Phi) = " + std::to_string(emb.rank) + " of " +
                                  std::to_string(a.n) + ", |Theta*Phi - I| = " +
                                  std::to_string(emb.residual) + " (Assumption 4)");
        if (mode == ControlMode::NoDelay && !(a.gain < 0.0))
            throw ConfigError(who + " gain", "no-delay impulsive gains must be negative");
    }

    trigger.validate(dim());

    if (!(sim.step > 0.0)) throw ConfigError("[sim] step", "step must be > 0");
    if (!(sim.horizon > 0.0)) throw ConfigError("[sim] horizon", "horizon must be > 0");
    if (sim.n_runs < 1) throw ConfigError("[sim] runs", "runs must be >= 1");
    if (sim.record_stride < 1) throw ConfigError("[sim] record_stride", "stride must be >= 1");
    if (!divides_exactly(trigger.delta, sim.step))
        throw ConfigError("[trigger] delta",
                          "delta must be an integer multiple of the integrator step");

    if (mode == ControlMode::Delayed) {
        if (actuation_delay < 0.0)
            throw ConfigError("[control] actuation_delay", "delay must be >= 0");
        if (!(actuation_delay < trigger.delta))
            throw ConfigError("[control] actuation_delay",
                              "delay must satisfy tau_s < Delta (Assumption 8)");
        if (actuation_delay > 0.0 && !divides_exactly(actuation_delay, sim.step))
            throw ConfigError("[control] actuation_delay",
                              "delay must be an integer multiple of the integrator step");
    } else if (actuation_delay != 0.0) {
        throw ConfigError("[control] actuation_delay", "only valid in delayed mode");
    }
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
    config::Table root = config::parse(text, origin);
    config::Section top(&root, "");
    Scenario s;

    // [virtual]
    {
        auto sec = top.subsection("virtual");
        if (!sec) throw ConfigError("[virtual]", "missing section");
        s.m = static_cast<int>(sec->get_int("m"));
        sec->finish();
    }

    // [leader]
    {
        auto sec = top.subsection("leader");
        if (!sec) throw ConfigError("[leader]", "missing section");
        s.leader.n0 = static_cast<int>(sec->get_int("n"));
        s.leader.C0 = sec->get_matrix("C");
        s.leader.D0 = sec->get_matrix("D");
        s.leader.x0 = sec->get_vector("x0");
        s.leader.f = parse_nonlinearity(*sec, "nonlinearity", s.leader.n0);
        sec->finish();
    }

    // [agent.i] in order 1..N
    {
        auto agent_root = top.subsection("agent");
        if (!agent_root) throw ConfigError("[agent.*]", "missing agent sections");
        for (int i = 1;; ++i) {
            auto sec = agent_root->subsection(std::to_string(i));
            if (!sec) break;
            AgentSpec a;
            a.n = static_cast<int>(sec->get_int("n"));
            a.C = sec->get_matrix("C");
            a.D = sec->get_matrix("D");
            a.Xi = sec->get_matrix("Xi");
            a.Phi = sec->has("Phi") ? sec->get_matrix("Phi")
                                    : Eigen::MatrixXd::Identity(s.m, a.n);
            a.Theta = sec->has("Theta") ? sec->get_matrix("Theta")
                                        : Eigen::MatrixXd::Identity(a.n, s.m);
            a.gain = sec->get_double("gain");
            a.offset = sec->has("offset") ? sec->get_vector("offset")
                                          : Eigen::VectorXd::Zero(a.n);
            a.x0 = sec->get_vector("x0");
            a.f = parse_nonlinearity(*sec, "nonlinearity", a.n);
            if (sec->has("lipschitz")) a.f.lipschitz_override = sec->get_double("lipschitz");
            auto energy = sec->subsection("energy");
            if (energy) {
                a.energy.tau0 = energy->get_double("tau0");
                a.energy.beta = energy->get_double_or("beta", 0.0);
                energy->finish();
            }
            sec->finish();
            s.agents.push_back(std::move(a));
        }
        agent_root->finish();
        if (s.agents.empty()) throw ConfigError("[agent.1]", "no agents defined");
    }

    // [topology]
    {
        auto sec = top.subsection("topology");
        if (!sec) throw ConfigError("[topology]", "missing section");
        s.topology.n_agents = static_cast<int>(s.agents.size());
        s.topology.alpha = sec->get_double("alpha");
        if (sec->has("h")) {
            s.topology.h_override = sec->get_matrix("h");
        } else {
            s.topology.abar = sec->get_matrix("abar");
            s.topology.bbar = sec->get_vector("bbar");
        }
        sec->finish();
    }

    // [trigger]
    {
        auto sec = top.subsection("trigger");
        if (!sec) throw ConfigError("[trigger]", "missing section");
        s.trigger.delta = sec->get_double("delta");
        s.trigger.psi1 = sec->get_double("psi1");
        s.trigger.psi2 = sec->get_double("psi2");
        s.trigger.gamma = sec->get_double("gamma");
        const config::Value& p = sec->get_raw("p");
        if (p.is_table()) {
            config::Section psec(std::get<std::shared_ptr<config::Table>>(p.data).get(),
                                 "[trigger] p");
            const double c = psec.get_double("scalar");
            psec.finish();
            s.trigger.P = c * Eigen::MatrixXd::Identity(s.dim(), s.dim());
        } else if (p.is_array()) {
            s.trigger.P = sec->get_matrix("p");
        } else {
            throw ConfigError("[trigger] p", "expected {scalar = c} or a full matrix", p.line);
        }
        sec->finish();
    }

    // [control]
    {
        auto sec = top.subsection("control");
        if (!sec) throw ConfigError("[control]", "missing section");
        const std::string mode = sec->get_string("mode");
        if (mode == "no_delay") s.mode = ControlMode::NoDelay;
        else if (mode == "delayed") s.mode = ControlMode::Delayed;
        else if (mode == "uncontrolled") s.mode = ControlMode::Uncontrolled;
        else
            throw ConfigError("[control] mode",
                              "expected \"no_delay\", \"delayed\" or \"uncontrolled\"");
        s.actuation_delay = sec->get_double_or("actuation_delay", 0.0);
        sec->finish();
    }

    // [sim]
    {
        auto sec = top.subsection("sim");
        if (!sec) throw ConfigError("[sim]", "missing section");
        s.sim.step = sec->get_double("step");
        s.sim.horizon = sec->get_double("horizon");
        s.sim.n_runs = static_cast<int>(sec->get_int_or("runs", 1));
        s.sim.master_seed = static_cast<uint64_t>(sec->get_int_or("seed", 0));
        s.sim.record_stride = static_cast<int>(sec->get_int_or("record_stride", 1));
        sec->finish();
    }

    top.finish();
    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open scenario file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_vector(const Eigen::VectorXd& v) {
    std::string out = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt(v(i));
    }
    return out + "]";
}

std::string fmt_matrix(const Eigen::MatrixXd& m) {
    std::string out = "[";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        if (r) out += ", ";
        out += fmt_vector(m.row(r));
    }
    return out + "]";
}

std::string fmt_nonlinearity(const NonlinearitySpec& f) {
    if (f.is_zero()) return "\"zero\"";
    std::string out = "[";
    for (size_t i = 0; i < f.terms.size(); ++i) {
        if (i) out += ", ";
        const SineTerm& t = f.terms[i];
        out += "[" + std::to_string(t.output) + ", " + fmt(t.coef) + ", " + fmt(t.freq) + ", " +
               std::to_string(t.input) + "]";
    }
    return out + "]";
}

} // namespace

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream out;
    out << "[virtual]\nm = " << s.m << "\n\n";

    out << "[leader]\n";
    out << "n = " << s.leader.n0 << "\n";
    out << "C = " << fmt_matrix(s.leader.C0) << "\n";
    out << "D = " << fmt_matrix(s.leader.D0) << "\n";
    out << "x0 = " << fmt_vector(s.leader.x0) << "\n";
    if (!s.leader.f.is_zero())
        out << "nonlinearity = " << fmt_nonlinearity(s.leader.f) << "\n";
    out << "\n";

    for (size_t i = 0; i < s.agents.size(); ++i) {
        const AgentSpec& a = s.agents[i];
        out << "[agent." << (i + 1) << "]\n";
        out << "n = " << a.n << "\n";
        out << "C = " << fmt_matrix(a.C) << "\n";
        out << "D = " << fmt_matrix(a.D) << "\n";
        out << "Xi = " << fmt_matrix(a.Xi) << "\n";
        out << "Phi = " << fmt_matrix(a.Phi) << "\n";
        out << "Theta = " << fmt_matrix(a.Theta) << "\n";
        out << "gain = " << fmt(a.gain) << "\n";
        out << "offset = " << fmt_vector(a.offset) << "\n";
        out << "x0 = " << fmt_vector(a.x0) << "\n";
        out << "nonlinearity = " << fmt_nonlinearity(a.f) << "\n";
        if (a.f.lipschitz_override) out << "lipschitz = " << fmt(*a.f.lipschitz_override) << "\n";
        out << "[agent." << (i + 1) << ".energy]\n";
        out << "tau0 = " << fmt(a.energy.tau0) << "\n";
        out << "beta = " << fmt(a.energy.beta) << "\n\n";
    }

    out << "[topology]\n";
    out << "alpha = " << fmt(s.topology.alpha) << "\n";
    if (s.topology.h_override) {
        out << "h = " << fmt_matrix(*s.topology.h_override) << "\n";
    } else {
        out << "abar = " << fmt_matrix(s.topology.abar) << "\n";
        out << "bbar = " << fmt_vector(s.topology.bbar) << "\n";
    }
    out << "\n[trigger]\n";
    out << "delta = " << fmt(s.trigger.delta) << "\n";
    out << "psi1 = " << fmt(s.trigger.psi1) << "\n";
    out << "psi2 = " << fmt(s.trigger.psi2) << "\n";
    out << "gamma = " << fmt(s.trigger.gamma) << "\n";
    // emit the scalar shorthand when P is exactly c*I
    const int dim = s.dim();
    const double c = s.trigger.P(0, 0);
    if ((s.trigger.P - c * Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff() == 0.0)
        out << "p = {scalar = " << fmt(c) << "}\n";
    else
        out << "p = " << fmt_matrix(s.trigger.P) << "\n";

    out << "\n[control]\n";
    out << "mode = \"" << to_string(s.mode) << "\"\n";
    if (s.mode == ControlMode::Delayed)
        out << "actuation_delay = " << fmt(s.actuation_delay) << "\n";

    out << "\n[sim]\n";
    out << "step = " << fmt(s.sim.step) << "\n";
    out << "horizon = " << fmt(s.sim.horizon) << "\n";
    out << "runs = " << s.sim.n_runs << "\n";
    out << "seed = " << s.sim.master_seed << "\n";
    out << "record_stride = " << s.sim.record_stride << "\n";
    return out.str();
}

namespace {
bool mat_eq(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}
bool vec_eq(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.size() == b.size() && a == b;
}
bool f_eq(const NonlinearitySpec& a, const NonlinearitySpec& b) {
    if (a.is_zero() != b.is_zero()) return false;
    if (a.terms.size() != b.terms.size()) return false;
    for (size_t i = 0; i < a.terms.size(); ++i) {
        const auto& x = a.terms[i];
        const auto& y = b.terms[i];
        if (x.output != y.output || x.input != y.input || x.coef != y.coef || x.freq != y.freq)
            return false;
    }
    return a.lipschitz_override == b.lipschitz_override;
}
} // namespace

bool scenario_equal(const Scenario& a, const Scenario& b) {
    if (a.m != b.m || a.mode != b.mode || a.actuation_delay != b.actuation_delay) return false;
    if (a.leader.n0 != b.leader.n0 || !mat_eq(a.leader.C0, b.leader.C0) ||
        !mat_eq(a.leader.D0, b.leader.D0) || !vec_eq(a.leader.x0, b.leader.x0) ||
        !f_eq(a.leader.f, b.leader.f))
        return false;
    if (a.agents.size() != b.agents.size()) return false;
    for (size_t i = 0; i < a.agents.size(); ++i) {
        const AgentSpec& x = a.agents[i];
        const AgentSpec& y = b.agents[i];
        if (x.n != y.n || x.gain != y.gain || !mat_eq(x.C, y.C) || !mat_eq(x.D, y.D) ||
            !mat_eq(x.Xi, y.Xi) || !mat_eq(x.Phi, y.Phi) || !mat_eq(x.Theta, y.Theta) ||
            !vec_eq(x.offset, y.offset) || !vec_eq(x.x0, y.x0) || !f_eq(x.f, y.f) ||
            x.energy.tau0 != y.energy.tau0 || x.energy.beta != y.energy.beta)
            return false;
    }
    if (a.topology.alpha != b.topology.alpha ||
        a.topology.h_override.has_value() != b.topology.h_override.has_value())
        return false;
    if (a.topology.h_override && !mat_eq(*a.topology.h_override, *b.topology.h_override))
        return false;
    if (!a.topology.h_override &&
        (!mat_eq(a.topology.abar, b.topology.abar) || !vec_eq(a.topology.bbar, b.topology.bbar)))
        return false;
    if (a.trigger.delta != b.trigger.delta || a.trigger.psi1 != b.trigger.psi1 ||
        a.trigger.psi2 != b.trigger.psi2 || a.trigger.gamma != b.trigger.gamma ||
        !mat_eq(a.trigger.P, b.trigger.P))
        return false;
    return a.sim.step == b.sim.step && a.sim.horizon == b.sim.horizon &&
           a.sim.n_runs == b.sim.n_runs && a.sim.master_seed == b.sim.master_seed &&
           a.sim.record_stride == b.sim.record_stride;
}

} // namespace petic
