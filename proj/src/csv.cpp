#include "petic/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace petic {

namespace {

std::ofstream open_or_throw(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

void put(std::ofstream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
}

} // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out = open_or_throw(path);
    const int dim = traj.y.empty() ? 0 : static_cast<int>(traj.y.front().size());
    out << "t";
    for (int i = 1; i <= dim; ++i) out << ",y_" << i;
    out << ",norm_sq\n";
    for (size_t k = 0; k < traj.t.size(); ++k) {
        put(out, traj.t[k]);
        for (int i = 0; i < dim; ++i) {
            out << ',';
            put(out, traj.y[k](i));
        }
        out << ',';
        put(out, traj.norm_sq[k]);
        out << '\n';
    }
}

void write_events_csv(const std::string& path, const EventLog& log) {
    std::ofstream out = open_or_throw(path);
    out << "s,t_s,gap,w_ratio\n";
    for (const Event& e : log.events) {
        out << e.index << ',';
        put(out, e.t);
        out << ',';
        put(out, e.gap);
        out << ',';
        put(out, e.w_ratio);
        out << '\n';
    }
}

void write_ensemble_csv(const std::string& path, const EnsembleStats& stats, double gamma,
                        double M) {
    std::ofstream out = open_or_throw(path);
    out << "t,mean_sq,envelope\n";
    const double initial = stats.mean_sq.empty() ? 0.0 : stats.mean_sq.front();
    for (size_t k = 0; k < stats.t.size(); ++k) {
        put(out, stats.t[k]);
        out << ',';
        put(out, stats.mean_sq[k]);
        out << ',';
        put(out, M * std::exp(-gamma * stats.t[k]) * initial);
        out << '\n';
    }
}

void write_trajectory_gnuplot(const std::string& path, const std::string& csv_name, int dim) {
    std::ofstream out = open_or_throw(path);
    out << "set datafile separator ','\n"
        << "set key off\n"
        << "set xlabel 't'\n"
        << "set ylabel 'y(t)'\n"
        << "plot for [i=2:" << (dim + 1) << "] '" << csv_name << "' using 1:i with lines\n";
}

void write_ensemble_gnuplot(const std::string& path, const std::string& csv_name) {
    std::ofstream out = open_or_throw(path);
    out << "set datafile separator ','\n"
        << "set logscale y\n"
        << "set xlabel 't'\n"
        << "set ylabel 'E|y(t)|^2'\n"
        << "plot '" << csv_name << "' using 1:2 with lines title 'mean square', \\\n"
        << "     '" << csv_name << "' using 1:3 with lines title 'envelope'\n";
}

} // namespace petic
