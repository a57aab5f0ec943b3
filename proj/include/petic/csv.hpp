#pragma once

#include <string>

#include "petic/simulator.hpp"

namespace petic {

// CSV artifacts: header row, ',' separator, %.17g formatting so files are
// byte-identical across repeated runs with the same seed.

// t, y_1..y_dim, |y|^2
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

// s, t_s, gap, W_ratio
void write_events_csv(const std::string& path, const EventLog& log);

// t, mean_sq, envelope M*e^(-gamma t)*mean_sq(0)
void write_ensemble_csv(const std::string& path, const EnsembleStats& stats, double gamma,
                        double M);

// Companion gnuplot scripts next to the CSVs (no plotting runtime embedded).
void write_trajectory_gnuplot(const std::string& path, const std::string& csv_name, int dim);
void write_ensemble_gnuplot(const std::string& path, const std::string& csv_name);

} // namespace petic
