#pragma once

#include <string>

#include "stirlab/empirical.hpp"
#include "stirlab/girsanov.hpp"
#include "stirlab/hydro.hpp"
#include "stirlab/process.hpp"
#include "stirlab/rate.hpp"

namespace stirlab {

// Event logs: binary records <t:f64, x:u32, alpha:u8, beta:u8> after a
// "STIR" header, or line-delimited JSON.
void write_event_log(const EventLog& log, const std::string& path);
EventLog read_event_log(const std::string& path);
void write_event_log_jsonl(const EventLog& log, const std::string& path);

// Trajectories: CSV rows (t, u, rho_1, ...) or a compact binary block
// <M, K, n, dt> followed by row-major 64-bit floats.
void write_trajectory_csv(const DensityTrajectory& rho, const std::string& path);
void write_trajectory_binary(const DensityTrajectory& rho, const std::string& path);
DensityTrajectory read_trajectory_binary(const std::string& path);

// Empirical fields: CSV columns u, rho_1, ..., rho_n (density values).
void write_field_csv(const EmpiricalField& field, const std::string& path);

std::string weight_report_json(const WeightBreakdown& w);
std::string rate_report_json(const RateEvaluation& r, const std::string& gauge,
                             double delta_clip, std::size_t m, std::size_t k,
                             double dt);

std::uint64_t fnv1a_hash(const std::string& bytes);

}  // namespace stirlab
