#ifndef RACBF_OUTPUT_HPP
#define RACBF_OUTPUT_HPP

#include <string>

#include "racbf/harness.hpp"

namespace racbf {

/// Fixed trajectory CSV header. Row t carries the state at t and the step
/// solved at t; the final row carries the terminal state with empty step
/// cells. Variants without an auxiliary input or risk variables leave those
/// cells empty.
extern const char* kTrajectoryHeader;

std::string format_double(double value);

void write_trajectory_csv(const std::string& path, const TrajectoryLog& log, const RunConfig& cfg);

void write_metrics_json(const std::string& path, const RunMetrics& metrics, const RunConfig& cfg);

void write_comparison_csv(const std::string& path, const ComparisonTable& table, int total_steps);

}  // namespace racbf

#endif  // RACBF_OUTPUT_HPP
