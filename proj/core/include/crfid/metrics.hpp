#pragma once

#include <array>
#include <string>
#include <vector>

namespace crfid {

// Prediction target of a pipeline run.
enum class Task { Id, Sensing };

const char* task_name(Task t);                // "id" / "sensing"
Task parse_task(const std::string& s);        // throws ParseError
double task_range(Task t);                    // 7.0 for ID, 0.7 pF for sensing

inline constexpr std::array<double, 3> kSensingLevelsPf{0.1, 0.3, 0.8};

// sqrt(mean((p - t)^2)); throws DataError on empty or mismatched input.
double rmse(const std::vector<double>& predictions, const std::vector<double>& targets);

// Percent of the target range.
double normalized_rmse(double rmse_value, double target_range);

// Round half up, clamped to [0, 7]. Throws NumericError on non-finite input.
int decode_id(double prediction);

// Nearest of {0.1, 0.3, 0.8} pF by absolute distance, ties toward the
// smaller value. Throws NumericError on non-finite input.
double decode_sensing(double prediction);

// Task-dispatched decode, returned as double (the ID as an integer value).
double decode(Task t, double prediction);

// Fraction of rows whose decoded prediction equals the decoded target.
double decode_accuracy(Task t, const std::vector<double>& predictions,
                       const std::vector<double>& targets);

} // namespace crfid
