#include "crfid/metrics.hpp"

#include <cmath>

#include "crfid/errors.hpp"

namespace crfid {

const char* task_name(Task t) { return t == Task::Id ? "id" : "sensing"; }

Task parse_task(const std::string& s) {
    if (s == "id") return Task::Id;
    if (s == "sensing") return Task::Sensing;
    throw ParseError("unknown task '" + s + "' (expected id or sensing)");
}

double task_range(Task t) { return t == Task::Id ? 7.0 : 0.7; }

double rmse(const std::vector<double>& predictions, const std::vector<double>& targets) {
    if (predictions.empty()) throw DataError("rmse: empty input");
    if (predictions.size() != targets.size()) throw DataError("rmse: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double d = predictions[i] - targets[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(predictions.size()));
}

double normalized_rmse(double rmse_value, double target_range) {
    if (!(target_range > 0.0)) throw DataError("normalized_rmse: range must be positive");
    return rmse_value / target_range * 100.0;
}

int decode_id(double prediction) {
    if (!std::isfinite(prediction)) throw NumericError("decode_id: non-finite prediction");
    const double r = std::floor(prediction + 0.5); // round half up
    if (r < 0.0) return 0;
    if (r > 7.0) return 7;
    return static_cast<int>(r);
}

double decode_sensing(double prediction) {
    if (!std::isfinite(prediction)) throw NumericError("decode_sensing: non-finite prediction");
    double best = kSensingLevelsPf[0];
    double best_d = std::abs(prediction - kSensingLevelsPf[0]);
    for (double level : kSensingLevelsPf) { // ascending: strict < keeps the smaller on ties
        const double d = std::abs(prediction - level);
        if (d < best_d) {
            best_d = d;
            best = level;
        }
    }
    return best;
}

double decode(Task t, double prediction) {
    return t == Task::Id ? static_cast<double>(decode_id(prediction)) : decode_sensing(prediction);
}

double decode_accuracy(Task t, const std::vector<double>& predictions,
                       const std::vector<double>& targets) {
    if (predictions.empty() || predictions.size() != targets.size())
        throw DataError("decode_accuracy: empty or mismatched input");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i)
        if (decode(t, predictions[i]) == decode(t, targets[i])) ++hits;
    return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

} // namespace crfid
