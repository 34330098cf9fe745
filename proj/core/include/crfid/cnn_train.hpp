#pragma once

#include <cstdint>
#include <vector>

#include "crfid/cnn.hpp"

namespace crfid {

struct TrainConfig {
    AdamConfig adam;
    int batch_size = 32;
    int max_epochs = 300;
    int patience = 20;        // epochs without val improvement before stopping
    double min_delta = 1e-5;  // improvement below this does not reset patience
    bool monitor_val = true;  // false: run exactly max_epochs, ignore val set
    std::uint64_t seed = 42;
    bool verbose = false;
};

struct TrainHistory {
    std::vector<double> train_loss; // per epoch, mean squared error
    std::vector<double> val_loss;
    int best_epoch = -1; // 0-based epoch whose weights the model keeps
    bool stopped_early = false;
};

// Fits the model in place with Adam on mini-batch MSE. When monitoring, the
// weights and running stats are restored to the best validation epoch.
TrainHistory train_cnn(CnnModel& model, const Tensor& x_train, const std::vector<double>& y_train,
                       const Tensor& x_val, const std::vector<double>& y_val,
                       const TrainConfig& config);

} // namespace crfid
