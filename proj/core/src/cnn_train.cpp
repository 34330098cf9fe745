#include "crfid/cnn_train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "crfid/errors.hpp"
#include "crfid/rng.hpp"

namespace crfid {

namespace {

Tensor gather(const Tensor& x, const std::vector<std::size_t>& idx, std::size_t lo, std::size_t hi) {
    Tensor t;
    const std::size_t row = x.length * x.channels;
    t.batch = hi - lo;
    t.length = x.length;
    t.channels = x.channels;
    t.data.reserve(t.batch * row);
    for (std::size_t i = lo; i < hi; ++i)
        t.data.insert(t.data.end(), x.data.begin() + static_cast<std::ptrdiff_t>(idx[i] * row),
                      x.data.begin() + static_cast<std::ptrdiff_t>((idx[i] + 1) * row));
    return t;
}

double mse(const std::vector<double>& pred, const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - y[i];
        acc += d * d;
    }
    return acc / static_cast<double>(pred.size());
}

} // namespace

TrainHistory train_cnn(CnnModel& model, const Tensor& x_train, const std::vector<double>& y_train,
                       const Tensor& x_val, const std::vector<double>& y_val,
                       const TrainConfig& config) {
    if (x_train.batch == 0 || x_train.batch != y_train.size())
        throw DataError("train: x/y size mismatch");
    if (config.monitor_val && (x_val.batch == 0 || x_val.batch != y_val.size()))
        throw DataError("train: validation set required when monitoring");
    if (config.batch_size < 1 || config.max_epochs < 1 || config.patience < 0)
        throw DataError("train: bad config");

    TrainHistory hist;
    AdamState adam;
    long step = 0;

    std::vector<double> best_params;
    std::vector<double> best_mean, best_var;
    double best_val = std::numeric_limits<double>::infinity();
    int wait = 0;

    std::vector<std::size_t> order(x_train.batch);
    std::iota(order.begin(), order.end(), std::size_t{0});
    ForwardCache cache;

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(config.seed, {1, static_cast<std::uint64_t>(epoch)}));
        Rng dropout_rng(derive_seed(config.seed, {2, static_cast<std::uint64_t>(epoch)}));
        shuffle_rng.shuffle(order);

        double epoch_loss = 0.0;
        std::size_t seen = 0;
        for (std::size_t lo = 0; lo < order.size(); lo += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t hi = std::min(order.size(), lo + static_cast<std::size_t>(config.batch_size));
            Tensor xb = gather(x_train, order, lo, hi);
            std::vector<double> yb(hi - lo);
            for (std::size_t i = lo; i < hi; ++i) yb[i - lo] = y_train[order[i]];

            const std::vector<double> pred = forward_train(model, xb, dropout_rng, cache);
            const double loss = mse(pred, yb);
            if (!std::isfinite(loss)) throw NumericError("train: loss diverged");
            epoch_loss += loss * static_cast<double>(hi - lo);
            seen += hi - lo;

            std::vector<double> dpred(pred.size());
            for (std::size_t i = 0; i < pred.size(); ++i)
                dpred[i] = 2.0 * (pred[i] - yb[i]) / static_cast<double>(pred.size());
            const std::vector<double> grads = backward(model, cache, dpred);
            adam_step(model.params, grads, adam, ++step, config.adam);
        }
        hist.train_loss.push_back(epoch_loss / static_cast<double>(seen));

        if (!config.monitor_val) {
            hist.best_epoch = epoch;
            continue;
        }

        const double vl = mse(forward_infer(model, x_val), y_val);
        if (!std::isfinite(vl)) throw NumericError("train: validation loss diverged");
        hist.val_loss.push_back(vl);
        if (config.verbose)
            std::fprintf(stderr, "epoch %3d  train %.6f  val %.6f\n", epoch,
                         hist.train_loss.back(), vl);

        if (vl < best_val) { // checkpoint tracks the strict minimum
            best_params = model.params;
            best_mean = model.running_mean;
            best_var = model.running_var;
            hist.best_epoch = epoch;
        }
        if (vl < best_val - config.min_delta)
            wait = 0;
        else if (++wait >= config.patience) {
            best_val = std::min(best_val, vl);
            hist.stopped_early = true;
            break;
        }
        best_val = std::min(best_val, vl);
    }

    if (config.monitor_val && !best_params.empty()) {
        model.params = std::move(best_params);
        model.running_mean = std::move(best_mean);
        model.running_var = std::move(best_var);
    }
    return hist;
}

} // namespace crfid
