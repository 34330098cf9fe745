#include "crfid/cnn.hpp"

#include <algorithm>
#include <cmath>

#include "crfid/errors.hpp"
#include "crfid/rng.hpp"

namespace crfid {

namespace {

std::string layer_tag(std::size_t idx, const LayerSpec& l) {
    const char* kind = "?";
    switch (l.type) {
        case LayerType::Conv1D: kind = "conv"; break;
        case LayerType::MaxPool: kind = "pool"; break;
        case LayerType::BatchNorm: kind = "batch_norm"; break;
        case LayerType::Dropout: kind = "dropout"; break;
        case LayerType::Flatten: kind = "flatten"; break;
        case LayerType::Dense: kind = "dense"; break;
    }
    return "layer " + std::to_string(idx) + " (" + kind + ")";
}

#ifndef NDEBUG
void debug_check_finite(const Tensor& t, const char* where) {
    for (double v : t.data)
        if (!std::isfinite(v)) throw NumericError(std::string("cnn: non-finite value after ") + where);
}
#else
void debug_check_finite(const Tensor&, const char*) {}
#endif

} // namespace

void ArchitectureSpec::validate() const {
    if (layers.empty()) throw DataError("spec: no layers");
    bool flat = false;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& l = layers[i];
        switch (l.type) {
            case LayerType::Conv1D:
                if (flat) throw DataError("spec: " + layer_tag(i, l) + " after flatten");
                if (l.filters < 1 || l.kernel < 1)
                    throw DataError("spec: " + layer_tag(i, l) + " needs filters >= 1 and kernel >= 1");
                break;
            case LayerType::MaxPool:
            case LayerType::BatchNorm:
                if (flat) throw DataError("spec: " + layer_tag(i, l) + " after flatten");
                break;
            case LayerType::Dropout:
                if (!(l.rate >= 0.0 && l.rate < 1.0))
                    throw DataError("spec: " + layer_tag(i, l) + " rate must lie in [0, 1)");
                break;
            case LayerType::Flatten:
                if (flat) throw DataError("spec: second flatten at layer " + std::to_string(i));
                flat = true;
                break;
            case LayerType::Dense:
                if (!flat) throw DataError("spec: " + layer_tag(i, l) + " before flatten");
                if (l.units < 1) throw DataError("spec: " + layer_tag(i, l) + " needs units >= 1");
                break;
        }
    }
    const LayerSpec& last = layers.back();
    if (last.type != LayerType::Dense || last.units != 1 || last.relu)
        throw DataError("spec: final layer must be Dense(1, linear)");
}

ArchitectureSpec model_1_spec() {
    ArchitectureSpec s;
    s.name = "cnn1";
    s.layers = {LayerSpec::conv(64),  LayerSpec::pool(),       LayerSpec::dropout(),
                LayerSpec::conv(64),  LayerSpec::pool(),       LayerSpec::batch_norm(),
                LayerSpec::dropout(), LayerSpec::flatten(),    LayerSpec::dense(1500, true),
                LayerSpec::dropout(), LayerSpec::dense(500, true), LayerSpec::dense(1, false)};
    return s;
}

ArchitectureSpec model_2_spec() {
    ArchitectureSpec s;
    s.name = "cnn2";
    s.layers = {LayerSpec::conv(64),  LayerSpec::pool(),       LayerSpec::dropout(),
                LayerSpec::conv(32),  LayerSpec::pool(),       LayerSpec::batch_norm(),
                LayerSpec::dropout(), LayerSpec::flatten(),    LayerSpec::dense(1000, true),
                LayerSpec::dropout(), LayerSpec::dense(100, true), LayerSpec::dense(1, false)};
    return s;
}

ArchitectureSpec model_3_spec() {
    ArchitectureSpec s;
    s.name = "cnn3";
    s.layers = {LayerSpec::conv(512), LayerSpec::pool(), LayerSpec::dropout()};
    for (int f : {256, 128, 64, 32}) {
        s.layers.push_back(LayerSpec::conv(f));
        s.layers.push_back(LayerSpec::pool());
        s.layers.push_back(LayerSpec::batch_norm());
        s.layers.push_back(LayerSpec::dropout());
    }
    s.layers.push_back(LayerSpec::flatten());
    s.layers.push_back(LayerSpec::dense(1500, true));
    s.layers.push_back(LayerSpec::dropout());
    s.layers.push_back(LayerSpec::dense(500, true));
    s.layers.push_back(LayerSpec::dense(1, false));
    return s;
}

ArchitectureSpec model_4_spec() {
    ArchitectureSpec s;
    s.name = "cnn4";
    for (int f : {256, 128, 64, 32}) {
        s.layers.push_back(LayerSpec::conv(f));
        s.layers.push_back(LayerSpec::pool());
        s.layers.push_back(LayerSpec::batch_norm());
        s.layers.push_back(LayerSpec::dropout());
    }
    s.layers.push_back(LayerSpec::flatten());
    s.layers.push_back(LayerSpec::dense(1000, true));
    s.layers.push_back(LayerSpec::dropout());
    s.layers.push_back(LayerSpec::dense(500, true));
    s.layers.push_back(LayerSpec::dense(1, false));
    return s;
}

ArchitectureSpec reduced_spec(const ArchitectureSpec& spec, double width_scale, const std::string& name) {
    if (!(width_scale > 0.0 && width_scale <= 1.0))
        throw DataError("spec: width scale must lie in (0, 1]");
    ArchitectureSpec out = spec;
    out.name = name;
    for (std::size_t i = 0; i + 1 < out.layers.size(); ++i) {
        LayerSpec& l = out.layers[i];
        if (l.type == LayerType::Conv1D)
            l.filters = std::max(4, static_cast<int>(std::llround(l.filters * width_scale)));
        else if (l.type == LayerType::Dense)
            l.units = std::max(8, static_cast<int>(std::llround(l.units * width_scale)));
    }
    return out;
}

std::vector<std::pair<int, int>> compute_shapes(const ArchitectureSpec& spec, int input_length) {
    if (input_length < 1) throw DataError("cnn: input length must be >= 1");
    std::vector<std::pair<int, int>> shapes;
    shapes.reserve(spec.layers.size());
    int len = input_length, ch = 1;
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& l = spec.layers[i];
        switch (l.type) {
            case LayerType::Conv1D:
                len = len - l.kernel + 1;
                ch = l.filters;
                if (len < 1)
                    throw DataError("cnn: " + layer_tag(i, l) + " output length would be " +
                                    std::to_string(len));
                break;
            case LayerType::MaxPool:
                len = len / 2;
                if (len < 1) throw DataError("cnn: " + layer_tag(i, l) + " output length would be 0");
                break;
            case LayerType::Flatten:
                ch = len * ch;
                len = 1;
                break;
            case LayerType::Dense:
                ch = l.units;
                len = 1;
                break;
            case LayerType::BatchNorm:
            case LayerType::Dropout:
                break;
        }
        shapes.emplace_back(len, ch);
    }
    return shapes;
}

CnnModel make_cnn(const ArchitectureSpec& spec, int input_length, std::uint64_t seed) {
    spec.validate();
    CnnModel model;
    model.spec = spec;
    model.input_length = input_length;
    model.shapes = compute_shapes(spec, input_length);
    model.slots.resize(spec.layers.size());

    std::size_t np = 0, ns = 0;
    int ch = 1;
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& l = spec.layers[i];
        LayerSlots& s = model.slots[i];
        if (l.type == LayerType::Conv1D) {
            s.w_off = np;
            s.w_len = static_cast<std::size_t>(l.kernel) * static_cast<std::size_t>(ch) *
                      static_cast<std::size_t>(l.filters);
            np += s.w_len;
            s.b_off = np;
            s.b_len = static_cast<std::size_t>(l.filters);
            np += s.b_len;
        } else if (l.type == LayerType::Dense) {
            const int in_units = i == 0 ? input_length : model.shapes[i - 1].second;
            s.w_off = np;
            s.w_len = static_cast<std::size_t>(in_units) * static_cast<std::size_t>(l.units);
            np += s.w_len;
            s.b_off = np;
            s.b_len = static_cast<std::size_t>(l.units);
            np += s.b_len;
        } else if (l.type == LayerType::BatchNorm) {
            s.w_off = np;
            s.w_len = static_cast<std::size_t>(ch); // gamma
            np += s.w_len;
            s.b_off = np;
            s.b_len = static_cast<std::size_t>(ch); // beta
            np += s.b_len;
            s.s_off = ns;
            s.s_len = static_cast<std::size_t>(ch);
            ns += s.s_len;
        }
        ch = model.shapes[i].second;
    }

    model.params.assign(np, 0.0);
    model.running_mean.assign(ns, 0.0);
    model.running_var.assign(ns, 1.0);

    // He-uniform weights, drawn in layer order.
    Rng rng(derive_seed(seed, {0}));
    ch = 1;
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& l = spec.layers[i];
        const LayerSlots& s = model.slots[i];
        if (l.type == LayerType::Conv1D) {
            const double limit = std::sqrt(6.0 / (static_cast<double>(l.kernel) * ch));
            for (std::size_t k = 0; k < s.w_len; ++k)
                model.params[s.w_off + k] = rng.uniform(-limit, limit);
        } else if (l.type == LayerType::Dense) {
            const int in_units = i == 0 ? input_length : model.shapes[i - 1].second;
            const double limit = std::sqrt(6.0 / static_cast<double>(in_units));
            for (std::size_t k = 0; k < s.w_len; ++k)
                model.params[s.w_off + k] = rng.uniform(-limit, limit);
        } else if (l.type == LayerType::BatchNorm) {
            for (std::size_t k = 0; k < s.w_len; ++k) model.params[s.w_off + k] = 1.0;
        }
        ch = model.shapes[i].second;
    }
    return model;
}

namespace {

void conv_forward(const Tensor& in, const double* W, const double* B, int kernel, int filters,
                  bool relu, Tensor& pre, Tensor& out) {
    const std::size_t out_len = in.length - static_cast<std::size_t>(kernel) + 1;
    const std::size_t F = static_cast<std::size_t>(filters);
    const std::size_t C = in.channels;
    pre.resize(in.batch, out_len, F);
    for (std::size_t b = 0; b < in.batch; ++b)
        for (std::size_t i = 0; i < out_len; ++i) {
            double* orow = &pre.at(b, i, 0);
            for (std::size_t f = 0; f < F; ++f) orow[f] = B[f];
            for (int k = 0; k < kernel; ++k) {
                const double* irow = &in.at(b, i + static_cast<std::size_t>(k), 0);
                const double* wrow = W + static_cast<std::size_t>(k) * C * F;
                for (std::size_t c = 0; c < C; ++c) {
                    const double v = irow[c];
                    const double* wf = wrow + c * F;
                    for (std::size_t f = 0; f < F; ++f) orow[f] += v * wf[f];
                }
            }
        }
    out = pre;
    if (relu)
        for (double& v : out.data) v = std::max(v, 0.0);
}

void pool_forward(const Tensor& in, Tensor& out, std::vector<int>* argmax) {
    const std::size_t out_len = in.length / 2;
    const std::size_t C = in.channels;
    out.resize(in.batch, out_len, C);
    if (argmax) argmax->assign(out.data.size(), 0);
    for (std::size_t b = 0; b < in.batch; ++b)
        for (std::size_t i = 0; i < out_len; ++i)
            for (std::size_t c = 0; c < C; ++c) {
                const std::size_t i0 = (b * in.length + 2 * i) * C + c;
                const std::size_t i1 = i0 + C; // next position, same channel
                // First element wins ties.
                const bool second = in.data[i1] > in.data[i0];
                const std::size_t src = second ? i1 : i0;
                const std::size_t dst = (b * out_len + i) * C + c;
                out.data[dst] = in.data[src];
                if (argmax) (*argmax)[dst] = static_cast<int>(src);
            }
}

void dense_forward(const Tensor& in, const double* W, const double* B, int units, bool relu,
                   Tensor& pre, Tensor& out) {
    const std::size_t U = static_cast<std::size_t>(units);
    const std::size_t I = in.length * in.channels;
    pre.resize(in.batch, 1, U);
    for (std::size_t b = 0; b < in.batch; ++b) {
        double* orow = &pre.at(b, 0, 0);
        for (std::size_t u = 0; u < U; ++u) orow[u] = B[u];
        const double* irow = &in.data[b * I];
        for (std::size_t i = 0; i < I; ++i) {
            const double v = irow[i];
            const double* wrow = W + i * U;
            for (std::size_t u = 0; u < U; ++u) orow[u] += v * wrow[u];
        }
    }
    out = pre;
    if (relu)
        for (double& v : out.data) v = std::max(v, 0.0);
}

} // namespace

std::vector<double> forward_train(CnnModel& model, const Tensor& input, Rng& dropout_rng,
                                  ForwardCache& cache) {
    if (static_cast<int>(input.length) != model.input_length || input.channels != 1)
        throw DataError("cnn: input tensor must be (n, " + std::to_string(model.input_length) + ", 1)");
    const std::size_t L = model.spec.layers.size();
    cache.input = input;
    cache.outputs.assign(L, {});
    cache.pre_act.assign(L, {});
    cache.argmax.assign(L, {});
    cache.xhat.assign(L, {});
    cache.ivar.assign(L, {});
    cache.mask.assign(L, {});
    cache.batch = input.batch;

    const Tensor* cur = &input;
    for (std::size_t i = 0; i < L; ++i) {
        const LayerSpec& l = model.spec.layers[i];
        const LayerSlots& s = model.slots[i];
        Tensor& out = cache.outputs[i];
        switch (l.type) {
            case LayerType::Conv1D:
                conv_forward(*cur, &model.params[s.w_off], &model.params[s.b_off], l.kernel,
                             l.filters, l.relu, cache.pre_act[i], out);
                break;
            case LayerType::MaxPool:
                pool_forward(*cur, out, &cache.argmax[i]);
                break;
            case LayerType::BatchNorm: {
                const std::size_t C = cur->channels;
                const std::size_t N = cur->batch * cur->length;
                const double* gamma = &model.params[s.w_off];
                const double* beta = &model.params[s.b_off];
                std::vector<double>& xh = cache.xhat[i];
                std::vector<double>& iv = cache.ivar[i];
                iv.assign(C, 0.0);
                std::vector<double> mean(C, 0.0);
                for (std::size_t e = 0; e < cur->data.size(); ++e) mean[e % C] += cur->data[e];
                for (double& v : mean) v /= static_cast<double>(N);
                std::vector<double> var(C, 0.0);
                for (std::size_t e = 0; e < cur->data.size(); ++e) {
                    const double d = cur->data[e] - mean[e % C];
                    var[e % C] += d * d;
                }
                for (double& v : var) v /= static_cast<double>(N);
                for (std::size_t c = 0; c < C; ++c) iv[c] = 1.0 / std::sqrt(var[c] + kBnEps);
                xh.resize(cur->data.size());
                out.resize(cur->batch, cur->length, C);
                for (std::size_t e = 0; e < cur->data.size(); ++e) {
                    const std::size_t c = e % C;
                    xh[e] = (cur->data[e] - mean[c]) * iv[c];
                    out.data[e] = gamma[c] * xh[e] + beta[c];
                }
                for (std::size_t c = 0; c < C; ++c) {
                    model.running_mean[s.s_off + c] =
                        kBnMomentum * model.running_mean[s.s_off + c] + (1.0 - kBnMomentum) * mean[c];
                    model.running_var[s.s_off + c] =
                        kBnMomentum * model.running_var[s.s_off + c] + (1.0 - kBnMomentum) * var[c];
                }
                break;
            }
            case LayerType::Dropout: {
                const double keep = 1.0 - l.rate;
                std::vector<double>& mk = cache.mask[i];
                mk.resize(cur->data.size());
                out.resize(cur->batch, cur->length, cur->channels);
                for (std::size_t e = 0; e < cur->data.size(); ++e) {
                    mk[e] = dropout_rng.uniform() < keep ? 1.0 / keep : 0.0;
                    out.data[e] = cur->data[e] * mk[e];
                }
                break;
            }
            case LayerType::Flatten:
                out = *cur;
                out.channels = cur->length * cur->channels;
                out.length = 1;
                break;
            case LayerType::Dense:
                dense_forward(*cur, &model.params[s.w_off], &model.params[s.b_off], l.units, l.relu,
                              cache.pre_act[i], out);
                break;
        }
        debug_check_finite(out, layer_tag(i, l).c_str());
        cur = &out;
    }

    std::vector<double> preds(input.batch);
    for (std::size_t b = 0; b < input.batch; ++b) preds[b] = cur->at(b, 0, 0);
    return preds;
}

std::vector<double> forward_infer(const CnnModel& model, const Tensor& input) {
    if (static_cast<int>(input.length) != model.input_length || input.channels != 1)
        throw DataError("cnn: input tensor must be (n, " + std::to_string(model.input_length) + ", 1)");
    Tensor cur = input;
    Tensor next, scratch;
    for (std::size_t i = 0; i < model.spec.layers.size(); ++i) {
        const LayerSpec& l = model.spec.layers[i];
        const LayerSlots& s = model.slots[i];
        switch (l.type) {
            case LayerType::Conv1D:
                conv_forward(cur, &model.params[s.w_off], &model.params[s.b_off], l.kernel, l.filters,
                             l.relu, scratch, next);
                cur = std::move(next);
                break;
            case LayerType::MaxPool:
                pool_forward(cur, next, nullptr);
                cur = std::move(next);
                break;
            case LayerType::BatchNorm: {
                const std::size_t C = cur.channels;
                const double* gamma = &model.params[s.w_off];
                const double* beta = &model.params[s.b_off];
                for (std::size_t e = 0; e < cur.data.size(); ++e) {
                    const std::size_t c = e % C;
                    const double iv = 1.0 / std::sqrt(model.running_var[s.s_off + c] + kBnEps);
                    cur.data[e] = gamma[c] * (cur.data[e] - model.running_mean[s.s_off + c]) * iv + beta[c];
                }
                break;
            }
            case LayerType::Dropout:
                break; // identity at inference
            case LayerType::Flatten:
                cur.channels = cur.length * cur.channels;
                cur.length = 1;
                break;
            case LayerType::Dense:
                dense_forward(cur, &model.params[s.w_off], &model.params[s.b_off], l.units, l.relu,
                              scratch, next);
                cur = std::move(next);
                break;
        }
    }
    std::vector<double> preds(input.batch);
    for (std::size_t b = 0; b < input.batch; ++b) preds[b] = cur.at(b, 0, 0);
    return preds;
}

std::vector<double> backward(const CnnModel& model, const ForwardCache& cache,
                             const std::vector<double>& dpred) {
    const std::size_t L = model.spec.layers.size();
    if (cache.outputs.size() != L || cache.batch != dpred.size() ||
        static_cast<int>(cache.input.length) != model.input_length)
        throw DataError("cnn: forward cache does not match the model and batch");

    std::vector<double> grads(model.params.size(), 0.0);
    Tensor dcur;
    dcur.resize(cache.batch, 1, 1);
    for (std::size_t b = 0; b < cache.batch; ++b) dcur.at(b, 0, 0) = dpred[b];

    for (std::size_t ir = L; ir-- > 0;) {
        const LayerSpec& l = model.spec.layers[ir];
        const LayerSlots& s = model.slots[ir];
        const Tensor& in = ir == 0 ? cache.input : cache.outputs[ir - 1];
        Tensor din;
        switch (l.type) {
            case LayerType::Dense: {
                const std::size_t U = static_cast<std::size_t>(l.units);
                const std::size_t I = in.length * in.channels;
                const Tensor& pre = cache.pre_act[ir];
                Tensor dz = dcur;
                if (l.relu)
                    for (std::size_t e = 0; e < dz.data.size(); ++e)
                        if (pre.data[e] <= 0.0) dz.data[e] = 0.0;
                din.resize(in.batch, in.length, in.channels);
                double* dW = &grads[s.w_off];
                double* dB = &grads[s.b_off];
                const double* W = &model.params[s.w_off];
                for (std::size_t b = 0; b < in.batch; ++b) {
                    const double* dzrow = &dz.data[b * U];
                    const double* irow = &in.data[b * I];
                    double* drow = &din.data[b * I];
                    for (std::size_t u = 0; u < U; ++u) dB[u] += dzrow[u];
                    for (std::size_t i = 0; i < I; ++i) {
                        const double v = irow[i];
                        const double* wrow = W + i * U;
                        double* dwrow = dW + i * U;
                        double acc = 0.0;
                        for (std::size_t u = 0; u < U; ++u) {
                            dwrow[u] += v * dzrow[u];
                            acc += wrow[u] * dzrow[u];
                        }
                        drow[i] = acc;
                    }
                }
                break;
            }
            case LayerType::Flatten:
                din = dcur;
                din.length = in.length;
                din.channels = in.channels;
                break;
            case LayerType::Dropout: {
                const std::vector<double>& mk = cache.mask[ir];
                din = dcur;
                for (std::size_t e = 0; e < din.data.size(); ++e) din.data[e] *= mk[e];
                break;
            }
            case LayerType::BatchNorm: {
                const std::size_t C = in.channels;
                const std::size_t N = in.batch * in.length;
                const std::vector<double>& xh = cache.xhat[ir];
                const std::vector<double>& iv = cache.ivar[ir];
                const double* gamma = &model.params[s.w_off];
                double* dgamma = &grads[s.w_off];
                double* dbeta = &grads[s.b_off];
                std::vector<double> sum_dxhat(C, 0.0), sum_dxhat_xhat(C, 0.0);
                for (std::size_t e = 0; e < dcur.data.size(); ++e) {
                    const std::size_t c = e % C;
                    dgamma[c] += dcur.data[e] * xh[e];
                    dbeta[c] += dcur.data[e];
                    const double dxh = dcur.data[e] * gamma[c];
                    sum_dxhat[c] += dxh;
                    sum_dxhat_xhat[c] += dxh * xh[e];
                }
                din.resize(in.batch, in.length, C);
                const double dn = static_cast<double>(N);
                for (std::size_t e = 0; e < dcur.data.size(); ++e) {
                    const std::size_t c = e % C;
                    const double dxh = dcur.data[e] * gamma[c];
                    din.data[e] = iv[c] / dn * (dn * dxh - sum_dxhat[c] - xh[e] * sum_dxhat_xhat[c]);
                }
                break;
            }
            case LayerType::MaxPool: {
                const std::vector<int>& am = cache.argmax[ir];
                din.resize(in.batch, in.length, in.channels);
                for (std::size_t e = 0; e < dcur.data.size(); ++e)
                    din.data[static_cast<std::size_t>(am[e])] += dcur.data[e];
                break;
            }
            case LayerType::Conv1D: {
                const std::size_t F = static_cast<std::size_t>(l.filters);
                const std::size_t C = in.channels;
                const std::size_t out_len = cache.outputs[ir].length;
                const Tensor& pre = cache.pre_act[ir];
                Tensor dz = dcur;
                if (l.relu)
                    for (std::size_t e = 0; e < dz.data.size(); ++e)
                        if (pre.data[e] <= 0.0) dz.data[e] = 0.0;
                din.resize(in.batch, in.length, C);
                double* dW = &grads[s.w_off];
                double* dB = &grads[s.b_off];
                const double* W = &model.params[s.w_off];
                for (std::size_t b = 0; b < in.batch; ++b)
                    for (std::size_t i = 0; i < out_len; ++i) {
                        const double* dzrow = &dz.data[(b * out_len + i) * F];
                        for (std::size_t f = 0; f < F; ++f) dB[f] += dzrow[f];
                        for (int k = 0; k < l.kernel; ++k) {
                            const std::size_t pos = (b * in.length + i + static_cast<std::size_t>(k)) * C;
                            const double* wrow = W + static_cast<std::size_t>(k) * C * F;
                            double* dwrow = dW + static_cast<std::size_t>(k) * C * F;
                            for (std::size_t c = 0; c < C; ++c) {
                                const double v = in.data[pos + c];
                                const double* wf = wrow + c * F;
                                double* dwf = dwrow + c * F;
                                double acc = 0.0;
                                for (std::size_t f = 0; f < F; ++f) {
                                    dwf[f] += v * dzrow[f];
                                    acc += wf[f] * dzrow[f];
                                }
                                din.data[pos + c] += acc;
                            }
                        }
                    }
                break;
            }
        }
        dcur = std::move(din);
    }
    return grads;
}

void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state,
               long t, const AdamConfig& config) {
    if (t < 1) throw DataError("adam: step index must be >= 1");
    if (grads.size() != params.size()) throw DataError("adam: gradient size mismatch");
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    if (state.m.size() != params.size()) throw DataError("adam: state size mismatch");
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * grads[i];
        state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * grads[i] * grads[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= config.lr * mhat / (std::sqrt(vhat) + config.eps);
    }
}

Tensor to_tensor(const FeatureMatrix& X) {
    Tensor t;
    t.batch = X.n_rows;
    t.length = X.n_cols;
    t.channels = 1;
    t.data = X.data;
    return t;
}

Tensor to_tensor(const FeatureMatrix& X, const std::vector<int>& rows) {
    Tensor t;
    t.batch = rows.size();
    t.length = X.n_cols;
    t.channels = 1;
    t.data.reserve(rows.size() * X.n_cols);
    for (int r : rows) {
        if (r < 0 || static_cast<std::size_t>(r) >= X.n_rows)
            throw DataError("cnn: row index out of range");
        t.data.insert(t.data.end(), X.row(static_cast<std::size_t>(r)),
                      X.row(static_cast<std::size_t>(r)) + X.n_cols);
    }
    return t;
}

} // namespace crfid
