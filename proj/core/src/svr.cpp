#include "crfid/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crfid/errors.hpp"

namespace crfid {

namespace {

double sq_dist(const double* a, const double* b, std::size_t p) {
    double d = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        const double t = a[i] - b[i];
        d += t * t;
    }
    return d;
}

// RBF kernel rows computed on demand, evicted round-robin under a byte budget.
class KernelCache {
  public:
    KernelCache(const FeatureMatrix& X, double gamma, std::size_t budget_bytes)
        : X_(X), gamma_(gamma), n_(X.n_rows), slot_of_(X.n_rows, -1) {
        std::size_t slots = budget_bytes / (sizeof(double) * std::max<std::size_t>(n_, 1));
        slots = std::min(std::max<std::size_t>(slots, 2), n_);
        rows_.assign(slots, {});
        owner_.assign(slots, -1);
    }

    const double* row(std::size_t i) {
        if (slot_of_[i] >= 0) return rows_[static_cast<std::size_t>(slot_of_[i])].data();
        const std::size_t s = next_;
        next_ = (next_ + 1) % rows_.size();
        if (owner_[s] >= 0) slot_of_[static_cast<std::size_t>(owner_[s])] = -1;
        owner_[s] = static_cast<int>(i);
        slot_of_[i] = static_cast<int>(s);
        std::vector<double>& r = rows_[s];
        r.resize(n_);
        const double* xi = X_.row(i);
        for (std::size_t j = 0; j < n_; ++j) r[j] = std::exp(-gamma_ * sq_dist(xi, X_.row(j), X_.n_cols));
        return r.data();
    }

  private:
    const FeatureMatrix& X_;
    double gamma_;
    std::size_t n_;
    std::vector<std::vector<double>> rows_;
    std::vector<int> owner_;
    std::vector<int> slot_of_;
    std::size_t next_ = 0;
};

} // namespace

double SvrModel::predict_row(const double* x) const {
    double s = b;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        s += coeffs[k] * std::exp(-gamma * sq_dist(x, support_vectors.row(k), support_vectors.n_cols));
    return s;
}

std::vector<double> SvrModel::predict(const FeatureMatrix& X) const {
    if (!coeffs.empty() && X.n_cols != support_vectors.n_cols)
        throw DataError("svr: feature width does not match the support vectors");
    std::vector<double> out(X.n_rows);
    for (std::size_t r = 0; r < X.n_rows; ++r) out[r] = predict_row(X.row(r));
    return out;
}

SvrModel fit_svr(const FeatureMatrix& X, const std::vector<double>& y, const SvrParams& params) {
    const std::size_t n = X.n_rows;
    if (n == 0 || X.n_cols == 0) throw DataError("svr: empty feature matrix");
    if (y.size() != n) throw DataError("svr: target length does not match the matrix");
    if (!(params.C > 0.0) || !(params.epsilon >= 0.0)) throw DataError("svr: C must be > 0, epsilon >= 0");
    for (double v : X.data)
        if (!std::isfinite(v)) throw DataError("svr: non-finite feature value");

    for (std::size_t c = 0; c < X.n_cols; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) mean += X.at(r, c);
        mean /= static_cast<double>(n);
        if (std::abs(mean) > 0.5)
            throw DataError("svr: feature " + std::to_string(c) +
                            " looks unstandardized (|mean| > 0.5); scale the inputs first");
    }

    const double gamma = params.gamma > 0.0 ? params.gamma : 1.0 / static_cast<double>(X.n_cols);
    const double C = params.C;
    KernelCache cache(X, gamma, params.cache_bytes);

    // Dual variables theta = [alpha; alpha*]; sign +1 for the first block,
    // -1 for the second; equality constraint sum(sign * theta) = 0.
    const std::size_t m = 2 * n;
    std::vector<double> theta(m, 0.0);
    std::vector<double> grad(m);
    for (std::size_t i = 0; i < n; ++i) {
        grad[i] = params.epsilon - y[i];
        grad[i + n] = params.epsilon + y[i];
    }
    auto sign = [n](std::size_t k) { return k < n ? 1.0 : -1.0; };
    auto base = [n](std::size_t k) { return k < n ? k : k - n; };

    SvrModel model;
    model.gamma = gamma;
    model.C = C;
    model.epsilon = params.epsilon;

    double m_up = 0.0, m_low = 0.0;
    long it = 0;
    for (;; ++it) {
        // Maximal violating pair over -sign(k) * grad[k].
        std::size_t ui = m, li = m;
        m_up = -std::numeric_limits<double>::infinity();
        m_low = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < m; ++k) {
            const double v = -sign(k) * grad[k];
            const bool can_up = sign(k) > 0.0 ? theta[k] < C : theta[k] > 0.0;
            const bool can_down = sign(k) > 0.0 ? theta[k] > 0.0 : theta[k] < C;
            if (can_up && v > m_up) {
                m_up = v;
                ui = k;
            }
            if (can_down && v < m_low) {
                m_low = v;
                li = k;
            }
        }
        if (ui == m || li == m || m_up - m_low < params.tol) {
            model.converged = true;
            break;
        }
        if (it >= params.max_iter) {
            model.converged = false;
            break;
        }

        const std::size_t bi = base(ui);
        const std::size_t bj = base(li);
        const double* ki = cache.row(bi);
        const double* kj = cache.row(bj);
        const double kappa = std::max(ki[bi] + kj[bj] - 2.0 * ki[bj], 1e-12);
        double t = (m_up - m_low) / kappa;

        // Box limits along the feasible direction.
        const double limit_i = sign(ui) > 0.0 ? C - theta[ui] : theta[ui];
        const double limit_j = sign(li) > 0.0 ? theta[li] : C - theta[li];
        t = std::min(t, std::min(limit_i, limit_j));
        if (!(t > 0.0)) {
            model.converged = false; // numerically stuck; should not happen
            break;
        }

        theta[ui] = std::clamp(theta[ui] + sign(ui) * t, 0.0, C);
        theta[li] = std::clamp(theta[li] - sign(li) * t, 0.0, C);
        for (std::size_t k = 0; k < n; ++k) {
            const double d = t * (ki[k] - kj[k]);
            grad[k] += d;
            grad[k + n] -= d;
        }
    }
    model.n_iter = it;
    model.kkt_violation = m_up - m_low;

    // Bias from free support vectors; midpoint of the violation bracket if none.
    double bsum = 0.0;
    std::size_t bcount = 0;
    const double edge = 1e-12 * C;
    for (std::size_t k = 0; k < m; ++k)
        if (theta[k] > edge && theta[k] < C - edge) {
            bsum += -sign(k) * grad[k];
            ++bcount;
        }
    model.b = bcount > 0 ? bsum / static_cast<double>(bcount) : (m_up + m_low) / 2.0;

    std::vector<std::size_t> sv;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(theta[i] - theta[i + n]) > edge) sv.push_back(i);
    model.coeffs.reserve(sv.size());
    model.support_vectors.n_rows = sv.size();
    model.support_vectors.n_cols = X.n_cols;
    model.support_vectors.data.reserve(sv.size() * X.n_cols);
    for (std::size_t i : sv) {
        model.coeffs.push_back(theta[i] - theta[i + n]);
        model.support_vectors.data.insert(model.support_vectors.data.end(), X.row(i), X.row(i) + X.n_cols);
    }
    return model;
}

} // namespace crfid
