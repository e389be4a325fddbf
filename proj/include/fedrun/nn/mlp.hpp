#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "fedrun/errors.hpp"
#include "fedrun/nn/layout.hpp"
#include "fedrun/nn/param_vector.hpp"
#include "fedrun/rng.hpp"

namespace fedrun::nn {

enum class Mode { train, eval };

inline size_t mlp_param_count(const std::vector<size_t>& dims) {
    size_t n = 0;
    for (size_t i = 0; i + 1 < dims.size(); ++i) {
        n += dims[i] * dims[i + 1] + dims[i + 1];       // affine
        if (i + 2 < dims.size()) n += 2 * dims[i + 1];  // batch-norm gamma/beta
    }
    return n;
}

// Dense binary classifier: affine -> batch norm -> ReLU -> dropout per hidden
// layer, affine -> sigmoid at the output. Parameters live in one flat vector
// described by a Layout; batch-norm running statistics are stored alongside
// as non-trainable entries. Templated on the scalar type so tests can run
// the identical arithmetic in 64-bit.
template <typename T>
class Mlp {
public:
    using DropoutMasks = std::vector<std::vector<uint8_t>>;

    static Mlp build(const std::vector<size_t>& dims, T dropout_p, uint64_t seed) {
        if (dims.size() < 2) throw ConfigError("layer_dims needs at least input and output size");
        for (size_t d : dims)
            if (d == 0) throw ConfigError("layer_dims entries must be positive");
        if (!(dropout_p >= 0) || dropout_p >= 1) throw ConfigError("dropout_p must be in [0,1)");

        Mlp m;
        m.dims_ = dims;
        m.dropout_p_ = dropout_p;
        m.n_affine_ = dims.size() - 1;
        m.n_hidden_ = m.n_affine_ - 1;

        std::vector<TensorSpec> specs;
        size_t off = 0;
        auto add = [&](std::string name, std::vector<size_t> shape, bool trainable) {
            TensorSpec s{std::move(name), off, std::move(shape), trainable};
            off += s.size();
            specs.push_back(std::move(s));
            return specs.back().offset;
        };
        m.w_off_.resize(m.n_affine_);
        m.b_off_.resize(m.n_affine_);
        m.gamma_off_.assign(m.n_hidden_, 0);
        m.beta_off_.assign(m.n_hidden_, 0);
        m.rmean_off_.assign(m.n_hidden_, 0);
        m.rvar_off_.assign(m.n_hidden_, 0);
        for (size_t i = 0; i < m.n_affine_; ++i) {
            std::string li = std::to_string(i);
            m.w_off_[i] = add("affine" + li + ".weight", {dims[i + 1], dims[i]}, true);
            m.b_off_[i] = add("affine" + li + ".bias", {dims[i + 1]}, true);
            if (i < m.n_hidden_) {
                m.gamma_off_[i] = add("bn" + li + ".gamma", {dims[i + 1]}, true);
                m.beta_off_[i] = add("bn" + li + ".beta", {dims[i + 1]}, true);
                m.rmean_off_[i] = add("bn" + li + ".running_mean", {dims[i + 1]}, false);
                m.rvar_off_[i] = add("bn" + li + ".running_var", {dims[i + 1]}, false);
            }
        }
        m.layout_ = std::make_shared<Layout>(std::move(specs));
        m.params_.assign(m.layout_->total_size(), T(0));

        // He-uniform weights, zero biases, identity batch norm
        Rng rng(seed);
        for (size_t i = 0; i < m.n_affine_; ++i) {
            T limit = std::sqrt(T(6) / T(dims[i]));
            T* w = m.params_.data() + m.w_off_[i];
            for (size_t k = 0; k < dims[i + 1] * dims[i]; ++k)
                w[k] = static_cast<T>(rng.uniform(-limit, limit));
            if (i < m.n_hidden_) {
                T* g = m.params_.data() + m.gamma_off_[i];
                T* rv = m.params_.data() + m.rvar_off_[i];
                for (size_t k = 0; k < dims[i + 1]; ++k) {
                    g[k] = T(1);
                    rv[k] = T(1);
                }
            }
        }
        return m;
    }

    const std::vector<size_t>& dims() const { return dims_; }
    size_t input_dim() const { return dims_.front(); }
    T dropout_p() const { return dropout_p_; }
    const LayoutPtr& layout() const { return layout_; }
    std::vector<T>& params() { return params_; }
    const std::vector<T>& params() const { return params_; }
    size_t trainable_count() const { return layout_->trainable_count(); }

    // probabilities in (0,1); train mode samples dropout and updates running stats
    std::vector<double> forward(std::span<const T> batch, size_t n, Mode mode, Rng* rng = nullptr) {
        if (mode == Mode::train && dropout_p_ > 0 && rng == nullptr)
            throw ConfigError("train-mode forward requires an rng for dropout");
        return forward_impl(batch, n, mode, rng, nullptr, /*update_running=*/mode == Mode::train);
    }

    // test hook: train-mode forward with pinned dropout masks and frozen
    // running stats, so finite differences see a deterministic function
    std::vector<double> forward_train_replay(std::span<const T> batch, size_t n,
                                             const DropoutMasks* masks) {
        return forward_impl(batch, n, Mode::train, nullptr, masks, /*update_running=*/false);
    }

    const DropoutMasks& last_dropout_masks() const { return cache_.drop_masks; }

    // gradient of the mean BCE loss over the last train-mode forward batch
    std::vector<T> backward(std::span<const uint8_t> labels) {
        if (!cache_.valid || cache_.mode != Mode::train)
            throw TrainingError("backward requires a cached train-mode forward pass");
        size_t n = cache_.n;
        if (labels.size() != n) throw ShapeError("label count does not match forward batch");

        std::vector<T> grad(params_.size(), T(0));
        // d(mean BCE)/d(logit) = (p - y)/n
        std::vector<T> delta(n);
        for (size_t i = 0; i < n; ++i)
            delta[i] = static_cast<T>((cache_.probs[i] - static_cast<double>(labels[i])) / n);

        // output affine
        backprop_affine(n_affine_ - 1, delta, n, grad);

        for (size_t l = n_hidden_; l-- > 0;) {
            std::vector<T>& d = layer_delta_;  // set by backprop_affine
            size_t d_out = dims_[l + 1];
            // dropout
            if (dropout_p_ > 0) {
                const auto& mask = cache_.drop_masks[l];
                T scale = T(1) / (T(1) - dropout_p_);
                for (size_t k = 0; k < n * d_out; ++k)
                    d[k] = mask[k] ? d[k] * scale : T(0);
            }
            // relu
            const auto& pre = cache_.bn_out[l];
            for (size_t k = 0; k < n * d_out; ++k)
                if (pre[k] <= T(0)) d[k] = T(0);
            // batch norm
            backprop_batchnorm(l, d, n, grad);
            // affine below
            backprop_affine(l, d, n, grad);
        }
        return grad;
    }

    ParamVector to_params() const {
        std::vector<float> v(params_.size());
        for (size_t i = 0; i < v.size(); ++i) v[i] = static_cast<float>(params_[i]);
        return ParamVector(layout_, std::move(v));
    }

    void from_params(const ParamVector& p) {
        if (!same_layout(layout_, p.layout)) throw ShapeError("parameter layout mismatch");
        for (size_t i = 0; i < params_.size(); ++i) params_[i] = static_cast<T>(p.values[i]);
        cache_.valid = false;
    }

    // invariant check: running variances stay strictly positive
    bool running_variances_positive() const {
        for (size_t l = 0; l < n_hidden_; ++l) {
            const T* rv = params_.data() + rvar_off_[l];
            for (size_t k = 0; k < dims_[l + 1]; ++k)
                if (!(rv[k] > T(0))) return false;
        }
        return true;
    }

private:
    static constexpr double kBnEps = 1e-5;
    static constexpr double kBnMomentum = 0.1;

    struct Cache {
        bool valid = false;
        Mode mode = Mode::eval;
        size_t n = 0;
        std::vector<T> input;
        std::vector<std::vector<T>> act_in;   // input to each affine layer
        std::vector<std::vector<T>> xhat;     // per hidden layer, normalized
        std::vector<std::vector<T>> inv_std;  // per hidden layer, per feature
        std::vector<std::vector<T>> bn_out;   // per hidden layer, pre-ReLU
        DropoutMasks drop_masks;
        std::vector<double> probs;
    };

    std::vector<double> forward_impl(std::span<const T> batch, size_t n, Mode mode, Rng* rng,
                                     const DropoutMasks* replay, bool update_running) {
        size_t d_in = dims_.front();
        if (n == 0 || batch.size() != n * d_in)
            throw ShapeError("batch size does not match input dimension");
        if (mode == Mode::train && n < 2 && n_hidden_ > 0)
            throw ConfigError("batch norm requires batch size >= 2 in train mode");

        cache_ = Cache{};
        cache_.mode = mode;
        cache_.n = n;
        bool caching = mode == Mode::train;
        if (caching) {
            cache_.act_in.resize(n_affine_);
            cache_.xhat.resize(n_hidden_);
            cache_.inv_std.resize(n_hidden_);
            cache_.bn_out.resize(n_hidden_);
            cache_.drop_masks.resize(n_hidden_);
        }

        std::vector<T> act(batch.begin(), batch.end());
        for (size_t l = 0; l < n_affine_; ++l) {
            if (caching) cache_.act_in[l] = act;
            act = affine_forward(l, act, n);
            if (l == n_hidden_) break;  // output layer: logits
            act = batchnorm_forward(l, act, n, mode, update_running, caching);
            // ReLU
            if (caching) cache_.bn_out[l] = act;
            for (T& v : act) v = std::max(v, T(0));
            // dropout
            if (dropout_p_ > 0 && mode == Mode::train) {
                size_t d = dims_[l + 1];
                std::vector<uint8_t> mask;
                if (replay) {
                    mask = (*replay)[l];
                    if (mask.size() != n * d) throw ShapeError("replay dropout mask size mismatch");
                } else {
                    mask.resize(n * d);
                    for (auto& b : mask) b = rng->uniform() >= static_cast<double>(dropout_p_);
                }
                T scale = T(1) / (T(1) - dropout_p_);
                for (size_t k = 0; k < n * d; ++k)
                    act[k] = mask[k] ? act[k] * scale : T(0);
                if (caching) cache_.drop_masks[l] = std::move(mask);
            } else if (caching) {
                cache_.drop_masks[l].clear();
            }
        }

        std::vector<double> probs(n);
        for (size_t i = 0; i < n; ++i) {
            double z = static_cast<double>(act[i]);
            double p = 1.0 / (1.0 + std::exp(-z));
            probs[i] = std::clamp(p, 1e-15, 1.0 - 1e-15);
        }
        if (caching) {
            cache_.probs = probs;
            cache_.valid = true;
        }
        return probs;
    }

    std::vector<T> affine_forward(size_t l, const std::vector<T>& x, size_t n) {
        size_t d_in = dims_[l], d_out = dims_[l + 1];
        const T* w = params_.data() + w_off_[l];
        const T* b = params_.data() + b_off_[l];
        // transposed weights turn the inner loop into an axpy the compiler
        // can vectorize (the straight dot product is a serial reduction)
        scratch_wt_.assign(d_in * d_out, T(0));
        T* wt = scratch_wt_.data();
        for (size_t o = 0; o < d_out; ++o)
            for (size_t j = 0; j < d_in; ++j) wt[j * d_out + o] = w[o * d_in + j];

        std::vector<T> y(n * d_out);
        for (size_t i = 0; i < n; ++i) {
            const T* xi = x.data() + i * d_in;
            T* yi = y.data() + i * d_out;
            for (size_t o = 0; o < d_out; ++o) yi[o] = b[o];
            for (size_t j = 0; j < d_in; ++j) {
                T xj = xi[j];
                const T* wtj = wt + j * d_out;
                for (size_t o = 0; o < d_out; ++o) yi[o] += xj * wtj[o];
            }
        }
        return y;
    }

    std::vector<T> batchnorm_forward(size_t l, const std::vector<T>& x, size_t n, Mode mode,
                                     bool update_running, bool caching) {
        size_t d = dims_[l + 1];
        const T* gamma = params_.data() + gamma_off_[l];
        const T* beta = params_.data() + beta_off_[l];
        T* rmean = params_.data() + rmean_off_[l];
        T* rvar = params_.data() + rvar_off_[l];
        std::vector<T> y(n * d);

        if (mode == Mode::eval) {
            for (size_t j = 0; j < d; ++j) {
                T inv = T(1) / std::sqrt(rvar[j] + static_cast<T>(kBnEps));
                for (size_t i = 0; i < n; ++i)
                    y[i * d + j] = gamma[j] * ((x[i * d + j] - rmean[j]) * inv) + beta[j];
            }
            return y;
        }

        std::vector<T> mean(d, T(0)), var(d, T(0));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < d; ++j) mean[j] += x[i * d + j];
        for (size_t j = 0; j < d; ++j) mean[j] /= static_cast<T>(n);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < d; ++j) {
                T c = x[i * d + j] - mean[j];
                var[j] += c * c;
            }
        for (size_t j = 0; j < d; ++j) var[j] /= static_cast<T>(n);  // biased, used for normalization

        if (caching) {
            cache_.xhat[l].resize(n * d);
            cache_.inv_std[l].resize(d);
        }
        for (size_t j = 0; j < d; ++j) {
            T inv = T(1) / std::sqrt(var[j] + static_cast<T>(kBnEps));
            if (caching) cache_.inv_std[l][j] = inv;
            for (size_t i = 0; i < n; ++i) {
                T xh = (x[i * d + j] - mean[j]) * inv;
                if (caching) cache_.xhat[l][i * d + j] = xh;
                y[i * d + j] = gamma[j] * xh + beta[j];
            }
        }
        if (update_running) {
            T m = static_cast<T>(kBnMomentum);
            T unbias = static_cast<T>(n) / static_cast<T>(n - 1);
            for (size_t j = 0; j < d; ++j) {
                rmean[j] = (T(1) - m) * rmean[j] + m * mean[j];
                rvar[j] = (T(1) - m) * rvar[j] + m * var[j] * unbias;
            }
        }
        return y;
    }

    // accumulates dW, db into grad and leaves d(input) in layer_delta_
    void backprop_affine(size_t l, const std::vector<T>& dy, size_t n, std::vector<T>& grad) {
        size_t d_in = dims_[l], d_out = dims_[l + 1];
        const T* w = params_.data() + w_off_[l];
        const std::vector<T>& x = cache_.act_in[l];
        T* dw = grad.data() + w_off_[l];
        T* db = grad.data() + b_off_[l];
        for (size_t i = 0; i < n; ++i) {
            const T* dyi = dy.data() + i * d_out;
            const T* xi = x.data() + i * d_in;
            for (size_t o = 0; o < d_out; ++o) {
                T g = dyi[o];
                db[o] += g;
                T* dwo = dw + o * d_in;
                for (size_t j = 0; j < d_in; ++j) dwo[j] += g * xi[j];
            }
        }
        if (l > 0) {
            // dy may alias layer_delta_; finish reading before reseating it
            std::vector<T> dx(n * d_in, T(0));
            for (size_t i = 0; i < n; ++i) {
                const T* dyi = dy.data() + i * d_out;
                T* dxi = dx.data() + i * d_in;
                for (size_t o = 0; o < d_out; ++o) {
                    T g = dyi[o];
                    const T* wo = w + o * d_in;
                    for (size_t j = 0; j < d_in; ++j) dxi[j] += g * wo[j];
                }
            }
            layer_delta_ = std::move(dx);
        }
    }

    // train-mode batch-norm backward through the batch statistics
    void backprop_batchnorm(size_t l, std::vector<T>& dy, size_t n, std::vector<T>& grad) {
        size_t d = dims_[l + 1];
        const T* gamma = params_.data() + gamma_off_[l];
        const std::vector<T>& xhat = cache_.xhat[l];
        const std::vector<T>& inv_std = cache_.inv_std[l];
        T* dgamma = grad.data() + gamma_off_[l];
        T* dbeta = grad.data() + beta_off_[l];

        std::vector<T> sum_dy(d, T(0)), sum_dy_xhat(d, T(0));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < d; ++j) {
                T g = dy[i * d + j];
                sum_dy[j] += g;
                sum_dy_xhat[j] += g * xhat[i * d + j];
            }
        for (size_t j = 0; j < d; ++j) {
            dgamma[j] += sum_dy_xhat[j];
            dbeta[j] += sum_dy[j];
        }
        T invn = T(1) / static_cast<T>(n);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < d; ++j) {
                T g = dy[i * d + j];
                dy[i * d + j] = gamma[j] * inv_std[j] *
                                (g - invn * sum_dy[j] - xhat[i * d + j] * invn * sum_dy_xhat[j]);
            }
    }

    std::vector<size_t> dims_;
    T dropout_p_ = T(0);
    size_t n_affine_ = 0, n_hidden_ = 0;
    LayoutPtr layout_;
    std::vector<T> params_;
    std::vector<size_t> w_off_, b_off_, gamma_off_, beta_off_, rmean_off_, rvar_off_;
    Cache cache_;
    std::vector<T> layer_delta_;
    std::vector<T> scratch_wt_;
};

using MlpClassifier = Mlp<float>;

inline MlpClassifier build_mlp(const std::vector<size_t>& dims, float dropout_p, uint64_t seed) {
    return MlpClassifier::build(dims, dropout_p, seed);
}

}  // namespace fedrun::nn
