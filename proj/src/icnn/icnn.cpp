#include "fedrun/icnn/icnn.hpp"

#include <cmath>

#include "fedrun/encoding.hpp"
#include "fedrun/rng.hpp"

namespace fedrun::icnn {

static double softplus(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

static double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Icnn Icnn::build(size_t input_dim, const std::vector<size_t>& hidden_dims, uint64_t seed) {
    if (input_dim == 0) throw ConfigError("icnn input_dim must be positive");
    for (size_t d : hidden_dims)
        if (d == 0) throw ConfigError("icnn hidden dims must be positive");

    Icnn net;
    net.input_dim_ = input_dim;
    net.hidden_ = hidden_dims;
    net.ld_ = hidden_dims;
    net.ld_.push_back(1);

    std::vector<nn::TensorSpec> specs;
    size_t off = 0;
    auto add = [&](std::string name, std::vector<size_t> shape) {
        nn::TensorSpec s{std::move(name), off, std::move(shape), true};
        off += s.size();
        specs.push_back(std::move(s));
        return specs.back().offset;
    };
    size_t layers = net.ld_.size();
    net.wx_off_.resize(layers);
    net.wz_off_.assign(layers, 0);
    net.b_off_.resize(layers);
    for (size_t i = 0; i < layers; ++i) {
        std::string li = std::to_string(i);
        net.wx_off_[i] = add("icnn" + li + ".wx", {net.ld_[i], input_dim});
        if (i > 0) net.wz_off_[i] = add("icnn" + li + ".wz", {net.ld_[i], net.ld_[i - 1]});
        net.b_off_[i] = add("icnn" + li + ".bias", {net.ld_[i]});
    }
    net.layout_ = std::make_shared<nn::Layout>(std::move(specs));
    net.params_.assign(net.layout_->total_size(), 0.0);

    Rng rng(seed);
    for (size_t i = 0; i < layers; ++i) {
        double lim = std::sqrt(6.0 / static_cast<double>(input_dim));
        double* wx = net.params_.data() + net.wx_off_[i];
        for (size_t k = 0; k < net.ld_[i] * input_dim; ++k) wx[k] = rng.uniform(-lim, lim);
        if (i > 0) {
            // propagation weights start non-negative
            double zlim = std::sqrt(6.0 / static_cast<double>(net.ld_[i - 1]));
            double* wz = net.params_.data() + net.wz_off_[i];
            for (size_t k = 0; k < net.ld_[i] * net.ld_[i - 1]; ++k)
                wz[k] = rng.uniform(0.0, zlim);
        }
    }
    return net;
}

Icnn::Forward Icnn::run(std::span<const double> x) const {
    if (x.size() != input_dim_) throw ShapeError("icnn input dimension mismatch");
    Forward f;
    size_t layers = ld_.size();
    f.pre.resize(layers);
    f.act.resize(layers);
    for (size_t i = 0; i < layers; ++i) {
        size_t d = ld_[i];
        std::vector<double> u(d, 0.0);
        const double* wx = params_.data() + wx_off_[i];
        const double* b = params_.data() + b_off_[i];
        for (size_t o = 0; o < d; ++o) {
            double acc = b[o];
            const double* row = wx + o * input_dim_;
            for (size_t j = 0; j < input_dim_; ++j) acc += row[j] * x[j];
            u[o] = acc;
        }
        if (i > 0) {
            const double* wz = params_.data() + wz_off_[i];
            const auto& z = f.act[i - 1];
            for (size_t o = 0; o < d; ++o) {
                const double* row = wz + o * ld_[i - 1];
                double acc = 0.0;
                for (size_t j = 0; j < ld_[i - 1]; ++j) acc += row[j] * z[j];
                u[o] += acc;
            }
        }
        f.act[i].resize(d);
        for (size_t o = 0; o < d; ++o) f.act[i][o] = softplus(u[o]);
        f.pre[i] = std::move(u);
    }
    return f;
}

double Icnn::eval(std::span<const double> x) const { return run(x).act.back()[0]; }

std::vector<double> Icnn::grad_input(std::span<const double> x) const {
    Forward f = run(x);
    size_t layers = ld_.size();
    std::vector<double> gx(input_dim_, 0.0);
    // delta over z_i, walked from the top
    std::vector<double> delta{1.0};
    for (size_t i = layers; i-- > 0;) {
        // through softplus: s = delta * sigmoid(pre)
        std::vector<double> s(ld_[i]);
        for (size_t o = 0; o < ld_[i]; ++o) s[o] = delta[o] * sigmoid(f.pre[i][o]);
        const double* wx = params_.data() + wx_off_[i];
        for (size_t o = 0; o < ld_[i]; ++o) {
            const double* row = wx + o * input_dim_;
            double so = s[o];
            for (size_t j = 0; j < input_dim_; ++j) gx[j] += so * row[j];
        }
        if (i > 0) {
            const double* wz = params_.data() + wz_off_[i];
            std::vector<double> next(ld_[i - 1], 0.0);
            for (size_t o = 0; o < ld_[i]; ++o) {
                const double* row = wz + o * ld_[i - 1];
                for (size_t j = 0; j < ld_[i - 1]; ++j) next[j] += s[o] * row[j];
            }
            delta = std::move(next);
        }
    }
    return gx;
}

std::vector<double> Icnn::grad_params(std::span<const double> x) const {
    Forward f = run(x);
    size_t layers = ld_.size();
    std::vector<double> g(params_.size(), 0.0);
    std::vector<double> delta{1.0};
    for (size_t i = layers; i-- > 0;) {
        std::vector<double> s(ld_[i]);
        for (size_t o = 0; o < ld_[i]; ++o) s[o] = delta[o] * sigmoid(f.pre[i][o]);
        double* gwx = g.data() + wx_off_[i];
        double* gb = g.data() + b_off_[i];
        for (size_t o = 0; o < ld_[i]; ++o) {
            double so = s[o];
            gb[o] += so;
            double* row = gwx + o * input_dim_;
            for (size_t j = 0; j < input_dim_; ++j) row[j] += so * x[j];
        }
        if (i > 0) {
            double* gwz = g.data() + wz_off_[i];
            const auto& z = f.act[i - 1];
            for (size_t o = 0; o < ld_[i]; ++o) {
                double so = s[o];
                double* row = gwz + o * ld_[i - 1];
                for (size_t j = 0; j < ld_[i - 1]; ++j) row[j] += so * z[j];
            }
            const double* wz = params_.data() + wz_off_[i];
            std::vector<double> next(ld_[i - 1], 0.0);
            for (size_t o = 0; o < ld_[i]; ++o) {
                const double* row = wz + o * ld_[i - 1];
                for (size_t j = 0; j < ld_[i - 1]; ++j) next[j] += s[o] * row[j];
            }
            delta = std::move(next);
        }
    }
    return g;
}

void Icnn::apply_param_step(std::span<const double> g, double lr) {
    if (g.size() != params_.size()) throw ShapeError("icnn gradient size mismatch");
    for (size_t i = 0; i < params_.size(); ++i) params_[i] -= lr * g[i];
}

void Icnn::project() {
    for (size_t i = 1; i < ld_.size(); ++i) {
        double* wz = params_.data() + wz_off_[i];
        size_t n = ld_[i] * ld_[i - 1];
        for (size_t k = 0; k < n; ++k)
            if (wz[k] < 0.0) wz[k] = 0.0;
    }
}

bool Icnn::propagation_weights_nonneg() const {
    for (size_t i = 1; i < ld_.size(); ++i) {
        const double* wz = params_.data() + wz_off_[i];
        size_t n = ld_[i] * ld_[i - 1];
        for (size_t k = 0; k < n; ++k)
            if (wz[k] < 0.0) return false;
    }
    return true;
}

crypto::Hash256 Icnn::digest() const {
    std::vector<uint8_t> buf;
    put_u64(buf, input_dim_);
    put_u32(buf, static_cast<uint32_t>(hidden_.size()));
    for (size_t d : hidden_) put_u64(buf, d);
    for (double v : params_) put_f64(buf, v);
    return crypto::sha256(buf);
}

}  // namespace fedrun::icnn
