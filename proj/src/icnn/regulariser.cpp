#include "fedrun/icnn/regulariser.hpp"

namespace fedrun::icnn {

static void check_dims(const nn::ParamVector& theta, const nn::ParamVector& theta_g,
                       const Icnn& psi) {
    theta.require_same_layout(theta_g);
    if (psi.input_dim() != theta.size())
        throw ShapeError("icnn input_dim does not match parameter count");
}

double eval_regulariser(const nn::ParamVector& theta, const nn::ParamVector& theta_g,
                        const Icnn& psi, const RegulariserConfig& cfg) {
    check_dims(theta, theta_g, psi);
    std::vector<double> d = theta.diff_as_double(theta_g);
    double r = psi.eval(d);
    r += cfg.alpha * theta.squared_distance(theta_g);
    r += cfg.epsilon * (theta.squared_norm() + theta_g.squared_norm());
    return r;
}

std::vector<double> grad_regulariser_theta_dense(const nn::ParamVector& theta,
                                                 const nn::ParamVector& theta_g, const Icnn& psi,
                                                 const RegulariserConfig& cfg) {
    check_dims(theta, theta_g, psi);
    std::vector<double> d = theta.diff_as_double(theta_g);
    std::vector<double> g = psi.grad_input(d);
    for (size_t i = 0; i < g.size(); ++i)
        g[i] += 2.0 * cfg.alpha * d[i] + 2.0 * cfg.epsilon * static_cast<double>(theta.values[i]);
    return g;
}

nn::ParamVector grad_regulariser_theta(const nn::ParamVector& theta,
                                       const nn::ParamVector& theta_g, const Icnn& psi,
                                       const RegulariserConfig& cfg) {
    std::vector<double> g = grad_regulariser_theta_dense(theta, theta_g, psi, cfg);
    std::vector<float> out(g.size());
    for (size_t i = 0; i < g.size(); ++i) out[i] = static_cast<float>(g[i]);
    return nn::ParamVector(theta.layout, std::move(out));
}

void server_psi_step(Icnn& psi, std::span<const WeightedTheta> updates,
                     const nn::ParamVector& theta_g, const RegulariserConfig& cfg) {
    if (updates.empty()) throw ConfigError("server_psi_step: no client updates");
    for (const auto& u : updates) check_dims(*u.theta, theta_g, psi);

    for (size_t step = 0; step < cfg.icnn_steps; ++step) {
        std::vector<double> g(psi.params().size(), 0.0);
        for (const auto& u : updates) {
            std::vector<double> d = u.theta->diff_as_double(theta_g);
            std::vector<double> gk = psi.grad_params(d);
            for (size_t i = 0; i < g.size(); ++i) g[i] += u.weight * gk[i];
        }
        psi.apply_param_step(g, cfg.icnn_lr);
        psi.project();
    }
}

}  // namespace fedrun::icnn
