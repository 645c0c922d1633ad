#include "fd3m/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace fd3m {

void adam_step(AdamState& state, std::vector<ParamView> params, const ParamGradient& grad,
               double lr) {
    if (lr <= 0.0) throw std::invalid_argument("adam_step: learning rate must be positive");
    if (params.size() != grad.tensors.size())
        throw std::invalid_argument("adam_step: gradient not shape-congruent with parameters");
    if (!grad.all_finite()) throw std::invalid_argument("adam_step: non-finite gradient entries");

    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));

    for (std::size_t i = 0; i < params.size(); ++i) {
        const Eigen::MatrixXd& g = grad.tensors[i];
        Eigen::MatrixXd& m = state.m.tensors[i];
        Eigen::MatrixXd& v = state.v.tensors[i];
        if (m.size() != g.size())
            throw std::invalid_argument("adam_step: moment buffers not shape-congruent");
        m = state.beta1 * m + (1.0 - state.beta1) * g;
        v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseProduct(g);
        Eigen::Map<Eigen::ArrayXd> p(params[i].data, params[i].size);
        Eigen::Map<const Eigen::ArrayXd> mf(m.data(), m.size());
        Eigen::Map<const Eigen::ArrayXd> vf(v.data(), v.size());
        p -= lr * (mf / bc1) / ((vf / bc2).sqrt() + state.epsilon);
    }
}

double lr_at(const LrSchedule& schedule, long epoch) {
    const long steps = epoch / schedule.decay_every;
    return schedule.initial * std::pow(schedule.decay_rate, static_cast<double>(steps));
}

} // namespace fd3m
