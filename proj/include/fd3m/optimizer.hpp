#pragma once

#include <vector>

#include "fd3m/network.hpp"

namespace fd3m {

/// Adam accumulators, shape-congruent with the owning network's trainable
/// tensors. One state per network, confined to that network's trainer.
struct AdamState {
    ParamGradient m; // first moment
    ParamGradient v; // second moment
    long t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    template <class Net>
    static AdamState for_network(const Net& net) {
        AdamState s;
        s.m = zero_gradient(net);
        s.v = zero_gradient(net);
        return s;
    }
};

/// One Adam update with bias correction. Throws DivergedLossError (context
/// left to the caller via plain invalid_argument here) on non-finite
/// gradient entries.
void adam_step(AdamState& state, std::vector<ParamView> params, const ParamGradient& grad,
               double lr);

/// Exponentially decaying staircase:
/// lr(epoch) = initial * decay^floor(epoch / every).
struct LrSchedule {
    double initial = 0.01;
    double decay_rate = 0.9;
    long decay_every = 1000;
};

double lr_at(const LrSchedule& schedule, long epoch);

/// Epoch counter the schedule is evaluated against. Reset at the start of a
/// domain decomposition iteration when the run reinitializes its learning
/// rate; Adam moments are never reset.
struct ScheduleClock {
    long epoch = 0;

    void reset() { epoch = 0; }
    double lr(const LrSchedule& s) const { return lr_at(s, epoch); }
    void tick() { ++epoch; }
};

} // namespace fd3m
