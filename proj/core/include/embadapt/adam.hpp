#pragma once

#include "embadapt/dense_net.hpp"

#include <cstdint>

namespace embadapt {

struct AdamParams {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adam moment accumulators for one DenseNet, with bias correction.
class AdamState {
public:
    explicit AdamState(const DenseNet& net, AdamParams params = {});

    /// Applies one update with step size `learning_rate` and increments the
    /// step counter. Throws DivergenceError on non-finite gradients (the
    /// network is left untouched) and ShapeError on layout mismatch.
    void step(DenseNet& net, const ParamGradients& grads, double learning_rate);

    std::uint64_t step_count() const noexcept { return steps_; }
    const AdamParams& params() const noexcept { return params_; }
    const ParamGradients& first_moment() const noexcept { return m_; }
    const ParamGradients& second_moment() const noexcept { return v_; }

private:
    AdamParams params_;
    ParamGradients m_;
    ParamGradients v_;
    std::uint64_t steps_ = 0;
};

}  // namespace embadapt
