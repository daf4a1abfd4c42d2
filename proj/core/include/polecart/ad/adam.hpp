#pragma once

#include <cstdint>
#include <vector>

#include "polecart/ad/parameter_set.hpp"

namespace polecart::ad {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam with bias correction. Parameters are updated in insertion order and
/// their gradients are zeroed after each step.
class Adam {
public:
    explicit Adam(AdamConfig config = {}) : config_(config) {}

    /// One update over every parameter. Every parameter must carry a gradient
    /// (populated by backward); throws std::logic_error otherwise.
    void step(ParameterSet& params, double learning_rate);

    std::int64_t step_count() const { return step_count_; }

private:
    struct Moments {
        std::vector<double> m;
        std::vector<double> v;
    };

    AdamConfig config_;
    std::vector<Moments> moments_;  // indexed like the ParameterSet entries
    std::int64_t step_count_ = 0;
};

}  // namespace polecart::ad
