// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ocdl/csc.hpp"
#include "ocdl/record.hpp"
#include "ocdl/sgd.hpp"
#include "ocdl/surrogate.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ocdl {

enum class Algorithm { sgd, surrogate };
enum class Domain { spatial, frequency };

struct TrainConfig {
    Algorithm algo = Algorithm::sgd;
    Domain domain = Domain::frequency;
    bool masked = false;
    double lambda = 0.1;
    Index num_filters = 64;
    Index kernel_rows = 12;
    Index kernel_cols = 12;
    StepSchedule step;
    /// Forgetting exponent of the surrogate learner.
    double p = 10.0;
    StopRule stop;
    int max_inner = 200;
    int epochs = 1;
    std::uint64_t seed = 0;
    /// Evaluate the test objective every this many steps; 0 disables it.
    int eval_every = 0;
    /// Sparse-coding settings for training; lambda is taken from the field above.
    CscSettings csc;
    /// Starting dictionary; when empty, initial_dictionary(M, Lr, Lc, seed) is used.
    std::optional<Dictionary> initial;
    /// Called after every dictionary update with the step index t and d(t).
    std::function<void(long, const Dictionary&)> on_step;

    /// Throws std::invalid_argument on out-of-range values and on
    /// combinations the learners do not support.
    void validate() const;
    Index filter_size() const { return kernel_rows * kernel_cols; }
};

/// Largest M * L for which the surrogate learner keeps a dense spatial Hessian.
inline constexpr Index kMaxSpatialHessianDim = 4096;

/// A training tile. An empty mask means every pixel is observed.
struct Sample {
    Signal signal;
    Mask mask;
};

struct TrainResult {
    Dictionary dictionary;
    std::vector<ConvergenceRecord> log;
    std::vector<std::string> warnings;
    /// Surrogate value F_mod(t)(d(t)) after each step; surrogate learner only.
    std::vector<double> surrogate_values;
};

/// i.i.d. standard normal taps projected onto the unit balls.
Dictionary initial_dictionary(Index m, Index kr, Index kc, std::uint64_t seed);

/// Projected SGD. All tiles must share one shape; `test` may be empty.
TrainResult train_sgd(const std::vector<Sample>& tiles, const TrainConfig& cfg, const std::vector<Signal>& test = {});

/// Surrogate-function learner with FISTA inner solves.
TrainResult train_surrogate(const std::vector<Sample>& tiles, const TrainConfig& cfg,
                            const std::vector<Signal>& test = {});

/// Dispatches on cfg.algo.
TrainResult train(const std::vector<Sample>& tiles, const TrainConfig& cfg, const std::vector<Signal>& test = {});

}  // namespace ocdl
