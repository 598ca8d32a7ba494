#pragma once

#include <cstdint>
#include <string>

#include "mcad/scheduler.hpp"
#include "mcad/synthetic.hpp"

namespace mcad::harness {

/// Run configuration, loaded from a flat `key = value` file with `#`
/// comments. Unknown keys are errors. The single seed drives data
/// generation (seed), model init (seed+1) and the batch partition (seed+2).
struct RunConfig {
    std::size_t input_size = 64;
    double learning_rate = 0.01;
    std::size_t batch_size = 16;
    std::size_t max_epochs = 150;
    std::uint64_t seed = 1;
    std::string mode = "rsl";  // "rsl" or "conventional"
    rsl::PiecewiseEpochMap map = rsl::PiecewiseEpochMap::defaults();
    bool early_stop = false;
    double early_stop_min_delta = 0.001;
    std::size_t early_stop_patience = 20;

    std::string data = "synthetic";  // "synthetic" or "manifest"
    std::string manifest_path;
    std::size_t synthetic_train_per_class = 200;
    std::size_t synthetic_val_per_class = 50;
    SyntheticSpec synthetic;

    void validate() const;
};

RunConfig load_config(const std::string& path);

/// Parse from text; `origin` names the source in error messages.
RunConfig parse_config_text(const std::string& text, const std::string& origin);

}  // namespace mcad::harness
