#pragma once

#include <string>

#include "mcad/config.hpp"
#include "mcad/metrics.hpp"
#include "mcad/network.hpp"
#include "mcad/scheduler.hpp"

namespace mcad::harness {

struct DataBundle {
    rsl::Dataset train;
    rsl::Dataset val;
};

/// Builds the in-memory train/val datasets for a config: synthetic
/// generation or manifest loading, then the full preprocessing pipeline per
/// image. Deterministic in the config seed.
DataBundle prepare_data(const RunConfig& cfg);

struct ExperimentResult {
    rsl::RslRunLog log;
    net::Model model;
    std::string metrics_path;
    std::string checkpoint_path;
    std::string build_log;  // propagated layer shapes
};

/// Table 2 end to end: preprocess -> build -> train (mode-selected) ->
/// per-epoch metrics row -> final checkpoint. metrics.csv and model.ckpt
/// land in out_dir. Errors carry a stage tag in the message.
ExperimentResult run_experiment(const RunConfig& cfg, const std::string& out_dir);

/// Error rate of a checkpointed model over one split of a manifest
/// (preprocessing included); the spec-level evaluate operation.
double evaluate_manifest(const net::Model& model, const std::string& manifest_path,
                         const std::string& split);

}  // namespace mcad::harness
