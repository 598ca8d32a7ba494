#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mcad/network.hpp"
#include "mcad/tensor.hpp"

namespace mcad::rsl {

/// Fixed random partition of sample indices into batches. Created once per
/// run and reused every epoch.
struct BatchPartition {
    std::vector<std::vector<std::size_t>> batches;
    std::uint64_t seed = 0;

    std::size_t batch_count() const { return batches.size(); }
};

/// Seeded shuffle of 0..dataset_size-1 chunked into batches of batch_size;
/// the last batch may be smaller. A batch_size beyond the dataset yields a
/// single batch.
BatchPartition partition_batches(std::size_t dataset_size, std::size_t batch_size,
                                 std::uint64_t seed);

/// Mean of the per-batch error rates: the remediation threshold C.
double compute_threshold(const std::vector<double>& batch_errors);

/// Maps the error excess d = Er - C to a remedial epoch count. d <= 0 maps
/// to 0; interval (breakpoints[k-1], breakpoints[k]] maps to epoch_counts[k];
/// beyond the last breakpoint maps to epoch_counts.back().
struct PiecewiseEpochMap {
    std::vector<double> breakpoints;  // strictly ascending, positive
    std::vector<int> epoch_counts;    // breakpoints.size()+1 entries, non-negative, non-decreasing

    void validate() const;

    /// d <= 0.05 -> 1, <= 0.15 -> 2, above -> 3.
    static PiecewiseEpochMap defaults();
    /// Every excess maps to 0 remedial epochs; makes the scheduler a no-op.
    static PiecewiseEpochMap zero();

    bool operator==(const PiecewiseEpochMap&) const = default;
};

int remedial_epochs(double er, double c, const PiecewiseEpochMap& map);

/// In-memory dataset: preprocessed image tensors plus binary labels.
struct Dataset {
    std::vector<Tensor> images;
    std::vector<int> labels;

    std::size_t size() const { return images.size(); }
};

/// Fraction of samples misclassified by predict(); order-independent.
double evaluate_dataset(const net::Model& model, const Dataset& data);

struct Termination {
    std::size_t max_epochs = 150;
    bool early_stop = false;
    double min_improvement = 0.001;  // on training error
    std::size_t patience = 20;       // epochs without improvement
};

/// Everything observable about one epoch; backs the metrics CSV and the
/// scheduler-correctness checks.
struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    std::vector<double> batch_errors;
    double threshold = 0.0;
    std::vector<int> remedial;               // per batch; nonzero only when Er > C
    std::size_t update_passes = 0;           // cumulative train_step count
    std::size_t remedial_epochs_total = 0;   // cumulative assigned remedial epochs
    double train_error = 0.0;                // sample-weighted main-pass error
    double val_error = -1.0;                 // -1 when no validation set
    double mean_loss = 0.0;
    double wall_clock_s = 0.0;               // cumulative, informational only
};

struct RslRunLog {
    std::vector<EpochRecord> epochs;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Reinforcement-sample-learning loop. Per epoch: one train_step per batch
/// over the whole partition; threshold C = mean of the main-pass batch
/// errors; every batch whose error strictly exceeds C immediately receives
/// remedial_epochs() extra train_steps on that batch alone; repeat until
/// termination.
RslRunLog rsl_train(net::Model& model, const Dataset& train, const Dataset* validation,
                    const BatchPartition& partition, const PiecewiseEpochMap& map,
                    double learning_rate, const Termination& term,
                    const EpochCallback& on_epoch = {});

/// The conventional baseline: identical loop with the remedial phase
/// removed. With the all-zero map, rsl_train matches this trajectory
/// step for step.
RslRunLog conventional_train(net::Model& model, const Dataset& train, const Dataset* validation,
                             const BatchPartition& partition, double learning_rate,
                             const Termination& term, const EpochCallback& on_epoch = {});

}  // namespace mcad::rsl
