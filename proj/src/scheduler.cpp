#include "mcad/scheduler.hpp"

#include <chrono>
#include <numeric>
#include <string>

#include "mcad/errors.hpp"
#include "mcad/rng.hpp"

namespace mcad::rsl {

BatchPartition partition_batches(std::size_t dataset_size, std::size_t batch_size,
                                 std::uint64_t seed) {
    if (dataset_size < 1) throw DomainError("partition_batches: empty dataset");
    if (batch_size < 1) throw DomainError("partition_batches: batch size must be >= 1");

    std::vector<std::size_t> indices(dataset_size);
    std::iota(indices.begin(), indices.end(), 0);
    Rng rng(seed);
    rng.shuffle(indices);

    BatchPartition part;
    part.seed = seed;
    for (std::size_t start = 0; start < dataset_size; start += batch_size) {
        const std::size_t end = std::min(start + batch_size, dataset_size);
        part.batches.emplace_back(indices.begin() + static_cast<std::ptrdiff_t>(start),
                                  indices.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return part;
}

double compute_threshold(const std::vector<double>& batch_errors) {
    if (batch_errors.empty()) throw DomainError("compute_threshold: no batch errors");
    double sum = 0.0;
    for (double e : batch_errors) sum += e;
    return sum / static_cast<double>(batch_errors.size());
}

void PiecewiseEpochMap::validate() const {
    if (epoch_counts.size() != breakpoints.size() + 1) {
        throw ConfigError("piecewise map needs one epoch count per interval (breakpoints+1)");
    }
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (breakpoints[i] <= 0.0) throw ConfigError("piecewise map breakpoints must be positive");
        if (i > 0 && breakpoints[i] <= breakpoints[i - 1]) {
            throw ConfigError("piecewise map breakpoints must be strictly ascending");
        }
    }
    for (std::size_t i = 0; i < epoch_counts.size(); ++i) {
        if (epoch_counts[i] < 0) throw ConfigError("piecewise map epoch counts must be >= 0");
        if (i > 0 && epoch_counts[i] < epoch_counts[i - 1]) {
            throw ConfigError("piecewise map epoch counts must be non-decreasing");
        }
    }
}

PiecewiseEpochMap PiecewiseEpochMap::defaults() {
    PiecewiseEpochMap m;
    m.breakpoints = {0.05, 0.15};
    m.epoch_counts = {1, 2, 3};
    return m;
}

PiecewiseEpochMap PiecewiseEpochMap::zero() {
    PiecewiseEpochMap m;
    m.breakpoints = {};
    m.epoch_counts = {0};
    return m;
}

int remedial_epochs(double er, double c, const PiecewiseEpochMap& map) {
    if (er < 0.0 || er > 1.0 || c < 0.0 || c > 1.0) {
        throw DomainError("remedial_epochs: error rates must lie in [0,1]");
    }
    map.validate();
    const double d = er - c;
    if (d <= 0.0) return 0;
    for (std::size_t k = 0; k < map.breakpoints.size(); ++k) {
        if (d <= map.breakpoints[k]) return map.epoch_counts[k];
    }
    return map.epoch_counts.back();
}

double evaluate_dataset(const net::Model& model, const Dataset& data) {
    if (data.size() == 0) throw DomainError("evaluate: empty dataset");
    if (data.images.size() != data.labels.size()) {
        throw DomainError("evaluate: image/label count mismatch");
    }
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (net::predict(model, data.images[i]) != data.labels[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(data.size());
}

namespace {

struct BatchView {
    std::vector<Tensor> images;
    std::vector<int> labels;
};

BatchView gather(const Dataset& data, const std::vector<std::size_t>& indices) {
    BatchView view;
    view.images.reserve(indices.size());
    view.labels.reserve(indices.size());
    for (std::size_t idx : indices) {
        if (idx >= data.size()) throw DomainError("partition index out of range");
        view.images.push_back(data.images[idx]);
        view.labels.push_back(data.labels[idx]);
    }
    return view;
}

RslRunLog run_training(net::Model& model, const Dataset& train, const Dataset* validation,
                       const BatchPartition& partition, const PiecewiseEpochMap& map,
                       double learning_rate, const Termination& term, bool remediate,
                       const EpochCallback& on_epoch) {
    if (train.size() == 0) throw DomainError("training dataset is empty");
    if (train.images.size() != train.labels.size()) {
        throw DomainError("training dataset image/label count mismatch");
    }
    if (partition.batches.empty()) throw DomainError("partition has no batches");
    map.validate();

    const std::size_t n_batches = partition.batch_count();
    std::size_t update_passes = 0;
    std::size_t remedial_total = 0;

    RslRunLog log;
    const auto t_start = std::chrono::steady_clock::now();
    double best_error = 2.0;
    std::size_t epochs_since_improvement = 0;

    for (std::size_t epoch = 1; epoch <= term.max_epochs; ++epoch) {
        EpochRecord rec;
        rec.epoch = epoch;
        rec.batch_errors.resize(n_batches, 0.0);
        rec.remedial.assign(n_batches, 0);

        // Main pass (one step per batch, fixed partition order).
        std::size_t misclassified = 0;
        double loss_sum = 0.0;
        for (std::size_t b = 0; b < n_batches; ++b) {
            const BatchView view = gather(train, partition.batches[b]);
            const net::StepStats stats =
                net::train_step(model, view.images, view.labels, learning_rate);
            rec.batch_errors[b] = stats.error_rate;
            misclassified += stats.misclassified;
            loss_sum += stats.mean_loss * static_cast<double>(view.images.size());
            ++update_passes;
        }
        rec.threshold = compute_threshold(rec.batch_errors);
        rec.train_error = static_cast<double>(misclassified) / static_cast<double>(train.size());
        rec.mean_loss = loss_sum / static_cast<double>(train.size());

        // Remedial phase: batches whose main-pass error strictly exceeds C
        // get extra steps immediately, in partition order.
        if (remediate) {
            for (std::size_t b = 0; b < n_batches; ++b) {
                if (rec.batch_errors[b] > rec.threshold) {
                    const int extra = remedial_epochs(rec.batch_errors[b], rec.threshold, map);
                    rec.remedial[b] = extra;
                    if (extra > 0) {
                        const BatchView view = gather(train, partition.batches[b]);
                        for (int r = 0; r < extra; ++r) {
                            net::train_step(model, view.images, view.labels, learning_rate);
                            ++update_passes;
                        }
                        remedial_total += static_cast<std::size_t>(extra);
                    }
                }
            }
        }

        rec.update_passes = update_passes;
        rec.remedial_epochs_total = remedial_total;
        rec.val_error = validation ? evaluate_dataset(model, *validation) : -1.0;
        rec.wall_clock_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

        if (on_epoch) on_epoch(rec);
        log.epochs.push_back(std::move(rec));

        if (term.early_stop) {
            const double err = log.epochs.back().train_error;
            if (err < best_error - term.min_improvement) {
                best_error = err;
                epochs_since_improvement = 0;
            } else {
                ++epochs_since_improvement;
                if (epochs_since_improvement >= term.patience) break;
            }
        }
    }
    return log;
}

}  // namespace

RslRunLog rsl_train(net::Model& model, const Dataset& train, const Dataset* validation,
                    const BatchPartition& partition, const PiecewiseEpochMap& map,
                    double learning_rate, const Termination& term, const EpochCallback& on_epoch) {
    return run_training(model, train, validation, partition, map, learning_rate, term, true,
                        on_epoch);
}

RslRunLog conventional_train(net::Model& model, const Dataset& train, const Dataset* validation,
                             const BatchPartition& partition, double learning_rate,
                             const Termination& term, const EpochCallback& on_epoch) {
    return run_training(model, train, validation, partition, PiecewiseEpochMap::zero(),
                        learning_rate, term, false, on_epoch);
}

}  // namespace mcad::rsl
