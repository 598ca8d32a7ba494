#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "mcad/scheduler.hpp"

namespace mcad::harness {

/// One metrics CSV row. Schema (exact):
///   epoch,train_error,val_error,remedial_epochs_total,update_passes,wall_clock_s
/// Errors use 6 decimals, wall clock 3; LF line endings. The wall-clock
/// column is informational and excluded from determinism comparisons.
struct MetricsRow {
    std::size_t epoch = 0;
    double train_error = 0.0;
    double val_error = 0.0;
    std::size_t remedial_epochs_total = 0;
    std::size_t update_passes = 0;
    double wall_clock_s = 0.0;
};

extern const char* const kMetricsHeader;

std::string format_metrics_row(const MetricsRow& row);
MetricsRow metrics_row_from_epoch(const rsl::EpochRecord& rec);

/// Streaming writer: header on open, one flushed row per epoch.
class MetricsWriter {
public:
    explicit MetricsWriter(const std::string& path);
    void write(const MetricsRow& row);

private:
    std::ofstream os_;
    std::string path_;
};

std::vector<MetricsRow> read_metrics_csv(const std::string& path);

/// Line-by-line equality with the trailing wall_clock_s field ignored.
bool metrics_equal_ignoring_wallclock(const std::string& path_a, const std::string& path_b);

struct RunSummary {
    std::optional<std::size_t> epochs_to_threshold;  // first epoch with train_error <= threshold
    double final_train_error = 0.0;
    double final_val_error = 0.0;
    std::size_t total_update_passes = 0;
    std::size_t epochs = 0;
};

struct CompareSummary {
    double threshold = 0.0;
    RunSummary a;
    RunSummary b;
};

RunSummary summarize_run(const std::vector<MetricsRow>& rows, double threshold);
CompareSummary compare_runs(const std::string& csv_a, const std::string& csv_b, double threshold);
std::string render_compare(const CompareSummary& s, const std::string& name_a,
                           const std::string& name_b);

}  // namespace mcad::harness
