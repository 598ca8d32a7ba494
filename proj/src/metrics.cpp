#include "mcad/metrics.hpp"

#include <cstdio>
#include <sstream>

#include "mcad/errors.hpp"

namespace mcad::harness {

const char* const kMetricsHeader = "epoch,train_error,val_error,remedial_epochs_total,update_passes,wall_clock_s";

std::string format_metrics_row(const MetricsRow& row) {
    char buf[192];
    std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f,%zu,%zu,%.3f\n", row.epoch, row.train_error,
                  row.val_error, row.remedial_epochs_total, row.update_passes, row.wall_clock_s);
    return buf;
}

MetricsRow metrics_row_from_epoch(const rsl::EpochRecord& rec) {
    MetricsRow row;
    row.epoch = rec.epoch;
    row.train_error = rec.train_error;
    row.val_error = rec.val_error;
    row.remedial_epochs_total = rec.remedial_epochs_total;
    row.update_passes = rec.update_passes;
    row.wall_clock_s = rec.wall_clock_s;
    return row;
}

MetricsWriter::MetricsWriter(const std::string& path) : os_(path, std::ios::trunc), path_(path) {
    if (!os_) throw IoError("cannot open metrics CSV for writing: " + path);
    os_ << kMetricsHeader << "\n";
    os_.flush();
}

void MetricsWriter::write(const MetricsRow& row) {
    os_ << format_metrics_row(row);
    os_.flush();
    if (!os_) throw IoError("metrics CSV write failed: " + path_);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_num(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (const std::exception&) {
        throw ParseError(where + ": bad numeric field \"" + v + "\"");
    }
}

}  // namespace

std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open metrics CSV: " + path);

    std::string line;
    if (!std::getline(is, line)) throw ParseError("metrics CSV is empty: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kMetricsHeader) {
        throw ParseError("metrics CSV " + path + ": header mismatch (expected \"" +
                         kMetricsHeader + "\")");
    }

    std::vector<MetricsRow> rows;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = "metrics CSV " + path + " line " + std::to_string(line_no);
        const auto f = split_fields(line);
        if (f.size() != 6) throw ParseError(where + ": expected 6 fields");
        MetricsRow row;
        row.epoch = static_cast<std::size_t>(parse_num(f[0], where));
        row.train_error = parse_num(f[1], where);
        row.val_error = parse_num(f[2], where);
        row.remedial_epochs_total = static_cast<std::size_t>(parse_num(f[3], where));
        row.update_passes = static_cast<std::size_t>(parse_num(f[4], where));
        row.wall_clock_s = parse_num(f[5], where);
        rows.push_back(row);
    }
    return rows;
}

bool metrics_equal_ignoring_wallclock(const std::string& path_a, const std::string& path_b) {
    std::ifstream a(path_a), b(path_b);
    if (!a) throw IoError("cannot open metrics CSV: " + path_a);
    if (!b) throw IoError("cannot open metrics CSV: " + path_b);
    std::string la, lb;
    for (;;) {
        const bool more_a = static_cast<bool>(std::getline(a, la));
        const bool more_b = static_cast<bool>(std::getline(b, lb));
        if (more_a != more_b) return false;
        if (!more_a) return true;
        const std::size_t ca = la.rfind(',');
        const std::size_t cb = lb.rfind(',');
        if (la.compare(0, ca, lb, 0, cb) != 0) return false;
    }
}

RunSummary summarize_run(const std::vector<MetricsRow>& rows, double threshold) {
    if (rows.empty()) throw ParseError("metrics CSV has no data rows");
    RunSummary s;
    s.epochs = rows.size();
    for (const auto& r : rows) {
        if (!s.epochs_to_threshold && r.train_error <= threshold) {
            s.epochs_to_threshold = r.epoch;
        }
    }
    s.final_train_error = rows.back().train_error;
    s.final_val_error = rows.back().val_error;
    s.total_update_passes = rows.back().update_passes;
    return s;
}

CompareSummary compare_runs(const std::string& csv_a, const std::string& csv_b, double threshold) {
    CompareSummary s;
    s.threshold = threshold;
    s.a = summarize_run(read_metrics_csv(csv_a), threshold);
    s.b = summarize_run(read_metrics_csv(csv_b), threshold);
    return s;
}

std::string render_compare(const CompareSummary& s, const std::string& name_a,
                           const std::string& name_b) {
    auto fmt_epoch = [](const std::optional<std::size_t>& e) {
        return e ? std::to_string(*e) : std::string("not reached");
    };
    std::ostringstream os;
    os << "threshold: train_error <= " << s.threshold << "\n";
    auto row = [&](const std::string& name, const RunSummary& r) {
        os << name << ": epochs_to_threshold=" << fmt_epoch(r.epochs_to_threshold)
           << " final_train_error=" << r.final_train_error
           << " final_val_error=" << r.final_val_error
           << " update_passes=" << r.total_update_passes << " epochs=" << r.epochs << "\n";
    };
    row(name_a, s.a);
    row(name_b, s.b);
    return os.str();
}

}  // namespace mcad::harness
