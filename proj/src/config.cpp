#include "mcad/config.hpp"

#include <fstream>
#include <sstream>

#include "mcad/errors.hpp"

namespace mcad::harness {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

double parse_double(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(where + ": not a number: \"" + v + "\"");
    }
}

std::uint64_t parse_u64(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        const unsigned long long u = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return u;
    } catch (const std::exception&) {
        throw ConfigError(where + ": not a non-negative integer: \"" + v + "\"");
    }
}

bool parse_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(where + ": not a boolean: \"" + v + "\"");
}

std::pair<double, double> parse_range(const std::string& v, const std::string& where) {
    const auto parts = split_list(v);
    if (parts.size() != 2) throw ConfigError(where + ": expected \"lo, hi\", got \"" + v + "\"");
    return {parse_double(parts[0], where), parse_double(parts[1], where)};
}

}  // namespace

void RunConfig::validate() const {
    if (input_size < 32) throw ConfigError("input_size must be >= 32 for the 10-row stack");
    if (learning_rate <= 0) throw ConfigError("learning_rate must be > 0");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
    if (mode != "rsl" && mode != "conventional") {
        throw ConfigError("mode must be rsl or conventional, got \"" + mode + "\"");
    }
    if (data != "synthetic" && data != "manifest") {
        throw ConfigError("data must be synthetic or manifest, got \"" + data + "\"");
    }
    if (data == "manifest" && manifest_path.empty()) {
        throw ConfigError("data = manifest requires manifest = <path>");
    }
    if (data == "synthetic" && synthetic_train_per_class < 1) {
        throw ConfigError("synthetic_train_per_class must be >= 1");
    }
    if (early_stop_min_delta < 0) throw ConfigError("early_stop_min_delta must be >= 0");
    map.validate();
    synthetic.validate();
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    bool saw_breakpoints = false, saw_epochs = false;
    std::vector<double> breakpoints;
    std::vector<int> epoch_counts;

    std::istringstream is(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::string where = origin + " line " + std::to_string(line_no);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        if (value.empty()) throw ConfigError(where + ": empty value for " + key);

        if (key == "input_size") {
            cfg.input_size = parse_u64(value, where);
        } else if (key == "learning_rate") {
            cfg.learning_rate = parse_double(value, where);
        } else if (key == "batch_size") {
            cfg.batch_size = parse_u64(value, where);
        } else if (key == "max_epochs") {
            cfg.max_epochs = parse_u64(value, where);
        } else if (key == "seed") {
            cfg.seed = parse_u64(value, where);
        } else if (key == "mode") {
            cfg.mode = value;
        } else if (key == "map_breakpoints") {
            breakpoints.clear();
            for (const auto& p : split_list(value)) breakpoints.push_back(parse_double(p, where));
            saw_breakpoints = true;
        } else if (key == "map_epochs") {
            epoch_counts.clear();
            for (const auto& p : split_list(value)) {
                epoch_counts.push_back(static_cast<int>(parse_u64(p, where)));
            }
            saw_epochs = true;
        } else if (key == "early_stop") {
            cfg.early_stop = parse_bool(value, where);
        } else if (key == "early_stop_min_delta") {
            cfg.early_stop_min_delta = parse_double(value, where);
        } else if (key == "early_stop_patience") {
            cfg.early_stop_patience = parse_u64(value, where);
        } else if (key == "data") {
            cfg.data = value;
        } else if (key == "manifest") {
            cfg.manifest_path = value;
        } else if (key == "synthetic_train_per_class") {
            cfg.synthetic_train_per_class = parse_u64(value, where);
        } else if (key == "synthetic_val_per_class") {
            cfg.synthetic_val_per_class = parse_u64(value, where);
        } else if (key == "synthetic_image_size") {
            cfg.synthetic.image_size = parse_u64(value, where);
        } else if (key == "mass_intensity") {
            std::tie(cfg.synthetic.mass_intensity_min, cfg.synthetic.mass_intensity_max) =
                parse_range(value, where);
        } else if (key == "mass_radius") {
            std::tie(cfg.synthetic.mass_radius_min, cfg.synthetic.mass_radius_max) =
                parse_range(value, where);
        } else if (key == "speckle_count") {
            const auto [lo, hi] = parse_range(value, where);
            cfg.synthetic.speckle_min = static_cast<int>(lo);
            cfg.synthetic.speckle_max = static_cast<int>(hi);
        } else if (key == "background_noise") {
            cfg.synthetic.background_noise = parse_double(value, where);
        } else {
            throw ConfigError(where + ": unknown key \"" + key + "\"");
        }
    }

    if (saw_breakpoints != saw_epochs) {
        throw ConfigError(origin + ": map_breakpoints and map_epochs must be given together");
    }
    if (saw_breakpoints) {
        cfg.map.breakpoints = std::move(breakpoints);
        cfg.map.epoch_counts = std::move(epoch_counts);
    }
    cfg.synthetic.seed = cfg.seed;
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str(), path);
}

}  // namespace mcad::harness
