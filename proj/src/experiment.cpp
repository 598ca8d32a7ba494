#include "mcad/experiment.hpp"

#include <filesystem>

#include "mcad/checkpoint.hpp"
#include "mcad/errors.hpp"
#include "mcad/preprocess.hpp"

namespace fs = std::filesystem;

namespace mcad::harness {

namespace {

template <typename F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const NumericError& e) {
        throw NumericError(std::string("[") + name + "] " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("[") + name + "] " + e.what());
    } catch (const ParseError& e) {
        throw ParseError(std::string("[") + name + "] " + e.what());
    } catch (const IoError& e) {
        throw IoError(std::string("[") + name + "] " + e.what());
    } catch (const DomainError& e) {
        throw DomainError(std::string("[") + name + "] " + e.what());
    } catch (const ShapeError& e) {
        throw ShapeError(std::string("[") + name + "] " + e.what());
    }
}

void append_sample(rsl::Dataset& ds, Tensor image, int label) {
    ds.images.push_back(std::move(image));
    ds.labels.push_back(label);
}

}  // namespace

DataBundle prepare_data(const RunConfig& cfg) {
    DataBundle bundle;
    const std::size_t target = cfg.input_size;

    if (cfg.data == "synthetic") {
        SyntheticSpec spec = cfg.synthetic;
        spec.seed = cfg.seed;
        const auto samples =
            generate_synthetic(spec, cfg.synthetic_train_per_class, cfg.synthetic_val_per_class);
        for (const auto& s : samples) {
            Tensor t = img::preprocess_pipeline(s.image, target, target);
            append_sample(s.split == "train" ? bundle.train : bundle.val, std::move(t), s.label);
        }
    } else {
        const DatasetManifest manifest = load_manifest(cfg.manifest_path);
        for (const auto& e : manifest.entries) {
            const img::GrayImage image = load_entry_image(manifest, e);
            Tensor t = img::preprocess_pipeline(image, target, target);
            append_sample(e.split == "train" ? bundle.train : bundle.val, std::move(t), e.label);
        }
    }

    if (bundle.train.size() == 0) throw DomainError("no training samples");
    if (bundle.val.size() == 0) throw DomainError("no validation samples");
    return bundle;
}

ExperimentResult run_experiment(const RunConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    fs::create_directories(out_dir);

    DataBundle data = stage("data", [&] { return prepare_data(cfg); });

    const net::NetworkSpec spec = stage("build", [&] {
        return net::build_table1_network(cfg.input_size, cfg.input_size);
    });
    net::Model model = stage("init", [&] { return net::Model::init(spec, cfg.seed + 1); });

    const rsl::BatchPartition partition = stage("partition", [&] {
        return rsl::partition_batches(data.train.size(), cfg.batch_size, cfg.seed + 2);
    });

    rsl::Termination term;
    term.max_epochs = cfg.max_epochs;
    term.early_stop = cfg.early_stop;
    term.min_improvement = cfg.early_stop_min_delta;
    term.patience = cfg.early_stop_patience;

    ExperimentResult result;
    result.build_log = spec.describe();
    result.metrics_path = (fs::path(out_dir) / "metrics.csv").string();
    result.checkpoint_path = (fs::path(out_dir) / "model.ckpt").string();

    MetricsWriter writer(result.metrics_path);
    const auto on_epoch = [&writer](const rsl::EpochRecord& rec) {
        writer.write(metrics_row_from_epoch(rec));
    };

    result.log = stage("train", [&] {
        if (cfg.mode == "rsl") {
            return rsl::rsl_train(model, data.train, &data.val, partition, cfg.map,
                                  cfg.learning_rate, term, on_epoch);
        }
        return rsl::conventional_train(model, data.train, &data.val, partition, cfg.learning_rate,
                                       term, on_epoch);
    });

    stage("checkpoint", [&] { net::save_model(model, result.checkpoint_path); });
    result.model = std::move(model);
    return result;
}

double evaluate_manifest(const net::Model& model, const std::string& manifest_path,
                         const std::string& split) {
    const DatasetManifest manifest = load_manifest(manifest_path);
    const auto entries = split.empty() ? manifest.entries : manifest.split(split);
    if (entries.empty()) {
        throw DomainError("manifest " + manifest_path + " has no entries for split \"" + split +
                          "\"");
    }
    rsl::Dataset ds;
    for (const auto& e : entries) {
        const img::GrayImage image = load_entry_image(manifest, e);
        append_sample(ds, img::preprocess_pipeline(image, model.spec.input_h, model.spec.input_w),
                      e.label);
    }
    return rsl::evaluate_dataset(model, ds);
}

}  // namespace mcad::harness
