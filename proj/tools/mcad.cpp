// mcad: synthetic data generation, preprocessing, training, evaluation and
// run comparison for the breast-image CNN pipeline.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mcad/checkpoint.hpp"
#include "mcad/errors.hpp"
#include "mcad/experiment.hpp"
#include "mcad/kernels.hpp"
#include "mcad/preprocess.hpp"

namespace fs = std::filesystem;
using namespace mcad;

namespace {

int cmd_generate(const std::string& out_dir, const std::string& config_path, std::uint64_t seed,
                 bool seed_given, std::size_t train_per_class, std::size_t val_per_class) {
    harness::SyntheticSpec spec;
    if (!config_path.empty()) {
        const harness::RunConfig cfg = harness::load_config(config_path);
        spec = cfg.synthetic;
        train_per_class = cfg.synthetic_train_per_class;
        val_per_class = cfg.synthetic_val_per_class;
        spec.seed = cfg.seed;
    }
    if (seed_given) spec.seed = seed;

    const auto samples = harness::generate_synthetic(spec, train_per_class, val_per_class);
    const auto manifest = harness::write_synthetic(samples, out_dir);
    std::cout << "wrote " << manifest.entries.size() << " images + masks + manifest.csv to "
              << out_dir << "\n";
    return 0;
}

int cmd_preprocess(const std::string& manifest_path, const std::string& out_dir,
                   std::size_t size) {
    const harness::DatasetManifest manifest = harness::load_manifest(manifest_path);
    fs::create_directories(out_dir);
    std::size_t n = 0;
    for (const auto& e : manifest.entries) {
        const img::GrayImage image = harness::load_entry_image(manifest, e);
        const Tensor t = img::preprocess_pipeline(image, size, size);

        img::GrayImage crop = img::GrayImage::blank(size, size);
        for (std::size_t i = 0; i < crop.pixels.size(); ++i) {
            const double v = t[i] * 255.0;
            crop.pixels[i] = static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v + 0.5));
        }
        const std::string stem = fs::path(e.path).stem().string();
        img::write_pgm(crop, (fs::path(out_dir) / (stem + ".crop.pgm")).string());
        ++n;
    }
    std::cout << "wrote " << n << " normalized crops to " << out_dir << "\n";
    return 0;
}

int cmd_train(const std::string& config_path, const std::string& out_dir, std::uint64_t seed,
              bool seed_given) {
    harness::RunConfig cfg = harness::load_config(config_path);
    if (seed_given) {
        cfg.seed = seed;
        cfg.synthetic.seed = seed;
    }

    std::cerr << "network:\n" << net::build_table1_network(cfg.input_size, cfg.input_size).describe();
    std::cerr << "kernels: " << kern::backend_name(kern::active_backend()) << "\n";

    const auto result = harness::run_experiment(cfg, out_dir);
    const auto& last = result.log.epochs.back();
    std::cout << "mode=" << cfg.mode << " epochs=" << result.log.epochs.size()
              << " train_error=" << last.train_error << " val_error=" << last.val_error
              << " update_passes=" << last.update_passes << "\n";
    std::cout << "metrics: " << result.metrics_path << "\n";
    std::cout << "checkpoint: " << result.checkpoint_path << "\n";
    return 0;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& manifest_path,
             const std::string& split) {
    const net::Model model = net::load_model(checkpoint_path);
    const double err = harness::evaluate_manifest(model, manifest_path, split);
    std::cout << "error_rate=" << err << "\n";
    return 0;
}

int cmd_compare(const std::string& csv_a, const std::string& csv_b, double threshold) {
    const auto summary = harness::compare_runs(csv_a, csv_b, threshold);
    std::cout << harness::render_compare(summary, csv_a, csv_b);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"breast-image CNN training engine"};
    app.require_subcommand(1);

    std::string kernels_choice = "auto";
    app.add_option("--kernels", kernels_choice, "kernel backend: scalar|avx2|avx512|auto");

    std::string out_dir = "out";
    std::string config_path;
    std::string manifest_path;
    std::string checkpoint_path;
    std::string split = "val";
    std::string csv_a, csv_b;
    std::uint64_t seed = 1;
    std::size_t count = 200, val_count = 50, size = 64;
    double threshold = 0.2;

    auto* generate = app.add_subcommand("generate", "write a synthetic PGM dataset + manifest");
    generate->add_option("--out", out_dir, "output directory")->required();
    generate->add_option("--config", config_path, "run config supplying the synthetic spec");
    auto* gen_seed = generate->add_option("--seed", seed, "generator seed");
    generate->add_option("--count", count, "training images per class");
    generate->add_option("--val-count", val_count, "validation images per class");

    auto* preprocess = app.add_subcommand("preprocess", "run the pipeline, emit PGM crops");
    preprocess->add_option("--manifest", manifest_path, "dataset manifest CSV")->required();
    preprocess->add_option("--out", out_dir, "output directory")->required();
    preprocess->add_option("--size", size, "normalized crop size");

    auto* train = app.add_subcommand("train", "run a training experiment");
    train->add_option("--config", config_path, "run config file")->required();
    train->add_option("--out", out_dir, "output directory (metrics.csv, model.ckpt)");
    auto* train_seed = train->add_option("--seed", seed, "override the config seed");

    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint against a manifest split");
    eval->add_option("--checkpoint", checkpoint_path, "model checkpoint")->required();
    eval->add_option("--manifest", manifest_path, "dataset manifest CSV")->required();
    eval->add_option("--split", split, "train|val (empty for all)");

    auto* compare = app.add_subcommand("compare", "compare two metrics CSVs");
    compare->add_option("csv_a", csv_a, "first metrics CSV")->required();
    compare->add_option("csv_b", csv_b, "second metrics CSV")->required();
    compare->add_option("--threshold", threshold, "train-error threshold for epochs-to-reach");

    CLI11_PARSE(app, argc, argv);

    try {
        if (const char* env = std::getenv("MCAD_KERNELS"); env && kernels_choice == "auto") {
            kernels_choice = env;
        }
        kern::select_backend_by_name(kernels_choice);

        if (generate->parsed()) {
            return cmd_generate(out_dir, config_path, seed, !gen_seed->empty(), count, val_count);
        }
        if (preprocess->parsed()) return cmd_preprocess(manifest_path, out_dir, size);
        if (train->parsed()) return cmd_train(config_path, out_dir, seed, !train_seed->empty());
        if (eval->parsed()) return cmd_eval(checkpoint_path, manifest_path, split);
        if (compare->parsed()) return cmd_compare(csv_a, csv_b, threshold);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ShapeError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
