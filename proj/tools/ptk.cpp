// ptk: condition-monitoring and prognostics toolkit CLI.
//
// Subcommands cover the full pipeline: synthetic data generation, image
// and scaleogram dataset construction, feature extraction, feature
// fitness scoring, network training/evaluation, RUL prediction and CSV
// plotting. All randomness flows from --seed; identical invocations
// produce identical outputs.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ptk/cwt.hpp"
#include "ptk/evalmetrics.hpp"
#include "ptk/features.hpp"
#include "ptk/fitness.hpp"
#include "ptk/io.hpp"
#include "ptk/nn.hpp"
#include "ptk/plot.hpp"
#include "ptk/prognostics.hpp"
#include "ptk/signal.hpp"
#include "ptk/synthgen.hpp"
#include "ptk/train.hpp"

namespace fs = std::filesystem;
using ptk::Tensor;

namespace {

std::string snapshot_filename(std::size_t index, std::size_t channel) {
    char name[64];
    std::snprintf(name, sizeof name, "snap_%05zu_c%zu.csv", index, channel);
    return name;
}

ptk::Defect defect_from_string(const std::string& s) {
    if (s == "inner") return ptk::Defect::InnerRing;
    if (s == "outer") return ptk::Defect::OuterRing;
    if (s == "cage") return ptk::Defect::CageTrain;
    if (s == "ball") return ptk::Defect::RollingElement;
    throw ptk::UsageError("unknown defect '" + s + "' (inner|outer|cage|ball)");
}

ptk::RulModel rul_model_from_args(const std::string& kind, double knee, double power) {
    if (kind == "linear") return ptk::RulModel::linear();
    if (kind == "piecewise") return ptk::RulModel::piecewise(knee);
    if (kind == "polynomial") return ptk::RulModel::polynomial(power);
    throw ptk::UsageError("unknown rul model '" + kind + "' (linear|piecewise|polynomial)");
}

// ---------------------------------------------------------------------------
// gen-synth

struct GenSynthArgs {
    std::string kind = "bearing";
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    // bearing
    std::string fault = "inner";
    bool healthy = false;
    double rpm = 1800.0;
    double sample_rate = 25600.0;
    std::size_t snapshot_len = 2560;
    std::size_t snapshots = 200;
    double severity_exp = 1.5;
    double noise = 0.05;
    double amplitude = 1.0;
    std::size_t channels = 1;
    // fleet
    std::size_t units = 100;
    std::size_t life_min = 128;
    std::size_t life_max = 362;
    double fleet_noise = 0.02;
};

int run_gen_synth(const GenSynthArgs& args) {
    fs::create_directories(args.out_dir);
    if (args.kind == "bearing") {
        for (std::size_t c = 0; c < args.channels; ++c) {
            ptk::BearingSimConfig cfg;
            if (!args.healthy) cfg.fault = defect_from_string(args.fault);
            cfg.rpm = args.rpm;
            cfg.sample_rate_hz = args.sample_rate;
            cfg.snapshot_len = args.snapshot_len;
            cfg.snapshots = args.snapshots;
            cfg.severity_exponent = args.severity_exp;
            cfg.noise_level = args.noise;
            cfg.impulse_amplitude = args.amplitude;
            cfg.seed = ptk::hash64(args.seed, "channel" + std::to_string(c));
            const auto run = ptk::synth_bearing_run(cfg);
            for (std::size_t i = 0; i < run.size(); ++i)
                ptk::io::save_signal_csv(fs::path(args.out_dir) / snapshot_filename(i, c), run[i]);
        }
        std::cout << "wrote " << args.snapshots << " snapshots x " << args.channels
                  << " channels to " << args.out_dir << "\n";
    } else if (args.kind == "fleet") {
        ptk::FleetSimConfig cfg;
        cfg.units = args.units;
        cfg.life_min = args.life_min;
        cfg.life_max = args.life_max;
        cfg.noise_level = args.fleet_noise;
        cfg.seed = args.seed;
        const auto fleet = ptk::synth_turbofan_fleet(cfg);
        const auto path = fs::path(args.out_dir) / "fleet.txt";
        ptk::io::save_cmapss_text(path, fleet);
        std::cout << "wrote " << fleet.size() << " units to " << path.string() << "\n";
    } else {
        throw ptk::UsageError("unknown --kind '" + args.kind + "' (bearing|fleet)");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// img-dataset

struct ImgDatasetArgs {
    std::string root;
    std::string out_dir;
    std::size_t side = 64;
    std::uint64_t seed = 0;
    double train_frac = 0.68, val_frac = 0.12, test_frac = 0.20;
};

std::vector<fs::path> sorted_files(const fs::path& dir, const std::string& extension) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == extension)
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

std::vector<fs::path> sorted_dirs(const fs::path& root) {
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory()) dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

int run_img_dataset(const ImgDatasetArgs& args) {
    fs::create_directories(args.out_dir);
    ptk::io::DatasetManifest manifest;
    manifest.task = ptk::io::TaskKind::FaultImageClass;
    manifest.seed = args.seed;
    manifest.train_fraction = args.train_frac;
    manifest.val_fraction = args.val_frac;
    manifest.test_fraction = args.test_frac;

    const auto class_dirs = sorted_dirs(args.root);
    if (class_dirs.empty()) throw ptk::Error("no class subdirectories under " + args.root);
    const std::size_t chunk = args.side * args.side;
    std::size_t total = 0;
    for (std::size_t label = 0; label < class_dirs.size(); ++label) {
        std::size_t index = 0;
        for (const auto& file : sorted_files(class_dirs[label], ".csv")) {
            const ptk::Signal signal = ptk::io::load_signal_csv(file);
            for (const auto& piece : ptk::segment(signal, chunk)) {
                const ptk::SignalImage img = ptk::signal_to_image(piece, args.side);
                Tensor<float> tensor({1, args.side, args.side});
                for (std::size_t i = 0; i < img.pixels.size(); ++i)
                    tensor.data[i] = static_cast<float>(img.pixels[i]);
                char name[64];
                std::snprintf(name, sizeof name, "img_%02zu_%05zu.ptk1", label, index++);
                ptk::io::save_tensor(fs::path(args.out_dir) / name, tensor);
                manifest.samples.push_back({name, std::to_string(label)});
                ++total;
            }
        }
    }
    ptk::io::save_manifest(fs::path(args.out_dir) / "manifest.txt", manifest);
    std::cout << "wrote " << total << " images across " << class_dirs.size() << " classes to "
              << args.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// scaleogram-dataset

struct ScaleogramDatasetArgs {
    std::string root; // one subdirectory per bearing run
    std::string out_dir;
    std::size_t k = 80;
    std::size_t scale_count = 128;
    std::size_t size = 128;
    std::uint64_t seed = 0;
    double train_frac = 0.68, val_frac = 0.12, test_frac = 0.20;
    bool pgm = false; // also export each scaleogram as an 8-bit PGM
};

int run_scaleogram_dataset(const ScaleogramDatasetArgs& args) {
    fs::create_directories(args.out_dir);
    ptk::io::DatasetManifest manifest;
    manifest.task = ptk::io::TaskKind::ScaleogramHealth;
    manifest.seed = args.seed;
    manifest.train_fraction = args.train_frac;
    manifest.val_fraction = args.val_frac;
    manifest.test_fraction = args.test_frac;

    const auto unit_dirs = sorted_dirs(args.root);
    if (unit_dirs.empty()) throw ptk::Error("no unit subdirectories under " + args.root);
    std::size_t total = 0;
    for (std::size_t unit = 0; unit < unit_dirs.size(); ++unit) {
        // group snapshot files by index; channel count from the suffix
        std::map<std::size_t, std::vector<fs::path>> by_index;
        for (const auto& file : sorted_files(unit_dirs[unit], ".csv")) {
            const std::string stem = file.stem().string(); // snap_00000_c0
            const auto cpos = stem.rfind("_c");
            if (stem.rfind("snap_", 0) != 0 || cpos == std::string::npos) continue;
            const std::size_t index = std::stoul(stem.substr(5, cpos - 5));
            by_index[index].push_back(file);
        }
        if (by_index.empty()) continue;
        const auto labels = ptk::health_labels(by_index.size(), args.k);

        std::size_t snap_pos = 0;
        for (const auto& [index, channel_files] : by_index) {
            const ptk::HealthLabel label = labels[snap_pos++];
            if (label == ptk::HealthLabel::Unlabeled) continue;
            Tensor<float> stacked({channel_files.size(), args.size, args.size});
            std::size_t channel = 0;
            for (const auto& file : channel_files) {
                const ptk::Signal signal = ptk::io::load_signal_csv(file);
                const auto scales = ptk::default_scale_grid(signal.size(), args.scale_count);
                const ptk::Scaleogram scg =
                    ptk::scaleogram_resize(ptk::cwt(signal.samples, scales), args.size, args.size);
                for (std::size_t i = 0; i < scg.magnitudes.size(); ++i)
                    stacked.data[channel * args.size * args.size + i] =
                        static_cast<float>(scg.magnitudes[i]);
                if (args.pgm) {
                    char pgm_name[64];
                    std::snprintf(pgm_name, sizeof pgm_name, "scg_%02zu_%05zu_c%zu.pgm", unit,
                                  index, channel);
                    ptk::plot::save_scaleogram_pgm(fs::path(args.out_dir) / pgm_name, scg);
                }
                ++channel;
            }
            char name[64];
            std::snprintf(name, sizeof name, "scg_%02zu_%05zu.ptk1", unit, index);
            ptk::io::save_tensor(fs::path(args.out_dir) / name, stacked);
            manifest.samples.push_back(
                {name, label == ptk::HealthLabel::Healthy ? "0" : "1"});
            ++total;
        }
    }
    ptk::io::save_manifest(fs::path(args.out_dir) / "manifest.txt", manifest);
    std::cout << "wrote " << total << " scaleogram samples to " << args.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// features

struct FeaturesArgs {
    std::string snapshots_dir;
    std::string out_dir;
    std::size_t channel = 0;
    bool smooth = false;
    int window = 51;
    int order = 3;
    bool cumulative = false;
    bool cumulative_before_smooth = false;
    std::string coeffs = "approx";
};

int run_features(const FeaturesArgs& args) {
    fs::create_directories(args.out_dir);
    const auto files = sorted_files(args.snapshots_dir, ".csv");
    const std::string suffix = "_c" + std::to_string(args.channel);
    std::vector<ptk::FeatureVector> rows;
    for (const auto& file : files) {
        const std::string stem = file.stem().string();
        if (stem.size() < suffix.size() ||
            stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) != 0)
            continue;
        const ptk::Signal snapshot = ptk::io::load_signal_csv(file);
        rows.push_back(ptk::extract_features(snapshot, args.coeffs == "detail"
                                                           ? ptk::TrigCoeffs::Detail
                                                           : ptk::TrigCoeffs::Approximation));
    }
    if (rows.empty()) throw ptk::Error("no channel-" + std::to_string(args.channel) +
                                       " snapshots in " + args.snapshots_dir);

    const std::vector<std::pair<std::string, double ptk::FeatureVector::*>> fields = {
        {"entropy", &ptk::FeatureVector::entropy},
        {"energy", &ptk::FeatureVector::energy},
        {"rms", &ptk::FeatureVector::rms},
        {"skewness", &ptk::FeatureVector::skewness},
        {"kurtosis", &ptk::FeatureVector::kurtosis},
        {"ubound", &ptk::FeatureVector::upper_bound},
        {"std_asinh", &ptk::FeatureVector::std_asinh},
        {"std_atan", &ptk::FeatureVector::std_atan},
    };

    for (const auto& [name, member] : fields) {
        ptk::FeatureSeries series{name, {}};
        for (const auto& row : rows) series.values.push_back(row.*member);

        auto maybe_smooth = [&](ptk::FeatureSeries& s) {
            if (args.smooth && s.values.size() >= static_cast<std::size_t>(args.window))
                s.values = ptk::savitzky_golay(s.values, args.window, args.order);
        };

        if (args.cumulative && args.cumulative_before_smooth) {
            ptk::FeatureSeries cumul = ptk::cumulative(series);
            maybe_smooth(cumul);
            ptk::io::save_feature_csv(fs::path(args.out_dir) / ("feature_" + cumul.feature_name + ".csv"),
                                      cumul);
        }
        maybe_smooth(series);
        ptk::io::save_feature_csv(fs::path(args.out_dir) / ("feature_" + name + ".csv"), series);
        if (args.cumulative && !args.cumulative_before_smooth) {
            const ptk::FeatureSeries cumul = ptk::cumulative(series);
            ptk::io::save_feature_csv(
                fs::path(args.out_dir) / ("feature_" + cumul.feature_name + ".csv"), cumul);
        }
    }
    std::cout << "wrote feature series for " << rows.size() << " snapshots to " << args.out_dir
              << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// fitness

struct FitnessArgs {
    std::vector<std::string> feature_dirs;
    std::string out_csv = "fitness.csv";
    std::string out_svg;
};

int run_fitness(const FitnessArgs& args) {
    if (args.feature_dirs.empty()) throw ptk::UsageError("need at least one --features dir");
    std::map<std::string, std::vector<std::vector<double>>> populations;
    std::set<std::string> common_names;
    bool first = true;
    for (const auto& dir : args.feature_dirs) {
        std::set<std::string> names;
        for (const auto& file : sorted_files(dir, ".csv")) {
            if (file.stem().string().rfind("feature_", 0) != 0) continue;
            const ptk::FeatureSeries series = ptk::io::load_feature_csv(file);
            populations[series.feature_name].push_back(series.values);
            names.insert(series.feature_name);
        }
        if (first) {
            common_names = names;
            first = false;
        } else {
            std::set<std::string> kept;
            std::set_intersection(common_names.begin(), common_names.end(), names.begin(),
                                  names.end(), std::inserter(kept, kept.begin()));
            common_names = std::move(kept);
        }
    }
    std::map<std::string, std::vector<std::vector<double>>> complete;
    for (const auto& name : common_names) complete[name] = populations[name];

    const auto table = ptk::fitness_table(complete);
    ptk::io::save_fitness_csv(args.out_csv, table);
    if (!args.out_svg.empty()) {
        std::vector<ptk::plot::ScatterPoint> points;
        for (const auto& row : table)
            points.push_back({row.monotonicity, row.trendability, 0.5, row.feature_name});
        ptk::plot::svg_scatter(args.out_svg, points, "Feature fitness", "monotonicity",
                               "trendability", true);
    }
    std::cout << "wrote fitness for " << table.size() << " features to " << args.out_csv << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// train / eval shared loading

struct LoadedSplit {
    ptk::nn::Dataset<float> data;
    std::vector<std::size_t> train_idx, val_idx, test_idx;
    std::size_t classes = 0;
};

LoadedSplit load_manifest_dataset(const std::string& manifest_path) {
    const auto manifest = ptk::io::load_manifest(manifest_path);
    LoadedSplit out;

    if (manifest.task == ptk::io::TaskKind::RulRegression) {
        for (const auto& sample : manifest.samples) {
            out.data.inputs.push_back(ptk::io::load_tensor(manifest.resolve(sample.path)));
            out.data.targets.push_back(ptk::io::load_tensor(manifest.resolve(sample.label)));
            const auto split = ptk::io::split_of(manifest, sample.path);
            const std::size_t idx = out.data.inputs.size() - 1;
            if (split == ptk::io::Split::Train) out.train_idx.push_back(idx);
            else if (split == ptk::io::Split::Val) out.val_idx.push_back(idx);
            else out.test_idx.push_back(idx);
        }
        return out;
    }

    std::size_t classes = 0;
    for (const auto& sample : manifest.samples)
        classes = std::max(classes, static_cast<std::size_t>(std::stoul(sample.label)) + 1);
    out.classes = classes;
    for (const auto& sample : manifest.samples) {
        out.data.inputs.push_back(ptk::io::load_tensor(manifest.resolve(sample.path)));
        Tensor<float> onehot({classes});
        onehot.data[std::stoul(sample.label)] = 1.0f;
        out.data.targets.push_back(std::move(onehot));
        const auto split = ptk::io::split_of(manifest, sample.path);
        const std::size_t idx = out.data.inputs.size() - 1;
        if (split == ptk::io::Split::Train) out.train_idx.push_back(idx);
        else if (split == ptk::io::Split::Val) out.val_idx.push_back(idx);
        else out.test_idx.push_back(idx);
    }
    return out;
}

struct TrainArgs {
    std::string manifest;
    std::string arch;
    std::string model_out = "model.ptkm";
    std::string report_out;
    int epochs = 30;
    int batch = 32;
    double lr = 1e-3;
    std::string optimizer = "adam";
    std::uint64_t seed = 0;
};

int run_train(const TrainArgs& args) {
    auto built = ptk::io::load_network_config<float>(args.arch);
    LoadedSplit split = load_manifest_dataset(args.manifest);

    ptk::nn::TrainConfig cfg;
    cfg.epochs = args.epochs;
    cfg.batch_size = args.batch;
    cfg.learning_rate = args.lr;
    cfg.optimizer = args.optimizer == "sgd" ? ptk::nn::Optimizer::SGD : ptk::nn::Optimizer::Adam;
    cfg.seed = args.seed;

    built.net.init_params(args.seed);
    const ptk::nn::TrainReport report =
        ptk::nn::train_indexed(built.net, split.data, split.train_idx, split.val_idx, cfg);

    ptk::io::save_model(args.model_out, built.net);
    if (!args.report_out.empty()) ptk::io::save_train_report_csv(args.report_out, report);
    std::cout << "trained " << args.epochs << " epochs on " << split.train_idx.size()
              << " samples; final train loss "
              << report.epochs.back().train_loss << "\n";
    return 0;
}

struct EvalArgs {
    std::string manifest;
    std::string model;
    std::string metrics_out = "metrics.csv";
    std::string confusion_svg;
    std::string roc_svg;
};

int run_eval(const EvalArgs& args) {
    auto net = ptk::io::load_model<float>(args.model);
    const LoadedSplit split = load_manifest_dataset(args.manifest);
    if (split.test_idx.empty()) throw ptk::Error("manifest test split is empty");

    std::vector<std::pair<std::string, double>> metrics;

    if (split.classes == 0) { // regression
        double total_mae = 0.0, total_loss = 0.0;
        for (const std::size_t idx : split.test_idx) {
            const auto pred = net.forward(split.data.inputs[idx]);
            total_loss += net.compute_loss(pred, split.data.targets[idx]);
            std::vector<double> p, a;
            for (std::size_t i = 0; i < pred.size(); ++i) {
                if (!std::isnan(net.mask_value) &&
                    split.data.targets[idx].data[i] == static_cast<float>(net.mask_value))
                    continue;
                p.push_back(pred.data[i]);
                a.push_back(split.data.targets[idx].data[i]);
            }
            total_mae += ptk::mae(p, a);
        }
        metrics.emplace_back("mae", total_mae / double(split.test_idx.size()));
        metrics.emplace_back("mse", total_loss / double(split.test_idx.size()));
    } else {
        std::vector<int> actual, predicted;
        std::vector<double> scores; // positive-class probability (binary)
        for (const std::size_t idx : split.test_idx) {
            const auto pred = net.forward(split.data.inputs[idx]);
            std::size_t pa = 0, ta = 0;
            for (std::size_t c = 1; c < pred.size(); ++c) {
                if (pred.data[c] > pred.data[pa]) pa = c;
                if (split.data.targets[idx].data[c] > split.data.targets[idx].data[ta]) ta = c;
            }
            predicted.push_back(static_cast<int>(pa));
            actual.push_back(static_cast<int>(ta));
            if (split.classes == 2) scores.push_back(pred.data[1]);
        }
        const ptk::ConfusionMatrix matrix =
            ptk::confusion(actual, predicted, split.classes);
        metrics.emplace_back("accuracy", ptk::accuracy(matrix));
        const ptk::Prf1 macro = ptk::macro_prf1(matrix);
        metrics.emplace_back("precision_macro", macro.precision);
        metrics.emplace_back("recall_macro", macro.recall);
        metrics.emplace_back("f1_macro", macro.f1);
        const bool both_classes_present =
            split.classes == 2 &&
            std::find(actual.begin(), actual.end(), 0) != actual.end() &&
            std::find(actual.begin(), actual.end(), 1) != actual.end();
        if (both_classes_present) {
            const auto [curve, auc] = ptk::roc_auc(scores, actual);
            metrics.emplace_back("roc_auc", auc);
            if (!args.roc_svg.empty()) ptk::plot::svg_roc(args.roc_svg, curve, auc);
        }
        if (!args.confusion_svg.empty()) ptk::plot::svg_confusion(args.confusion_svg, matrix);
    }

    ptk::io::save_metrics_csv(args.metrics_out, metrics);
    for (const auto& [name, value] : metrics) std::cout << name << " = " << value << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// predict-rul

struct PredictRulArgs {
    std::string model;
    std::string units_file;
    std::string out_csv = "rul.csv";
    std::string pca_svg; // optional degradation scatter of the unit
    int unit_id = -1;    // first unit by default
    int degree = 3;
    std::string rul_kind = "piecewise";
    double knee = 125.0;
    double power = 3.0;
};

int run_predict_rul(const PredictRulArgs& args) {
    auto net = ptk::io::load_model<float>(args.model);
    const auto units = ptk::io::load_cmapss_text(args.units_file);
    if (units.empty()) throw ptk::Error("no units in " + args.units_file);
    const auto* unit = &units.front();
    if (args.unit_id >= 0) {
        const auto it = std::find_if(units.begin(), units.end(), [&](const auto& u) {
            return u.unit_id == args.unit_id;
        });
        if (it == units.end())
            throw ptk::Error("unit " + std::to_string(args.unit_id) + " not found");
        unit = &*it;
    }

    const std::size_t life = unit->life_length();
    const std::size_t width = unit->cycles.front().settings.size() +
                              unit->cycles.front().sensors.size();

    // dense heads predict cycle-by-cycle; sequence heads get the padded
    // whole-life tensor at once
    const bool sequence_model =
        dynamic_cast<ptk::nn::LstmLayer<float>*>(net.layers().front().get()) != nullptr;

    std::vector<double> predictions(life, 0.0);
    if (sequence_model) {
        Tensor<float> input({life, width});
        for (std::size_t t = 0; t < life; ++t) {
            std::size_t f = 0;
            for (const double s : unit->cycles[t].settings)
                input.at2(t, f++) = static_cast<float>(s);
            for (const double s : unit->cycles[t].sensors)
                input.at2(t, f++) = static_cast<float>(s);
        }
        const auto out = net.forward(input);
        if (out.size() != life) throw ptk::ShapeMismatch("sequence model output size mismatch");
        for (std::size_t t = 0; t < life; ++t) predictions[t] = out.data[t];
    } else {
        for (std::size_t t = 0; t < life; ++t) {
            Tensor<float> input({width});
            std::size_t f = 0;
            for (const double s : unit->cycles[t].settings) input.data[f++] = static_cast<float>(s);
            for (const double s : unit->cycles[t].sensors) input.data[f++] = static_cast<float>(s);
            predictions[t] = net.forward(input).data[0];
        }
    }

    const auto smoothed = ptk::rul_smooth(predictions, args.degree);
    const auto actual =
        ptk::rul_target(life, rul_model_from_args(args.rul_kind, args.knee, args.power));
    ptk::io::save_rul_csv(args.out_csv, predictions, smoothed, actual);

    if (!args.pca_svg.empty()) {
        std::vector<std::vector<double>> rows;
        rows.reserve(life);
        for (const auto& rec : unit->cycles) rows.push_back(rec.sensors);
        const ptk::PcaModel pca = ptk::pca_fit(rows, true);
        ptk::plot::svg_pca_scatter(args.pca_svg, ptk::pca_transform(pca, rows, 2),
                                   "Unit " + std::to_string(unit->unit_id) + " degradation");
    }

    std::cout << "wrote RUL predictions for unit " << unit->unit_id << " (" << life
              << " cycles) to " << args.out_csv << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// plot

struct PlotArgs {
    std::string csv;
    std::string x_col;
    std::string y_spec; // comma-separated column names
    std::string out_svg = "plot.svg";
    std::string title = "ptk plot";
    std::vector<std::string> y_cols;
};

int run_plot(PlotArgs args) {
    for (const auto& name : ptk::io::detail::split_char(args.y_spec, ','))
        if (!name.empty()) args.y_cols.push_back(name);
    if (args.y_cols.empty()) throw ptk::UsageError("--y needs at least one column name");
    auto in = ptk::io::detail::open_in(args.csv);
    std::string line;
    if (!std::getline(in, line)) throw ptk::Error("empty csv");
    const auto header = ptk::io::detail::split_char(line, ',');
    auto column_of = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ptk::Error("no column '" + name + "' in " + args.csv);
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t xc = column_of(args.x_col);
    std::vector<std::size_t> ycs;
    for (const auto& name : args.y_cols) ycs.push_back(column_of(name));

    std::vector<ptk::plot::Series> series(ycs.size());
    for (std::size_t s = 0; s < ycs.size(); ++s) series[s].name = args.y_cols[s];
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = ptk::io::detail::split_char(line, ',');
        for (std::size_t s = 0; s < ycs.size(); ++s) {
            if (xc >= fields.size() || ycs[s] >= fields.size()) continue;
            if (fields[ycs[s]].empty()) continue;
            series[s].x.push_back(ptk::io::detail::parse_double(fields[xc], line_no));
            series[s].y.push_back(ptk::io::detail::parse_double(fields[ycs[s]], line_no));
        }
    }
    ptk::plot::svg_line_plot(args.out_svg, series, args.title, args.x_col, "value");
    std::cout << "wrote " << args.out_svg << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ptk - vibration diagnostics and prognostics toolkit"};
    app.require_subcommand(1);

    GenSynthArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-synth", "generate synthetic datasets");
    gen_cmd->add_option("--kind", gen.kind, "bearing|fleet");
    gen_cmd->add_option("--out", gen.out_dir, "output directory")->required();
    gen_cmd->add_option("--seed", gen.seed, "master seed");
    gen_cmd->add_option("--fault", gen.fault, "inner|outer|cage|ball");
    gen_cmd->add_flag("--healthy", gen.healthy, "no fault injected");
    gen_cmd->add_option("--rpm", gen.rpm);
    gen_cmd->add_option("--sample-rate", gen.sample_rate);
    gen_cmd->add_option("--snapshot-len", gen.snapshot_len);
    gen_cmd->add_option("--snapshots", gen.snapshots);
    gen_cmd->add_option("--severity-exp", gen.severity_exp);
    gen_cmd->add_option("--noise", gen.noise);
    gen_cmd->add_option("--amplitude", gen.amplitude);
    gen_cmd->add_option("--channels", gen.channels);
    gen_cmd->add_option("--units", gen.units);
    gen_cmd->add_option("--life-min", gen.life_min);
    gen_cmd->add_option("--life-max", gen.life_max);
    gen_cmd->add_option("--fleet-noise", gen.fleet_noise);

    ImgDatasetArgs img;
    auto* img_cmd = app.add_subcommand("img-dataset", "signals -> image tensors + manifest");
    img_cmd->add_option("--root", img.root, "directory with one subdirectory per class")->required();
    img_cmd->add_option("--out", img.out_dir)->required();
    img_cmd->add_option("--side", img.side, "image side length");
    img_cmd->add_option("--seed", img.seed);
    img_cmd->add_option("--train-frac", img.train_frac);
    img_cmd->add_option("--val-frac", img.val_frac);
    img_cmd->add_option("--test-frac", img.test_frac);

    ScaleogramDatasetArgs scg;
    auto* scg_cmd =
        app.add_subcommand("scaleogram-dataset", "signals -> scaleogram tensors + manifest");
    scg_cmd->add_option("--root", scg.root, "directory with one subdirectory per bearing run")
        ->required();
    scg_cmd->add_option("--out", scg.out_dir)->required();
    scg_cmd->add_option("--k", scg.k, "healthy/faulty snapshot count");
    scg_cmd->add_option("--scales", scg.scale_count);
    scg_cmd->add_option("--size", scg.size, "output height/width");
    scg_cmd->add_option("--seed", scg.seed);
    scg_cmd->add_option("--train-frac", scg.train_frac);
    scg_cmd->add_option("--val-frac", scg.val_frac);
    scg_cmd->add_option("--test-frac", scg.test_frac);
    scg_cmd->add_flag("--pgm", scg.pgm, "also export each scaleogram as PGM + scales CSV");

    FeaturesArgs feat;
    auto* feat_cmd = app.add_subcommand("features", "per-snapshot feature series CSVs");
    feat_cmd->add_option("--snapshots", feat.snapshots_dir)->required();
    feat_cmd->add_option("--out", feat.out_dir)->required();
    feat_cmd->add_option("--channel", feat.channel);
    feat_cmd->add_flag("--smooth", feat.smooth, "Savitzky-Golay smoothing");
    feat_cmd->add_option("--window", feat.window);
    feat_cmd->add_option("--order", feat.order);
    feat_cmd->add_flag("--cumulative", feat.cumulative, "also emit cumulative descriptors");
    feat_cmd->add_flag("--cumulative-first", feat.cumulative_before_smooth,
                       "apply the running total before smoothing");
    feat_cmd->add_option("--coeffs", feat.coeffs, "approx|detail wavelet coefficients");

    FitnessArgs fit;
    auto* fit_cmd = app.add_subcommand("fitness", "monotonicity/trendability table");
    fit_cmd->add_option("--features", fit.feature_dirs, "feature dirs, one per unit")->required();
    fit_cmd->add_option("--out", fit.out_csv);
    fit_cmd->add_option("--svg", fit.out_svg);

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "train a network from a manifest");
    train_cmd->add_option("--manifest", train_args.manifest)->required();
    train_cmd->add_option("--arch", train_args.arch)->required();
    train_cmd->add_option("--out", train_args.model_out);
    train_cmd->add_option("--report", train_args.report_out);
    train_cmd->add_option("--epochs", train_args.epochs);
    train_cmd->add_option("--batch", train_args.batch);
    train_cmd->add_option("--lr", train_args.lr);
    train_cmd->add_option("--optimizer", train_args.optimizer, "sgd|adam");
    train_cmd->add_option("--seed", train_args.seed);

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a model on the manifest test split");
    eval_cmd->add_option("--manifest", eval_args.manifest)->required();
    eval_cmd->add_option("--model", eval_args.model)->required();
    eval_cmd->add_option("--out", eval_args.metrics_out);
    eval_cmd->add_option("--confusion", eval_args.confusion_svg);
    eval_cmd->add_option("--roc", eval_args.roc_svg);

    PredictRulArgs rul_args;
    auto* rul_cmd = app.add_subcommand("predict-rul", "per-cycle RUL prediction for one unit");
    rul_cmd->add_option("--model", rul_args.model)->required();
    rul_cmd->add_option("--units", rul_args.units_file)->required();
    rul_cmd->add_option("--out", rul_args.out_csv);
    rul_cmd->add_option("--pca-svg", rul_args.pca_svg, "PCA degradation scatter of the unit");
    rul_cmd->add_option("--unit", rul_args.unit_id);
    rul_cmd->add_option("--degree", rul_args.degree, "smoothing polynomial degree");
    rul_cmd->add_option("--rul-model", rul_args.rul_kind, "linear|piecewise|polynomial");
    rul_cmd->add_option("--knee", rul_args.knee);
    rul_cmd->add_option("--power", rul_args.power);

    PlotArgs plot_args;
    auto* plot_cmd = app.add_subcommand("plot", "CSV columns -> SVG line plot");
    plot_cmd->add_option("--csv", plot_args.csv)->required();
    plot_cmd->add_option("--x", plot_args.x_col)->required();
    plot_cmd->add_option("--y", plot_args.y_spec, "comma-separated column names")->required();
    plot_cmd->add_option("--out", plot_args.out_svg);
    plot_cmd->add_option("--title", plot_args.title);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints usage to stderr
        return 2;
    }

    try {
        if (gen_cmd->parsed()) return run_gen_synth(gen);
        if (img_cmd->parsed()) return run_img_dataset(img);
        if (scg_cmd->parsed()) return run_scaleogram_dataset(scg);
        if (feat_cmd->parsed()) return run_features(feat);
        if (fit_cmd->parsed()) return run_fitness(fit);
        if (train_cmd->parsed()) return run_train(train_args);
        if (eval_cmd->parsed()) return run_eval(eval_args);
        if (rul_cmd->parsed()) return run_predict_rul(rul_args);
        if (plot_cmd->parsed()) return run_plot(plot_args);
    } catch (const ptk::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
