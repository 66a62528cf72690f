// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Every tolerance is pinned in code. Runs on synthetic
// data only; drop FEMTO bearing snapshot CSVs under data/femto/<bearing>/
// (or set PTK_FEMTO_DIR) to also run the real-data fitness checks.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "ptk/cwt.hpp"
#include "ptk/evalmetrics.hpp"
#include "ptk/features.hpp"
#include "ptk/fitness.hpp"
#include "ptk/io.hpp"
#include "ptk/nn.hpp"
#include "ptk/prognostics.hpp"
#include "ptk/rng.hpp"
#include "ptk/signal.hpp"
#include "ptk/spectral.hpp"
#include "ptk/synthgen.hpp"
#include "ptk/train.hpp"
#include "ptk/wavelet.hpp"

namespace fs = std::filesystem;
using namespace ptk;

namespace {

struct Check {
    int id;
    std::string name;
    std::function<bool(std::string&)> run;
};

std::string fmt(const char* pattern, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<double> random_signal(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.gaussian();
    return x;
}

// ---------------------------------------------------------------------------
// 1. fft vs naive DFT + Parseval

bool check_spectral(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t sizes[] = {8, 16, 32, 64, 128, 256, 512, 1024};
    double worst_abs = 0.0, worst_parseval = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = sizes[trial % 8];
        const auto x = random_signal(n, 1000 + static_cast<std::uint64_t>(trial));

        // independent naive O(n^2) oracle
        std::vector<std::complex<double>> oracle(n);
        for (std::size_t k = 0; k < n; ++k) {
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t t = 0; t < n; ++t)
                acc += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * double(k) * double(t) /
                                                  double(n));
            oracle[k] = acc;
        }

        const Spectrum spec = fft(x);
        double time_energy = 0.0, freq_energy = 0.0;
        for (const double v : x) time_energy += v * v;
        for (std::size_t k = 0; k < n; ++k) {
            worst_abs = std::max(worst_abs, std::abs(spec.bins[k] - oracle[k]));
            freq_energy += std::norm(spec.bins[k]);
        }
        worst_parseval = std::max(worst_parseval,
                                  std::abs(freq_energy / double(n) - time_energy) / time_energy);
    }
    const double elapsed = seconds_since(start);
    detail = fmt("max |fft-dft| %.2e (<=1e-9), Parseval rel %.2e (<=1e-6), %.2fs (<5s)",
                 worst_abs, worst_parseval, elapsed);
    return worst_abs <= 1e-9 && worst_parseval <= 1e-6 && elapsed < 5.0;
}

// ---------------------------------------------------------------------------
// 2. db4 wavelet correctness

bool check_wavelet(std::string& detail) {
    Rng rng(2222);
    double worst_roundtrip = 0.0, worst_energy = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t len = std::size_t(64) << (trial % 7); // 64..4096
        const int levels = 1 + trial % 4;
        std::vector<double> x(len);
        for (auto& v : x) v = rng.gaussian();

        const auto dec = dwt_decompose(x, "db4", levels);
        const auto back = dwt_reconstruct(dec);
        for (std::size_t i = 0; i < len; ++i)
            worst_roundtrip = std::max(worst_roundtrip, std::abs(back[i] - x[i]));

        double in_energy = 0.0, coeff_energy = 0.0;
        for (const double v : x) in_energy += v * v;
        for (const double a : dec.approximation) coeff_energy += a * a;
        for (const auto& level : dec.details)
            for (const double d : level) coeff_energy += d * d;
        worst_energy = std::max(worst_energy, std::abs(coeff_energy - in_energy) / in_energy);
    }

    // vanishing-moment behavior: constants exactly, cubics in the interior
    double worst_const = 0.0, worst_cubic = 0.0;
    {
        const std::vector<double> constant(256, 2.5);
        const auto dec = dwt_decompose(constant, "db4", 1);
        for (const double d : dec.details[0]) worst_const = std::max(worst_const, std::abs(d));

        std::vector<double> cubic(512);
        for (std::size_t i = 0; i < cubic.size(); ++i) {
            const double t = double(i) / 512.0;
            cubic[i] = 0.3 + t - 1.5 * t * t + 2.0 * t * t * t;
        }
        const auto dec3 = dwt_decompose(cubic, "db4", 1);
        for (std::size_t i = 0; 2 * i + 7 < cubic.size(); ++i)
            worst_cubic = std::max(worst_cubic, std::abs(dec3.details[0][i]));
    }

    detail = fmt("roundtrip %.2e (<=1e-8), energy rel %.2e (<=1e-6), const/cubic details %.2e/%.2e (<=1e-6)",
                 worst_roundtrip, worst_energy, worst_const, worst_cubic);
    return worst_roundtrip <= 1e-8 && worst_energy <= 1e-6 && worst_const <= 1e-6 &&
           worst_cubic <= 1e-6;
}

// ---------------------------------------------------------------------------
// 3. CWT peak-scale physics

bool check_cwt(std::string& detail) {
    const std::pair<double, double> cases[10] = {
        {32.0, 1024.0}, {64.0, 1024.0}, {100.0, 2048.0}, {50.0, 512.0},  {200.0, 4096.0},
        {25.0, 800.0},  {150.0, 2560.0}, {40.0, 1280.0}, {80.0, 2048.0}, {120.0, 1600.0}};
    long long worst_offset = 0;
    for (const auto& [freq, fs] : cases) {
        const std::size_t n = 512;
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i)
            x[i] = std::sin(2.0 * std::numbers::pi * freq * double(i) / fs);

        const auto scales = log_spaced_scales(64, 2.0, 96.0);
        const Scaleogram s = cwt(x, scales);

        std::size_t argmax = 0;
        double best = -1.0;
        for (std::size_t si = 0; si < scales.size(); ++si) {
            double acc = 0.0;
            for (std::size_t t = n / 4; t < 3 * n / 4; ++t) acc += s.at(si, t);
            if (acc > best) {
                best = acc;
                argmax = si;
            }
        }
        const double target = morlet_scale_for_frequency(freq, fs);
        std::size_t closest = 0;
        for (std::size_t si = 1; si < scales.size(); ++si)
            if (std::abs(scales[si] - target) < std::abs(scales[closest] - target)) closest = si;
        worst_offset = std::max(worst_offset,
                                std::llabs((long long)argmax - (long long)closest));
    }
    detail = fmt("worst argmax offset %lld grid steps (<=1)", worst_offset);
    return worst_offset <= 1;
}

// ---------------------------------------------------------------------------
// 4. gradient checks

bool check_gradients(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    using namespace ptk::nn;
    using T = Tensor<double>;
    double worst = 0.0;
    auto note = [&](double err) { worst = std::max(worst, err); };

    auto random_tensor = [](std::vector<std::size_t> shape, std::uint64_t seed) {
        T t(std::move(shape));
        Rng rng(seed);
        for (auto& v : t.data) v = rng.gaussian();
        return t;
    };

    { // dense under all three losses
        for (const Loss loss : {Loss::MSE, Loss::BCE, Loss::CCE}) {
            Network<double> net;
            net.loss = loss;
            net.add<DenseLayer<double>>(6, 8, Activation::Tanh);
            net.add<DenseLayer<double>>(8, 5, Activation::Relu);
            net.add<DenseLayer<double>>(5, loss == Loss::BCE ? 1 : 4, Activation::Identity);
            net.init_params(4000 + static_cast<std::uint64_t>(loss));
            T target;
            if (loss == Loss::MSE) target = random_tensor({4}, 4010);
            else if (loss == Loss::BCE) target = T({1}, {1.0});
            else {
                target = T({4});
                target.data[2] = 1.0;
            }
            note(grad_check(net, random_tensor({6}, 4020), target));
        }
    }
    { // conv + maxpool + dropout(eval) under CCE and MSE
        for (const Loss loss : {Loss::CCE, Loss::MSE}) {
            Network<double> net;
            net.loss = loss;
            net.add<Conv2DLayer<double>>(2, 3, 3, 3, Activation::Tanh);
            net.add<MaxPool2DLayer<double>>();
            net.add<Conv2DLayer<double>>(3, 4, 3, 3, Activation::LeakyRelu);
            net.add<MaxPool2DLayer<double>>();
            net.add<FlattenLayer<double>>();
            net.add<DropoutLayer<double>>(0.4);
            net.add<DenseLayer<double>>(4 * 2 * 2, 3, Activation::Identity);
            net.init_params(4100 + static_cast<std::uint64_t>(loss));
            T target({3});
            if (loss == Loss::CCE) target.data[1] = 1.0;
            else target = random_tensor({3}, 4110);
            note(grad_check(net, random_tensor({2, 8, 8}, 4120), target));
        }
    }
    { // stacked LSTM over 5-step sequences, MSE and BCE heads
        {
            Network<double> net;
            net.loss = Loss::MSE;
            net.add<LstmLayer<double>>(3, 4, true);
            net.add<LstmLayer<double>>(4, 3, false);
            net.add<DenseLayer<double>>(3, 2, Activation::Identity);
            net.init_params(4200);
            note(grad_check(net, random_tensor({5, 3}, 4210), random_tensor({2}, 4220)));
        }
        {
            Network<double> net;
            net.loss = Loss::BCE;
            net.add<LstmLayer<double>>(2, 3, true);
            net.add<DenseLayer<double>>(3, 1, Activation::Identity); // per-step
            net.add<FlattenLayer<double>>();
            net.add<DenseLayer<double>>(5, 1, Activation::Identity);
            net.init_params(4230);
            note(grad_check(net, random_tensor({5, 2}, 4240), T({1}, {1.0})));
        }
    }
    const double elapsed = seconds_since(start);
    detail = fmt("max rel error %.2e (<=1e-4), %.2fs (<60s)", worst, elapsed);
    return worst <= 1e-4 && elapsed < 60.0;
}

// ---------------------------------------------------------------------------
// 5. fitness of cumulative features

struct BearingFeatureTable {
    // per feature: population of per-bearing series
    std::map<std::string, std::vector<std::vector<double>>> raw;
    std::map<std::string, std::vector<std::vector<double>>> cumulative_series;
};

BearingFeatureTable bearing_features(const std::vector<std::vector<Signal>>& runs) {
    BearingFeatureTable table;
    for (const auto& run : runs) {
        std::map<std::string, FeatureSeries> series;
        for (const char* name : {"std_atan", "std_asinh", "rms", "entropy", "energy", "ubound"})
            series[name] = FeatureSeries{name, {}};
        for (const Signal& snap : run) {
            const FeatureVector f = extract_features(snap);
            series["std_atan"].values.push_back(f.std_atan);
            series["std_asinh"].values.push_back(f.std_asinh);
            series["rms"].values.push_back(f.rms);
            series["entropy"].values.push_back(f.entropy);
            series["energy"].values.push_back(f.energy);
            series["ubound"].values.push_back(f.upper_bound);
        }
        for (auto& [name, s] : series) {
            table.raw[name].push_back(s.values);
            table.cumulative_series["C-" + name].push_back(cumulative(s).values);
        }
    }
    return table;
}

bool check_fitness(std::string& detail) {
    const Defect kinds[3] = {Defect::InnerRing, Defect::OuterRing, Defect::RollingElement};
    std::vector<std::vector<Signal>> runs;
    for (int b = 0; b < 6; ++b) {
        BearingSimConfig cfg;
        cfg.fault = kinds[b % 3];
        cfg.snapshots = 120;
        cfg.snapshot_len = 512;
        cfg.severity_exponent = 2.0;
        cfg.impulse_amplitude = 2.0;
        cfg.noise_level = 0.08;
        cfg.seed = 500 + static_cast<std::uint64_t>(b);
        runs.push_back(synth_bearing_run(cfg));
    }
    const BearingFeatureTable table = bearing_features(runs);

    auto mean_monotonicity = [](const std::vector<std::vector<double>>& population) {
        double acc = 0.0;
        for (const auto& series : population) acc += monotonicity(series);
        return acc / double(population.size());
    };

    bool ok = true;
    double min_cumulative = 1.0, max_raw = 0.0;
    for (const char* name : {"std_atan", "std_asinh", "rms", "entropy", "energy", "ubound"}) {
        const double raw = mean_monotonicity(table.raw.at(name));
        const double cumul = mean_monotonicity(table.cumulative_series.at(std::string("C-") + name));
        min_cumulative = std::min(min_cumulative, cumul);
        max_raw = std::max(max_raw, raw);
        if (cumul < 0.99 || cumul <= raw) ok = false;
    }
    detail = fmt("min cumulative monotonicity %.4f (>=0.99), max raw %.4f (must stay below)",
                 min_cumulative, max_raw);

    // optional real-data check when FEMTO snapshot CSVs are available
    const char* env = std::getenv("PTK_FEMTO_DIR");
    const fs::path femto_dir = env != nullptr ? fs::path(env) : fs::path("data/femto");
    if (fs::exists(femto_dir) && fs::is_directory(femto_dir)) {
        std::vector<std::vector<double>> atan_raw, atan_cumulative;
        for (const auto& bearing : fs::directory_iterator(femto_dir)) {
            if (!bearing.is_directory()) continue;
            FeatureSeries series{"std_atan", {}};
            std::vector<fs::path> files;
            for (const auto& f : fs::directory_iterator(bearing.path()))
                if (f.path().extension() == ".csv") files.push_back(f.path());
            std::sort(files.begin(), files.end());
            for (const auto& f : files) {
                const Signal snap = io::load_signal_csv(f);
                series.values.push_back(extract_trig_features(snap).std_atan);
            }
            if (series.values.size() < 2) continue;
            atan_raw.push_back(series.values);
            atan_cumulative.push_back(cumulative(series).values);
        }
        if (!atan_raw.empty()) {
            const double raw = mean_monotonicity(atan_raw);
            const double cumul = mean_monotonicity(atan_cumulative);
            detail += fmt("; FEMTO raw atan %.3f (0.486 +-0.1), cumulative %.3f (>=0.99)", raw,
                          cumul);
            if (std::abs(raw - 0.486) > 0.1 || cumul < 0.99) ok = false;
        }
    } else {
        detail += "; FEMTO data not present, synthetic gate only";
    }
    return ok;
}

// ---------------------------------------------------------------------------
// 6. ten-class diagnostics pipeline

nn::Dataset<float> image_dataset(std::vector<int>& labels_out, std::size_t per_class) {
    nn::Dataset<float> data;
    struct ClassSpec {
        std::optional<Defect> fault;
        double amplitude;
    };
    std::vector<ClassSpec> classes = {{std::nullopt, 0.0}};
    for (const Defect d : {Defect::InnerRing, Defect::OuterRing, Defect::RollingElement})
        for (const double amp : {0.6, 1.8, 5.0}) classes.push_back({d, amp});

    for (std::size_t c = 0; c < classes.size(); ++c) {
        BearingSimConfig cfg;
        cfg.fault = classes[c].fault;
        cfg.impulse_amplitude = classes[c].amplitude;
        cfg.snapshot_len = 4096;
        cfg.snapshots = per_class;
        cfg.severity_exponent = 0.0; // constant severity: class = (kind, size)
        cfg.noise_level = 0.04;
        cfg.seed = 600 + c;
        const auto run = synth_bearing_run(cfg);
        for (const Signal& snap : run) {
            const SignalImage img = signal_to_image(snap.samples, 64);
            Tensor<float> x({1, 64, 64});
            for (std::size_t i = 0; i < img.pixels.size(); ++i)
                x.data[i] = static_cast<float>(img.pixels[i]);
            Tensor<float> y({classes.size()});
            y.data[c] = 1.0f;
            data.inputs.push_back(std::move(x));
            data.targets.push_back(std::move(y));
            labels_out.push_back(static_cast<int>(c));
        }
    }
    return data;
}

bool check_diagnostics_pipeline(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<int> labels;
    const nn::Dataset<float> data = image_dataset(labels, 128);

    // deterministic 80/20 split
    Rng split_rng(700);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    split_rng.shuffle(order);
    const std::size_t test_count = data.size() / 5;
    std::vector<std::size_t> test_idx(order.begin(), order.begin() + test_count);
    std::vector<std::size_t> train_idx(order.begin() + test_count, order.end());

    nn::Network<float> net;
    net.loss = nn::Loss::CCE;
    net.add<nn::Conv2DLayer<float>>(1, 8, 3, 3, nn::Activation::Relu);
    net.add<nn::MaxPool2DLayer<float>>();
    net.add<nn::Conv2DLayer<float>>(8, 16, 3, 3, nn::Activation::Relu);
    net.add<nn::MaxPool2DLayer<float>>();
    net.add<nn::Conv2DLayer<float>>(16, 32, 3, 3, nn::Activation::Relu);
    net.add<nn::MaxPool2DLayer<float>>();
    net.add<nn::FlattenLayer<float>>();
    net.add<nn::DenseLayer<float>>(32 * 8 * 8, 64, nn::Activation::Relu);
    net.add<nn::DenseLayer<float>>(64, 32, nn::Activation::Relu);
    net.add<nn::DenseLayer<float>>(32, 10, nn::Activation::Identity);
    net.init_params(701);

    nn::TrainConfig cfg;
    cfg.epochs = 10;
    cfg.batch_size = 32;
    cfg.learning_rate = 1e-3;
    cfg.optimizer = nn::Optimizer::Adam;
    cfg.seed = 702;
    nn::train_indexed(net, data, train_idx, {}, cfg);

    std::size_t correct = 0;
    for (const std::size_t idx : test_idx) {
        const auto pred = net.forward(data.inputs[idx]);
        std::size_t argmax = 0;
        for (std::size_t c = 1; c < pred.size(); ++c)
            if (pred.data[c] > pred.data[argmax]) argmax = c;
        if (static_cast<int>(argmax) == labels[idx]) ++correct;
    }
    const double accuracy = double(correct) / double(test_idx.size());
    const double elapsed = seconds_since(start);
    detail = fmt("test accuracy %.4f (>=0.95) on %zu held-out images, %.1fs (<600s)", accuracy,
                 test_idx.size(), elapsed);
    return accuracy >= 0.95 && elapsed < 600.0;
}

// ---------------------------------------------------------------------------
// 7. scaleogram health-state pipeline

bool check_health_pipeline(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    nn::Dataset<float> data;
    std::vector<int> labels;

    const Defect kinds[3] = {Defect::InnerRing, Defect::OuterRing, Defect::RollingElement};
    for (int bearing = 0; bearing < 3; ++bearing) {
        std::vector<std::vector<Signal>> channels;
        for (int ch = 0; ch < 2; ++ch) {
            BearingSimConfig cfg;
            cfg.fault = kinds[bearing];
            cfg.snapshots = 200;
            cfg.snapshot_len = 512;
            cfg.severity_exponent = 3.0;
            cfg.impulse_amplitude = 2.0;
            cfg.noise_level = 0.05;
            cfg.seed = hash64(800 + static_cast<std::uint64_t>(bearing),
                              "channel" + std::to_string(ch));
            channels.push_back(synth_bearing_run(cfg));
        }
        const auto health = health_labels(200, 80);
        for (std::size_t snap = 0; snap < 200; ++snap) {
            if (health[snap] == HealthLabel::Unlabeled) continue;
            Tensor<float> x({2, 128, 128});
            for (int ch = 0; ch < 2; ++ch) {
                const Signal& s = channels[ch][snap];
                const auto scales = default_scale_grid(s.size(), 128);
                const Scaleogram scg = scaleogram_resize(cwt(s.samples, scales), 128, 128);
                for (std::size_t i = 0; i < scg.magnitudes.size(); ++i)
                    x.data[static_cast<std::size_t>(ch) * 128 * 128 + i] =
                        static_cast<float>(scg.magnitudes[i]);
            }
            const int label = health[snap] == HealthLabel::Faulty ? 1 : 0;
            Tensor<float> y({2});
            y.data[label] = 1.0f;
            data.inputs.push_back(std::move(x));
            data.targets.push_back(std::move(y));
            labels.push_back(label);
        }
    }

    Rng split_rng(801);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    split_rng.shuffle(order);
    const std::size_t test_count = data.size() / 5;
    std::vector<std::size_t> test_idx(order.begin(), order.begin() + test_count);
    std::vector<std::size_t> train_idx(order.begin() + test_count, order.end());

    nn::Network<float> net;
    net.loss = nn::Loss::CCE;
    net.add<nn::Conv2DLayer<float>>(2, 8, 3, 3, nn::Activation::Relu);
    net.add<nn::MaxPool2DLayer<float>>();
    net.add<nn::Conv2DLayer<float>>(8, 16, 3, 3, nn::Activation::Relu);
    net.add<nn::MaxPool2DLayer<float>>();
    net.add<nn::Conv2DLayer<float>>(16, 32, 3, 3, nn::Activation::Relu);
    net.add<nn::MaxPool2DLayer<float>>();
    net.add<nn::FlattenLayer<float>>();
    net.add<nn::DenseLayer<float>>(32 * 16 * 16, 64, nn::Activation::Relu);
    net.add<nn::DropoutLayer<float>>(0.3);
    net.add<nn::DenseLayer<float>>(64, 2, nn::Activation::Identity);
    net.init_params(802);

    nn::TrainConfig cfg;
    cfg.epochs = 6;
    cfg.batch_size = 16;
    cfg.learning_rate = 1e-3;
    cfg.seed = 803;
    nn::train_indexed(net, data, train_idx, {}, cfg);

    std::vector<int> actual, predicted;
    std::vector<double> scores;
    for (const std::size_t idx : test_idx) {
        const auto pred = net.forward(data.inputs[idx]);
        predicted.push_back(pred.data[1] > pred.data[0] ? 1 : 0);
        actual.push_back(labels[idx]);
        scores.push_back(pred.data[1]);
    }
    const ConfusionMatrix matrix = confusion(actual, predicted, 2);
    const double acc = accuracy(matrix);
    const auto [curve, auc] = roc_auc(scores, actual);
    const double elapsed = seconds_since(start);
    detail = fmt("test accuracy %.4f (>=0.95), ROC AUC %.4f (>=0.98), %zu samples, %.1fs", acc,
                 auc, test_idx.size(), elapsed);
    return acc >= 0.95 && auc >= 0.98;
}

// ---------------------------------------------------------------------------
// 8. RUL pipeline: dense regressor MAE + LSTM smoothness

struct Standardizer {
    std::vector<double> mean, std;

    void fit(const std::vector<RunToFailureUnit>& units) {
        const std::size_t width = units.front().cycles.front().settings.size() +
                                  units.front().cycles.front().sensors.size();
        mean.assign(width, 0.0);
        std.assign(width, 0.0);
        std::size_t count = 0;
        for (const auto& unit : units)
            for (const auto& rec : unit.cycles) {
                std::size_t f = 0;
                for (const double v : rec.settings) mean[f++] += v;
                for (const double v : rec.sensors) mean[f++] += v;
                ++count;
            }
        for (auto& m : mean) m /= double(count);
        for (const auto& unit : units)
            for (const auto& rec : unit.cycles) {
                std::size_t f = 0;
                for (const double v : rec.settings) {
                    std[f] += (v - mean[f]) * (v - mean[f]);
                    ++f;
                }
                for (const double v : rec.sensors) {
                    std[f] += (v - mean[f]) * (v - mean[f]);
                    ++f;
                }
            }
        for (auto& s : std) s = s > 0.0 ? std::sqrt(s / double(count - 1)) : 1.0;
    }

    void apply(const CycleRecord& rec, float* out) const {
        std::size_t f = 0;
        for (const double v : rec.settings) {
            out[f] = static_cast<float>((v - mean[f]) / std[f]);
            ++f;
        }
        for (const double v : rec.sensors) {
            out[f] = static_cast<float>((v - mean[f]) / std[f]);
            ++f;
        }
    }
};

bool check_rul_pipeline(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    FleetSimConfig fleet_cfg;
    fleet_cfg.units = 100;
    fleet_cfg.life_min = 128;
    fleet_cfg.life_max = 362;
    fleet_cfg.noise_level = 0.05;
    fleet_cfg.seed = 900;
    const auto fleet = synth_turbofan_fleet(fleet_cfg);

    std::vector<RunToFailureUnit> train_units(fleet.begin(), fleet.begin() + 80);
    std::vector<RunToFailureUnit> test_units(fleet.begin() + 80, fleet.end());

    Standardizer norm;
    norm.fit(train_units);
    const RulModel target_model = RulModel::piecewise(125.0);
    constexpr double kRulScale = 125.0;
    const std::size_t width = 24;

    // --- dense per-cycle regressor
    nn::Dataset<float> dense_data;
    for (const auto& unit : train_units) {
        const auto rul = rul_target(unit.life_length(), target_model);
        for (std::size_t t = 0; t < unit.life_length(); ++t) {
            Tensor<float> x({width});
            norm.apply(unit.cycles[t], x.data.data());
            dense_data.inputs.push_back(std::move(x));
            dense_data.targets.push_back(
                Tensor<float>({1}, {static_cast<float>(rul[t] / kRulScale)}));
        }
    }
    nn::Network<float> dense_net;
    dense_net.loss = nn::Loss::MSE;
    dense_net.add<nn::DenseLayer<float>>(width, 32, nn::Activation::Relu);
    dense_net.add<nn::DenseLayer<float>>(32, 16, nn::Activation::Relu);
    dense_net.add<nn::DenseLayer<float>>(16, 1, nn::Activation::Identity);
    dense_net.init_params(901);
    nn::TrainConfig dense_cfg;
    dense_cfg.epochs = 12;
    dense_cfg.batch_size = 64;
    dense_cfg.learning_rate = 1e-3;
    dense_cfg.seed = 902;
    nn::train(dense_net, dense_data, dense_cfg);

    // --- LSTM whole-sequence regressor
    nn::Dataset<float> seq_data;
    for (const auto& unit : train_units) {
        const std::size_t life = unit.life_length();
        Tensor<float> x({life, width});
        for (std::size_t t = 0; t < life; ++t) norm.apply(unit.cycles[t], x.data.data() + t * width);
        const auto rul = rul_target(life, target_model);
        Tensor<float> y({life});
        for (std::size_t t = 0; t < life; ++t) y.data[t] = static_cast<float>(rul[t] / kRulScale);
        seq_data.inputs.push_back(std::move(x));
        seq_data.targets.push_back(std::move(y));
    }
    nn::Network<float> lstm_net;
    lstm_net.loss = nn::Loss::MSE;
    lstm_net.add<nn::LstmLayer<float>>(width, 32, true);
    lstm_net.add<nn::LstmLayer<float>>(32, 32, true);
    lstm_net.add<nn::DenseLayer<float>>(32, 1, nn::Activation::Identity);
    lstm_net.add<nn::FlattenLayer<float>>();
    lstm_net.init_params(903);
    nn::TrainConfig lstm_cfg;
    lstm_cfg.epochs = 30;
    lstm_cfg.batch_size = 4;
    lstm_cfg.learning_rate = 3e-3;
    lstm_cfg.seed = 904;
    nn::train(lstm_net, seq_data, lstm_cfg);

    // --- evaluation on held-out units
    double abs_err_sum = 0.0;
    std::size_t cycle_count = 0;
    double tv_dense = 0.0, tv_lstm = 0.0;
    double lstm_abs_err_sum = 0.0;
    for (const auto& unit : test_units) {
        const std::size_t life = unit.life_length();
        const auto rul = rul_target(life, target_model);

        std::vector<double> dense_pred(life, 0.0);
        for (std::size_t t = 0; t < life; ++t) {
            Tensor<float> x({width});
            norm.apply(unit.cycles[t], x.data.data());
            dense_pred[t] = double(dense_net.forward(x).data[0]) * kRulScale;
            abs_err_sum += std::abs(dense_pred[t] - rul[t]);
            ++cycle_count;
        }

        Tensor<float> seq({life, width});
        for (std::size_t t = 0; t < life; ++t) norm.apply(unit.cycles[t], seq.data.data() + t * width);
        const auto lstm_out = lstm_net.forward(seq);
        std::vector<double> lstm_pred(life, 0.0);
        for (std::size_t t = 0; t < life; ++t) {
            lstm_pred[t] = double(lstm_out.data[t]) * kRulScale;
            lstm_abs_err_sum += std::abs(lstm_pred[t] - rul[t]);
        }

        for (std::size_t t = 1; t < life; ++t) {
            tv_dense += std::abs(dense_pred[t] - dense_pred[t - 1]);
            tv_lstm += std::abs(lstm_pred[t] - lstm_pred[t - 1]);
        }
    }
    const double dense_mae = abs_err_sum / double(cycle_count);
    const double lstm_mae = lstm_abs_err_sum / double(cycle_count);
    const double tv_reduction = 1.0 - tv_lstm / tv_dense;
    const double elapsed = seconds_since(start);
    detail = fmt("dense MAE %.2f cycles (<=30), LSTM MAE %.2f, TV reduction %.1f%% (>=30%%), %.1fs",
                 dense_mae, lstm_mae, 100.0 * tv_reduction, elapsed);
    return dense_mae <= 30.0 && tv_reduction >= 0.30;
}

// ---------------------------------------------------------------------------
// 9. metric oracles

bool check_metric_oracles(std::string& detail) {
    Rng rng(1100);
    int exact_matches = 0, instances = 0;
    while (instances < 100) {
        const std::size_t n = 20 + rng.below(180);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        bool has_pos = false, has_neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = double(rng.below(25)) / 25.0; // heavy ties
            labels[i] = int(rng.below(2));
            (labels[i] != 0 ? has_pos : has_neg) = true;
        }
        if (!has_pos || !has_neg) continue;
        ++instances;

        const auto [curve, auc] = roc_auc(scores, labels);
        // O(n^2) pair count, ties half
        std::int64_t wins2 = 0, pos = 0, neg = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] == 0) continue;
            ++pos;
            for (std::size_t j = 0; j < n; ++j) {
                if (labels[j] != 0) continue;
                if (scores[i] > scores[j]) wins2 += 2;
                else if (scores[i] == scores[j]) wins2 += 1;
            }
        }
        neg = std::int64_t(n) - pos;
        const double oracle = double(wins2) / (2.0 * double(pos) * double(neg));
        if (auc == oracle) ++exact_matches;
    }

    const double p = 0.9896, r = 0.9694;
    const double f1 = 2.0 * p * r / (p + r);
    const bool f1_ok = std::abs(f1 - 0.9794) <= 5e-4;

    detail = fmt("AUC exact on %d/100 seeded instances, F1(0.9896,0.9694)=%.5f (0.9794 +-5e-4)",
                 exact_matches, f1);
    return exact_matches == 100 && f1_ok;
}

// ---------------------------------------------------------------------------
// 10. determinism

bool check_determinism(std::string& detail) {
    // generators byte-identical
    BearingSimConfig bearing;
    bearing.fault = Defect::OuterRing;
    bearing.snapshots = 6;
    bearing.snapshot_len = 1024;
    bearing.seed = 1200;
    const auto run_a = synth_bearing_run(bearing);
    const auto run_b = synth_bearing_run(bearing);
    bool generators_equal = run_a.size() == run_b.size();
    for (std::size_t s = 0; generators_equal && s < run_a.size(); ++s)
        generators_equal = run_a[s].samples == run_b[s].samples;

    FleetSimConfig fleet;
    fleet.units = 5;
    fleet.life_min = 40;
    fleet.life_max = 60;
    fleet.seed = 1201;
    const auto fleet_a = synth_turbofan_fleet(fleet);
    const auto fleet_b = synth_turbofan_fleet(fleet);
    for (std::size_t u = 0; generators_equal && u < fleet_a.size(); ++u)
        for (std::size_t t = 0; generators_equal && t < fleet_a[u].cycles.size(); ++t)
            generators_equal = fleet_a[u].cycles[t].sensors == fleet_b[u].cycles[t].sensors &&
                               fleet_a[u].cycles[t].settings == fleet_b[u].cycles[t].settings;

    // train twice with one seed -> bit-identical model files
    auto train_once = [](const fs::path& out) {
        nn::Network<float> net;
        net.loss = nn::Loss::CCE;
        net.add<nn::DenseLayer<float>>(4, 12, nn::Activation::Relu);
        net.add<nn::DropoutLayer<float>>(0.2);
        net.add<nn::DenseLayer<float>>(12, 3, nn::Activation::Identity);
        net.init_params(1300);

        nn::Dataset<float> data;
        Rng rng(1301);
        for (int i = 0; i < 60; ++i) {
            Tensor<float> x({4});
            for (auto& v : x.data) v = static_cast<float>(rng.gaussian());
            Tensor<float> y({3});
            y.data[static_cast<std::size_t>(i % 3)] = 1.0f;
            data.inputs.push_back(std::move(x));
            data.targets.push_back(std::move(y));
        }
        nn::TrainConfig cfg;
        cfg.epochs = 8;
        cfg.batch_size = 16;
        cfg.learning_rate = 0.01;
        cfg.validation_split = 0.25;
        cfg.seed = 1302;
        nn::train(net, data, cfg);
        io::save_model(out, net);
    };

    const fs::path dir = fs::temp_directory_path() / "ptk_acceptance";
    fs::create_directories(dir);
    train_once(dir / "det_a.ptkm");
    train_once(dir / "det_b.ptkm");
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    };
    const bool models_equal = slurp(dir / "det_a.ptkm") == slurp(dir / "det_b.ptkm");

    detail = fmt("generators byte-identical: %s; repeated training byte-identical: %s",
                 generators_equal ? "yes" : "no", models_equal ? "yes" : "no");
    return generators_equal && models_equal;
}

} // namespace

int main() {
    const std::vector<Check> checks = {
        {1, "spectral oracle equivalence (fft vs naive DFT, Parseval)", check_spectral},
        {2, "db4 wavelet correctness (reconstruction, moments, energy)", check_wavelet},
        {3, "CWT peak-scale physics", check_cwt},
        {4, "gradient checks for every layer kind and loss", check_gradients},
        {5, "cumulative feature monotonicity fitness", check_fitness},
        {6, "ten-class diagnostics pipeline (images -> CNN)", check_diagnostics_pipeline},
        {7, "health-state pipeline (scaleograms -> CNN)", check_health_pipeline},
        {8, "RUL pipeline (dense MAE, LSTM smoothness)", check_rul_pipeline},
        {9, "metric oracles (AUC pair count, F1 consistency)", check_metric_oracles},
        {10, "determinism (generators and training)", check_determinism},
    };

    int failures = 0;
    for (const auto& check : checks) {
        std::string detail;
        bool ok = false;
        try {
            ok = check.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %2d: %s — %s\n", ok ? "PASS" : "FAIL", check.id,
                    check.name.c_str(), detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    else std::printf("all %zu criteria passed\n", checks.size());
    return failures == 0 ? 0 : 1;
}
