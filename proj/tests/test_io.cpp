#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "ptk/evalmetrics.hpp"
#include "ptk/io.hpp"
#include "ptk/plot.hpp"
#include "ptk/rng.hpp"
#include "ptk/synthgen.hpp"

using namespace ptk;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "ptk_io_tests";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

// bare-bones XML well-formedness check: tags balance, attributes quoted
bool xml_well_formed(const fs::path& path) {
    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (text.empty()) return false;
    std::vector<std::string> stack;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '<') {
            ++i;
            continue;
        }
        const std::size_t close = text.find('>', i);
        if (close == std::string::npos) return false;
        std::string tag = text.substr(i + 1, close - i - 1);
        i = close + 1;
        if (tag.empty()) return false;
        if (tag[0] == '?' || tag[0] == '!') continue; // declaration/comment
        const bool self_closing = tag.back() == '/';
        if (self_closing) tag.pop_back();
        // unquoted '<' inside attributes would have broken the find above
        std::size_t quotes = 0;
        for (const char c : tag)
            if (c == '"') ++quotes;
        if (quotes % 2 != 0) return false;
        std::string name = tag.substr(tag[0] == '/' ? 1 : 0);
        name = name.substr(0, name.find_first_of(" \t\n"));
        if (tag[0] == '/') {
            if (stack.empty() || stack.back() != name) return false;
            stack.pop_back();
        } else if (!self_closing) {
            stack.push_back(name);
        }
    }
    return stack.empty();
}

} // namespace

TEST_CASE("signal CSV round-trips exactly", "[io]") {
    Rng rng(1);
    Signal s;
    s.sample_rate_hz = 25600.0;
    for (int i = 0; i < 100; ++i) s.samples.push_back(rng.gaussian());
    const auto path = temp_dir() / "signal.csv";
    io::save_signal_csv(path, s);
    const Signal back = io::load_signal_csv(path);
    CHECK(back.sample_rate_hz == s.sample_rate_hz);
    REQUIRE(back.samples.size() == s.samples.size());
    for (std::size_t i = 0; i < s.samples.size(); ++i) CHECK(back.samples[i] == s.samples[i]);
}

TEST_CASE("signal CSV rejects bad headers", "[io]") {
    const auto path = temp_dir() / "bad_signal.csv";
    std::ofstream(path) << "rate=100\n1.0\n";
    CHECK_THROWS_AS(io::load_signal_csv(path), MalformedRow);
}

TEST_CASE("cmapss loader handles a small unit", "[io]") {
    const auto path = temp_dir() / "one_unit.txt";
    {
        std::ofstream out(path);
        for (int c = 1; c <= 5; ++c) {
            out << "1 " << c;
            for (int f = 0; f < 24; ++f) out << ' ' << (0.1 * f + c);
            out << "\n";
        }
    }
    const auto units = io::load_cmapss_text(path);
    REQUIRE(units.size() == 1);
    CHECK(units[0].unit_id == 1);
    CHECK(units[0].life_length() == 5);
    CHECK(units[0].cycles[2].cycle == 3);
    CHECK(units[0].cycles[0].settings.size() == 3);
    CHECK(units[0].cycles[0].sensors.size() == 21);
}

TEST_CASE("cmapss loader rejects malformed rows and cycle gaps", "[io]") {
    const auto short_row = temp_dir() / "short_row.txt";
    {
        std::ofstream out(short_row);
        out << "1 1";
        for (int f = 0; f < 23; ++f) out << " 0"; // 25 fields
        out << "\n";
    }
    CHECK_THROWS_AS(io::load_cmapss_text(short_row), MalformedRow);

    const auto gap = temp_dir() / "gap.txt";
    {
        std::ofstream out(gap);
        for (const int c : {1, 3}) {
            out << "1 " << c;
            for (int f = 0; f < 24; ++f) out << " 0";
            out << "\n";
        }
    }
    CHECK_THROWS_AS(io::load_cmapss_text(gap), NonConsecutiveCycles);
}

TEST_CASE("fleet round-trips through write+load identically", "[io]") {
    FleetSimConfig cfg;
    cfg.units = 4;
    cfg.life_min = 40;
    cfg.life_max = 60;
    cfg.seed = 17;
    const auto fleet = synth_turbofan_fleet(cfg);
    const auto path = temp_dir() / "fleet.txt";
    io::save_cmapss_text(path, fleet);
    const auto back = io::load_cmapss_text(path);
    REQUIRE(back.size() == fleet.size());
    for (std::size_t u = 0; u < fleet.size(); ++u) {
        CHECK(back[u].unit_id == fleet[u].unit_id);
        REQUIRE(back[u].life_length() == fleet[u].life_length());
        for (std::size_t t = 0; t < fleet[u].cycles.size(); ++t) {
            for (std::size_t s = 0; s < 3; ++s)
                CHECK(back[u].cycles[t].settings[s] == fleet[u].cycles[t].settings[s]);
            for (std::size_t j = 0; j < 21; ++j)
                CHECK(back[u].cycles[t].sensors[j] == fleet[u].cycles[t].sensors[j]);
        }
    }
}

TEST_CASE("tensor file round-trips bitwise", "[io]") {
    Rng rng(2);
    Tensor<float> t({3, 5, 7});
    for (auto& v : t.data) v = static_cast<float>(rng.gaussian());
    const auto path = temp_dir() / "tensor.ptk1";
    io::save_tensor(path, t);
    const Tensor<float> back = io::load_tensor(path);
    CHECK(back.shape == t.shape);
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(back.data[i] == t.data[i]);
}

TEST_CASE("scalar tensors have rank 0 and one value", "[io]") {
    Tensor<float> t(std::vector<std::size_t>{}, std::vector<float>{3.25f});
    const auto path = temp_dir() / "scalar.ptk1";
    io::save_tensor(path, t);
    const Tensor<float> back = io::load_tensor(path);
    CHECK(back.rank() == 0);
    REQUIRE(back.data.size() == 1);
    CHECK(back.data[0] == 3.25f);
}

TEST_CASE("tensor loader rejects corrupted files", "[io]") {
    const auto path = temp_dir() / "corrupt.ptk1";
    std::ofstream(path, std::ios::binary) << "NOPE1234";
    CHECK_THROWS_AS(io::load_tensor(path), BadMagic);

    const auto truncated = temp_dir() / "truncated.ptk1";
    {
        Tensor<float> t({4, 4});
        io::save_tensor(truncated, t);
        fs::resize_file(truncated, fs::file_size(truncated) - 7);
    }
    CHECK_THROWS_AS(io::load_tensor(truncated), TruncatedFile);
}

TEST_CASE("model file round-trips a mixed network", "[io]") {
    nn::Network<float> net;
    net.loss = nn::Loss::CCE;
    net.add<nn::Conv2DLayer<float>>(1, 4, 3, 3, nn::Activation::Relu);
    net.add<nn::MaxPool2DLayer<float>>();
    net.add<nn::FlattenLayer<float>>();
    net.add<nn::DropoutLayer<float>>(0.25);
    net.add<nn::DenseLayer<float>>(4 * 4 * 4, 3, nn::Activation::Identity);
    net.init_params(3);

    const auto path = temp_dir() / "model.ptkm";
    io::save_model(path, net);
    auto back = io::load_model<float>(path);
    CHECK(back.loss == nn::Loss::CCE);
    REQUIRE(back.layers().size() == net.layers().size());

    Tensor<float> input({1, 8, 8});
    Rng rng(4);
    for (auto& v : input.data) v = static_cast<float>(rng.gaussian());
    const auto a = net.forward(input);
    const auto b = back.forward(input);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.data[i] == b.data[i]);
}

TEST_CASE("model loader rejects foreign files", "[io]") {
    const auto path = temp_dir() / "not_model.ptkm";
    std::ofstream(path, std::ios::binary) << "PTK1garbage";
    CHECK_THROWS_AS(io::load_model<float>(path), BadMagic);
}

TEST_CASE("feature CSV round-trips", "[io]") {
    FeatureSeries series{"rms", {1.5, 2.25, 3.125}};
    const auto path = temp_dir() / "rms.csv";
    io::save_feature_csv(path, series);
    const FeatureSeries back = io::load_feature_csv(path);
    CHECK(back.feature_name == "rms");
    CHECK(back.values == series.values);
}

TEST_CASE("manifest round-trips and validates", "[io]") {
    const auto dir = temp_dir() / "manifest_test";
    fs::create_directories(dir);
    std::ofstream(dir / "a.ptk1") << "x";
    std::ofstream(dir / "b.ptk1") << "x";

    io::DatasetManifest manifest;
    manifest.task = io::TaskKind::ScaleogramHealth;
    manifest.seed = 99;
    manifest.samples = {{"a.ptk1", "0"}, {"b.ptk1", "1"}};
    const auto path = dir / "manifest.txt";
    io::save_manifest(path, manifest);

    const auto back = io::load_manifest(path);
    CHECK(back.task == io::TaskKind::ScaleogramHealth);
    CHECK(back.seed == 99);
    REQUIRE(back.samples.size() == 2);
    CHECK(back.samples[0].label == "0");

    // missing file detection
    io::DatasetManifest missing = manifest;
    missing.samples.push_back({"ghost.ptk1", "0"});
    const auto bad_path = dir / "missing.txt";
    io::save_manifest(bad_path, missing);
    CHECK_THROWS_AS(io::load_manifest(bad_path), Error);

    // fractions must sum to 1
    std::ofstream(dir / "badsplit.txt") << "task=FaultImageClass\nsplit=0.5,0.2,0.2\nseed=0\n";
    CHECK_THROWS_AS(io::load_manifest(dir / "badsplit.txt"), Error);
}

TEST_CASE("split assignment is deterministic and order-free", "[io]") {
    io::DatasetManifest manifest;
    manifest.seed = 7;
    std::size_t train = 0, val = 0, test = 0;
    for (int i = 0; i < 5000; ++i) {
        const std::string path = "sample_" + std::to_string(i) + ".ptk1";
        const auto s = io::split_of(manifest, path);
        CHECK(s == io::split_of(manifest, path)); // repeatable
        if (s == io::Split::Train) ++train;
        else if (s == io::Split::Val) ++val;
        else ++test;
    }
    CHECK(std::abs(int(train) - 3400) < 200);
    CHECK(std::abs(int(val) - 600) < 150);
    CHECK(std::abs(int(test) - 1000) < 150);
}

TEST_CASE("architecture configs build shaped networks", "[io]") {
    std::istringstream cfg(R"(# toy net
input 1x8x8
conv 4 3x3 relu
maxpool
flatten
dense 16 tanh
dropout 0.5
dense 3
loss cce
)");
    auto built = io::build_network_from_config<float>(cfg);
    CHECK(built.input_shape == std::vector<std::size_t>{1, 8, 8});
    REQUIRE(built.net.layers().size() == 6);
    built.net.init_params(5);

    Tensor<float> input({1, 8, 8});
    const auto out = built.net.forward(input);
    CHECK(out.shape == std::vector<std::size_t>{3});
}

TEST_CASE("lstm architecture configs carry masks", "[io]") {
    std::istringstream cfg(R"(input 10x4
lstm 8 seq
lstm 6 last
dense 10
loss mse
mask -10
)");
    auto built = io::build_network_from_config<float>(cfg);
    CHECK(built.net.mask_value == -10.0);
    built.net.init_params(6);
    Tensor<float> input({10, 4});
    CHECK(built.net.forward(input).shape == std::vector<std::size_t>{10});
}

TEST_CASE("train report CSV has the documented header", "[io]") {
    nn::TrainReport report;
    report.epochs.push_back({1, 0.5, 0.6, 0.8, 0.75});
    report.epochs.push_back({2, 0.4, 0.5, 0.9, 0.85});
    const auto path = temp_dir() / "report.csv";
    io::save_train_report_csv(path, report);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "epoch,train_loss,val_loss,train_metric,val_metric");
    std::string row;
    std::getline(in, row);
    CHECK(row.substr(0, 2) == "1,");
}

TEST_CASE("SVG outputs are well-formed XML", "[io]") {
    const auto dir = temp_dir();

    plot::svg_line_plot(dir / "line.svg",
                        {{"loss", {0, 1, 2, 3}, {1.0, 0.5, 0.25, 0.2}},
                         {"val", {0, 1, 2, 3}, {1.1, 0.7, 0.5, 0.45}}},
                        "training curves", "epoch", "loss");
    CHECK(xml_well_formed(dir / "line.svg"));

    plot::svg_scatter(dir / "scatter.svg",
                      {{0.1, 0.9, 0.0, "a"}, {0.9, 0.95, 0.5, "b"}, {0.5, 0.2, 1.0, "c"}},
                      "fitness", "monotonicity", "trendability", true);
    CHECK(xml_well_formed(dir / "scatter.svg"));

    Rng rng(8);
    std::vector<double> scores(60);
    std::vector<int> labels(60);
    for (std::size_t i = 0; i < 60; ++i) {
        scores[i] = rng.uniform();
        labels[i] = i % 2 == 0 ? 1 : 0;
    }
    const auto [curve, auc] = roc_auc(scores, labels);
    plot::svg_roc(dir / "roc.svg", curve, auc);
    CHECK(xml_well_formed(dir / "roc.svg"));

    const std::vector<int> y{0, 1, 2, 1, 0};
    plot::svg_confusion(dir / "confusion.svg", confusion(y, y, 3));
    CHECK(xml_well_formed(dir / "confusion.svg"));

    plot::svg_pca_scatter(dir / "pca.svg",
                          {{0.0, 1.0}, {0.5, 0.8}, {1.0, 0.2}, {1.5, -0.4}});
    CHECK(xml_well_formed(dir / "pca.svg"));
}

TEST_CASE("scaleogram PGM export carries a scales sidecar", "[io]") {
    Scaleogram s;
    s.scales = {2.0, 4.0, 8.0};
    s.times = {0, 1, 2, 3};
    s.magnitudes = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
    const auto path = temp_dir() / "scaleogram.pgm";
    plot::save_scaleogram_pgm(path, s);

    std::ifstream in(path, std::ios::binary);
    std::string magic;
    in >> magic;
    CHECK(magic == "P5");
    std::size_t w = 0, h = 0;
    int maxval = 0;
    in >> w >> h >> maxval;
    CHECK(w == 4);
    CHECK(h == 3);
    CHECK(maxval == 255);
    in.get();
    std::vector<unsigned char> pixels(12);
    in.read(reinterpret_cast<char*>(pixels.data()), 12);
    CHECK(pixels[0] == 0);
    CHECK(pixels[11] == 255);

    std::ifstream side(temp_dir() / "scaleogram.pgm.scales.csv");
    std::string line;
    std::getline(side, line);
    CHECK(line == "row,scale");
    std::vector<double> scales;
    while (std::getline(side, line))
        if (!line.empty()) scales.push_back(std::stod(line.substr(line.find(',') + 1)));
    CHECK(scales == std::vector<double>{2.0, 4.0, 8.0});
}
