// File formats: signal/feature/fitness/report CSVs, C-MAPSS-style text,
// binary tensor (PTK1) and model (PTKM) files, dataset manifests and the
// plain-text network architecture config. All multi-byte integers are
// little-endian.

#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ptk/errors.hpp"
#include "ptk/features.hpp"
#include "ptk/fitness.hpp"
#include "ptk/nn.hpp"
#include "ptk/prognostics.hpp"
#include "ptk/rng.hpp"
#include "ptk/signal.hpp"
#include "ptk/tensor.hpp"
#include "ptk/train.hpp"

namespace ptk::io {

namespace detail {

inline void write_bytes(std::ostream& out, const void* data, std::size_t n) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

inline void read_bytes(std::istream& in, void* data, std::size_t n) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) throw TruncatedFile("unexpected end of file");
}

inline void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    write_bytes(out, b, 4);
}

inline std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    read_bytes(in, b, 4);
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

inline void write_f32(std::ostream& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    write_u32(out, bits);
}

inline float read_f32(std::istream& in) {
    const std::uint32_t bits = read_u32(in);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& token, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw MalformedRow(line_no, "not a number: '" + token + "'");
    }
}

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

inline std::vector<std::string> split_char(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw Error("cannot open for writing: " + path.string());
    return out;
}

inline std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw Error("cannot open for reading: " + path.string());
    return in;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Signal CSV: one header line `sample_rate_hz=<float>`, one amplitude per line.

inline void save_signal_csv(const std::filesystem::path& path, const Signal& signal) {
    auto out = detail::open_out(path);
    out << "sample_rate_hz=" << detail::format_double(signal.sample_rate_hz) << "\n";
    for (const double v : signal.samples) out << detail::format_double(v) << "\n";
}

inline Signal load_signal_csv(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw MalformedRow(1, "empty signal file");
    constexpr const char* kPrefix = "sample_rate_hz=";
    if (line.rfind(kPrefix, 0) != 0) throw MalformedRow(1, "missing sample_rate_hz header");
    Signal signal;
    signal.sample_rate_hz = detail::parse_double(line.substr(std::strlen(kPrefix)), 1);
    if (!(signal.sample_rate_hz > 0.0)) throw MalformedRow(1, "sample rate must be positive");
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        signal.samples.push_back(detail::parse_double(line, line_no));
    }
    if (signal.samples.empty()) throw MalformedRow(line_no, "signal has no samples");
    return signal;
}

// ---------------------------------------------------------------------------
// C-MAPSS-style text: rows of 26 whitespace-separated numbers
// (unit id, cycle, 3 settings, 21 sensors), cycles consecutive from 1.

inline void save_cmapss_text(const std::filesystem::path& path,
                             const std::vector<RunToFailureUnit>& units) {
    auto out = detail::open_out(path);
    for (const auto& unit : units) {
        for (const auto& rec : unit.cycles) {
            out << unit.unit_id << ' ' << rec.cycle;
            for (const double s : rec.settings) out << ' ' << detail::format_double(s);
            for (const double s : rec.sensors) out << ' ' << detail::format_double(s);
            out << "\n";
        }
    }
}

inline std::vector<RunToFailureUnit> load_cmapss_text(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    std::vector<RunToFailureUnit> units;
    std::map<int, std::size_t> index_of;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = detail::split_ws(line);
        if (fields.size() != 26)
            throw MalformedRow(line_no,
                               "expected 26 fields, got " + std::to_string(fields.size()));
        const auto unit_id = static_cast<int>(detail::parse_double(fields[0], line_no));
        const auto cycle = static_cast<int>(detail::parse_double(fields[1], line_no));

        auto it = index_of.find(unit_id);
        if (it == index_of.end()) {
            index_of.emplace(unit_id, units.size());
            units.push_back(RunToFailureUnit{unit_id, {}});
            it = index_of.find(unit_id);
        }
        RunToFailureUnit& unit = units[it->second];
        const int expected = static_cast<int>(unit.cycles.size()) + 1;
        if (cycle != expected)
            throw NonConsecutiveCycles(unit_id, "expected cycle " + std::to_string(expected) +
                                                    ", got " + std::to_string(cycle));
        CycleRecord rec;
        rec.cycle = cycle;
        for (std::size_t f = 2; f < 5; ++f)
            rec.settings.push_back(detail::parse_double(fields[f], line_no));
        for (std::size_t f = 5; f < 26; ++f)
            rec.sensors.push_back(detail::parse_double(fields[f], line_no));
        unit.cycles.push_back(std::move(rec));
    }
    return units;
}

// ---------------------------------------------------------------------------
// Tensor file PTK1: magic, version u32, rank u32, dims u32 each, f32 payload.

inline void save_tensor(const std::filesystem::path& path, const Tensor<float>& tensor) {
    auto out = detail::open_out(path, true);
    detail::write_bytes(out, "PTK1", 4);
    detail::write_u32(out, 1);
    detail::write_u32(out, static_cast<std::uint32_t>(tensor.rank()));
    for (const std::size_t d : tensor.shape)
        detail::write_u32(out, static_cast<std::uint32_t>(d));
    for (const float v : tensor.data) detail::write_f32(out, v);
}

inline Tensor<float> load_tensor(const std::filesystem::path& path) {
    auto in = detail::open_in(path, true);
    char magic[4];
    detail::read_bytes(in, magic, 4);
    if (std::memcmp(magic, "PTK1", 4) != 0) throw BadMagic("not a PTK1 tensor file");
    const std::uint32_t version = detail::read_u32(in);
    if (version != 1) throw BadMagic("unsupported tensor file version");
    const std::uint32_t rank = detail::read_u32(in);
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = detail::read_u32(in);
    Tensor<float> tensor(shape);
    for (auto& v : tensor.data) v = detail::read_f32(in);
    // must be exactly at EOF
    char extra;
    if (in.read(&extra, 1).gcount() != 0) throw TruncatedFile("trailing bytes in tensor file");
    return tensor;
}

// ---------------------------------------------------------------------------
// Model file PTKM: magic, version, loss, mask flag/value, layer list.
// Layer entry: kind tag u32, hyper count u32, hyper f32 each, param count
// u32, params f32 each.

namespace detail {

inline std::uint32_t layer_tag(const std::string& kind) {
    if (kind == "dense") return 0;
    if (kind == "conv2d") return 1;
    if (kind == "maxpool2d") return 2;
    if (kind == "dropout") return 3;
    if (kind == "flatten") return 4;
    if (kind == "lstm") return 5;
    throw Error("unknown layer kind: " + kind);
}

inline std::string layer_kind(std::uint32_t tag) {
    switch (tag) {
        case 0: return "dense";
        case 1: return "conv2d";
        case 2: return "maxpool2d";
        case 3: return "dropout";
        case 4: return "flatten";
        case 5: return "lstm";
    }
    throw BadMagic("unknown layer tag: " + std::to_string(tag));
}

} // namespace detail

template <class Real>
void save_model(const std::filesystem::path& path, nn::Network<Real>& net) {
    auto out = detail::open_out(path, true);
    detail::write_bytes(out, "PTKM", 4);
    detail::write_u32(out, 1);
    detail::write_u32(out, static_cast<std::uint32_t>(net.loss));
    const bool has_mask = !std::isnan(net.mask_value);
    detail::write_u32(out, has_mask ? 1 : 0);
    detail::write_f32(out, has_mask ? static_cast<float>(net.mask_value) : 0.0f);
    detail::write_u32(out, static_cast<std::uint32_t>(net.layers().size()));
    for (auto& layer : net.layers()) {
        detail::write_u32(out, detail::layer_tag(layer->kind()));
        const std::vector<double> hyper = layer->hyperparams();
        detail::write_u32(out, static_cast<std::uint32_t>(hyper.size()));
        for (const double h : hyper) detail::write_f32(out, static_cast<float>(h));
        const auto params = layer->params();
        detail::write_u32(out, static_cast<std::uint32_t>(params.size()));
        for (const Real p : params) detail::write_f32(out, static_cast<float>(p));
    }
}

template <class Real>
nn::Network<Real> load_model(const std::filesystem::path& path) {
    auto in = detail::open_in(path, true);
    char magic[4];
    detail::read_bytes(in, magic, 4);
    if (std::memcmp(magic, "PTKM", 4) != 0) throw BadMagic("not a PTKM model file");
    if (detail::read_u32(in) != 1) throw BadMagic("unsupported model file version");

    nn::Network<Real> net;
    net.loss = static_cast<nn::Loss>(detail::read_u32(in));
    const bool has_mask = detail::read_u32(in) != 0;
    const float mask = detail::read_f32(in);
    if (has_mask) net.mask_value = mask;

    const std::uint32_t layer_count = detail::read_u32(in);
    for (std::uint32_t l = 0; l < layer_count; ++l) {
        const std::string kind = detail::layer_kind(detail::read_u32(in));
        const std::uint32_t hyper_count = detail::read_u32(in);
        std::vector<double> hyper(hyper_count);
        for (auto& h : hyper) h = detail::read_f32(in);
        auto layer = nn::make_layer<Real>(kind, hyper);
        const std::uint32_t param_count = detail::read_u32(in);
        auto params = layer->params();
        if (params.size() != param_count)
            throw TruncatedFile("parameter count mismatch in layer " + std::to_string(l));
        for (auto& p : params) p = static_cast<Real>(detail::read_f32(in));
        net.add_layer(std::move(layer));
    }
    return net;
}

// ---------------------------------------------------------------------------
// Small CSVs.

inline void save_feature_csv(const std::filesystem::path& path, const FeatureSeries& series) {
    auto out = detail::open_out(path);
    out << "snapshot_index," << series.feature_name << "\n";
    for (std::size_t i = 0; i < series.values.size(); ++i)
        out << i << ',' << detail::format_double(series.values[i]) << "\n";
}

inline FeatureSeries load_feature_csv(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw MalformedRow(1, "empty feature file");
    const auto header = detail::split_char(line, ',');
    if (header.size() != 2 || header[0] != "snapshot_index")
        throw MalformedRow(1, "bad feature CSV header");
    FeatureSeries series;
    series.feature_name = header[1];
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = detail::split_char(line, ',');
        if (fields.size() != 2) throw MalformedRow(line_no, "expected 2 columns");
        series.values.push_back(detail::parse_double(fields[1], line_no));
    }
    return series;
}

inline void save_fitness_csv(const std::filesystem::path& path,
                             const std::vector<FitnessScore>& table) {
    auto out = detail::open_out(path);
    out << "feature,monotonicity,trendability\n";
    for (const auto& row : table)
        out << row.feature_name << ',' << detail::format_double(row.monotonicity) << ','
            << detail::format_double(row.trendability) << "\n";
}

inline void save_train_report_csv(const std::filesystem::path& path,
                                  const nn::TrainReport& report) {
    auto out = detail::open_out(path);
    out << "epoch,train_loss,val_loss,train_metric,val_metric\n";
    for (const auto& e : report.epochs) {
        out << e.epoch << ',' << detail::format_double(e.train_loss) << ',';
        if (std::isfinite(e.val_loss)) out << detail::format_double(e.val_loss);
        out << ',' << detail::format_double(e.train_metric) << ',';
        if (std::isfinite(e.val_metric)) out << detail::format_double(e.val_metric);
        out << "\n";
    }
}

inline void save_rul_csv(const std::filesystem::path& path, std::span<const double> predicted,
                         std::span<const double> smoothed, std::span<const double> actual) {
    auto out = detail::open_out(path);
    out << "cycle,predicted_rul,smoothed_rul,actual_rul\n";
    for (std::size_t i = 0; i < predicted.size(); ++i)
        out << (i + 1) << ',' << detail::format_double(predicted[i]) << ','
            << detail::format_double(smoothed[i]) << ',' << detail::format_double(actual[i])
            << "\n";
}

inline void save_metrics_csv(const std::filesystem::path& path,
                             const std::vector<std::pair<std::string, double>>& metrics) {
    auto out = detail::open_out(path);
    out << "metric,value\n";
    for (const auto& [name, value] : metrics)
        out << name << ',' << detail::format_double(value) << "\n";
}

// ---------------------------------------------------------------------------
// Dataset manifest: task kind, split fractions, seed, sample list.
// Sample membership in train/val/test is a pure function of (seed, path),
// so re-running never reshuffles membership.

enum class TaskKind { FaultImageClass, ScaleogramHealth, RulRegression };

inline const char* to_string(TaskKind t) {
    switch (t) {
        case TaskKind::FaultImageClass: return "FaultImageClass";
        case TaskKind::ScaleogramHealth: return "ScaleogramHealth";
        case TaskKind::RulRegression: return "RulRegression";
    }
    return "?";
}

inline TaskKind task_from_string(const std::string& s) {
    if (s == "FaultImageClass") return TaskKind::FaultImageClass;
    if (s == "ScaleogramHealth") return TaskKind::ScaleogramHealth;
    if (s == "RulRegression") return TaskKind::RulRegression;
    throw Error("unknown task kind: " + s);
}

struct ManifestSample {
    std::string path;  // relative to the manifest location
    std::string label; // class index, target value or target tensor path
};

struct DatasetManifest {
    TaskKind task = TaskKind::FaultImageClass;
    double train_fraction = 0.68;
    double val_fraction = 0.12;
    double test_fraction = 0.20;
    std::uint64_t seed = 0;
    std::vector<ManifestSample> samples;
    std::filesystem::path base_dir; // set on load

    std::filesystem::path resolve(const std::string& sample_path) const {
        const std::filesystem::path p(sample_path);
        return p.is_absolute() ? p : base_dir / p;
    }
};

enum class Split { Train, Val, Test };

inline Split split_of(const DatasetManifest& manifest, const std::string& sample_path) {
    const double u = static_cast<double>(hash64(manifest.seed, sample_path) >> 11) * 0x1.0p-53;
    if (u < manifest.train_fraction) return Split::Train;
    if (u < manifest.train_fraction + manifest.val_fraction) return Split::Val;
    return Split::Test;
}

inline void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
    auto out = detail::open_out(path);
    out << "task=" << to_string(manifest.task) << "\n";
    out << "split=" << detail::format_double(manifest.train_fraction) << ','
        << detail::format_double(manifest.val_fraction) << ','
        << detail::format_double(manifest.test_fraction) << "\n";
    out << "seed=" << manifest.seed << "\n";
    for (const auto& s : manifest.samples) out << "sample=" << s.path << ',' << s.label << "\n";
}

inline DatasetManifest load_manifest(const std::filesystem::path& path, bool check_files = true) {
    auto in = detail::open_in(path);
    DatasetManifest manifest;
    manifest.base_dir = path.has_parent_path() ? path.parent_path() : ".";
    std::string line;
    std::size_t line_no = 0;
    bool have_split = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw MalformedRow(line_no, "expected key=value");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "task") {
            manifest.task = task_from_string(value);
        } else if (key == "split") {
            const auto parts = detail::split_char(value, ',');
            if (parts.size() != 3) throw MalformedRow(line_no, "split needs 3 fractions");
            manifest.train_fraction = detail::parse_double(parts[0], line_no);
            manifest.val_fraction = detail::parse_double(parts[1], line_no);
            manifest.test_fraction = detail::parse_double(parts[2], line_no);
            have_split = true;
        } else if (key == "seed") {
            manifest.seed = static_cast<std::uint64_t>(std::stoull(value));
        } else if (key == "sample") {
            const auto comma = value.rfind(',');
            if (comma == std::string::npos)
                throw MalformedRow(line_no, "sample needs path,label");
            manifest.samples.push_back(
                ManifestSample{value.substr(0, comma), value.substr(comma + 1)});
        } else {
            throw MalformedRow(line_no, "unknown key: " + key);
        }
    }
    const double total =
        manifest.train_fraction + manifest.val_fraction + manifest.test_fraction;
    if (!have_split || std::abs(total - 1.0) > 1e-9)
        throw Error("manifest split fractions must sum to 1");
    if (check_files)
        for (const auto& s : manifest.samples)
            if (!std::filesystem::exists(manifest.resolve(s.path)))
                throw Error("manifest references missing file: " + s.path);
    return manifest;
}

// ---------------------------------------------------------------------------
// Architecture config: plain-text layer list.
//
//   input 1x64x64
//   conv 8 3x3 relu
//   maxpool
//   flatten
//   dense 128 relu
//   dropout 0.3
//   dense 10
//   loss cce
//   mask -10          (optional sequence sentinel)

namespace detail {

inline nn::Activation activation_from_string(const std::string& s) {
    if (s == "identity" || s == "linear") return nn::Activation::Identity;
    if (s == "sigmoid") return nn::Activation::Sigmoid;
    if (s == "tanh") return nn::Activation::Tanh;
    if (s == "relu") return nn::Activation::Relu;
    if (s == "leaky_relu") return nn::Activation::LeakyRelu;
    throw Error("unknown activation: " + s);
}

inline std::vector<std::size_t> parse_dims(const std::string& s) {
    std::vector<std::size_t> dims;
    for (const auto& part : split_char(s, 'x')) dims.push_back(std::stoul(part));
    return dims;
}

} // namespace detail

template <class Real>
struct BuiltNetwork {
    nn::Network<Real> net;
    std::vector<std::size_t> input_shape;
};

template <class Real>
BuiltNetwork<Real> build_network_from_config(std::istream& in) {
    BuiltNetwork<Real> built;
    std::vector<std::size_t> shape;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto tok = detail::split_ws(line);
        const std::string& op = tok[0];
        try {
            if (op == "input") {
                built.input_shape = detail::parse_dims(tok.at(1));
                shape = built.input_shape;
            } else if (op == "conv") {
                const auto out_ch = static_cast<std::size_t>(std::stoul(tok.at(1)));
                const auto k = detail::parse_dims(tok.at(2));
                const nn::Activation act = tok.size() > 3
                                               ? detail::activation_from_string(tok[3])
                                               : nn::Activation::Relu;
                if (shape.size() != 3) throw Error("conv needs [C,H,W] input");
                built.net.template add<nn::Conv2DLayer<Real>>(shape[0], out_ch, k.at(0), k.at(1), act);
                shape = {out_ch, shape[1], shape[2]};
            } else if (op == "maxpool") {
                if (shape.size() != 3) throw Error("maxpool needs [C,H,W] input");
                built.net.template add<nn::MaxPool2DLayer<Real>>();
                shape = {shape[0], (shape[1] + 1) / 2, (shape[2] + 1) / 2};
            } else if (op == "flatten") {
                built.net.template add<nn::FlattenLayer<Real>>();
                shape = {Tensor<Real>::count(shape)};
            } else if (op == "dense") {
                const auto units = static_cast<std::size_t>(std::stoul(tok.at(1)));
                const nn::Activation act = tok.size() > 2
                                               ? detail::activation_from_string(tok[2])
                                               : nn::Activation::Identity;
                if (shape.size() == 1) {
                    built.net.template add<nn::DenseLayer<Real>>(shape[0], units, act);
                    shape = {units};
                } else if (shape.size() == 2) { // row-wise over [T,F]
                    built.net.template add<nn::DenseLayer<Real>>(shape[1], units, act);
                    shape = {shape[0], units};
                } else {
                    throw Error("dense needs a flattened or [T,F] input");
                }
            } else if (op == "dropout") {
                built.net.template add<nn::DropoutLayer<Real>>(std::stod(tok.at(1)));
            } else if (op == "lstm") {
                const auto units = static_cast<std::size_t>(std::stoul(tok.at(1)));
                const bool seq = tok.size() > 2 && tok[2] == "seq";
                if (shape.size() != 2) throw Error("lstm needs [T,F] input");
                built.net.template add<nn::LstmLayer<Real>>(shape[1], units, seq);
                shape = seq ? std::vector<std::size_t>{shape[0], units}
                            : std::vector<std::size_t>{units};
            } else if (op == "loss") {
                const std::string& name = tok.at(1);
                if (name == "mse") built.net.loss = nn::Loss::MSE;
                else if (name == "bce") built.net.loss = nn::Loss::BCE;
                else if (name == "cce") built.net.loss = nn::Loss::CCE;
                else throw Error("unknown loss: " + name);
            } else if (op == "mask") {
                built.net.mask_value = tok.size() > 1 ? std::stod(tok[1]) : -10.0;
            } else {
                throw Error("unknown architecture directive: " + op);
            }
        } catch (const std::out_of_range&) {
            throw MalformedRow(line_no, "missing argument for '" + op + "'");
        }
    }
    if (built.input_shape.empty()) throw Error("architecture config must declare an input shape");
    return built;
}

template <class Real>
BuiltNetwork<Real> load_network_config(const std::filesystem::path& path) {
    auto in = detail::open_in(path);
    return build_network_from_config<Real>(in);
}

} // namespace ptk::io
