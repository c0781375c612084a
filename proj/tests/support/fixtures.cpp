#include "support/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "sysfi/inference.hpp"
#include "sysfi/rng.hpp"
#include "sysfi/tensor_io.hpp"

namespace sysfi::test {

using nlohmann::json;

TempDir::TempDir(const std::string& prefix) {
    std::random_device rd;
    for (int attempt = 0; attempt < 64; ++attempt) {
        auto candidate = std::filesystem::temp_directory_path() /
                         (prefix + "-" + std::to_string(rd()));
        if (std::filesystem::create_directories(candidate)) {
            path_ = candidate;
            return;
        }
    }
    throw std::runtime_error("could not create temp dir");
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::filesystem::path build_mlp_fixture(const std::filesystem::path& dir) {
    QuantTensor weights = QuantTensor::zeros({4, 2}, NumberFormat::int8(), 1.0);
    weights.at2(0, 0) = 1;
    weights.at2(1, 1) = 1;
    save_tensor(dir / "fc_w.tensor", weights);

    json manifest;
    manifest["name"] = "selector-mlp";
    manifest["input"] = {{"shape", {4}}, {"format", "int8"}, {"scale", 1.0}};
    manifest["layers"] = json::array({
        {{"kind", "fc"},
         {"weights", "fc_w.tensor"},
         {"acc_format", "int32"},
         {"out_format", "int8"},
         {"out_scale", 1.0}},
        {{"kind", "softmax"}},
    });
    const auto path = dir / "model.json";
    std::ofstream out(path);
    out << manifest.dump(2) << '\n';
    return path;
}

namespace {

std::vector<Word> random_words(SplitMix64& rng, std::size_t count, int lo, int hi) {
    std::vector<Word> words(count);
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
    for (auto& w : words) w = lo + static_cast<Word>(rng.next_below(span));
    return words;
}

struct RealConv {
    int channels, h, w;
    std::vector<double> values; // C x H x W
};

// Real-valued shadow pass used only to pick sane requantization scales.
RealConv conv_real(const RealConv& in, const std::vector<double>& kernel,
                   const std::vector<double>& bias, int k_out, int kh, int kw, int stride, int pad,
                   double& max_abs) {
    const int oh = (in.h + 2 * pad - kh) / stride + 1;
    const int ow = (in.w + 2 * pad - kw) / stride + 1;
    RealConv out{k_out, oh, ow, std::vector<double>(static_cast<std::size_t>(k_out) * oh * ow, 0.0)};
    max_abs = 0.0;
    for (int k = 0; k < k_out; ++k) {
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
                double acc = bias[static_cast<std::size_t>(k)];
                for (int ch = 0; ch < in.channels; ++ch) {
                    for (int ky = 0; ky < kh; ++ky) {
                        for (int kx = 0; kx < kw; ++kx) {
                            const int iy = oy * stride - pad + ky;
                            const int ix = ox * stride - pad + kx;
                            if (iy < 0 || iy >= in.h || ix < 0 || ix >= in.w) continue;
                            acc += in.values[(static_cast<std::size_t>(ch) * in.h + iy) * in.w + ix] *
                                   kernel[((static_cast<std::size_t>(k) * in.channels + ch) * kh +
                                           ky) *
                                              kw +
                                          kx];
                        }
                    }
                }
                out.values[(static_cast<std::size_t>(k) * oh + oy) * ow + ox] = acc;
                max_abs = std::max(max_abs, std::abs(acc));
            }
        }
    }
    return out;
}

void relu_pool_real(RealConv& t, int pool) {
    for (double& v : t.values) v = std::max(v, 0.0);
    const int oh = t.h / pool;
    const int ow = t.w / pool;
    std::vector<double> pooled(static_cast<std::size_t>(t.channels) * oh * ow, 0.0);
    for (int ch = 0; ch < t.channels; ++ch) {
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
                double best = 0.0;
                for (int py = 0; py < pool; ++py) {
                    for (int px = 0; px < pool; ++px) {
                        best = std::max(best, t.values[(static_cast<std::size_t>(ch) * t.h +
                                                        oy * pool + py) *
                                                           t.w +
                                                       ox * pool + px]);
                    }
                }
                pooled[(static_cast<std::size_t>(ch) * oh + oy) * ow + ox] = best;
            }
        }
    }
    t.h = oh;
    t.w = ow;
    t.values = std::move(pooled);
}

} // namespace

std::filesystem::path build_lenet_fixture(const std::filesystem::path& dir, std::uint64_t seed) {
    SplitMix64 rng = SplitMix64::substream(seed, 0x13e7);
    const double w_scale = 1.0 / 64.0;
    const double in_scale = 1.0 / 127.0;

    // Probe image for scale calibration.
    RealConv probe{1, 28, 28, std::vector<double>(28 * 28)};
    for (double& v : probe.values) v = rng.next_double();

    struct ConvSpec {
        int k_out, c_in, kh, kw, stride, pad;
        std::string w_file, b_file;
    };
    const ConvSpec conv_specs[2] = {
        {6, 1, 5, 5, 1, 2, "conv1_w.tensor", "conv1_b.tensor"},
        {16, 6, 5, 5, 1, 0, "conv2_w.tensor", "conv2_b.tensor"},
    };
    const int fc_dims[3][2] = {{400, 120}, {120, 84}, {84, 10}};
    const char* fc_files[3][2] = {{"fc1_w.tensor", "fc1_b.tensor"},
                                  {"fc2_w.tensor", "fc2_b.tensor"},
                                  {"fc3_w.tensor", "fc3_b.tensor"}};

    json layers = json::array();
    RealConv act = probe;
    double prev_scale = in_scale;

    for (const ConvSpec& spec : conv_specs) {
        const std::size_t w_count = static_cast<std::size_t>(spec.k_out) * spec.c_in * spec.kh *
                                    spec.kw;
        const std::vector<Word> w_words = random_words(rng, w_count, -20, 20);
        const std::vector<Word> b_words = random_words(rng, static_cast<std::size_t>(spec.k_out),
                                                       -2000, 2000);

        QuantTensor w_tensor;
        w_tensor.shape = {static_cast<std::size_t>(spec.k_out), static_cast<std::size_t>(spec.c_in),
                          static_cast<std::size_t>(spec.kh), static_cast<std::size_t>(spec.kw)};
        w_tensor.data = w_words;
        w_tensor.format = NumberFormat::int8();
        w_tensor.scale = w_scale;
        save_tensor(dir / spec.w_file, w_tensor);

        const double product_scale = prev_scale * w_scale;
        QuantTensor b_tensor;
        b_tensor.shape = {static_cast<std::size_t>(spec.k_out)};
        b_tensor.data = b_words;
        b_tensor.format = NumberFormat::int32();
        b_tensor.scale = product_scale;
        save_tensor(dir / spec.b_file, b_tensor);

        std::vector<double> kernel_real(w_count);
        for (std::size_t n = 0; n < w_count; ++n) kernel_real[n] = w_words[n] * w_scale * prev_scale;
        std::vector<double> bias_real(b_words.size());
        for (std::size_t n = 0; n < b_words.size(); ++n) bias_real[n] = b_words[n] * product_scale;
        // kernel_real already folds the activation scale, so feed words-as-real.
        RealConv act_words = act;
        if (&spec == &conv_specs[0]) {
            for (double& v : act_words.values) v = std::round(v / in_scale);
        }

        double max_abs = 0.0;
        act = conv_real(act_words, kernel_real, bias_real, spec.k_out, spec.kh, spec.kw, spec.stride,
                        spec.pad, max_abs);
        const double out_scale = std::max(max_abs, 1e-6) / 100.0;
        layers.push_back({{"kind", "conv"},
                          {"weights", spec.w_file},
                          {"bias", spec.b_file},
                          {"stride", spec.stride},
                          {"padding", spec.pad},
                          {"acc_format", "int32"},
                          {"out_format", "int8"},
                          {"out_scale", out_scale}});
        layers.push_back({{"kind", "relu"}});
        layers.push_back({{"kind", "maxpool"}, {"pool", 2}, {"stride", 2}});

        // Quantize the shadow activation the same way the runtime will.
        for (double& v : act.values) {
            v = std::clamp(std::round(v / out_scale), -127.0, 127.0);
        }
        relu_pool_real(act, 2);
        prev_scale = out_scale;
    }

    layers.push_back({{"kind", "flatten"}});

    std::vector<double> flat = act.values; // words-as-real after the conv stack
    for (int f = 0; f < 3; ++f) {
        const std::size_t in_dim = static_cast<std::size_t>(fc_dims[f][0]);
        const std::size_t out_dim = static_cast<std::size_t>(fc_dims[f][1]);
        const std::vector<Word> w_words = random_words(rng, in_dim * out_dim, -20, 20);
        const std::vector<Word> b_words = random_words(rng, out_dim, -2000, 2000);

        QuantTensor w_tensor;
        w_tensor.shape = {in_dim, out_dim};
        w_tensor.data = w_words;
        w_tensor.format = NumberFormat::int8();
        w_tensor.scale = w_scale;
        save_tensor(dir / fc_files[f][0], w_tensor);

        const double product_scale = prev_scale * w_scale;
        QuantTensor b_tensor;
        b_tensor.shape = {out_dim};
        b_tensor.data = b_words;
        b_tensor.format = NumberFormat::int32();
        b_tensor.scale = product_scale;
        save_tensor(dir / fc_files[f][1], b_tensor);

        std::vector<double> next(out_dim, 0.0);
        double max_abs = 0.0;
        for (std::size_t o = 0; o < out_dim; ++o) {
            double acc = static_cast<double>(b_words[o]);
            for (std::size_t i = 0; i < in_dim; ++i) {
                acc += flat[i] * static_cast<double>(w_words[i * out_dim + o]);
            }
            acc *= product_scale;
            next[o] = acc;
            max_abs = std::max(max_abs, std::abs(acc));
        }
        const double out_scale = std::max(max_abs, 1e-6) / 100.0;
        layers.push_back({{"kind", "fc"},
                          {"weights", fc_files[f][0]},
                          {"bias", fc_files[f][1]},
                          {"acc_format", "int32"},
                          {"out_format", "int8"},
                          {"out_scale", out_scale}});
        if (f < 2) layers.push_back({{"kind", "relu"}});

        for (std::size_t o = 0; o < out_dim; ++o) {
            double word = std::clamp(std::round(next[o] / out_scale), -127.0, 127.0);
            if (f < 2) word = std::max(word, 0.0);
            next[o] = word;
        }
        flat = std::move(next);
        prev_scale = out_scale;
    }

    layers.push_back({{"kind", "softmax"}});

    json manifest;
    manifest["name"] = "lenet5-fixture";
    manifest["input"] = {{"shape", {1, 28, 28}}, {"format", "int8"}, {"scale", in_scale}};
    manifest["layers"] = layers;
    const auto path = dir / "model.json";
    std::ofstream out(path);
    out << manifest.dump(2) << '\n';
    return path;
}

std::filesystem::path write_idx_inputs(const std::filesystem::path& dir, std::size_t count,
                                       std::uint64_t seed) {
    SplitMix64 rng = SplitMix64::substream(seed, 0x1d1);
    IdxImages set;
    set.count = count;
    set.rows = 28;
    set.cols = 28;
    set.images.resize(count);
    for (auto& image : set.images) {
        image.resize(28 * 28);
        // Blobby synthetic digits: a few bright gaussian-ish spots on noise.
        for (double& v : image) v = 0.1 * rng.next_double();
        for (int blob = 0; blob < 4; ++blob) {
            const double cy = 4 + 20 * rng.next_double();
            const double cx = 4 + 20 * rng.next_double();
            const double amp = 0.5 + 0.5 * rng.next_double();
            for (int y = 0; y < 28; ++y) {
                for (int x = 0; x < 28; ++x) {
                    const double d2 = (y - cy) * (y - cy) + (x - cx) * (x - cx);
                    image[static_cast<std::size_t>(y) * 28 + x] += amp * std::exp(-d2 / 8.0);
                }
            }
        }
        for (double& v : image) v = std::min(v, 1.0);
    }
    const auto path = dir / "images-idx3-ubyte";
    save_idx_images(path, set);
    return path;
}

std::vector<QuantTensor> load_fixture_inputs(const NetworkModel& model,
                                             const std::filesystem::path& idx_path,
                                             std::size_t count) {
    const IdxImages set = load_idx_images(idx_path);
    std::vector<QuantTensor> inputs;
    inputs.reserve(count);
    for (std::size_t n = 0; n < count && n < set.images.size(); ++n) {
        inputs.push_back(quantize_model_input(model, set.images[n]));
    }
    return inputs;
}

std::vector<double> random_probability_vector(std::size_t classes, std::uint64_t seed) {
    SplitMix64 rng = SplitMix64::substream(seed, 0x9b0b);
    std::vector<double> v(classes);
    double sum = 0.0;
    for (double& p : v) {
        p = 0.01 + rng.next_double();
        sum += p;
    }
    for (double& p : v) p /= sum;
    return v;
}

} // namespace sysfi::test
