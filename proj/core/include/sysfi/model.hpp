#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sysfi/lowering.hpp"
#include "sysfi/numerics.hpp"

namespace sysfi {

enum class LayerKind : std::uint8_t { Conv, Fc, Relu, MaxPool, Flatten, Softmax };

const char* layer_kind_name(LayerKind kind);
std::optional<LayerKind> layer_kind_from_name(std::string_view name);

// One network layer. Conv weights are K x C x kh x kw, fc weights in x out;
// biases hold one accumulator-format word per output channel/feature at
// scale in_scale * weight_scale.
struct Layer {
    LayerKind kind = LayerKind::Relu;

    QuantTensor weights;
    QuantTensor bias;
    bool has_bias = false;

    ConvShape conv;          // conv only (in_h/in_w filled in by shape inference)
    NumberFormat acc_format = NumberFormat::int32();
    NumberFormat out_format = NumberFormat::int8();
    double out_scale = 1.0;  // requantization target scale (conv/fc)

    int pool = 2;            // maxpool window and stride
    int pool_stride = 2;

    bool is_matmul_layer() const { return kind == LayerKind::Conv || kind == LayerKind::Fc; }
};

struct NetworkModel {
    std::string name;
    std::vector<std::size_t> input_shape;
    NumberFormat input_format = NumberFormat::int8();
    double input_scale = 1.0;
    std::vector<Layer> layers;

    // Activation shape entering each layer, filled by validation;
    // layer_input_shapes[i] feeds layers[i], back() is the output shape.
    std::vector<std::vector<std::size_t>> layer_input_shapes;
    // Activation scale entering each layer.
    std::vector<double> layer_input_scales;

    std::size_t parameter_count() const;
    std::size_t class_count() const { return layer_input_shapes.back().at(0); }

    // Shape inference + structural checks; throws ValidationError.
    void validate();
};

// Loads a JSON manifest plus the tensor files it references. Tensor paths are
// resolved relative to the manifest's directory. Throws IoError for missing
// or malformed files, ValidationError for inconsistent graphs.
NetworkModel load_model(const std::filesystem::path& manifest_path);

} // namespace sysfi
