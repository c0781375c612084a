#include "sysfi/model.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "sysfi/errors.hpp"
#include "sysfi/tensor_io.hpp"

namespace sysfi {

using nlohmann::json;

const char* layer_kind_name(LayerKind kind) {
    switch (kind) {
    case LayerKind::Conv:    return "conv";
    case LayerKind::Fc:      return "fc";
    case LayerKind::Relu:    return "relu";
    case LayerKind::MaxPool: return "maxpool";
    case LayerKind::Flatten: return "flatten";
    default:                 return "softmax";
    }
}

std::optional<LayerKind> layer_kind_from_name(std::string_view name) {
    if (name == "conv") return LayerKind::Conv;
    if (name == "fc") return LayerKind::Fc;
    if (name == "relu") return LayerKind::Relu;
    if (name == "maxpool") return LayerKind::MaxPool;
    if (name == "flatten") return LayerKind::Flatten;
    if (name == "softmax") return LayerKind::Softmax;
    return std::nullopt;
}

std::size_t NetworkModel::parameter_count() const {
    std::size_t count = 0;
    for (const Layer& layer : layers) {
        if (!layer.is_matmul_layer()) continue;
        count += layer.weights.size();
        if (layer.has_bias) count += layer.bias.size();
    }
    return count;
}

void NetworkModel::validate() {
    if (layers.empty()) throw ValidationError("model has no layers");
    if (layers.back().kind != LayerKind::Softmax) {
        throw ValidationError("model must end with a softmax layer");
    }

    layer_input_shapes.clear();
    layer_input_scales.clear();
    std::vector<std::size_t> shape = input_shape;
    double scale = input_scale;

    for (std::size_t n = 0; n < layers.size(); ++n) {
        Layer& layer = layers[n];
        layer_input_shapes.push_back(shape);
        layer_input_scales.push_back(scale);
        const std::string where = "layer " + std::to_string(n) + " (" +
                                  layer_kind_name(layer.kind) + ")";

        switch (layer.kind) {
        case LayerKind::Conv: {
            if (shape.size() != 3) throw ValidationError(where + ": expects C x H x W input");
            if (layer.weights.rank() != 4) {
                throw ValidationError(where + ": weights must be K x C x kh x kw");
            }
            layer.conv.in_channels = static_cast<int>(layer.weights.shape[1]);
            layer.conv.out_channels = static_cast<int>(layer.weights.shape[0]);
            layer.conv.kernel_h = static_cast<int>(layer.weights.shape[2]);
            layer.conv.kernel_w = static_cast<int>(layer.weights.shape[3]);
            layer.conv.in_h = static_cast<int>(shape[1]);
            layer.conv.in_w = static_cast<int>(shape[2]);
            if (shape[0] != layer.weights.shape[1]) {
                throw ValidationError(where + ": input channels " + std::to_string(shape[0]) +
                                      " do not match weights " +
                                      std::to_string(layer.weights.shape[1]));
            }
            layer.conv.validate();
            if (layer.has_bias && layer.bias.size() != layer.weights.shape[0]) {
                throw ValidationError(where + ": bias size does not match output channels");
            }
            shape = {layer.weights.shape[0], static_cast<std::size_t>(layer.conv.out_h()),
                     static_cast<std::size_t>(layer.conv.out_w())};
            scale = layer.out_scale;
            break;
        }
        case LayerKind::Fc: {
            if (shape.size() != 1) throw ValidationError(where + ": expects flat input");
            if (layer.weights.rank() != 2 || layer.weights.shape[0] != shape[0]) {
                throw ValidationError(where + ": weights must be " + std::to_string(shape[0]) +
                                      " x out");
            }
            if (layer.has_bias && layer.bias.size() != layer.weights.shape[1]) {
                throw ValidationError(where + ": bias size does not match output features");
            }
            shape = {layer.weights.shape[1]};
            scale = layer.out_scale;
            break;
        }
        case LayerKind::Relu:
            break;
        case LayerKind::MaxPool: {
            if (shape.size() != 3) throw ValidationError(where + ": expects C x H x W input");
            if (layer.pool < 1 || layer.pool_stride < 1) {
                throw ValidationError(where + ": pool and stride must be >= 1");
            }
            const int h = static_cast<int>(shape[1]);
            const int w = static_cast<int>(shape[2]);
            if (layer.pool > h || layer.pool > w) {
                throw ValidationError(where + ": pool window larger than input");
            }
            shape = {shape[0],
                     static_cast<std::size_t>((h - layer.pool) / layer.pool_stride + 1),
                     static_cast<std::size_t>((w - layer.pool) / layer.pool_stride + 1)};
            break;
        }
        case LayerKind::Flatten: {
            std::size_t flat = 1;
            for (std::size_t e : shape) flat *= e;
            shape = {flat};
            break;
        }
        case LayerKind::Softmax:
            if (shape.size() != 1) throw ValidationError(where + ": expects flat input");
            if (n + 1 != layers.size()) throw ValidationError(where + ": must be the final layer");
            break;
        }
    }
    layer_input_shapes.push_back(shape);
    layer_input_scales.push_back(scale);
}

namespace {

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw IoError("malformed manifest " + path.string() + ": " + e.what());
    }
    return doc;
}

QuantTensor load_referenced_tensor(const json& node, const std::filesystem::path& base,
                                   const std::string& where) {
    if (!node.is_string()) throw ValidationError(where + ": expected a tensor file path");
    const std::filesystem::path path = base / node.get<std::string>();
    if (!std::filesystem::exists(path)) {
        throw IoError(where + ": missing tensor file " + path.string());
    }
    return load_tensor(path);
}

} // namespace

NetworkModel load_model(const std::filesystem::path& manifest_path) {
    const json doc = load_json(manifest_path);
    const std::filesystem::path base = manifest_path.parent_path();

    NetworkModel model;
    try {
        model.name = doc.value("name", "unnamed");
        const json& input = doc.at("input");
        model.input_shape = input.at("shape").get<std::vector<std::size_t>>();
        model.input_format = parse_format(input.at("format").get<std::string>());
        model.input_scale = input.at("scale").get<double>();

        for (const json& spec : doc.at("layers")) {
            Layer layer;
            const std::string kind_text = spec.at("kind").get<std::string>();
            const auto kind = layer_kind_from_name(kind_text);
            if (!kind) throw ValidationError("unknown layer kind '" + kind_text + "'");
            layer.kind = *kind;

            if (layer.is_matmul_layer()) {
                layer.weights = load_referenced_tensor(spec.at("weights"), base,
                                                       kind_text + " weights");
                if (spec.contains("weights_frac_bits")) {
                    layer.weights.format = NumberFormat::fixed(
                        layer.weights.format.width, spec.at("weights_frac_bits").get<int>());
                }
                if (spec.contains("bias")) {
                    layer.bias = load_referenced_tensor(spec.at("bias"), base, kind_text + " bias");
                    layer.has_bias = true;
                }
                if (spec.contains("acc_format")) {
                    layer.acc_format = parse_format(spec.at("acc_format").get<std::string>());
                }
                layer.out_format = parse_format(spec.at("out_format").get<std::string>());
                layer.out_scale = spec.at("out_scale").get<double>();
                if (layer.kind == LayerKind::Conv) {
                    layer.conv.stride = spec.value("stride", 1);
                    layer.conv.padding = spec.value("padding", 0);
                }
            } else if (layer.kind == LayerKind::MaxPool) {
                layer.pool = spec.at("pool").get<int>();
                layer.pool_stride = spec.value("stride", layer.pool);
            }
            model.layers.push_back(std::move(layer));
        }
    } catch (const json::exception& e) {
        throw ValidationError("manifest " + manifest_path.string() + ": " + e.what());
    }

    model.validate();
    return model;
}

} // namespace sysfi
