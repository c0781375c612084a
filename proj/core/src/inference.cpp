#include "sysfi/inference.hpp"

#include <algorithm>
#include <cmath>

#include "sysfi/errors.hpp"
#include "sysfi/lowering.hpp"

namespace sysfi {

void ExecutionPlan::validate(const NetworkModel& model) const {
    if (!target_layer) return;
    if (*target_layer >= model.layers.size()) {
        throw ValidationError("target layer index " + std::to_string(*target_layer) +
                              " out of range");
    }
    const Layer& layer = model.layers[*target_layer];
    if (!layer.is_matmul_layer()) {
        throw ValidationError("target layer must be conv or fc, got " +
                              std::string(layer_kind_name(layer.kind)));
    }
    config.validate();
    if (config.op_format.width != layer.weights.format.width ||
        (config.op_format.kind == NumKind::Float32) !=
            (layer.weights.format.kind == NumKind::Float32)) {
        throw ValidationError("array operand format does not match target layer operands");
    }
    if (config.acc_format != layer.acc_format) {
        throw ValidationError("array accumulator format does not match target layer");
    }
}

namespace {

bool word_less(Word lhs, Word rhs, const NumberFormat& fmt) {
    if (fmt.kind == NumKind::Float32) return word_to_float(lhs) < word_to_float(rhs);
    return lhs < rhs;
}

// acc word -> output word: scale shift + round + clamp into the out format.
Word requantize_word(Word acc, const NumberFormat& acc_fmt, double acc_scale,
                     const NumberFormat& out_fmt, double out_scale) {
    const double value = dequantize_word(acc, acc_fmt, acc_scale);
    if (out_fmt.kind == NumKind::Float32) {
        return float_to_word(static_cast<float>(value / out_scale));
    }
    double q = std::round(value / out_fmt.effective_scale(out_scale));
    const double lo = static_cast<double>(int_min_for_width(out_fmt.width));
    const double hi = static_cast<double>(int_max_for_width(out_fmt.width));
    if (q < lo) q = lo;
    if (q > hi) q = hi;
    return static_cast<Word>(q);
}

Word add_words(Word lhs, Word rhs, const NumberFormat& fmt) {
    if (fmt.kind == NumKind::Float32) {
        return float_to_word(word_to_float(lhs) + word_to_float(rhs));
    }
    return wrap_to_width(lhs + rhs, fmt.width);
}

// Bias + requantization applied to a raw accumulator matrix with one bias
// word per column. Accumulator words sit at the product scale
// in_eff * weight_eff (the fixed-point binary points fold into the effective
// scales, so the frac shift lands here, once, at array output).
void finish_matmul_output(QuantTensor& product, const Layer& layer, const NumberFormat& in_fmt,
                          double in_scale) {
    const double product_scale = in_fmt.effective_scale(in_scale) *
                                 layer.weights.format.effective_scale(layer.weights.scale);
    const NumberFormat acc_fmt{layer.acc_format.kind, layer.acc_format.width, 0};
    for (std::size_t r = 0; r < product.rows(); ++r) {
        for (std::size_t c = 0; c < product.cols(); ++c) {
            Word acc = product.at2(r, c);
            if (layer.has_bias) acc = add_words(acc, layer.bias.data[c], acc_fmt);
            product.at2(r, c) = requantize_word(acc, acc_fmt, product_scale, layer.out_format,
                                                layer.out_scale);
        }
    }
    product.format = layer.out_format;
    product.scale = layer.out_scale;
}

QuantTensor transpose(const QuantTensor& m) {
    QuantTensor out = QuantTensor::zeros({m.cols(), m.rows()}, m.format, m.scale);
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out.at2(c, r) = m.at2(r, c);
    return out;
}

// Reference matmul with the same wrap-around accumulator semantics as the
// array, so fast-path and array-path integer results agree bit for bit.
QuantTensor reference_matmul(const QuantTensor& a, const QuantTensor& b,
                             const NumberFormat& op_fmt, const NumberFormat& acc_fmt) {
    QuantTensor out = QuantTensor::zeros({a.rows(), b.cols()}, acc_fmt);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < b.cols(); ++c) {
            Word acc = 0;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                acc = mac(a.at2(r, k), b.at2(k, c), acc, op_fmt, acc_fmt);
            }
            out.at2(r, c) = acc;
        }
    }
    return out;
}

// The lowered matmul for a conv/fc layer, on the host or on the array.
QuantTensor layer_matmul(const Layer& layer, const QuantTensor& activation,
                         const ExecutionPlan* plan, SimTrace* trace) {
    QuantTensor lhs;
    QuantTensor rhs;
    if (layer.kind == LayerKind::Conv) {
        lhs = lower_activation(activation, layer.conv);
        rhs = lower_weights(layer.weights);
    } else {
        lhs = activation;
        lhs.shape = {1, activation.size()};
        rhs = layer.weights;
    }

    if (!plan) {
        return reference_matmul(lhs, rhs, layer.weights.format, layer.acc_format);
    }
    if (plan->weights_on_a) {
        const QuantTensor product =
            tiled_matmul(transpose(rhs), transpose(lhs), plan->config, plan->faults, trace);
        return transpose(product);
    }
    return tiled_matmul(lhs, rhs, plan->config, plan->faults, trace);
}

std::vector<double> softmax(const QuantTensor& logits) {
    const std::vector<double> values = dequantize(logits);
    const double max = *std::max_element(values.begin(), values.end());
    std::vector<double> out(values.size());
    double sum = 0.0;
    for (std::size_t n = 0; n < values.size(); ++n) {
        out[n] = std::exp(values[n] - max);
        sum += out[n];
    }
    for (double& v : out) v /= sum;
    return out;
}

std::vector<double> run_network(const NetworkModel& model, const QuantTensor& input,
                                const ExecutionPlan* plan,
                                std::vector<QuantTensor>* activations, SimTrace* trace) {
    if (input.shape != model.input_shape) {
        throw ValidationError("input shape does not match the model's declared input");
    }
    if (input.format.width != model.input_format.width ||
        (input.format.kind == NumKind::Float32) !=
            (model.input_format.kind == NumKind::Float32)) {
        throw ValidationError("input format does not match the model's declared input format");
    }

    QuantTensor act = input;
    for (std::size_t n = 0; n < model.layers.size(); ++n) {
        const Layer& layer = model.layers[n];
        const double in_scale = model.layer_input_scales[n];
        const bool on_array = plan && plan->target_layer && *plan->target_layer == n;

        switch (layer.kind) {
        case LayerKind::Conv: {
            QuantTensor product = layer_matmul(layer, act, on_array ? plan : nullptr, trace);
            finish_matmul_output(product, layer, act.format, in_scale);
            act = lift(product, layer.conv);
            break;
        }
        case LayerKind::Fc: {
            QuantTensor product = layer_matmul(layer, act, on_array ? plan : nullptr, trace);
            finish_matmul_output(product, layer, act.format, in_scale);
            act = product;
            act.shape = {product.size()};
            break;
        }
        case LayerKind::Relu: {
            for (Word& w : act.data) {
                if (word_less(w, 0, act.format)) {
                    w = act.format.kind == NumKind::Float32 ? float_to_word(0.0f) : 0;
                }
            }
            break;
        }
        case LayerKind::MaxPool: {
            const std::size_t channels = act.shape[0];
            const int h = static_cast<int>(act.shape[1]);
            const int w = static_cast<int>(act.shape[2]);
            const int oh = (h - layer.pool) / layer.pool_stride + 1;
            const int ow = (w - layer.pool) / layer.pool_stride + 1;
            QuantTensor pooled = QuantTensor::zeros(
                {channels, static_cast<std::size_t>(oh), static_cast<std::size_t>(ow)}, act.format,
                act.scale);
            for (std::size_t ch = 0; ch < channels; ++ch) {
                for (int oy = 0; oy < oh; ++oy) {
                    for (int ox = 0; ox < ow; ++ox) {
                        Word best = 0;
                        bool first = true;
                        for (int py = 0; py < layer.pool; ++py) {
                            for (int px = 0; px < layer.pool; ++px) {
                                const int iy = oy * layer.pool_stride + py;
                                const int ix = ox * layer.pool_stride + px;
                                const Word v =
                                    act.data[(ch * static_cast<std::size_t>(h) +
                                              static_cast<std::size_t>(iy)) *
                                                 static_cast<std::size_t>(w) +
                                             static_cast<std::size_t>(ix)];
                                if (first || word_less(best, v, act.format)) best = v;
                                first = false;
                            }
                        }
                        pooled.data[(ch * static_cast<std::size_t>(oh) +
                                     static_cast<std::size_t>(oy)) *
                                        static_cast<std::size_t>(ow) +
                                    static_cast<std::size_t>(ox)] = best;
                    }
                }
            }
            act = std::move(pooled);
            break;
        }
        case LayerKind::Flatten: {
            act.shape = {act.size()};
            break;
        }
        case LayerKind::Softmax:
            return softmax(act);
        }
        if (activations) activations->push_back(act);
    }
    throw ValidationError("model did not terminate in a softmax layer");
}

} // namespace

std::vector<double> infer_reference(const NetworkModel& model, const QuantTensor& input,
                                    std::vector<QuantTensor>* activations) {
    return run_network(model, input, nullptr, activations, nullptr);
}

std::vector<double> infer_hierarchical(const NetworkModel& model, const QuantTensor& input,
                                       const ExecutionPlan& plan,
                                       std::vector<QuantTensor>* activations, SimTrace* trace) {
    plan.validate(model);
    return run_network(model, input, &plan, activations, trace);
}

Cycle target_layer_cycles(const NetworkModel& model, const ExecutionPlan& plan) {
    plan.validate(model);
    if (!plan.target_layer) return 0;
    const Layer& layer = model.layers[*plan.target_layer];
    const auto& in_shape = model.layer_input_shapes[*plan.target_layer];

    std::size_t m, k, n;
    if (layer.kind == LayerKind::Conv) {
        ConvShape conv = layer.conv;
        conv.in_h = static_cast<int>(in_shape[1]);
        conv.in_w = static_cast<int>(in_shape[2]);
        m = static_cast<std::size_t>(conv.out_h()) * static_cast<std::size_t>(conv.out_w());
        k = layer.weights.shape[1] * layer.weights.shape[2] * layer.weights.shape[3];
        n = layer.weights.shape[0];
    } else {
        m = 1;
        k = layer.weights.shape[0];
        n = layer.weights.shape[1];
    }
    if (plan.weights_on_a) std::swap(m, n);

    auto blocks = [](std::size_t total, int tile) {
        return (total + static_cast<std::size_t>(tile) - 1) / static_cast<std::size_t>(tile);
    };
    const std::size_t passes = blocks(m, plan.config.n1) * blocks(n, plan.config.n2) *
                               blocks(k, plan.config.n3);
    return static_cast<Cycle>(passes) * cycle_count(plan.config);
}

QuantTensor quantize_model_input(const NetworkModel& model, std::span<const double> values) {
    return quantize(values, model.input_shape, model.input_format, model.input_scale);
}

} // namespace sysfi
