#include "sysfi/lowering.hpp"

#include <string>

#include "sysfi/errors.hpp"

namespace sysfi {

void ConvShape::validate() const {
    if (in_channels < 1 || out_channels < 1) throw ValidationError("conv: channels must be >= 1");
    if (kernel_h < 1 || kernel_w < 1) throw ValidationError("conv: kernel dims must be >= 1");
    if (stride < 1) throw ValidationError("conv: stride must be >= 1");
    if (padding < 0) throw ValidationError("conv: padding must be >= 0");
    if (in_h < 1 || in_w < 1) throw ValidationError("conv: input dims must be >= 1");
    const int eh = in_h + 2 * padding - kernel_h;
    const int ew = in_w + 2 * padding - kernel_w;
    if (eh < 0 || ew < 0 || eh % stride != 0 || ew % stride != 0) {
        throw ValidationError("conv: output dims are not positive integers for " +
                              std::to_string(in_h) + "x" + std::to_string(in_w) + " input, " +
                              std::to_string(kernel_h) + "x" + std::to_string(kernel_w) +
                              " kernel, stride " + std::to_string(stride) + ", padding " +
                              std::to_string(padding));
    }
}

QuantTensor lower_activation(const QuantTensor& input, const ConvShape& shape) {
    shape.validate();
    if (input.rank() != 3 || input.shape[0] != static_cast<std::size_t>(shape.in_channels) ||
        input.shape[1] != static_cast<std::size_t>(shape.in_h) ||
        input.shape[2] != static_cast<std::size_t>(shape.in_w)) {
        throw ValidationError("lower_activation: input shape does not match conv shape");
    }

    const int oh = shape.out_h();
    const int ow = shape.out_w();
    const std::size_t rows = static_cast<std::size_t>(oh) * static_cast<std::size_t>(ow);
    const std::size_t cols = static_cast<std::size_t>(shape.in_channels) *
                             static_cast<std::size_t>(shape.kernel_h) *
                             static_cast<std::size_t>(shape.kernel_w);
    QuantTensor out = QuantTensor::zeros({rows, cols}, input.format, input.scale);

    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            const std::size_t r = static_cast<std::size_t>(oy) * static_cast<std::size_t>(ow) +
                                  static_cast<std::size_t>(ox);
            for (int ch = 0; ch < shape.in_channels; ++ch) {
                for (int ky = 0; ky < shape.kernel_h; ++ky) {
                    for (int kx = 0; kx < shape.kernel_w; ++kx) {
                        const int iy = oy * shape.stride - shape.padding + ky;
                        const int ix = ox * shape.stride - shape.padding + kx;
                        const std::size_t c =
                            (static_cast<std::size_t>(ch) * static_cast<std::size_t>(shape.kernel_h) +
                             static_cast<std::size_t>(ky)) *
                                static_cast<std::size_t>(shape.kernel_w) +
                            static_cast<std::size_t>(kx);
                        if (iy >= 0 && iy < shape.in_h && ix >= 0 && ix < shape.in_w) {
                            out.at2(r, c) =
                                input.data[(static_cast<std::size_t>(ch) *
                                                static_cast<std::size_t>(shape.in_h) +
                                            static_cast<std::size_t>(iy)) *
                                               static_cast<std::size_t>(shape.in_w) +
                                           static_cast<std::size_t>(ix)];
                        }
                    }
                }
            }
        }
    }
    return out;
}

QuantTensor lower_weights(const QuantTensor& kernel) {
    if (kernel.rank() != 4) throw ValidationError("lower_weights: kernel must be K x C x kh x kw");
    const std::size_t k_out = kernel.shape[0];
    const std::size_t rows = kernel.shape[1] * kernel.shape[2] * kernel.shape[3];
    QuantTensor out = QuantTensor::zeros({rows, k_out}, kernel.format, kernel.scale);
    for (std::size_t k = 0; k < k_out; ++k) {
        for (std::size_t r = 0; r < rows; ++r) {
            out.at2(r, k) = kernel.data[k * rows + r];
        }
    }
    return out;
}

QuantTensor lift(const QuantTensor& c_matrix, const ConvShape& shape) {
    shape.validate();
    const std::size_t oh = static_cast<std::size_t>(shape.out_h());
    const std::size_t ow = static_cast<std::size_t>(shape.out_w());
    const std::size_t k_out = static_cast<std::size_t>(shape.out_channels);
    if (c_matrix.rank() != 2 || c_matrix.rows() != oh * ow || c_matrix.cols() != k_out) {
        throw ValidationError("lift: product shape does not match conv shape");
    }
    QuantTensor out = QuantTensor::zeros({k_out, oh, ow}, c_matrix.format, c_matrix.scale);
    for (std::size_t r = 0; r < oh * ow; ++r) {
        for (std::size_t k = 0; k < k_out; ++k) {
            out.data[(k * oh + r / ow) * ow + r % ow] = c_matrix.at2(r, k);
        }
    }
    return out;
}

QuantTensor tiled_matmul(const QuantTensor& a, const QuantTensor& b, const SystolicConfig& config,
                         std::span<const Fault> faults, SimTrace* trace) {
    config.validate();
    if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
        throw ValidationError("tiled_matmul: incompatible operand shapes");
    }
    const std::size_t m = a.rows();
    const std::size_t k = a.cols();
    const std::size_t n = b.cols();
    const std::size_t tn1 = static_cast<std::size_t>(config.n1);
    const std::size_t tn2 = static_cast<std::size_t>(config.n2);
    const std::size_t tn3 = static_cast<std::size_t>(config.n3);

    QuantTensor out = QuantTensor::zeros({m, n}, config.acc_format);
    const Cycle pass_cycles = cycle_count(config);
    const bool float_path = config.acc_format.kind == NumKind::Float32;

    TileSimulator sim(config, faults);
    QuantTensor a_tile = QuantTensor::zeros({tn1, tn3}, a.format, a.scale);
    QuantTensor b_tile = QuantTensor::zeros({tn3, tn2}, b.format, b.scale);

    Cycle offset = 0;
    for (std::size_t bi = 0; bi < m; bi += tn1) {
        for (std::size_t bj = 0; bj < n; bj += tn2) {
            for (std::size_t bk = 0; bk < k; bk += tn3) {
                // Zero-padded remnants still occupy the full array.
                for (std::size_t r = 0; r < tn1; ++r)
                    for (std::size_t c = 0; c < tn3; ++c)
                        a_tile.at2(r, c) = (bi + r < m && bk + c < k) ? a.at2(bi + r, bk + c) : 0;
                for (std::size_t r = 0; r < tn3; ++r)
                    for (std::size_t c = 0; c < tn2; ++c)
                        b_tile.at2(r, c) = (bk + r < k && bj + c < n) ? b.at2(bk + r, bj + c) : 0;

                const QuantTensor partial = sim.run(a_tile, b_tile, offset, trace);
                for (std::size_t r = 0; r < tn1 && bi + r < m; ++r) {
                    for (std::size_t c = 0; c < tn2 && bj + c < n; ++c) {
                        Word& acc = out.at2(bi + r, bj + c);
                        const Word part = partial.at2(r, c);
                        if (float_path) {
                            acc = float_to_word(word_to_float(acc) + word_to_float(part));
                        } else {
                            acc = wrap_to_width(acc + part, config.acc_format.width);
                        }
                    }
                }
                offset += pass_cycles;
            }
        }
    }
    return out;
}

} // namespace sysfi
