#pragma once

#include <span>

#include "sysfi/numerics.hpp"
#include "sysfi/systolic.hpp"

namespace sysfi {

// Geometry of one 2-d convolution. Output dims must come out positive and
// integral; validate() throws otherwise.
struct ConvShape {
    int in_channels = 1;
    int out_channels = 1;
    int kernel_h = 1;
    int kernel_w = 1;
    int stride = 1;
    int padding = 0;
    int in_h = 1;
    int in_w = 1;

    int out_h() const { return (in_h + 2 * padding - kernel_h) / stride + 1; }
    int out_w() const { return (in_w + 2 * padding - kernel_w) / stride + 1; }

    void validate() const;

    friend bool operator==(const ConvShape&, const ConvShape&) = default;
};

// im2col-style lowering. Row r = oy*out_w + ox holds the receptive field of
// output pixel (oy, ox); column ordering is channel-major, then kernel row,
// then kernel column: col = (ch*kernel_h + ky)*kernel_w + kx. Padding is
// materialized as explicit zeros.
QuantTensor lower_activation(const QuantTensor& input /* C x H x W */, const ConvShape& shape);

// Column k holds kernel k flattened with the same ordering as the lowered
// activation columns.
QuantTensor lower_weights(const QuantTensor& kernel /* K x C x kh x kw */);

// Inverse reshape of the product: row r, column k -> output[k][oy][ox].
QuantTensor lift(const QuantTensor& c_matrix /* (out_h*out_w) x K */, const ConvShape& shape);

// Arbitrary-size matmul on the fixed-size array: partitions the operands into
// n1 x n3 / n3 x n2 tiles (zero-padded remnants run on the full array),
// advances one global clock across passes, and accumulates K-partials in the
// host accumulator format. Pass order: row blocks, column blocks, K blocks.
QuantTensor tiled_matmul(const QuantTensor& a /* M x K */, const QuantTensor& b /* K x N */,
                         const SystolicConfig& config, std::span<const Fault> faults,
                         SimTrace* trace = nullptr);

} // namespace sysfi
