#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sysfi {

// A machine word travelling on one data line. Int/Fixed words hold the
// sign-extended two's-complement value; Float32 words hold the IEEE-754 bit
// pattern zero-extended into the low 32 bits.
using Word = std::int64_t;

enum class NumKind : std::uint8_t { Int = 0, Fixed = 1, Float32 = 2 };

enum class FaultKind : std::uint8_t { Stuck0 = 0, Stuck1 = 1, Flip = 2 };

const char* fault_kind_name(FaultKind kind);

struct NumberFormat {
    NumKind kind = NumKind::Int;
    int width = 8;       // bits, one of 8/16/32
    int frac_bits = 0;   // Fixed only

    static NumberFormat int8()  { return {NumKind::Int, 8, 0}; }
    static NumberFormat int16() { return {NumKind::Int, 16, 0}; }
    static NumberFormat int32() { return {NumKind::Int, 32, 0}; }
    static NumberFormat float32() { return {NumKind::Float32, 32, 0}; }
    static NumberFormat fixed(int width, int frac_bits) {
        return {NumKind::Fixed, width, frac_bits};
    }

    bool is_integer_like() const { return kind != NumKind::Float32; }

    // Scale multiplier folding in the fixed-point binary point:
    // real value = word * effective_scale(tensor_scale).
    double effective_scale(double tensor_scale) const;

    friend bool operator==(const NumberFormat&, const NumberFormat&) = default;
};

// Throws ValidationError on unsupported width / frac_bits combinations.
void validate_format(const NumberFormat& fmt);

// Parse/print the textual form used in manifests and configs:
// int8 | int16 | int32 | float32 | fixed<width>f<frac>, e.g. fixed16f7.
NumberFormat parse_format(const std::string& text);
std::string format_name(const NumberFormat& fmt);

// Truncate to `width` bits and sign-extend (two's complement).
Word wrap_to_width(std::int64_t value, int width);

Word int_min_for_width(int width);
Word int_max_for_width(int width);

// Word <-> float for Float32 formats.
float word_to_float(Word w);
Word float_to_word(float f);

// Forces/flips one bit of the width-bit pattern; all other bits unchanged.
// Throws ValidationError when bit is out of range for the format.
Word apply_bit_fault(Word word, FaultKind kind, int bit, const NumberFormat& fmt);

// One multiply-accumulate step: acc + a * b. Integer and fixed-point
// accumulation wraps modulo 2^acc_width (two's complement); fixed-point keeps
// the full-precision product, the binary-point shift happens at array output.
// Float32 uses ordinary float multiply then add on the decoded values.
Word mac(Word a, Word b, Word acc, const NumberFormat& op_fmt, const NumberFormat& acc_fmt);

// n-dimensional quantized tensor: row-major words plus a dequantization scale.
struct QuantTensor {
    std::vector<std::size_t> shape;
    std::vector<Word> data;
    NumberFormat format;
    double scale = 1.0;

    std::size_t size() const;
    std::size_t rank() const { return shape.size(); }

    Word& at(std::span<const std::size_t> idx);
    Word at(std::span<const std::size_t> idx) const;

    // 2-d accessors (matrices)
    Word& at2(std::size_t r, std::size_t c);
    Word at2(std::size_t r, std::size_t c) const;
    std::size_t rows() const { return shape.at(0); }
    std::size_t cols() const { return shape.at(1); }

    static QuantTensor zeros(std::vector<std::size_t> shape, NumberFormat fmt, double scale = 1.0);
};

// Element-wise word = clamp(round(value / effective_scale)) for integer-like
// formats; Float32 stores float(value / scale) bit patterns.
// Throws ValidationError on non-finite inputs or scale <= 0.
QuantTensor quantize(std::span<const double> values, std::vector<std::size_t> shape,
                     const NumberFormat& fmt, double scale);

std::vector<double> dequantize(const QuantTensor& t);
double dequantize_word(Word w, const NumberFormat& fmt, double scale);

} // namespace sysfi
