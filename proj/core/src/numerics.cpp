#include "sysfi/numerics.hpp"

#include <bit>
#include <cmath>
#include <numeric>

#include "sysfi/errors.hpp"

namespace sysfi {

const char* fault_kind_name(FaultKind kind) {
    switch (kind) {
    case FaultKind::Stuck0: return "stuck0";
    case FaultKind::Stuck1: return "stuck1";
    default:                return "flip";
    }
}

double NumberFormat::effective_scale(double tensor_scale) const {
    if (kind == NumKind::Fixed) return tensor_scale * std::ldexp(1.0, -frac_bits);
    return tensor_scale;
}

void validate_format(const NumberFormat& fmt) {
    if (fmt.width != 8 && fmt.width != 16 && fmt.width != 32) {
        throw ValidationError("unsupported word width " + std::to_string(fmt.width));
    }
    if (fmt.kind == NumKind::Float32 && fmt.width != 32) {
        throw ValidationError("float32 format requires width 32");
    }
    if (fmt.frac_bits < 0 || fmt.frac_bits >= fmt.width) {
        throw ValidationError("frac_bits must satisfy 0 <= frac_bits < width");
    }
    if (fmt.kind != NumKind::Fixed && fmt.frac_bits != 0) {
        throw ValidationError("frac_bits only applies to fixed-point formats");
    }
}

NumberFormat parse_format(const std::string& text) {
    if (text == "int8") return NumberFormat::int8();
    if (text == "int16") return NumberFormat::int16();
    if (text == "int32") return NumberFormat::int32();
    if (text == "float32") return NumberFormat::float32();
    if (text.rfind("fixed", 0) == 0) {
        const auto f_pos = text.find('f', 5);
        if (f_pos != std::string::npos && f_pos > 5) {
            try {
                const int width = std::stoi(text.substr(5, f_pos - 5));
                const int frac = std::stoi(text.substr(f_pos + 1));
                NumberFormat fmt = NumberFormat::fixed(width, frac);
                validate_format(fmt);
                return fmt;
            } catch (const ValidationError&) {
                throw;
            } catch (const std::exception&) {
                // fall through to the error below
            }
        }
    }
    throw ValidationError("unknown number format '" + text + "'");
}

std::string format_name(const NumberFormat& fmt) {
    switch (fmt.kind) {
    case NumKind::Int:     return "int" + std::to_string(fmt.width);
    case NumKind::Float32: return "float32";
    default:
        return "fixed" + std::to_string(fmt.width) + "f" + std::to_string(fmt.frac_bits);
    }
}

Word wrap_to_width(std::int64_t value, int width) {
    if (width >= 64) return value;
    const std::uint64_t mask = (std::uint64_t{1} << width) - 1;
    std::uint64_t bits = static_cast<std::uint64_t>(value) & mask;
    const std::uint64_t sign = std::uint64_t{1} << (width - 1);
    if (bits & sign) bits |= ~mask;
    return static_cast<Word>(bits);
}

Word int_min_for_width(int width) {
    return -(Word{1} << (width - 1));
}

Word int_max_for_width(int width) {
    return (Word{1} << (width - 1)) - 1;
}

float word_to_float(Word w) {
    return std::bit_cast<float>(static_cast<std::uint32_t>(static_cast<std::uint64_t>(w)));
}

Word float_to_word(float f) {
    return static_cast<Word>(static_cast<std::uint64_t>(std::bit_cast<std::uint32_t>(f)));
}

Word apply_bit_fault(Word word, FaultKind kind, int bit, const NumberFormat& fmt) {
    if (bit < 0 || bit >= fmt.width) {
        throw ValidationError("fault bit " + std::to_string(bit) + " out of range for " +
                              format_name(fmt));
    }
    const std::uint64_t mask = fmt.width >= 64 ? ~std::uint64_t{0}
                                               : (std::uint64_t{1} << fmt.width) - 1;
    std::uint64_t bits = static_cast<std::uint64_t>(word) & mask;
    const std::uint64_t one = std::uint64_t{1} << bit;
    switch (kind) {
    case FaultKind::Stuck0: bits &= ~one; break;
    case FaultKind::Stuck1: bits |= one; break;
    case FaultKind::Flip:   bits ^= one; break;
    }
    if (fmt.kind == NumKind::Float32) {
        return static_cast<Word>(bits);
    }
    return wrap_to_width(static_cast<std::int64_t>(bits), fmt.width);
}

Word mac(Word a, Word b, Word acc, const NumberFormat& op_fmt, const NumberFormat& acc_fmt) {
    if (op_fmt.kind == NumKind::Float32) {
        const float prod = word_to_float(a) * word_to_float(b);
        return float_to_word(word_to_float(acc) + prod);
    }
    // |a|,|b| <= 2^31 and |acc| <= 2^31, so the sum fits an int64 before wrap.
    const std::int64_t prod = a * b;
    (void)op_fmt;
    return wrap_to_width(acc + prod, acc_fmt.width);
}

std::size_t QuantTensor::size() const {
    std::size_t n = 1;
    for (std::size_t e : shape) n *= e;
    return n;
}

namespace {

std::size_t flat_index(const QuantTensor& t, std::span<const std::size_t> idx) {
    if (idx.size() != t.shape.size()) {
        throw ValidationError("tensor index rank mismatch");
    }
    std::size_t flat = 0;
    for (std::size_t d = 0; d < idx.size(); ++d) {
        if (idx[d] >= t.shape[d]) throw ValidationError("tensor index out of bounds");
        flat = flat * t.shape[d] + idx[d];
    }
    return flat;
}

} // namespace

Word& QuantTensor::at(std::span<const std::size_t> idx) {
    return data[flat_index(*this, idx)];
}

Word QuantTensor::at(std::span<const std::size_t> idx) const {
    return data[flat_index(*this, idx)];
}

Word& QuantTensor::at2(std::size_t r, std::size_t c) {
    return data[r * shape[1] + c];
}

Word QuantTensor::at2(std::size_t r, std::size_t c) const {
    return data[r * shape[1] + c];
}

QuantTensor QuantTensor::zeros(std::vector<std::size_t> shape, NumberFormat fmt, double scale) {
    QuantTensor t;
    t.shape = std::move(shape);
    t.format = fmt;
    t.scale = scale;
    t.data.assign(t.size(), 0);
    return t;
}

QuantTensor quantize(std::span<const double> values, std::vector<std::size_t> shape,
                     const NumberFormat& fmt, double scale) {
    validate_format(fmt);
    if (!(scale > 0.0)) throw ValidationError("quantize: scale must be > 0");

    QuantTensor t;
    t.shape = std::move(shape);
    t.format = fmt;
    t.scale = scale;
    if (t.size() != values.size()) {
        throw ValidationError("quantize: value count does not match shape");
    }
    t.data.resize(values.size());

    if (fmt.kind == NumKind::Float32) {
        for (std::size_t n = 0; n < values.size(); ++n) {
            if (!std::isfinite(values[n])) throw ValidationError("quantize: non-finite value");
            t.data[n] = float_to_word(static_cast<float>(values[n] / scale));
        }
        return t;
    }

    const double eff = fmt.effective_scale(scale);
    const double lo = static_cast<double>(int_min_for_width(fmt.width));
    const double hi = static_cast<double>(int_max_for_width(fmt.width));
    for (std::size_t n = 0; n < values.size(); ++n) {
        if (!std::isfinite(values[n])) throw ValidationError("quantize: non-finite value");
        double q = std::round(values[n] / eff);
        if (q < lo) q = lo;
        if (q > hi) q = hi;
        t.data[n] = static_cast<Word>(q);
    }
    return t;
}

double dequantize_word(Word w, const NumberFormat& fmt, double scale) {
    if (fmt.kind == NumKind::Float32) {
        return static_cast<double>(word_to_float(w)) * scale;
    }
    return static_cast<double>(w) * fmt.effective_scale(scale);
}

std::vector<double> dequantize(const QuantTensor& t) {
    std::vector<double> out(t.data.size());
    for (std::size_t n = 0; n < t.data.size(); ++n) {
        out[n] = dequantize_word(t.data[n], t.format, t.scale);
    }
    return out;
}

} // namespace sysfi
