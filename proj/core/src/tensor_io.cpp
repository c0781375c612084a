#include "sysfi/tensor_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "sysfi/errors.hpp"

namespace sysfi {

namespace {

constexpr std::array<char, 12> kMagic = {'S', 'Y', 'S', 'F', 'I', 'T',
                                         'E', 'N', 'S', 'O', 'R', '\0'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                           static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(bytes, 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& path) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
        throw IoError("truncated tensor file: " + path);
    }
    return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
           (static_cast<std::uint32_t>(bytes[2]) << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
}

std::uint8_t dtype_code(const NumberFormat& fmt) {
    if (fmt.kind == NumKind::Float32) return 4;
    switch (fmt.width) {
    case 8:  return 1;
    case 16: return 2;
    default: return 3;
    }
}

int dtype_width(std::uint8_t code) {
    switch (code) {
    case 1: return 8;
    case 2: return 16;
    case 3: return 32;
    case 4: return 32;
    default: return 0;
    }
}

} // namespace

void save_tensor(const std::filesystem::path& path, const QuantTensor& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open tensor file for writing: " + path.string());

    out.write(kMagic.data(), kMagic.size());
    put_u32(out, kVersion);
    const std::uint8_t code = dtype_code(t.format);
    out.put(static_cast<char>(code));
    out.put(static_cast<char>(t.shape.size()));
    for (std::size_t dim : t.shape) put_u32(out, static_cast<std::uint32_t>(dim));

    const int bytes = t.format.width / 8;
    for (Word w : t.data) {
        const std::uint64_t bits = static_cast<std::uint64_t>(w);
        for (int b = 0; b < bytes; ++b) out.put(static_cast<char>((bits >> (8 * b)) & 0xff));
    }
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(t.scale)));
    if (!out) throw IoError("short write on tensor file: " + path.string());
}

QuantTensor load_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open tensor file: " + path.string());

    std::array<char, 12> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
        throw IoError("bad magic in tensor file: " + path.string());
    }
    const std::uint32_t version = get_u32(in, path.string());
    if (version != kVersion) {
        throw IoError("unsupported tensor file version " + std::to_string(version) + ": " +
                      path.string());
    }
    const int code = in.get();
    const int rank = in.get();
    if (code == EOF || rank == EOF) throw IoError("truncated tensor file: " + path.string());
    const int width = dtype_width(static_cast<std::uint8_t>(code));
    if (width == 0) throw IoError("unknown dtype code in tensor file: " + path.string());
    if (rank > 8) throw IoError("tensor rank too large: " + path.string());

    QuantTensor t;
    t.format = (code == 4) ? NumberFormat::float32() : NumberFormat{NumKind::Int, width, 0};
    t.shape.resize(static_cast<std::size_t>(rank));
    for (auto& dim : t.shape) dim = get_u32(in, path.string());

    const std::size_t count = t.size();
    const int bytes = width / 8;
    t.data.resize(count);
    std::vector<char> payload(count * static_cast<std::size_t>(bytes));
    if (count > 0 && !in.read(payload.data(), static_cast<std::streamsize>(payload.size()))) {
        throw IoError("truncated tensor payload: " + path.string());
    }
    for (std::size_t n = 0; n < count; ++n) {
        std::uint64_t bits = 0;
        for (int b = 0; b < bytes; ++b) {
            bits |= static_cast<std::uint64_t>(
                        static_cast<unsigned char>(payload[n * bytes + static_cast<std::size_t>(b)]))
                    << (8 * b);
        }
        t.data[n] = (code == 4) ? static_cast<Word>(bits)
                                : wrap_to_width(static_cast<std::int64_t>(bits), width);
    }
    t.scale = static_cast<double>(std::bit_cast<float>(get_u32(in, path.string())));
    return t;
}

namespace {

std::uint32_t get_u32_be(std::istream& in, const std::string& path) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
        throw IoError("truncated IDX file: " + path);
    }
    return (static_cast<std::uint32_t>(bytes[0]) << 24) | (static_cast<std::uint32_t>(bytes[1]) << 16) |
           (static_cast<std::uint32_t>(bytes[2]) << 8) | static_cast<std::uint32_t>(bytes[3]);
}

void put_u32_be(std::ostream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>((v >> 24) & 0xff), static_cast<char>((v >> 16) & 0xff),
                           static_cast<char>((v >> 8) & 0xff), static_cast<char>(v & 0xff)};
    out.write(bytes, 4);
}

} // namespace

IdxImages load_idx_images(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open IDX file: " + path.string());
    if (get_u32_be(in, path.string()) != 0x00000803) {
        throw IoError("bad IDX image magic: " + path.string());
    }
    IdxImages set;
    set.count = get_u32_be(in, path.string());
    set.rows = get_u32_be(in, path.string());
    set.cols = get_u32_be(in, path.string());
    const std::size_t pixels = set.rows * set.cols;
    set.images.resize(set.count);
    std::vector<unsigned char> buf(pixels);
    for (auto& image : set.images) {
        if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(pixels))) {
            throw IoError("truncated IDX image payload: " + path.string());
        }
        image.resize(pixels);
        for (std::size_t n = 0; n < pixels; ++n) image[n] = buf[n] / 255.0;
    }
    return set;
}

std::vector<std::uint8_t> load_idx_labels(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open IDX file: " + path.string());
    if (get_u32_be(in, path.string()) != 0x00000801) {
        throw IoError("bad IDX label magic: " + path.string());
    }
    const std::uint32_t count = get_u32_be(in, path.string());
    std::vector<std::uint8_t> labels(count);
    if (count > 0 &&
        !in.read(reinterpret_cast<char*>(labels.data()), static_cast<std::streamsize>(count))) {
        throw IoError("truncated IDX label payload: " + path.string());
    }
    return labels;
}

void save_idx_images(const std::filesystem::path& path, const IdxImages& images) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open IDX file for writing: " + path.string());
    put_u32_be(out, 0x00000803);
    put_u32_be(out, static_cast<std::uint32_t>(images.count));
    put_u32_be(out, static_cast<std::uint32_t>(images.rows));
    put_u32_be(out, static_cast<std::uint32_t>(images.cols));
    for (const auto& image : images.images) {
        for (double px : image) {
            double v = px * 255.0;
            if (v < 0.0) v = 0.0;
            if (v > 255.0) v = 255.0;
            out.put(static_cast<char>(static_cast<unsigned char>(v + 0.5)));
        }
    }
    if (!out) throw IoError("short write on IDX file: " + path.string());
}

void save_idx_labels(const std::filesystem::path& path, const std::vector<std::uint8_t>& labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open IDX file for writing: " + path.string());
    put_u32_be(out, 0x00000801);
    put_u32_be(out, static_cast<std::uint32_t>(labels.size()));
    for (std::uint8_t label : labels) out.put(static_cast<char>(label));
    if (!out) throw IoError("short write on IDX file: " + path.string());
}

} // namespace sysfi
