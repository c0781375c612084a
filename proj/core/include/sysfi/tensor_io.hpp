#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sysfi/numerics.hpp"

namespace sysfi {

// Binary tensor container:
//   bytes  0..11   magic "SYSFITENSOR\0"
//   bytes 12..15   u32 LE version (currently 1)
//   byte  16       dtype: 1=int8 2=int16 3=int32 4=float32
//   byte  17       rank
//   rank x u32 LE  dims
//   payload        row-major words, little endian (two's complement / IEEE-754)
//   f32 LE         dequantization scale trailer
// Fixed-point tensors are stored as their integer words; frac_bits lives in
// the manifest that references the file.
void save_tensor(const std::filesystem::path& path, const QuantTensor& t);
QuantTensor load_tensor(const std::filesystem::path& path);

// Classic IDX image/label files (MNIST). Images come back as one real-valued
// tensor per image with pixels scaled to [0, 1].
struct IdxImages {
    std::size_t count = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::vector<double>> images; // row-major, rows*cols each
};

IdxImages load_idx_images(const std::filesystem::path& path);
std::vector<std::uint8_t> load_idx_labels(const std::filesystem::path& path);

void save_idx_images(const std::filesystem::path& path, const IdxImages& images);
void save_idx_labels(const std::filesystem::path& path, const std::vector<std::uint8_t>& labels);

} // namespace sysfi
