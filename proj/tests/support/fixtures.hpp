#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sysfi/model.hpp"
#include "sysfi/numerics.hpp"

namespace sysfi::test {

// Self-deleting scratch directory for fixture files.
class TempDir {
public:
    explicit TempDir(const std::string& prefix);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// 4 -> 2 selector network: fc weights pick inputs 0 and 1 as the two logits.
// Returns the manifest path.
std::filesystem::path build_mlp_fixture(const std::filesystem::path& dir);

// LeNet-5-shape model (conv 6@5x5 pad 2 -> pool -> conv 16@5x5 -> pool ->
// fc 120 -> fc 84 -> fc 10 -> softmax) with deterministic synthetic int8
// weights and calibrated requantization scales. Returns the manifest path.
std::filesystem::path build_lenet_fixture(const std::filesystem::path& dir,
                                          std::uint64_t seed = 0xF1);

// Synthetic MNIST-format image file (28x28 ubyte). Returns the file path.
std::filesystem::path write_idx_inputs(const std::filesystem::path& dir, std::size_t count,
                                       std::uint64_t seed = 0x1D);

// Quantizes the first `count` images of an IDX file with the model's input
// format and scale.
std::vector<QuantTensor> load_fixture_inputs(const NetworkModel& model,
                                             const std::filesystem::path& idx_path,
                                             std::size_t count);

// Random probability vector (positive entries, sums to 1).
std::vector<double> random_probability_vector(std::size_t classes, std::uint64_t seed);

} // namespace sysfi::test
