#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sysfi/lattice.hpp"
#include "sysfi/numerics.hpp"

namespace sysfi {

struct SystolicConfig;

// Inclusive cycle window on the tile-local clock (first wavefront = cycle 0).
// No end means permanent.
struct CycleWindow {
    Cycle start = 0;
    std::optional<Cycle> end;

    static CycleWindow permanent() { return CycleWindow{0, std::nullopt}; }
    static CycleWindow single(Cycle t) { return CycleWindow{t, t}; }
    static CycleWindow range(Cycle t0, Cycle t1) { return CycleWindow{t0, t1}; }

    bool is_permanent() const { return !end.has_value(); }
    bool contains(Cycle t) const { return t >= start && (!end || t <= *end); }

    friend bool operator==(const CycleWindow&, const CycleWindow&) = default;
};

// One hardware fault on a PE data line: while the window is active, every
// read of that line at that PE goes through the bit-level corruption.
struct Fault {
    Line line = Line::A;
    PECoord pe;          // 0-based position in the PE grid
    CycleWindow window = CycleWindow::permanent();
    FaultKind kind = FaultKind::Flip;
    int bit = 0;

    friend bool operator==(const Fault&, const Fault&) = default;
};

std::string fault_to_string(const Fault& fault);

// Statistical fault-injection sample size:
//   n = ceil( N / (1 + e^2 (N-1) / (z^2 p (1-p))) ), clamped to [1, N].
std::int64_t sample_size(std::int64_t population, double margin, double z, double p);

// z for the supported confidence levels (0.90, 0.95, 0.99).
// Throws ValidationError for anything else.
double z_for_confidence(double confidence);

// Which fault sites are eligible for random generation. Defaults cover every
// line, kind, PE and bit of the bound config.
struct FaultScope {
    std::vector<Line> lines = {Line::A, Line::B, Line::C};
    std::vector<FaultKind> kinds = {FaultKind::Stuck0, FaultKind::Stuck1, FaultKind::Flip};
    bool permanent = true;                                   // eligible windows are [0, inf)
    std::optional<std::pair<Cycle, Cycle>> transient_cycles; // or single-cycle windows in range
    std::optional<std::pair<int, int>> bit_range;            // inclusive, clamped per line width
    std::optional<std::vector<PECoord>> pes;                 // default: whole grid
};

struct FaultListSpec {
    std::optional<std::size_t> count; // absent => statistical sizing over the population
    double confidence = 0.95;
    double margin = 0.01;
    double expected_rate = 0.5;
    std::uint64_t seed = 0;
    FaultScope scope;
};

// Number of eligible (line, pe, bit, kind, window) sites under the config.
std::int64_t fault_population(const FaultScope& scope, const SystolicConfig& config);

// Deterministic given the seed. Draws uniformly over eligible sites, without
// replacement when the population permits. Throws ValidationError on an
// empty scope.
std::vector<Fault> generate_fault_list(const FaultListSpec& spec, const SystolicConfig& config);

// Checks PE bounds, bit range against the line's word width, window sanity.
void validate_fault(const Fault& fault, const SystolicConfig& config);

// Every (lattice point, tile-local cycle) of the fault's line that carries a
// corrupted value: seed points where the corruption is applied (PE and window
// match), plus the downstream closure p + m*d within the domain. Sorted by
// (cycle, i, j, k).
std::vector<std::pair<LatticePoint, Cycle>> expand_fault(const Fault& fault,
                                                         const SystolicConfig& config,
                                                         const LatticeDomain& domain);

// Fault-list text format, one record per line:
//   line x y t_start t_end|inf kind bit
// '#' starts a comment.
std::vector<Fault> parse_fault_list(const std::filesystem::path& path);
std::vector<Fault> parse_fault_lines(std::span<const std::string> lines);
void save_fault_list(const std::filesystem::path& path, std::span<const Fault> faults);

} // namespace sysfi
