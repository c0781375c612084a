#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "sysfi/fault.hpp"
#include "sysfi/lattice.hpp"
#include "sysfi/numerics.hpp"

namespace sysfi {

// Bounding extents of the PE grid (image of the domain under P).
struct PEGrid {
    int rows = 0;
    int cols = 0;

    friend bool operator==(const PEGrid&, const PEGrid&) = default;
};

// One array configuration: tile extents, space/time projection and the word
// formats of the operand lines (A, B) and the accumulator line (C).
struct SystolicConfig {
    int n1 = 1;
    int n2 = 1;
    int n3 = 1;
    Projection projection = Projection::output_stationary();
    NumberFormat op_format = NumberFormat::int8();
    NumberFormat acc_format = NumberFormat::int32();

    LatticeDomain domain() const { return LatticeDomain{n1, n2, n3}; }
    const NumberFormat& line_format(Line line) const {
        return line == Line::C ? acc_format : op_format;
    }

    // PE coordinate of a lattice point, normalized so the grid starts at (0,0).
    PECoord pe_of(const LatticePoint& p) const;
    // Tile-local cycle of a lattice point; the first wavefront is cycle 0.
    Cycle local_cycle(const LatticePoint& p) const;

    PECoord pe_origin() const;  // componentwise min of P p over the domain
    Cycle first_wavefront() const;

    // Throws ValidationError if extents or formats are bad or the projection
    // does not validate over the domain.
    void validate() const;
};

PEGrid pe_grid(const SystolicConfig& config);

// Number of wavefronts: max pi.p - min pi.p + 1 over the interior domain.
Cycle cycle_count(const SystolicConfig& config);

// Per-evaluation trace for debugging/visualization; one entry per lattice
// point in wavefront order.
struct SimTrace {
    struct Entry {
        Cycle cycle = 0;
        PECoord pe;
        Word a = 0;
        Word b = 0;
        Word c = 0;
    };
    std::vector<Entry> entries;

    void write_csv(std::ostream& out) const;
};

// Executes one tile matmul on the modeled array by solving the recurrence in
// wavefront order. Every variable read whose (PE, global cycle) matches an
// active fault is replaced by the bit-corrupted value before use, so
// corruption propagates exactly as the hardware lines would carry it.
//
// a is n1 x n3, b is n3 x n2 in the config's operand format; the result is
// n1 x n2 in the accumulator format. The global cycle of a point is
// cycle_offset + local cycle, which keeps permanent faults active across
// successive tile passes that share one clock.
QuantTensor simulate_matmul(const QuantTensor& a, const QuantTensor& b,
                            const SystolicConfig& config, std::span<const Fault> faults,
                            Cycle cycle_offset = 0, SimTrace* trace = nullptr);

// Reusable evaluator for repeated tile passes on one configuration: the
// wavefront order, PE/cycle maps and value buffers are computed once.
// Stateful; one instance per thread.
class TileSimulator {
public:
    TileSimulator(const SystolicConfig& config, std::span<const Fault> faults);

    // One pass; identical semantics to simulate_matmul with this config.
    QuantTensor run(const QuantTensor& a, const QuantTensor& b, Cycle cycle_offset = 0,
                    SimTrace* trace = nullptr);

    const SystolicConfig& config() const { return config_; }

private:
    struct Point {
        std::uint32_t self, read_a, read_b, read_c;
        PECoord pe;
        Cycle local_cycle;
    };

    SystolicConfig config_;
    std::vector<Fault> line_faults_[3];
    bool any_faults_ = false;
    std::vector<Point> order_;
    std::vector<std::uint32_t> out_indices_; // c(i,j,n3) per output word
    std::vector<Word> va_, vb_, vc_;
};

} // namespace sysfi
