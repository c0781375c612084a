#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sysfi {

using Cycle = std::int64_t;

// Point of the 3-d integer iteration lattice. Interior computation points use
// 1-based coordinates; index 0 is reserved for boundary/initial values
// (a(i,0,k), b(0,j,k), c(i,j,0)).
struct LatticePoint {
    int i = 0;
    int j = 0;
    int k = 0;

    friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
    auto operator<=>(const LatticePoint&) const = default;
};

// Rectangular iteration domain of the matrix-multiplication recurrence:
// C[n1 x n2] = A[n1 x n3] * B[n3 x n2].
struct LatticeDomain {
    int n1 = 1;
    int n2 = 1;
    int n3 = 1;

    bool contains(const LatticePoint& p) const {
        return p.i >= 1 && p.i <= n1 && p.j >= 1 && p.j <= n2 && p.k >= 1 && p.k <= n3;
    }
    std::int64_t interior_count() const {
        return static_cast<std::int64_t>(n1) * n2 * n3;
    }

    friend bool operator==(const LatticeDomain&, const LatticeDomain&) = default;
};

// Throws ValidationError for non-positive extents.
LatticeDomain matmul_domain(int n1, int n2, int n3);

// The three data lines of the recurrence. C is the computed variable
// (partial sum); A and B are propagated operands.
enum class Line : std::uint8_t { A = 0, B = 1, C = 2 };

inline constexpr std::array<Line, 3> kAllLines = {Line::A, Line::B, Line::C};

const char* line_name(Line line);
std::optional<Line> line_from_name(std::string_view name);

// Per-line dependence vector: a(i,j,k) = a(i,j-1,k), b(i,j,k) = b(i-1,j,k),
// c(i,j,k) = c(i,j,k-1) + a * b. Uniform (independent of the point).
constexpr std::array<int, 3> dependence(Line line) {
    switch (line) {
    case Line::A: return {0, 1, 0};
    case Line::B: return {1, 0, 0};
    default:      return {0, 0, 1};
    }
}

// Physical PE coordinate, the image of a lattice point under P.
struct PECoord {
    int x = 0;
    int y = 0;

    friend bool operator==(const PECoord&, const PECoord&) = default;
    auto operator<=>(const PECoord&) const = default;
};

// Space projection P (2x3) and timing vector pi. Integer entries only;
// pi must be causal w.r.t. every dependence vector (pi . d >= 1).
struct Projection {
    std::array<std::array<int, 3>, 2> p{{{1, 0, 0}, {0, 1, 0}}};
    std::array<int, 3> pi{1, 1, 1};

    static Projection output_stationary();  // P = [[1,0,0],[0,1,0]], pi = (1,1,1)
    static Projection weight_stationary();  // P = [[0,1,0],[0,0,1]], pi = (1,1,1)

    friend bool operator==(const Projection&, const Projection&) = default;
};

PECoord project_space(const Projection& proj, const LatticePoint& p);
Cycle project_time(const Projection& proj, const LatticePoint& p);

// Where one hop along a line's dependence takes a value: dx PE-grid steps,
// dt clock cycles.
struct Displacement {
    PECoord dx;
    int dt = 0;

    friend bool operator==(const Displacement&, const Displacement&) = default;
};

Displacement displacement(const Projection& proj, Line line);

// Outcome of schedule validation. Rejection is a value carrying a witness,
// not an error.
struct ValidationResult {
    bool ok = false;
    std::string reason;
    std::optional<Line> causality_violation;
    std::optional<std::pair<LatticePoint, LatticePoint>> collision;

    explicit operator bool() const { return ok; }
};

// Accepts iff pi . d >= 1 for every dependence vector and the combined map
// p -> (P p, pi . p) is injective on the interior of the domain.
ValidationResult validate_projection(const Projection& proj, const LatticeDomain& domain);

// Lines whose spatial displacement P . d is zero; they never leave their PE.
std::vector<Line> stationary_lines(const Projection& proj);

} // namespace sysfi
