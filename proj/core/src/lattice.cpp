#include "sysfi/lattice.hpp"

#include <cstdlib>
#include <unordered_map>

#include "sysfi/errors.hpp"

namespace sysfi {

LatticeDomain matmul_domain(int n1, int n2, int n3) {
    if (n1 < 1 || n2 < 1 || n3 < 1) {
        throw ValidationError("matmul_domain: extents must be >= 1, got (" +
                              std::to_string(n1) + ", " + std::to_string(n2) + ", " +
                              std::to_string(n3) + ")");
    }
    return LatticeDomain{n1, n2, n3};
}

const char* line_name(Line line) {
    switch (line) {
    case Line::A: return "A";
    case Line::B: return "B";
    default:      return "C";
    }
}

std::optional<Line> line_from_name(std::string_view name) {
    if (name == "A" || name == "a") return Line::A;
    if (name == "B" || name == "b") return Line::B;
    if (name == "C" || name == "c") return Line::C;
    return std::nullopt;
}

Projection Projection::output_stationary() {
    return Projection{{{{1, 0, 0}, {0, 1, 0}}}, {1, 1, 1}};
}

// Keeps the B line (lowered weights) on a fixed PE: d_b = (1,0,0) spans the
// null space of P.
Projection Projection::weight_stationary() {
    return Projection{{{{0, 1, 0}, {0, 0, 1}}}, {1, 1, 1}};
}

PECoord project_space(const Projection& proj, const LatticePoint& p) {
    const auto& m = proj.p;
    return PECoord{m[0][0] * p.i + m[0][1] * p.j + m[0][2] * p.k,
                   m[1][0] * p.i + m[1][1] * p.j + m[1][2] * p.k};
}

Cycle project_time(const Projection& proj, const LatticePoint& p) {
    return static_cast<Cycle>(proj.pi[0]) * p.i +
           static_cast<Cycle>(proj.pi[1]) * p.j +
           static_cast<Cycle>(proj.pi[2]) * p.k;
}

Displacement displacement(const Projection& proj, Line line) {
    const auto d = dependence(line);
    const LatticePoint as_point{d[0], d[1], d[2]};
    return Displacement{project_space(proj, as_point),
                        static_cast<int>(project_time(proj, as_point))};
}

namespace {

struct SpaceTimeKey {
    int x, y;
    Cycle t;
    friend bool operator==(const SpaceTimeKey&, const SpaceTimeKey&) = default;
};

struct SpaceTimeHash {
    std::size_t operator()(const SpaceTimeKey& k) const {
        std::uint64_t h = static_cast<std::uint32_t>(k.x);
        h = h * 0x100000001b3ULL ^ static_cast<std::uint32_t>(k.y);
        h = h * 0x100000001b3ULL ^ static_cast<std::uint64_t>(k.t);
        return static_cast<std::size_t>(h);
    }
};

} // namespace

ValidationResult validate_projection(const Projection& proj, const LatticeDomain& domain) {
    ValidationResult result;

    for (Line line : kAllLines) {
        const auto d = dependence(line);
        const Cycle dt = static_cast<Cycle>(proj.pi[0]) * d[0] + proj.pi[1] * d[1] + proj.pi[2] * d[2];
        if (dt < 1) {
            result.ok = false;
            result.causality_violation = line;
            result.reason = std::string("timing vector is not causal for line ") + line_name(line) +
                            " (pi . d = " + std::to_string(dt) + " < 1)";
            return result;
        }
    }

    // Injectivity of p -> (P p, pi . p), checked exhaustively on the domain.
    std::unordered_map<SpaceTimeKey, LatticePoint, SpaceTimeHash> seen;
    seen.reserve(static_cast<std::size_t>(domain.interior_count()));
    for (int i = 1; i <= domain.n1; ++i) {
        for (int j = 1; j <= domain.n2; ++j) {
            for (int k = 1; k <= domain.n3; ++k) {
                const LatticePoint p{i, j, k};
                const PECoord r = project_space(proj, p);
                const SpaceTimeKey key{r.x, r.y, project_time(proj, p)};
                auto [it, inserted] = seen.emplace(key, p);
                if (!inserted) {
                    result.ok = false;
                    result.collision = std::make_pair(it->second, p);
                    result.reason = "points (" + std::to_string(it->second.i) + "," +
                                    std::to_string(it->second.j) + "," + std::to_string(it->second.k) +
                                    ") and (" + std::to_string(p.i) + "," + std::to_string(p.j) + "," +
                                    std::to_string(p.k) + ") collide on the same (PE, cycle)";
                    return result;
                }
            }
        }
    }

    result.ok = true;
    return result;
}

std::vector<Line> stationary_lines(const Projection& proj) {
    std::vector<Line> out;
    for (Line line : kAllLines) {
        const Displacement d = displacement(proj, line);
        if (d.dx.x == 0 && d.dx.y == 0) out.push_back(line);
    }
    return out;
}

} // namespace sysfi
