#include "sysfi/systolic.hpp"

#include <algorithm>
#include <ostream>

#include "sysfi/errors.hpp"

namespace sysfi {

namespace {

// Extremes of one P row over the domain box, exact for a linear map.
std::pair<int, int> row_min_max(const std::array<int, 3>& row, const LatticeDomain& d) {
    const int hi[3] = {d.n1, d.n2, d.n3};
    int lo_sum = 0;
    int hi_sum = 0;
    for (int c = 0; c < 3; ++c) {
        if (row[c] >= 0) {
            lo_sum += row[c] * 1;
            hi_sum += row[c] * hi[c];
        } else {
            lo_sum += row[c] * hi[c];
            hi_sum += row[c] * 1;
        }
    }
    return {lo_sum, hi_sum};
}

} // namespace

PECoord SystolicConfig::pe_origin() const {
    const LatticeDomain d = domain();
    return PECoord{row_min_max(projection.p[0], d).first, row_min_max(projection.p[1], d).first};
}

Cycle SystolicConfig::first_wavefront() const {
    // Validated configs have pi >= 1 componentwise, so the minimum is at (1,1,1).
    return project_time(projection, LatticePoint{1, 1, 1});
}

PECoord SystolicConfig::pe_of(const LatticePoint& p) const {
    const PECoord raw = project_space(projection, p);
    const PECoord origin = pe_origin();
    return PECoord{raw.x - origin.x, raw.y - origin.y};
}

Cycle SystolicConfig::local_cycle(const LatticePoint& p) const {
    return project_time(projection, p) - first_wavefront();
}

void SystolicConfig::validate() const {
    matmul_domain(n1, n2, n3);
    validate_format(op_format);
    validate_format(acc_format);
    if ((op_format.kind == NumKind::Float32) != (acc_format.kind == NumKind::Float32)) {
        throw ValidationError("operand and accumulator formats must both be float32 or both integer-like");
    }
    const ValidationResult v = validate_projection(projection, domain());
    if (!v.ok) throw ValidationError("invalid projection: " + v.reason);
}

PEGrid pe_grid(const SystolicConfig& config) {
    const LatticeDomain d = config.domain();
    const auto [x0, x1] = row_min_max(config.projection.p[0], d);
    const auto [y0, y1] = row_min_max(config.projection.p[1], d);
    return PEGrid{x1 - x0 + 1, y1 - y0 + 1};
}

Cycle cycle_count(const SystolicConfig& config) {
    const LatticePoint last{config.n1, config.n2, config.n3};
    return project_time(config.projection, last) - config.first_wavefront() + 1;
}

void SimTrace::write_csv(std::ostream& out) const {
    out << "cycle,x,y,a,b,c\n";
    for (const Entry& e : entries) {
        out << e.cycle << ',' << e.pe.x << ',' << e.pe.y << ',' << e.a << ',' << e.b << ',' << e.c
            << '\n';
    }
}

TileSimulator::TileSimulator(const SystolicConfig& config, std::span<const Fault> faults)
    : config_(config) {
    config_.validate();
    for (const Fault& f : faults) {
        validate_fault(f, config_);
        line_faults_[static_cast<int>(f.line)].push_back(f);
        any_faults_ = true;
    }

    const int n1 = config_.n1;
    const int n2 = config_.n2;
    const int n3 = config_.n3;

    // Value storage over the lattice, boundary index 0 included.
    const std::size_t sj = static_cast<std::size_t>(n3) + 1;
    const std::size_t si = (static_cast<std::size_t>(n2) + 1) * sj;
    const std::size_t total = (static_cast<std::size_t>(n1) + 1) * si;
    auto idx = [si, sj](int i, int j, int k) {
        return static_cast<std::size_t>(i) * si + static_cast<std::size_t>(j) * sj +
               static_cast<std::size_t>(k);
    };
    va_.assign(total, 0);
    vb_.assign(total, 0);
    vc_.assign(total, 0);

    // Interior points in wavefront (non-decreasing pi.p) order, with the
    // per-point indices, PE and local cycle fixed once per configuration.
    std::vector<LatticePoint> points;
    points.reserve(static_cast<std::size_t>(config_.domain().interior_count()));
    for (int i = 1; i <= n1; ++i)
        for (int j = 1; j <= n2; ++j)
            for (int k = 1; k <= n3; ++k) points.push_back(LatticePoint{i, j, k});
    std::stable_sort(points.begin(), points.end(),
                     [this](const LatticePoint& lhs, const LatticePoint& rhs) {
                         return project_time(config_.projection, lhs) <
                                project_time(config_.projection, rhs);
                     });

    const Cycle t0 = config_.first_wavefront();
    const PECoord origin = config_.pe_origin();
    order_.reserve(points.size());
    for (const LatticePoint& p : points) {
        const PECoord raw = project_space(config_.projection, p);
        order_.push_back(Point{static_cast<std::uint32_t>(idx(p.i, p.j, p.k)),
                               static_cast<std::uint32_t>(idx(p.i, p.j - 1, p.k)),
                               static_cast<std::uint32_t>(idx(p.i - 1, p.j, p.k)),
                               static_cast<std::uint32_t>(idx(p.i, p.j, p.k - 1)),
                               PECoord{raw.x - origin.x, raw.y - origin.y},
                               project_time(config_.projection, p) - t0});
    }

    out_indices_.reserve(static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2));
    for (int i = 1; i <= n1; ++i)
        for (int j = 1; j <= n2; ++j)
            out_indices_.push_back(static_cast<std::uint32_t>(idx(i, j, n3)));
}

namespace {

inline Word corrupt_if_active(Word value, const std::vector<Fault>& faults, const PECoord& pe,
                              Cycle global_cycle, const NumberFormat& fmt) {
    for (const Fault& f : faults) {
        if (f.pe == pe && f.window.contains(global_cycle)) {
            value = apply_bit_fault(value, f.kind, f.bit, fmt);
        }
    }
    return value;
}

} // namespace

QuantTensor TileSimulator::run(const QuantTensor& a, const QuantTensor& b, Cycle cycle_offset,
                               SimTrace* trace) {
    const int n1 = config_.n1;
    const int n2 = config_.n2;
    const int n3 = config_.n3;
    if (a.rank() != 2 || b.rank() != 2 || a.rows() != static_cast<std::size_t>(n1) ||
        a.cols() != static_cast<std::size_t>(n3) || b.rows() != static_cast<std::size_t>(n3) ||
        b.cols() != static_cast<std::size_t>(n2)) {
        throw ValidationError("simulate_matmul: operand shapes do not match config extents");
    }
    if (a.format.width != config_.op_format.width || b.format.width != config_.op_format.width ||
        (a.format.kind == NumKind::Float32) != (config_.op_format.kind == NumKind::Float32) ||
        (b.format.kind == NumKind::Float32) != (config_.op_format.kind == NumKind::Float32)) {
        throw ValidationError(
            "simulate_matmul: operand formats do not match the config's operand format");
    }

    // Initial conditions: a(i,0,k) = A[i][k], b(0,j,k) = B[k][j], c(i,j,0) = 0.
    // Boundary slots are refreshed here; interior slots are written before
    // any read by the wavefront order, so no clearing between passes.
    const std::size_t sj = static_cast<std::size_t>(n3) + 1;
    const std::size_t si = (static_cast<std::size_t>(n2) + 1) * sj;
    for (int i = 1; i <= n1; ++i)
        for (int k = 1; k <= n3; ++k)
            va_[static_cast<std::size_t>(i) * si + k] =
                a.at2(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(k - 1));
    for (int j = 1; j <= n2; ++j)
        for (int k = 1; k <= n3; ++k)
            vb_[static_cast<std::size_t>(j) * sj + k] =
                b.at2(static_cast<std::size_t>(k - 1), static_cast<std::size_t>(j - 1));

    const NumberFormat& opf = config_.op_format;
    const NumberFormat& accf = config_.acc_format;

    for (const Point& p : order_) {
        Word ra = va_[p.read_a];
        Word rb = vb_[p.read_b];
        Word rc = vc_[p.read_c];
        if (any_faults_) {
            const Cycle t = cycle_offset + p.local_cycle;
            ra = corrupt_if_active(ra, line_faults_[0], p.pe, t, opf);
            rb = corrupt_if_active(rb, line_faults_[1], p.pe, t, opf);
            rc = corrupt_if_active(rc, line_faults_[2], p.pe, t, accf);
        }

        va_[p.self] = ra;
        vb_[p.self] = rb;
        vc_[p.self] = mac(ra, rb, rc, opf, accf);

        if (trace) {
            trace->entries.push_back(
                SimTrace::Entry{cycle_offset + p.local_cycle, p.pe, ra, rb, vc_[p.self]});
        }
    }

    QuantTensor out = QuantTensor::zeros(
        {static_cast<std::size_t>(n1), static_cast<std::size_t>(n2)}, accf);
    for (std::size_t n = 0; n < out_indices_.size(); ++n) out.data[n] = vc_[out_indices_[n]];
    return out;
}

QuantTensor simulate_matmul(const QuantTensor& a, const QuantTensor& b,
                            const SystolicConfig& config, std::span<const Fault> faults,
                            Cycle cycle_offset, SimTrace* trace) {
    TileSimulator sim(config, faults);
    return sim.run(a, b, cycle_offset, trace);
}

} // namespace sysfi
