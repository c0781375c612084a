#include "sysfi/fault.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "sysfi/errors.hpp"
#include "sysfi/rng.hpp"
#include "sysfi/systolic.hpp"

namespace sysfi {

std::string fault_to_string(const Fault& fault) {
    std::ostringstream out;
    out << line_name(fault.line) << ' ' << fault.pe.x << ' ' << fault.pe.y << ' '
        << fault.window.start << ' ';
    if (fault.window.end) {
        out << *fault.window.end;
    } else {
        out << "inf";
    }
    out << ' ' << fault_kind_name(fault.kind) << ' ' << fault.bit;
    return out.str();
}

std::int64_t sample_size(std::int64_t population, double margin, double z, double p) {
    if (population < 1) throw ValidationError("sample_size: population must be >= 1");
    if (!(margin > 0.0 && margin < 1.0)) throw ValidationError("sample_size: margin must be in (0,1)");
    if (!(z > 0.0)) throw ValidationError("sample_size: z must be > 0");
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("sample_size: p must be in (0,1)");

    const double n = static_cast<double>(population);
    const double denom = 1.0 + margin * margin * (n - 1.0) / (z * z * p * (1.0 - p));
    const double raw = std::ceil(n / denom);
    const std::int64_t size = static_cast<std::int64_t>(raw);
    return std::min(std::max<std::int64_t>(size, 1), population);
}

double z_for_confidence(double confidence) {
    if (std::abs(confidence - 0.90) < 1e-9) return 1.645;
    if (std::abs(confidence - 0.95) < 1e-9) return 1.96;
    if (std::abs(confidence - 0.99) < 1e-9) return 2.576;
    throw ValidationError("unsupported confidence level (use 0.90, 0.95 or 0.99)");
}

namespace {

struct SiteSpace {
    // Eligible tuples factored per line, enumerated in a fixed order:
    // line-major, then pe (x-major), bit, kind, window.
    struct LineSites {
        Line line;
        std::vector<PECoord> pes;
        int bit_lo = 0;
        int bit_hi = 0; // inclusive
        std::int64_t windows = 1;
        std::int64_t per_line = 0;
    };
    std::vector<LineSites> lines;
    std::vector<FaultKind> kinds;
    bool permanent = false;
    std::optional<std::pair<Cycle, Cycle>> transient;
    std::int64_t total = 0;

    Fault site(std::int64_t index) const;
};

Fault SiteSpace::site(std::int64_t index) const {
    for (const LineSites& ls : lines) {
        if (index >= ls.per_line) {
            index -= ls.per_line;
            continue;
        }
        const std::int64_t bits = ls.bit_hi - ls.bit_lo + 1;
        const std::int64_t kinds_n = static_cast<std::int64_t>(kinds.size());
        const std::int64_t per_pe = bits * kinds_n * ls.windows;
        const std::int64_t pe_idx = index / per_pe;
        index %= per_pe;
        const std::int64_t per_bit = kinds_n * ls.windows;
        const int bit = ls.bit_lo + static_cast<int>(index / per_bit);
        index %= per_bit;
        const FaultKind kind = kinds[static_cast<std::size_t>(index / ls.windows)];
        const std::int64_t w = index % ls.windows;

        Fault f;
        f.line = ls.line;
        f.pe = ls.pes[static_cast<std::size_t>(pe_idx)];
        f.bit = bit;
        f.kind = kind;
        if (permanent && w == 0) {
            f.window = CycleWindow::permanent();
        } else {
            const Cycle t = transient->first + (w - (permanent ? 1 : 0));
            f.window = CycleWindow::single(t);
        }
        return f;
    }
    throw ValidationError("fault site index out of range");
}

SiteSpace build_site_space(const FaultScope& scope, const SystolicConfig& config) {
    SiteSpace space;
    space.kinds = scope.kinds;
    space.permanent = scope.permanent;
    space.transient = scope.transient_cycles;

    std::int64_t windows = scope.permanent ? 1 : 0;
    if (scope.transient_cycles) {
        if (scope.transient_cycles->second < scope.transient_cycles->first) {
            throw ValidationError("fault scope: transient cycle range is empty");
        }
        windows += scope.transient_cycles->second - scope.transient_cycles->first + 1;
    }

    std::vector<PECoord> pes;
    if (scope.pes) {
        pes = *scope.pes;
        const PEGrid grid = pe_grid(config);
        for (const PECoord& pe : pes) {
            if (pe.x < 0 || pe.x >= grid.rows || pe.y < 0 || pe.y >= grid.cols) {
                throw ValidationError("fault scope: PE outside the array grid");
            }
        }
    } else {
        const PEGrid grid = pe_grid(config);
        pes.reserve(static_cast<std::size_t>(grid.rows) * static_cast<std::size_t>(grid.cols));
        for (int x = 0; x < grid.rows; ++x)
            for (int y = 0; y < grid.cols; ++y) pes.push_back(PECoord{x, y});
    }

    for (Line line : scope.lines) {
        SiteSpace::LineSites ls;
        ls.line = line;
        ls.pes = pes;
        const int width = config.line_format(line).width;
        ls.bit_lo = 0;
        ls.bit_hi = width - 1;
        if (scope.bit_range) {
            ls.bit_lo = std::max(scope.bit_range->first, 0);
            ls.bit_hi = std::min(scope.bit_range->second, width - 1);
            if (ls.bit_lo > ls.bit_hi) continue;
        }
        ls.windows = windows;
        ls.per_line = static_cast<std::int64_t>(ls.pes.size()) * (ls.bit_hi - ls.bit_lo + 1) *
                      static_cast<std::int64_t>(space.kinds.size()) * windows;
        if (ls.per_line > 0) {
            space.lines.push_back(std::move(ls));
            space.total += space.lines.back().per_line;
        }
    }
    return space;
}

} // namespace

std::int64_t fault_population(const FaultScope& scope, const SystolicConfig& config) {
    return build_site_space(scope, config).total;
}

std::vector<Fault> generate_fault_list(const FaultListSpec& spec, const SystolicConfig& config) {
    config.validate();
    const SiteSpace space = build_site_space(spec.scope, config);
    if (space.total == 0) throw ValidationError("fault list spec: scope is empty under this config");

    std::int64_t count;
    if (spec.count) {
        count = static_cast<std::int64_t>(*spec.count);
    } else {
        count = sample_size(space.total, spec.margin, z_for_confidence(spec.confidence),
                            spec.expected_rate);
    }

    std::vector<Fault> faults;
    faults.reserve(static_cast<std::size_t>(count));
    SplitMix64 rng = SplitMix64::substream(spec.seed, 0x6661756c74ULL);

    if (count <= space.total) {
        // Without replacement.
        std::unordered_set<std::int64_t> chosen;
        chosen.reserve(static_cast<std::size_t>(count) * 2);
        while (static_cast<std::int64_t>(faults.size()) < count) {
            const std::int64_t index =
                static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(space.total)));
            if (chosen.insert(index).second) faults.push_back(space.site(index));
        }
    } else {
        for (std::int64_t n = 0; n < count; ++n) {
            const std::int64_t index =
                static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(space.total)));
            faults.push_back(space.site(index));
        }
    }
    return faults;
}

void validate_fault(const Fault& fault, const SystolicConfig& config) {
    const PEGrid grid = pe_grid(config);
    if (fault.pe.x < 0 || fault.pe.x >= grid.rows || fault.pe.y < 0 || fault.pe.y >= grid.cols) {
        throw ValidationError("fault PE (" + std::to_string(fault.pe.x) + "," +
                              std::to_string(fault.pe.y) + ") outside the " +
                              std::to_string(grid.rows) + "x" + std::to_string(grid.cols) +
                              " array");
    }
    const NumberFormat& fmt = config.line_format(fault.line);
    if (fault.bit < 0 || fault.bit >= fmt.width) {
        throw ValidationError("fault bit " + std::to_string(fault.bit) + " out of range for line " +
                              line_name(fault.line) + " (" + format_name(fmt) + ")");
    }
    if (fault.window.end && *fault.window.end < fault.window.start) {
        throw ValidationError("fault window end precedes start");
    }
}

std::vector<std::pair<LatticePoint, Cycle>> expand_fault(const Fault& fault,
                                                         const SystolicConfig& config,
                                                         const LatticeDomain& domain) {
    config.validate();
    validate_fault(fault, config);

    const auto d = dependence(fault.line);
    std::vector<std::pair<LatticePoint, Cycle>> out;
    std::unordered_set<std::int64_t> seen;
    auto key = [&domain](const LatticePoint& p) {
        return (static_cast<std::int64_t>(p.i) * (domain.n2 + 1) + p.j) * (domain.n3 + 1) + p.k;
    };
    auto mark = [&](const LatticePoint& p) {
        if (seen.insert(key(p)).second) out.emplace_back(p, config.local_cycle(p));
    };

    for (int i = 1; i <= domain.n1; ++i) {
        for (int j = 1; j <= domain.n2; ++j) {
            for (int k = 1; k <= domain.n3; ++k) {
                const LatticePoint p{i, j, k};
                if (config.pe_of(p) != fault.pe) continue;
                if (!fault.window.contains(config.local_cycle(p))) continue;
                // Seed, then the downstream closure along the dependence.
                LatticePoint q = p;
                while (domain.contains(q)) {
                    mark(q);
                    q = LatticePoint{q.i + d[0], q.j + d[1], q.k + d[2]};
                }
            }
        }
    }

    std::sort(out.begin(), out.end(), [](const auto& lhs, const auto& rhs) {
        if (lhs.second != rhs.second) return lhs.second < rhs.second;
        return lhs.first < rhs.first;
    });
    return out;
}

namespace {

Fault parse_fault_record(const std::string& text, const std::string& where) {
    std::istringstream in(text);
    std::string line_tag, end_text, kind_text;
    Fault f;
    if (!(in >> line_tag >> f.pe.x >> f.pe.y >> f.window.start >> end_text >> kind_text >> f.bit)) {
        throw ValidationError("malformed fault record" + where + ": '" + text + "'");
    }
    const auto line = line_from_name(line_tag);
    if (!line) throw ValidationError("unknown line tag '" + line_tag + "'" + where);
    f.line = *line;
    if (end_text == "inf" || end_text == "INF") {
        f.window.end = std::nullopt;
    } else {
        try {
            f.window.end = std::stoll(end_text);
        } catch (const std::exception&) {
            throw ValidationError("bad window end '" + end_text + "'" + where);
        }
    }
    if (kind_text == "stuck0") {
        f.kind = FaultKind::Stuck0;
    } else if (kind_text == "stuck1") {
        f.kind = FaultKind::Stuck1;
    } else if (kind_text == "flip") {
        f.kind = FaultKind::Flip;
    } else {
        throw ValidationError("unknown fault kind '" + kind_text + "'" + where);
    }
    std::string extra;
    if (in >> extra) throw ValidationError("trailing fields in fault record" + where);
    return f;
}

} // namespace

std::vector<Fault> parse_fault_lines(std::span<const std::string> lines) {
    std::vector<Fault> faults;
    for (std::size_t n = 0; n < lines.size(); ++n) {
        std::string text = lines[n];
        const auto hash = text.find('#');
        if (hash != std::string::npos) text.erase(hash);
        if (text.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        faults.push_back(parse_fault_record(text, " (record " + std::to_string(n + 1) + ")"));
    }
    return faults;
}

std::vector<Fault> parse_fault_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open fault list: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return parse_fault_lines(lines);
}

void save_fault_list(const std::filesystem::path& path, std::span<const Fault> faults) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open fault list for writing: " + path.string());
    out << "# line x y t_start t_end kind bit\n";
    for (const Fault& f : faults) out << fault_to_string(f) << '\n';
    if (!out) throw IoError("short write on fault list: " + path.string());
}

} // namespace sysfi
