#include "sysfi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sysfi/errors.hpp"

namespace sysfi {

namespace {

void check_pair(std::span<const double> golden, std::span<const double> faulty) {
    if (golden.size() != faulty.size() || golden.empty()) {
        throw ValidationError("probability vectors must be non-empty and the same length");
    }
}

} // namespace

std::size_t argmax_index(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t n = 1; n < v.size(); ++n) {
        if (v[n] > v[best]) best = n;
    }
    return best;
}

bool sdc_top1(std::span<const double> golden, std::span<const double> faulty) {
    check_pair(golden, faulty);
    return argmax_index(faulty) != argmax_index(golden);
}

bool sdc_topk(std::span<const double> golden, std::span<const double> faulty, std::size_t k) {
    check_pair(golden, faulty);
    if (k < 1 || k > faulty.size()) throw ValidationError("sdc_topk: k out of range");
    const std::size_t target = argmax_index(golden);

    // Rank of `target` in the faulty output, ties resolved by lowest index.
    std::size_t rank = 0;
    for (std::size_t n = 0; n < faulty.size(); ++n) {
        if (faulty[n] > faulty[target] || (faulty[n] == faulty[target] && n < target)) ++rank;
    }
    return rank >= k;
}

bool sdc_confidence_drop(std::span<const double> golden, std::span<const double> faulty,
                         double threshold) {
    check_pair(golden, faulty);
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ValidationError("confidence-drop threshold must be in (0,1)");
    }
    const std::size_t target = argmax_index(golden);
    return faulty[target] < golden[target] * (1.0 - threshold);
}

double faulty_distance(std::span<const double> golden, std::span<const double> faulty) {
    check_pair(golden, faulty);
    double dot = 0.0, norm_g = 0.0, norm_f = 0.0;
    for (std::size_t n = 0; n < golden.size(); ++n) {
        dot += golden[n] * faulty[n];
        norm_g += golden[n] * golden[n];
        norm_f += faulty[n] * faulty[n];
    }
    if (norm_g == 0.0 || norm_f == 0.0) {
        throw ValidationError("faulty_distance: zero-norm vector");
    }

    const std::size_t ag_g = argmax_index(golden);
    const std::size_t ag_f = argmax_index(faulty);
    if (ag_f == ag_g) return 0.0;
    const double cosine = dot / (std::sqrt(norm_g) * std::sqrt(norm_f));
    return (1.0 - cosine) * (static_cast<double>(ag_f) - static_cast<double>(ag_g));
}

double fit_accelerator(std::span<const FitComponent> components) {
    double fit = 0.0;
    for (const FitComponent& comp : components) {
        if (comp.fit_raw < 0.0 || comp.size_bits < 0.0 || comp.sdc < 0.0) {
            throw ValidationError("FIT components must be non-negative");
        }
        fit += comp.fit_raw * comp.size_bits * comp.sdc;
    }
    return fit;
}

} // namespace sysfi
