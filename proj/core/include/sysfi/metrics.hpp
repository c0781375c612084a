#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sysfi {

// Index of the largest element; ties break to the lowest index.
std::size_t argmax_index(std::span<const double> v);

// True iff the faulty run's top-1 class moved away from the golden one.
bool sdc_top1(std::span<const double> golden, std::span<const double> faulty);

// True iff the golden top-1 class is not among the k highest-probability
// classes of the faulty output (ties by lowest index).
bool sdc_topk(std::span<const double> golden, std::span<const double> faulty, std::size_t k);

// True iff the faulty probability of the golden top-1 class dropped by more
// than `threshold` relative to its golden probability.
bool sdc_confidence_drop(std::span<const double> golden, std::span<const double> faulty,
                         double threshold);

// (1 - cos(G, F)) * (argmax(F) - argmax(G)). Zero whenever the argmax is
// unchanged; sign tracks the direction of the misclassification; magnitude
// grades its severity. Throws ValidationError on zero-norm input.
double faulty_distance(std::span<const double> golden, std::span<const double> faulty);

struct FitComponent {
    double fit_raw = 0.0;   // failures per 10^9 device hours per bit
    double size_bits = 0.0; // component size in bits
    double sdc = 0.0;       // measured SDC fraction
};

// Accelerator failure rate: sum of fit_raw * size * sdc over components.
double fit_accelerator(std::span<const FitComponent> components);

} // namespace sysfi
