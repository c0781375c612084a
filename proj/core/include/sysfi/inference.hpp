#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sysfi/fault.hpp"
#include "sysfi/model.hpp"
#include "sysfi/systolic.hpp"

namespace sysfi {

// Which layer runs on the array simulator, under what array configuration,
// and with which faults active. Everything else takes the fast path.
struct ExecutionPlan {
    std::optional<std::size_t> target_layer;
    SystolicConfig config;
    std::vector<Fault> faults;
    // Operand-to-line assignment for the lowered matrices: false puts
    // activations on line A and weights on line B (default), true swaps them
    // (both operands transposed).
    bool weights_on_a = false;

    void validate(const NetworkModel& model) const;
};

// Fast reference forward pass. Returns the softmax probability vector.
// If `activations` is given, the quantized output of every layer before the
// softmax is appended to it.
std::vector<double> infer_reference(const NetworkModel& model, const QuantTensor& input,
                                    std::vector<QuantTensor>* activations = nullptr);

// Same network, but the plan's target layer executes on the systolic array
// simulator via lowering/lifting. With an empty fault list this matches
// infer_reference bit-exactly on integer paths.
std::vector<double> infer_hierarchical(const NetworkModel& model, const QuantTensor& input,
                                       const ExecutionPlan& plan,
                                       std::vector<QuantTensor>* activations = nullptr,
                                       SimTrace* trace = nullptr);

// Total number of global clock cycles the plan's target layer occupies
// (tile passes x cycles per pass); the eligible range for transient faults.
Cycle target_layer_cycles(const NetworkModel& model, const ExecutionPlan& plan);

// Quantizes a real-valued input (e.g. an IDX image) with the model's declared
// input format and scale.
QuantTensor quantize_model_input(const NetworkModel& model, std::span<const double> values);

} // namespace sysfi
