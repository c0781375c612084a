#include <benchmark/benchmark.h>

#include "sysfi/campaign.hpp"
#include "sysfi/lowering.hpp"
#include "sysfi/rng.hpp"
#include "sysfi/systolic.hpp"

using namespace sysfi;

namespace {

SystolicConfig os_config(int n) {
    SystolicConfig cfg;
    cfg.n1 = cfg.n2 = cfg.n3 = n;
    return cfg;
}

QuantTensor random_matrix(SplitMix64& rng, std::size_t rows, std::size_t cols) {
    QuantTensor t = QuantTensor::zeros({rows, cols}, NumberFormat::int8());
    for (Word& w : t.data) w = static_cast<Word>(rng.next_below(255)) - 127;
    return t;
}

// Small conv+fc network assembled in memory; enough depth to exercise the
// hierarchical switch without touching the filesystem.
NetworkModel tiny_model() {
    SplitMix64 rng = SplitMix64::substream(0xBE7C, 0);
    NetworkModel model;
    model.name = "bench";
    model.input_shape = {1, 12, 12};
    model.input_format = NumberFormat::int8();
    model.input_scale = 1.0 / 127.0;

    Layer conv;
    conv.kind = LayerKind::Conv;
    conv.weights = QuantTensor::zeros({4, 1, 3, 3}, NumberFormat::int8(), 1.0 / 64.0);
    for (Word& w : conv.weights.data) w = static_cast<Word>(rng.next_below(31)) - 15;
    conv.conv.stride = 1;
    conv.conv.padding = 1;
    conv.out_format = NumberFormat::int8();
    conv.out_scale = 0.05;

    Layer relu;
    relu.kind = LayerKind::Relu;
    Layer flatten;
    flatten.kind = LayerKind::Flatten;

    Layer fc;
    fc.kind = LayerKind::Fc;
    fc.weights = QuantTensor::zeros({4 * 12 * 12, 10}, NumberFormat::int8(), 1.0 / 64.0);
    for (Word& w : fc.weights.data) w = static_cast<Word>(rng.next_below(31)) - 15;
    fc.out_format = NumberFormat::int8();
    fc.out_scale = 0.2;

    Layer softmax;
    softmax.kind = LayerKind::Softmax;

    model.layers = {conv, relu, flatten, fc, softmax};
    model.validate();
    return model;
}

QuantTensor bench_input() {
    SplitMix64 rng = SplitMix64::substream(0xBE7C, 1);
    std::vector<double> values(12 * 12);
    for (double& v : values) v = rng.next_double();
    return quantize(values, {1, 12, 12}, NumberFormat::int8(), 1.0 / 127.0);
}

void BM_SimulateMatmul(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const SystolicConfig cfg = os_config(n);
    SplitMix64 rng = SplitMix64::substream(0xBE7C, 2);
    const QuantTensor a = random_matrix(rng, n, n);
    const QuantTensor b = random_matrix(rng, n, n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_matmul(a, b, cfg, {}));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * n * n);
}
BENCHMARK(BM_SimulateMatmul)->Arg(4)->Arg(8)->Arg(16);

void BM_SimulateMatmulFaulty(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const SystolicConfig cfg = os_config(n);
    SplitMix64 rng = SplitMix64::substream(0xBE7C, 3);
    const QuantTensor a = random_matrix(rng, n, n);
    const QuantTensor b = random_matrix(rng, n, n);
    const Fault fault{Line::A, {0, 0}, CycleWindow::permanent(), FaultKind::Stuck1, 3};
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_matmul(a, b, cfg, {&fault, 1}));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * n * n);
}
BENCHMARK(BM_SimulateMatmulFaulty)->Arg(8);

void BM_TiledMatmul(benchmark::State& state) {
    const SystolicConfig cfg = os_config(8);
    SplitMix64 rng = SplitMix64::substream(0xBE7C, 4);
    const QuantTensor a = random_matrix(rng, 64, 64);
    const QuantTensor b = random_matrix(rng, 64, 64);
    for (auto _ : state) {
        benchmark::DoNotOptimize(tiled_matmul(a, b, cfg, {}));
    }
    state.SetItemsProcessed(state.iterations() * 64 * 64 * 64);
}
BENCHMARK(BM_TiledMatmul);

void BM_ExpandFault(benchmark::State& state) {
    const SystolicConfig cfg = os_config(16);
    const Fault fault{Line::A, {3, 2}, CycleWindow::permanent(), FaultKind::Flip, 5};
    for (auto _ : state) {
        benchmark::DoNotOptimize(expand_fault(fault, cfg, cfg.domain()));
    }
}
BENCHMARK(BM_ExpandFault);

void BM_InferReference(benchmark::State& state) {
    const NetworkModel model = tiny_model();
    const QuantTensor input = bench_input();
    for (auto _ : state) {
        benchmark::DoNotOptimize(infer_reference(model, input));
    }
}
BENCHMARK(BM_InferReference);

void BM_InferHierarchical(benchmark::State& state) {
    const NetworkModel model = tiny_model();
    const QuantTensor input = bench_input();
    ExecutionPlan plan;
    plan.target_layer = 3; // the fc layer
    plan.config = os_config(8);
    plan.faults = {{Line::C, {0, 0}, CycleWindow::permanent(), FaultKind::Stuck1, 30}};
    for (auto _ : state) {
        benchmark::DoNotOptimize(infer_hierarchical(model, input, plan));
    }
}
BENCHMARK(BM_InferHierarchical);

void BM_Campaign(benchmark::State& state) {
    const NetworkModel model = tiny_model();
    const std::vector<QuantTensor> inputs = {bench_input()};
    ExecutionPlan plan;
    plan.target_layer = 3;
    plan.config = os_config(8);
    FaultListSpec spec;
    spec.seed = 5;
    spec.count = 8;
    const auto faults = generate_fault_list(spec, plan.config);
    CampaignOptions options;
    options.workers = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_campaign(model, inputs, plan, faults, options));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(faults.size()));
}
BENCHMARK(BM_Campaign);

} // namespace

BENCHMARK_MAIN();
