#include <cmath>
#include <numeric>

#include <doctest.h>

#include "support/fixtures.hpp"
#include "sysfi/errors.hpp"
#include "sysfi/inference.hpp"
#include "sysfi/metrics.hpp"

using namespace sysfi;

namespace {

SystolicConfig lenet_array(int n = 4) {
    SystolicConfig cfg;
    cfg.n1 = n;
    cfg.n2 = n;
    cfg.n3 = n;
    cfg.op_format = NumberFormat::int8();
    cfg.acc_format = NumberFormat::int32();
    return cfg;
}

std::vector<std::size_t> matmul_layer_indices(const NetworkModel& model) {
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < model.layers.size(); ++n) {
        if (model.layers[n].is_matmul_layer()) out.push_back(n);
    }
    return out;
}

} // namespace

TEST_CASE("softmax output is a probability vector, uniform on equal logits") {
    test::TempDir dir("sysfi-softmax");
    const auto manifest = test::build_mlp_fixture(dir.path());
    NetworkModel model = load_model(manifest);

    const double equal[] = {3.0, 3.0, 0.0, 0.0};
    const QuantTensor input = quantize(equal, {4}, NumberFormat::int8(), 1.0);
    const std::vector<double> probs = infer_reference(model, input);
    REQUIRE(probs.size() == 2);
    CHECK(probs[0] == doctest::Approx(0.5));
    CHECK(probs[1] == doctest::Approx(0.5));
    CHECK(std::accumulate(probs.begin(), probs.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("relu zeroes negative activations") {
    test::TempDir dir("sysfi-lenet-relu");
    const auto manifest = test::build_lenet_fixture(dir.path());
    NetworkModel model = load_model(manifest);

    std::vector<double> zeros(28 * 28, 0.0);
    const QuantTensor input = quantize_model_input(model, zeros);
    std::vector<QuantTensor> acts;
    infer_reference(model, input, &acts);
    // acts[1] is the output of the first relu.
    for (Word w : acts.at(1).data) CHECK(w >= 0);
}

TEST_CASE("probability vectors sum to one on the LeNet fixture") {
    test::TempDir dir("sysfi-lenet-prob");
    const auto manifest = test::build_lenet_fixture(dir.path());
    NetworkModel model = load_model(manifest);
    const auto idx = test::write_idx_inputs(dir.path(), 4);
    const auto inputs = test::load_fixture_inputs(model, idx, 4);
    for (const QuantTensor& input : inputs) {
        const std::vector<double> probs = infer_reference(model, input);
        REQUIRE(probs.size() == 10);
        double sum = 0.0;
        for (double p : probs) {
            CHECK(p >= 0.0);
            sum += p;
        }
        CHECK(std::abs(sum - 1.0) < 1e-6);
    }
}

TEST_CASE("hierarchical execution with no faults equals the reference bit-exactly") {
    test::TempDir dir("sysfi-golden");
    const auto manifest = test::build_lenet_fixture(dir.path());
    NetworkModel model = load_model(manifest);
    const auto idx = test::write_idx_inputs(dir.path(), 3);
    const auto inputs = test::load_fixture_inputs(model, idx, 3);

    for (std::size_t target : matmul_layer_indices(model)) {
        ExecutionPlan plan;
        plan.target_layer = target;
        plan.config = lenet_array();
        for (const QuantTensor& input : inputs) {
            const auto reference = infer_reference(model, input);
            const auto hierarchical = infer_hierarchical(model, input, plan);
            CHECK(reference == hierarchical); // exact double equality
        }
    }
}

TEST_CASE("golden equivalence also holds with weights on line A") {
    test::TempDir dir("sysfi-golden-swap");
    const auto manifest = test::build_lenet_fixture(dir.path());
    NetworkModel model = load_model(manifest);
    const auto idx = test::write_idx_inputs(dir.path(), 2);
    const auto inputs = test::load_fixture_inputs(model, idx, 2);

    ExecutionPlan plan;
    plan.target_layer = matmul_layer_indices(model).front();
    plan.config = lenet_array();
    plan.weights_on_a = true;
    for (const QuantTensor& input : inputs) {
        CHECK(infer_reference(model, input) == infer_hierarchical(model, input, plan));
    }
}

TEST_CASE("facts about plan validation") {
    test::TempDir dir("sysfi-plan");
    const auto manifest = test::build_lenet_fixture(dir.path());
    NetworkModel model = load_model(manifest);

    ExecutionPlan plan;
    plan.config = lenet_array();
    plan.target_layer = 1; // relu
    CHECK_THROWS_AS(plan.validate(model), ValidationError);
    plan.target_layer = 99;
    CHECK_THROWS_AS(plan.validate(model), ValidationError);

    plan.target_layer = 0;
    plan.config.acc_format = NumberFormat::int16(); // fixture accumulates in int32
    CHECK_THROWS_AS(plan.validate(model), ValidationError);

    plan.config = lenet_array();
    CHECK_NOTHROW(plan.validate(model));
}

TEST_CASE("faults in a layer leave upstream activations bit-identical") {
    test::TempDir dir("sysfi-locality");
    const auto manifest = test::build_lenet_fixture(dir.path());
    NetworkModel model = load_model(manifest);
    const auto idx = test::write_idx_inputs(dir.path(), 1);
    const auto inputs = test::load_fixture_inputs(model, idx, 1);

    const auto targets = matmul_layer_indices(model);
    const std::size_t target = targets.at(2); // fc1
    ExecutionPlan plan;
    plan.target_layer = target;
    plan.config = lenet_array();
    plan.faults = {{Line::C, {0, 0}, CycleWindow::permanent(), FaultKind::Stuck1, 30}};

    std::vector<QuantTensor> clean_acts, faulty_acts;
    infer_reference(model, inputs[0], &clean_acts);
    infer_hierarchical(model, inputs[0], plan, &faulty_acts);
    REQUIRE(clean_acts.size() == faulty_acts.size());
    for (std::size_t n = 0; n < target; ++n) {
        CHECK(clean_acts[n].data == faulty_acts[n].data);
    }
}

TEST_CASE("stuck sign bit on a busy accumulator flips the classification") {
    test::TempDir dir("sysfi-signbit");
    const auto manifest = test::build_lenet_fixture(dir.path());
    NetworkModel model = load_model(manifest);
    const auto idx = test::write_idx_inputs(dir.path(), 4);
    const auto inputs = test::load_fixture_inputs(model, idx, 4);

    const std::size_t final_fc = matmul_layer_indices(model).back();
    ExecutionPlan plan;
    plan.target_layer = final_fc;
    plan.config = lenet_array();

    bool any_flip = false;
    for (const QuantTensor& input : inputs) {
        const auto golden = infer_reference(model, input);
        // Hit the PE that owns the golden top class column in its tile.
        const int column = static_cast<int>(argmax_index(golden)) % plan.config.n2;
        plan.faults = {{Line::C, {0, column}, CycleWindow::permanent(), FaultKind::Stuck1,
                        plan.config.acc_format.width - 1}};
        const auto faulty = infer_hierarchical(model, input, plan);
        if (faulty != golden) any_flip = true;
        if (argmax_index(faulty) != argmax_index(golden)) break;
    }
    CHECK(any_flip);

    // The targeted fault drives the golden class to the accumulator minimum,
    // so at least the first input must change its argmax.
    const auto golden = infer_reference(model, inputs[0]);
    const int column = static_cast<int>(argmax_index(golden)) % plan.config.n2;
    plan.faults = {{Line::C, {0, column}, CycleWindow::permanent(), FaultKind::Stuck1,
                    plan.config.acc_format.width - 1}};
    const auto faulty = infer_hierarchical(model, inputs[0], plan);
    CHECK(argmax_index(faulty) != argmax_index(golden));
}

TEST_CASE("target_layer_cycles counts tile passes") {
    test::TempDir dir("sysfi-cycles");
    const auto manifest = test::build_lenet_fixture(dir.path());
    NetworkModel model = load_model(manifest);

    ExecutionPlan plan;
    plan.target_layer = matmul_layer_indices(model).back(); // fc3: 84 -> 10
    plan.config = lenet_array(4);
    // M=1, K=84, N=10 on 4x4x4 tiles: 1 * 21 * 3 passes, 10 cycles each.
    CHECK(target_layer_cycles(model, plan) == 1 * 21 * 3 * 10);

    ExecutionPlan none;
    none.config = lenet_array(4);
    CHECK(target_layer_cycles(model, none) == 0);
}

TEST_CASE("shape and format mismatches are rejected") {
    test::TempDir dir("sysfi-inputcheck");
    const auto manifest = test::build_mlp_fixture(dir.path());
    NetworkModel model = load_model(manifest);

    const double three[] = {1.0, 2.0, 3.0};
    const QuantTensor bad_shape = quantize(three, {3}, NumberFormat::int8(), 1.0);
    CHECK_THROWS_AS(infer_reference(model, bad_shape), ValidationError);

    const double four[] = {1.0, 2.0, 3.0, 4.0};
    const QuantTensor bad_format = quantize(four, {4}, NumberFormat::int16(), 1.0);
    CHECK_THROWS_AS(infer_reference(model, bad_format), ValidationError);
}
