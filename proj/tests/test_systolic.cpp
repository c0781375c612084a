#include <sstream>

#include <doctest.h>

#include "support/oracles.hpp"
#include "sysfi/errors.hpp"
#include "sysfi/rng.hpp"
#include "sysfi/systolic.hpp"

using namespace sysfi;

namespace {

SystolicConfig os_config(int n1, int n2, int n3, NumberFormat op = NumberFormat::int8(),
                         NumberFormat acc = NumberFormat::int32()) {
    SystolicConfig cfg;
    cfg.n1 = n1;
    cfg.n2 = n2;
    cfg.n3 = n3;
    cfg.projection = Projection::output_stationary();
    cfg.op_format = op;
    cfg.acc_format = acc;
    return cfg;
}

QuantTensor random_matrix(SplitMix64& rng, std::size_t rows, std::size_t cols,
                          const NumberFormat& fmt) {
    QuantTensor t = QuantTensor::zeros({rows, cols}, fmt);
    const std::uint64_t span = (std::uint64_t{1} << fmt.width);
    for (Word& w : t.data) w = wrap_to_width(static_cast<std::int64_t>(rng.next_below(span)), fmt.width);
    return t;
}

QuantTensor matrix_of(std::vector<Word> words, std::size_t rows, std::size_t cols,
                      const NumberFormat& fmt = NumberFormat::int8()) {
    QuantTensor t = QuantTensor::zeros({rows, cols}, fmt);
    t.data = std::move(words);
    return t;
}

} // namespace

TEST_CASE("fault-free simulation matches the 2x2 worked example") {
    const SystolicConfig cfg = os_config(2, 2, 2);
    const QuantTensor a = matrix_of({1, 2, 3, 4}, 2, 2);
    const QuantTensor b = matrix_of({5, 6, 7, 8}, 2, 2);
    const QuantTensor c = simulate_matmul(a, b, cfg, {});
    const auto expected = test::naive_matmul(a.data, b.data, 2, 2, 2, 32);
    CHECK(c.data == expected);
    CHECK(c.data == std::vector<Word>{19, 22, 43, 50});
}

TEST_CASE("identity times B returns B") {
    const SystolicConfig cfg = os_config(3, 3, 3);
    QuantTensor eye = QuantTensor::zeros({3, 3}, NumberFormat::int8());
    for (std::size_t n = 0; n < 3; ++n) eye.at2(n, n) = 1;
    SplitMix64 rng = SplitMix64::substream(21, 0);
    const QuantTensor b = random_matrix(rng, 3, 3, NumberFormat::int8());
    const QuantTensor c = simulate_matmul(eye, b, cfg, {});
    CHECK(c.data == b.data);
}

TEST_CASE("randomized fault-free simulations match the naive oracle") {
    SplitMix64 rng = SplitMix64::substream(22, 0);
    for (int trial = 0; trial < 60; ++trial) {
        const int n1 = 1 + static_cast<int>(rng.next_below(8));
        const int n2 = 1 + static_cast<int>(rng.next_below(8));
        const int n3 = 1 + static_cast<int>(rng.next_below(8));
        const NumberFormat op = (trial % 2 == 0) ? NumberFormat::int8() : NumberFormat::int16();
        const SystolicConfig cfg = os_config(n1, n2, n3, op);
        const QuantTensor a = random_matrix(rng, n1, n3, op);
        const QuantTensor b = random_matrix(rng, n3, n2, op);
        const QuantTensor c = simulate_matmul(a, b, cfg, {});
        CHECK(c.data == test::naive_matmul(a.data, b.data, n1, n3, n2, 32));
    }
}

TEST_CASE("float32 fault-free simulation matches a direct float loop") {
    SplitMix64 rng = SplitMix64::substream(23, 0);
    const SystolicConfig cfg = os_config(3, 4, 5, NumberFormat::float32(), NumberFormat::float32());
    QuantTensor a = QuantTensor::zeros({3, 5}, NumberFormat::float32());
    QuantTensor b = QuantTensor::zeros({5, 4}, NumberFormat::float32());
    for (Word& w : a.data) w = float_to_word(static_cast<float>(rng.next_double() * 2 - 1));
    for (Word& w : b.data) w = float_to_word(static_cast<float>(rng.next_double() * 2 - 1));
    const QuantTensor c = simulate_matmul(a, b, cfg, {});
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t col = 0; col < 4; ++col) {
            float acc = 0.0f;
            for (std::size_t k = 0; k < 5; ++k) {
                acc += word_to_float(a.at2(r, k)) * word_to_float(b.at2(k, col));
            }
            CHECK(word_to_float(c.at2(r, col)) == acc); // same order, same rounding
        }
    }
}

TEST_CASE("permanent stuck-1 on the stationary accumulator forces the LSB") {
    const SystolicConfig cfg = os_config(3, 3, 3);
    const QuantTensor a = QuantTensor::zeros({3, 3}, NumberFormat::int8());
    const QuantTensor b = QuantTensor::zeros({3, 3}, NumberFormat::int8());
    const Fault fault{Line::C, {0, 0}, CycleWindow::permanent(), FaultKind::Stuck1, 0};
    const QuantTensor c = simulate_matmul(a, b, cfg, {&fault, 1});
    // h is applied to the zero accumulator on every read; the products stay
    // zero, so the final word is exactly the forced LSB.
    CHECK(c.at2(0, 0) == 1);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t col = 0; col < 3; ++col)
            if (r != 0 || col != 0) CHECK(c.at2(r, col) == 0);
}

TEST_CASE("fault with an empty expansion leaves the output untouched") {
    SplitMix64 rng = SplitMix64::substream(24, 0);
    const SystolicConfig cfg = os_config(4, 4, 4);
    const QuantTensor a = random_matrix(rng, 4, 4, NumberFormat::int8());
    const QuantTensor b = random_matrix(rng, 4, 4, NumberFormat::int8());
    // Window entirely after the last wavefront.
    const Fault fault{Line::B, {2, 2}, CycleWindow::range(cycle_count(cfg), cycle_count(cfg) + 5),
                      FaultKind::Stuck1, 3};
    CHECK(expand_fault(fault, cfg, cfg.domain()).empty());
    const QuantTensor faulty = simulate_matmul(a, b, cfg, {&fault, 1});
    const QuantTensor clean = simulate_matmul(a, b, cfg, {});
    CHECK(faulty.data == clean.data);
}

TEST_CASE("A-line faults only reach row x, columns >= y") {
    SplitMix64 rng = SplitMix64::substream(25, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const SystolicConfig cfg = os_config(4, 4, 4);
        const QuantTensor a = random_matrix(rng, 4, 4, NumberFormat::int8());
        const QuantTensor b = random_matrix(rng, 4, 4, NumberFormat::int8());
        const int x = static_cast<int>(rng.next_below(4));
        const int y = static_cast<int>(rng.next_below(4));
        const Fault fault{Line::A, {x, y}, CycleWindow::permanent(), FaultKind::Flip,
                          static_cast<int>(rng.next_below(8))};
        const QuantTensor faulty = simulate_matmul(a, b, cfg, {&fault, 1});
        const QuantTensor clean = simulate_matmul(a, b, cfg, {});
        for (std::size_t r = 0; r < 4; ++r) {
            for (std::size_t col = 0; col < 4; ++col) {
                if (faulty.at2(r, col) != clean.at2(r, col)) {
                    CHECK(r == static_cast<std::size_t>(x));
                    CHECK(col >= static_cast<std::size_t>(y));
                }
            }
        }
    }
}

TEST_CASE("single flip on the final accumulation changes one word by 2^bit") {
    SplitMix64 rng = SplitMix64::substream(26, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const SystolicConfig cfg = os_config(4, 4, 4);
        const QuantTensor a = random_matrix(rng, 4, 4, NumberFormat::int8());
        const QuantTensor b = random_matrix(rng, 4, 4, NumberFormat::int8());
        const int x = static_cast<int>(rng.next_below(4));
        const int y = static_cast<int>(rng.next_below(4));
        const int bit = static_cast<int>(rng.next_below(32));
        // Final accumulation of PE (x,y) happens at the local cycle of
        // (x+1, y+1, n3): the read of c(.,.,n3-1) plus the last product.
        const Cycle t = cfg.local_cycle({x + 1, y + 1, 4});
        const Fault fault{Line::C, {x, y}, CycleWindow::single(t), FaultKind::Flip, bit};
        const QuantTensor faulty = simulate_matmul(a, b, cfg, {&fault, 1});
        const QuantTensor clean = simulate_matmul(a, b, cfg, {});
        for (std::size_t r = 0; r < 4; ++r) {
            for (std::size_t col = 0; col < 4; ++col) {
                if (r == static_cast<std::size_t>(x) && col == static_cast<std::size_t>(y)) {
                    // Arithmetic difference of exactly +-2^bit modulo 2^32.
                    const Word diff = wrap_to_width(faulty.at2(r, col) - clean.at2(r, col), 32);
                    const Word step = wrap_to_width(Word{1} << bit, 32);
                    const bool matches = diff == step || diff == wrap_to_width(-step, 32);
                    CHECK(matches);
                } else {
                    CHECK(faulty.at2(r, col) == clean.at2(r, col));
                }
            }
        }
    }
}

TEST_CASE("identical inputs produce identical outputs") {
    SplitMix64 rng = SplitMix64::substream(27, 0);
    const SystolicConfig cfg = os_config(5, 3, 6);
    const QuantTensor a = random_matrix(rng, 5, 6, NumberFormat::int8());
    const QuantTensor b = random_matrix(rng, 6, 3, NumberFormat::int8());
    const Fault fault{Line::B, {1, 2}, CycleWindow::permanent(), FaultKind::Stuck0, 4};
    const QuantTensor first = simulate_matmul(a, b, cfg, {&fault, 1});
    const QuantTensor second = simulate_matmul(a, b, cfg, {&fault, 1});
    CHECK(first.data == second.data);
}

TEST_CASE("pe_grid bounds the projected domain") {
    CHECK(pe_grid(os_config(4, 4, 8)) == PEGrid{4, 4});
    CHECK(pe_grid(os_config(1, 1, 1)) == PEGrid{1, 1});

    SystolicConfig cfg = os_config(2, 3, 4);
    cfg.projection.p = {{{1, 0, 0}, {0, 0, 1}}};
    CHECK(pe_grid(cfg) == PEGrid{2, 4});
}

TEST_CASE("cycle_count matches wavefront enumeration") {
    auto enumerated = [](const SystolicConfig& cfg) {
        Cycle lo = 0, hi = 0;
        bool first = true;
        for (int i = 1; i <= cfg.n1; ++i)
            for (int j = 1; j <= cfg.n2; ++j)
                for (int k = 1; k <= cfg.n3; ++k) {
                    const Cycle t = project_time(cfg.projection, {i, j, k});
                    if (first || t < lo) lo = t;
                    if (first || t > hi) hi = t;
                    first = false;
                }
        return hi - lo + 1;
    };

    CHECK(cycle_count(os_config(2, 2, 2)) == 4);
    CHECK(cycle_count(os_config(2, 2, 2)) == enumerated(os_config(2, 2, 2)));
    CHECK(cycle_count(os_config(1, 1, 1)) == 1);
    for (int n = 1; n <= 6; ++n) {
        CHECK(cycle_count(os_config(n, n, n)) == 3 * n - 2);
        CHECK(cycle_count(os_config(n, n, n)) == enumerated(os_config(n, n, n)));
    }

    SystolicConfig slow = os_config(3, 3, 3);
    slow.projection.pi = {1, 2, 1};
    CHECK(cycle_count(slow) == enumerated(slow));
}

TEST_CASE("simulate_matmul validates shapes and faults") {
    const SystolicConfig cfg = os_config(2, 2, 2);
    const QuantTensor ok = QuantTensor::zeros({2, 2}, NumberFormat::int8());
    const QuantTensor bad = QuantTensor::zeros({3, 2}, NumberFormat::int8());
    CHECK_THROWS_AS(simulate_matmul(bad, ok, cfg, {}), ValidationError);

    const Fault bad_bit{Line::A, {0, 0}, CycleWindow::permanent(), FaultKind::Flip, 9};
    CHECK_THROWS_AS(simulate_matmul(ok, ok, cfg, {&bad_bit, 1}), ValidationError);
    const Fault bad_pe{Line::A, {4, 0}, CycleWindow::permanent(), FaultKind::Flip, 0};
    CHECK_THROWS_AS(simulate_matmul(ok, ok, cfg, {&bad_pe, 1}), ValidationError);
}

TEST_CASE("trace covers every evaluation in wavefront order") {
    SplitMix64 rng = SplitMix64::substream(28, 0);
    const SystolicConfig cfg = os_config(3, 2, 2);
    const QuantTensor a = random_matrix(rng, 3, 2, NumberFormat::int8());
    const QuantTensor b = random_matrix(rng, 2, 2, NumberFormat::int8());
    SimTrace trace;
    simulate_matmul(a, b, cfg, {}, 100, &trace);
    CHECK(trace.entries.size() == 12);
    for (std::size_t n = 1; n < trace.entries.size(); ++n) {
        CHECK(trace.entries[n].cycle >= trace.entries[n - 1].cycle);
    }
    CHECK(trace.entries.front().cycle == 100); // offset honored

    std::ostringstream csv;
    trace.write_csv(csv);
    CHECK(csv.str().rfind("cycle,x,y,a,b,c\n", 0) == 0);
}
