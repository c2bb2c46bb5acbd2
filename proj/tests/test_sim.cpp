#include <doctest.h>

#include <chrono>
#include <sstream>

#include "helpers.hpp"
#include "hwt/sim.hpp"

using namespace hwt;

TEST_CASE("evaluate basics") {
    Netlist n = parse_bench_string("INPUT(a)\nINPUT(b)\nOUTPUT(y)\ny = AND(a, b)");
    CHECK(evaluate(n, Pattern::from_string("11")).outputs == std::vector<std::uint8_t>{1});
    CHECK(evaluate(n, Pattern::from_string("10")).outputs == std::vector<std::uint8_t>{0});
    CHECK_THROWS_AS(evaluate(n, Pattern::from_string("1")), Error);
}

TEST_CASE("evaluate 4x4 multiplier: 7*9 = 63") {
    Netlist m = gen_benchmark(BenchmarkKind::Multiplier, 4, 1);
    Pattern p = Pattern::from_uint(7 | (9 << 4), 8);
    auto out = evaluate(m, p).outputs;
    std::uint32_t got = 0;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i]) got |= 1u << i;
    CHECK(got == 63);
}

TEST_CASE("internals restricted to outputs equal the outputs field") {
    Netlist n = testing::random_netlist(5, 20, 17);
    auto r = evaluate(n, Pattern::from_uint(19, 5));
    for (std::size_t i = 0; i < n.outputs.size(); ++i) CHECK(r.internals.at(n.outputs[i]) == r.outputs[i]);
}

TEST_CASE("packed equals scalar on every 2-input gate kind") {
    for (GateKind kind : {GateKind::And, GateKind::Nand, GateKind::Or, GateKind::Nor, GateKind::Xor,
                          GateKind::Xnor}) {
        Netlist n;
        n.inputs = {"a", "b"};
        n.outputs = {"y"};
        n.gates = {{"y", kind, {"a", "b"}}};
        n.validate();
        auto pats = testing::all_patterns(2);
        PackedBlock blk = evaluate_packed(n, pats);
        for (std::size_t j = 0; j < pats.size(); ++j)
            CHECK(blk.bit("y", j) == (evaluate(n, pats[j]).outputs[0] != 0));
    }
}

TEST_CASE("n-ary fold matches chained binary gates") {
    for (GateKind kind : {GateKind::And, GateKind::Nand, GateKind::Or, GateKind::Nor, GateKind::Xor,
                          GateKind::Xnor}) {
        Netlist wide;
        wide.inputs = {"a", "b", "c", "d"};
        wide.outputs = {"y"};
        wide.gates = {{"y", kind, {"a", "b", "c", "d"}}};
        wide.validate();
        Netlist chain;
        chain.inputs = {"a", "b", "c", "d"};
        chain.outputs = {"y"};
        chain.gates = {{"t0", kind, {"a", "b"}}, {"t1", kind, {"t0", "c"}}, {"y", kind, {"t1", "d"}}};
        chain.validate();
        for (const auto& p : testing::all_patterns(4))
            CHECK(evaluate(wide, p).outputs == evaluate(chain, p).outputs);
    }
}

TEST_CASE("packed equals scalar on 1000 random multiplier patterns") {
    Netlist m = gen_benchmark(BenchmarkKind::Multiplier, 4, 1);
    auto pats = random_patterns(1000, 8, 77);
    Evaluator ev(m);
    std::vector<std::uint64_t> words;
    std::vector<std::uint8_t> values;
    for (std::size_t at = 0; at < pats.size(); at += 64) {
        const std::size_t lanes = std::min<std::size_t>(64, pats.size() - at);
        ev.run_packed(pats.data() + at, lanes, words);
        for (std::size_t j = 0; j < lanes; ++j) {
            ev.run(pats[at + j], values);
            for (int oi : ev.output_indices()) CHECK(((words[oi] >> j) & 1) == values[oi]);
        }
    }
}

TEST_CASE("broadcast lanes agree and inactive lanes stay zero") {
    Netlist n = parse_bench_string("INPUT(a)\nOUTPUT(y)\ny = NOT(a)");
    std::vector<Pattern> pats(5, Pattern::from_string("0"));
    PackedBlock blk = evaluate_packed(n, pats);
    CHECK(blk.lane_count == 5);
    CHECK((blk.word("y") & 0x1F) == 0x1F);   // active lanes: NOT(0) = 1
    CHECK((blk.word("y") & ~0x1Full) == 0);  // inactive lanes masked off
}

TEST_CASE("random_patterns determinism and edge cases") {
    CHECK(random_patterns(0, 8, 1).empty());
    CHECK(random_patterns(50, 16, 9) == random_patterns(50, 16, 9));
    CHECK(random_patterns(50, 16, 9) != random_patterns(50, 16, 10));
    // stateless addressing agrees with the list form
    auto list = random_patterns(100, 70, 5);
    for (std::size_t i : {std::size_t{0}, std::size_t{13}, std::size_t{99}})
        CHECK(list[i] == random_pattern_at(i, 70, 5));
}

TEST_CASE("random_patterns per-bit frequency within binomial bounds") {
    const std::size_t count = 100000, width = 16;
    auto pats = random_patterns(count, width, 2024);
    std::vector<std::size_t> ones(width, 0);
    for (const auto& p : pats)
        for (std::size_t i = 0; i < width; ++i) ones[i] += p.bits[i];
    for (std::size_t i = 0; i < width; ++i) {
        const double f = static_cast<double>(ones[i]) / count;
        CHECK(f >= 0.49);
        CHECK(f <= 0.51);
    }
}

TEST_CASE("pattern file round trip with comments") {
    std::stringstream ss;
    ss << "# test vectors\n0101\n1111\n\n# tail\n0000\n";
    auto pats = read_patterns(ss);
    REQUIRE(pats.size() == 3);
    CHECK(pats[0] == Pattern::from_string("0101"));
    std::stringstream out;
    write_patterns(out, pats);
    auto again = read_patterns(out);
    CHECK(again == pats);
}

TEST_CASE("packed throughput sanity") {
    // ~10^7 gate-evaluations per second is the floor; packed should be
    // orders beyond it. 64 lanes x 200 blocks x ~1.5k gates in well under a second.
    Netlist m = gen_benchmark(BenchmarkKind::Multiplier, 16, 1);
    Evaluator ev(m);
    auto pats = random_patterns(64, 32, 4);
    std::vector<std::uint64_t> words;
    const auto t0 = std::chrono::steady_clock::now();
    for (int rep = 0; rep < 200; ++rep) ev.run_packed(pats.data(), 64, words);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double gate_evals = 200.0 * 64 * static_cast<double>(m.gates.size());
    CHECK(gate_evals / dt > 1e7);
}
