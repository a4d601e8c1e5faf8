#include <doctest.h>

#include <set>

#include <nlohmann/json.hpp>

#include "skl/prims.hpp"
#include "test_util.hpp"

using namespace skl;
using namespace skl::qreg;
using testutil::dense_computational_dist;
using testutil::dense_hadamard_dist;
using testutil::tv_distance;

TEST_CASE("basis states") {
    RegisterLayout one{{"A", 1}};
    SparseState st = basis_state(one, Bits::from_string("0"));
    CHECK(st.term_count() == 1);
    CHECK(st.terms.at(Bits::from_string("0")) == cplx(1, 0));
    CHECK(st.norm2() == doctest::Approx(1.0));

    RegisterLayout three{{"A", 2}, {"B", 1}};
    SparseState st3 = basis_state(three, Bits::from_string("101"));
    CHECK(st3.terms.count(Bits::from_string("101")) == 1);
    CHECK_THROWS_AS(basis_state(three, Bits::from_string("10")), std::invalid_argument);
}

TEST_CASE("bb84 preparation") {
    // computational position
    SparseState a = prepare_bb84(Bits::from_string("0"), Bits::from_string("0"));
    CHECK(a.term_count() == 1);
    CHECK(a.terms.at(Bits::from_string("0")) == cplx(1, 0));

    // |-> state: dense vector (1/sqrt2, -1/sqrt2)
    SparseState b = prepare_bb84(Bits::from_string("1"), Bits::from_string("1"));
    auto dense = dense_oracle(b);
    CHECK(dense[0].real() == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(dense[1].real() == doctest::Approx(-1 / std::sqrt(2.0)));

    // |1> (x) (|0>+|1>)/sqrt2
    SparseState c = prepare_bb84(Bits::from_string("10"), Bits::from_string("01"));
    CHECK(c.term_count() == 2);
    CHECK(c.terms.at(Bits::from_string("10")).real() == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(c.terms.at(Bits::from_string("11")).real() == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(c.norm2() == doctest::Approx(1.0));

    CHECK_THROWS_AS(prepare_bb84(Bits::from_string("10"), Bits::from_string("0")),
                    std::invalid_argument);
}

TEST_CASE("xor oracle") {
    RegisterLayout layout{{"U", 1}, {"V", 3}};
    SparseState st = basis_state(layout, Bits::from_string("1000"));
    Bits s1 = Bits::from_string("101");

    apply_xor_oracle(st, {"U"}, "V", [&](const Bits& u) { return u.get(0) ? s1 : Bits(3); });
    CHECK(st.terms.count(Bits::from_string("1101")) == 1);

    // constant-zero oracle is the identity
    SparseState copy = st;
    apply_xor_oracle(st, {"U"}, "V", [](const Bits&) { return Bits(3); });
    CHECK(states_equal(st, copy, 1e-12));

    // involution
    apply_xor_oracle(st, {"U"}, "V", [&](const Bits& u) { return u.get(0) ? s1 : Bits(3); });
    apply_xor_oracle(st, {"U"}, "V", [&](const Bits& u) { return u.get(0) ? s1 : Bits(3); });
    CHECK(st.terms.count(Bits::from_string("1101")) == 1);

    CHECK_THROWS_AS(apply_xor_oracle(st, {"V"}, "V", [](const Bits& v) { return v; }),
                    std::invalid_argument);
}

TEST_CASE("xor oracle preserves term count and amplitude multiset") {
    RngStream rng(100);
    SparseState st = prepare_bb84(rng.bits(6), Bits::from_string("110100"));
    append_segment(st, "W", 4);
    std::multiset<double> before;
    for (const auto& [k, a] : st.terms) before.insert(std::norm(a));
    size_t n_before = st.term_count();

    apply_xor_oracle(st, {"Q1", "Q3"}, "W",
                     [](const Bits& u) { return prims::hash_bits("t", {u}, 4); });
    CHECK(st.term_count() == n_before);
    std::multiset<double> after;
    for (const auto& [k, a] : st.terms) after.insert(std::norm(a));
    CHECK(before == after);
}

TEST_CASE("computational measurement basics") {
    RngStream rng(1);
    RegisterLayout one{{"A", 1}};
    SparseState st = basis_state(one, Bits::from_string("0"));
    auto [bits, basis] = measure_computational(st, "A", rng);
    CHECK(bits.to_string() == "0");
    CHECK(st.terms.count(Bits::from_string("0")) == 1);

    // uniform superposition: both outcomes near 1/2 over 10000 draws
    SparseState plus = prepare_bb84(Bits::from_string("0"), Bits::from_string("1"));
    ComputationalSampler sampler(plus, "Q1");
    std::vector<uint64_t> counts(2, 0);
    for (int i = 0; i < 10000; i++) counts[sampler.sample(rng).to_u64()]++;
    CHECK(tv_distance(testutil::empirical(counts, 10000), {0.5, 0.5}) < 0.02);
}

TEST_CASE("measurement of an agreed segment leaves the state unchanged") {
    // all terms share the same MSG value: measuring MSG must not disturb
    RngStream rng(2);
    SparseState st = prepare_bb84(Bits::from_string("0110"), Bits::from_string("1011"));
    append_segment(st, "MSG", 3);
    apply_xor_oracle(st, {"Q1"}, "MSG", [](const Bits&) { return Bits::from_string("110"); });
    SparseState before = st;
    auto out = measure_computational(st, "MSG", rng);
    CHECK(out.bits.to_string() == "110");
    CHECK(states_equal(st, before, 1e-9));
}

TEST_CASE("hadamard measurement of basis and plus states") {
    RngStream rng(3);
    // |0>: Hadamard outcome uniform
    {
        std::vector<uint64_t> counts(2, 0);
        SparseState st = basis_state(RegisterLayout{{"A", 1}}, Bits::from_string("0"));
        HadamardSampler sampler(st, "A");
        for (int i = 0; i < 10000; i++) counts[sampler.sample(rng).to_u64()]++;
        CHECK(tv_distance(testutil::empirical(counts, 10000), {0.5, 0.5}) < 0.02);
    }
    // |+>: outcome 0 with certainty
    {
        SparseState st = prepare_bb84(Bits::from_string("0"), Bits::from_string("1"));
        for (int i = 0; i < 100; i++) {
            SparseState copy = st;
            auto out = measure_hadamard(copy, "Q1", rng);
            CHECK(out.bits.to_u64() == 0);
        }
    }
    // |->: outcome 1 with certainty
    {
        SparseState st = prepare_bb84(Bits::from_string("1"), Bits::from_string("1"));
        for (int i = 0; i < 100; i++) {
            SparseState copy = st;
            CHECK(measure_hadamard(copy, "Q1", rng).bits.to_u64() == 1);
        }
    }
}

// the verification identity behind the leasing schemes: measuring
// |0,s0> + (-1)^x |1,s1> in the Hadamard basis gives c ^ d.(s0^s1) = x
TEST_CASE("two-term hadamard parity identity") {
    RngStream rng(4);
    for (int trial = 0; trial < 40; trial++) {
        uint32_t w = 2 + uint32_t(rng.below(6));  // s width up to 7 -> total <= 8
        bool x = rng.next_bit();
        Bits s0 = rng.bits(w), s1 = rng.bits(w);
        RegisterLayout layout{{"C", 1}, {"S", w}};
        SparseState st;
        st.layout = layout;
        double a = 1 / std::sqrt(2.0);
        st.terms.emplace(Bits::from_u64(0, 1).concat(s0), cplx(a, 0));
        st.terms.emplace(Bits::from_u64(1, 1).concat(s1), cplx(x ? -a : a, 0));

        // dense cross-check: every outcome with nonzero probability satisfies
        // the identity (joint measurement = sequential segment measurements)
        for (int rep = 0; rep < 25; rep++) {
            SparseState copy = st;
            bool c = measure_hadamard(copy, "C", rng).bits.get(0);
            Bits d = measure_hadamard(copy, "S", rng).bits;
            CHECK((c ^ d.dot(s0 ^ s1)) == x);
        }
        // dense side: enumerate the joint Hadamard distribution
        SparseState joined;
        joined.layout = RegisterLayout{{"ALL", 1 + w}};
        for (const auto& [k, amp] : st.terms) joined.terms.emplace(k, amp);
        auto p = dense_hadamard_dist(joined, "ALL");
        for (uint64_t cd = 0; cd < p.size(); cd++) {
            if (p[cd] < 1e-15) continue;
            bool c = (cd >> w) & 1;
            Bits d = Bits::from_u64(cd & ((uint64_t(1) << w) - 1), w);
            CHECK((c ^ d.dot(s0 ^ s1)) == x);
        }
    }
}

TEST_CASE("2-sparse generalized parity identity") {
    // |c0,z0> + (-1)^b |c1,z1> with c0 != c1:
    // outcomes satisfy c.(c0^c1) ^ d.(z0^z1) = b
    RngStream rng(5);
    int samples = 0;
    while (samples < 1000) {
        uint32_t cw = 1 + uint32_t(rng.below(3));
        uint32_t zw = 1 + uint32_t(rng.below(5));
        Bits c0 = rng.bits(cw), c1 = rng.bits(cw);
        if (c0 == c1) continue;
        Bits z0 = rng.bits(zw), z1 = rng.bits(zw);
        bool b = rng.next_bit();
        SparseState st;
        st.layout = RegisterLayout{{"C", cw}, {"Z", zw}};
        double a = 1 / std::sqrt(2.0);
        st.terms.emplace(c0.concat(z0), cplx(a, 0));
        st.terms.emplace(c1.concat(z1), cplx(b ? -a : a, 0));
        SparseState copy = st;
        Bits c = measure_hadamard(copy, "C", rng).bits;
        Bits d = measure_hadamard(copy, "Z", rng).bits;
        CHECK((c.dot(c0 ^ c1) ^ d.dot(z0 ^ z1)) == b);
        samples++;
    }
}

TEST_CASE("sparse sampling matches dense oracle distributions") {
    RngStream rng(6);
    const int kSamples = 20000;
    for (int trial = 0; trial < 6; trial++) {
        // random small state: bb84 prep + a couple of xor oracles
        Bits x = rng.bits(4), theta = rng.bits(4);
        SparseState st = prepare_bb84(x, theta);
        append_segment(st, "W", 4);
        uint32_t salt = uint32_t(rng.next_u64());
        apply_xor_oracle(st, {"Q1", "Q2"}, "W", [salt](const Bits& u) {
            return prims::hash_bits("salt" + std::to_string(salt), {u}, 4);
        });
        apply_xor_oracle(st, {"Q3", "Q4"}, "W", [salt](const Bits& u) {
            return prims::hash_bits("salt2" + std::to_string(salt), {u}, 4);
        });

        {
            auto dense = dense_computational_dist(st, "W");
            ComputationalSampler sampler(st, "W");
            std::vector<uint64_t> counts(16, 0);
            for (int i = 0; i < kSamples; i++) counts[sampler.sample(rng).to_u64()]++;
            CHECK(tv_distance(testutil::empirical(counts, kSamples), dense) < 0.02);
        }
        {
            auto dense = dense_hadamard_dist(st, "W");
            HadamardSampler sampler(st, "W");
            std::vector<uint64_t> counts(16, 0);
            for (int i = 0; i < kSamples; i++) counts[sampler.sample(rng).to_u64()]++;
            CHECK(tv_distance(testutil::empirical(counts, kSamples), dense) < 0.02);
        }
    }
}

TEST_CASE("hadamard post-state matches dense projection statistics") {
    RngStream rng(7);
    // measure one segment, then compare the other segment's computational
    // distribution against the dense prediction conditioned on the outcome
    for (int trial = 0; trial < 10; trial++) {
        Bits x = rng.bits(5), theta = rng.bits(5);
        SparseState st = prepare_bb84(x, theta);
        append_segment(st, "W", 3);
        uint32_t salt = uint32_t(rng.next_u64());
        apply_xor_oracle(st, {"Q1", "Q2", "Q3"}, "W", [salt](const Bits& u) {
            return prims::hash_bits("s" + std::to_string(salt), {u}, 3);
        });

        SparseState copy = st;
        Bits d = measure_hadamard(copy, "W", rng).bits;

        // dense reference: apply signs to W and group
        auto psi = dense_oracle(st);
        uint32_t total = st.layout.total_bits();
        uint32_t off = testutil::seg_offset(st, "W"), w = testutil::seg_width(st, "W");
        std::map<uint64_t, cplx> rest_amp;
        for (uint64_t i = 0; i < psi.size(); i++) {
            uint64_t z = testutil::index_slice(i, total, off, w);
            double sign = std::popcount(z & d.to_u64()) % 2 ? -1.0 : 1.0;
            rest_amp[testutil::index_erase(i, total, off, w)] += sign * psi[i];
        }
        double norm = 0;
        for (auto& [r, a] : rest_amp) norm += std::norm(a);
        REQUIRE(norm > 1e-12);

        auto post_dense = dense_oracle(copy);
        for (auto& [r, a] : rest_amp) {
            CHECK(std::abs(std::abs(a) / std::sqrt(norm) - std::abs(post_dense[r])) < 1e-9);
        }
    }
}

TEST_CASE("trace out") {
    RngStream rng(8);
    // unentangled discard is exact
    {
        SparseState st = prepare_bb84(Bits::from_string("01"), Bits::from_string("01"));
        SparseState expect = prepare_bb84(Bits::from_string("0"), Bits::from_string("0"));
        trace_out(st, "Q2", rng);
        CHECK(st.layout.total_bits() == 1);
        CHECK(st.terms.begin()->first.to_string() == "0");
        CHECK(st.norm2() == doctest::Approx(1.0));
        (void)expect;
    }
    // entangled: kept qubit uniform over 10000 trials, matching the dense
    // reduced density matrix diagonal
    {
        SparseState base;
        base.layout = RegisterLayout{{"A", 1}, {"B", 3}};
        double a = 1 / std::sqrt(2.0);
        base.terms.emplace(Bits::from_string("0101"), cplx(a, 0));
        base.terms.emplace(Bits::from_string("1110"), cplx(a, 0));
        std::vector<uint64_t> counts(2, 0);
        for (int i = 0; i < 10000; i++) {
            SparseState st = base;
            trace_out(st, "B", rng);
            counts[measure_computational(st, "A", rng).bits.to_u64()]++;
        }
        auto dense = dense_computational_dist(base, "A");
        CHECK(tv_distance(testutil::empirical(counts, 10000), dense) < 0.02);
    }
}

TEST_CASE("states equal") {
    SparseState a = prepare_bb84(Bits::from_string("10"), Bits::from_string("01"));
    CHECK(states_equal(a, a, 1e-9));
    SparseState minus = a;
    for (auto& [k, amp] : minus.terms) amp = -amp;
    CHECK(states_equal(a, minus, 1e-9));  // global phase ignored
    SparseState z = basis_state(a.layout, Bits::from_string("00"));
    CHECK(!states_equal(a, z, 1e-9));
    SparseState other = prepare_bb84(Bits::from_string("1"), Bits::from_string("0"));
    CHECK_THROWS_AS(states_equal(a, other, 1e-9), std::invalid_argument);
}

TEST_CASE("dense oracle examples") {
    SparseState st = basis_state(RegisterLayout{{"A", 2}}, Bits::from_string("01"));
    auto v = dense_oracle(st);
    CHECK(v[1] == cplx(1, 0));
    CHECK(v[0] == cplx(0, 0));
    double norm = 0;
    for (auto& c : v) norm += std::norm(c);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("normalization holds under random operation sequences") {
    RngStream rng(9);
    for (int trial = 0; trial < 30; trial++) {
        uint32_t n = 3 + uint32_t(rng.below(4));
        SparseState st = prepare_bb84(rng.bits(n), rng.bits(n));
        append_segment(st, "W", 1 + uint32_t(rng.below(4)));
        for (int op = 0; op < 6; op++) {
            switch (rng.below(3)) {
                case 0: {
                    uint32_t salt = uint32_t(rng.next_u64());
                    uint32_t w = st.layout.segment("W").width;
                    apply_xor_oracle(st, {"Q1"}, "W", [salt, w](const Bits& u) {
                        return prims::hash_bits(std::to_string(salt), {u}, w);
                    });
                    break;
                }
                case 1: {
                    measure_computational(st, "Q" + std::to_string(1 + rng.below(n)), rng);
                    break;
                }
                default: {
                    if (st.layout.find("W") >= 0 && st.layout.segment_count() > 1) {
                        trace_out(st, "W", rng);
                        append_segment(st, "W", 2);
                    }
                    break;
                }
            }
            CHECK(std::abs(st.norm2() - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("state json dump is sorted and loads back") {
    RngStream rng(10);
    SparseState st = prepare_bb84(rng.bits(4), Bits::from_string("1100"));
    nlohmann::json j = dump_state(st);
    CHECK(j.at("layout").size() == 4);
    std::string prev;
    for (const auto& t : j.at("terms")) {
        std::string cur = t.at("bits").get<std::string>();
        CHECK(prev < cur);
        prev = cur;
    }
    SparseState back = load_state(j);
    CHECK(states_equal(st, back, 1e-9));
}

TEST_CASE("term cap and rank limits") {
    auto saved = limits();
    limits().term_cap = 8;
    CHECK_THROWS_AS(prepare_bb84(Bits(6), Bits::from_string("111111")), std::runtime_error);
    limits() = saved;

    // rank limit on hadamard measurement
    limits().hadamard_rank_max = 2;
    RngStream rng(11);
    SparseState st = prepare_bb84(rng.bits(5), Bits::from_string("11111"));
    append_segment(st, "W", 5);
    uint32_t salt = 77;
    apply_xor_oracle(st, {"Q1", "Q2", "Q3", "Q4", "Q5"}, "W", [salt](const Bits& u) {
        return prims::hash_bits(std::to_string(salt), {u}, 5);
    });
    CHECK_THROWS_AS(measure_hadamard(st, "W", rng), std::runtime_error);
    limits() = saved;
}
