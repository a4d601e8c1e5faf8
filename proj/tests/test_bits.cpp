#include <doctest.h>

#include "skl/bits.hpp"

using namespace skl;

TEST_CASE("bit string basics") {
    Bits b = Bits::from_string("0101");
    CHECK(b.size() == 4);
    CHECK(!b.get(0));
    CHECK(b.get(1));
    CHECK(b.to_string() == "0101");
    CHECK(b.to_u64() == 5);
    CHECK(Bits::from_u64(5, 4) == b);
    CHECK(Bits::from_hex(b.to_hex(), 4) == b);
}

TEST_CASE("slice splice concat erase") {
    Bits b = Bits::from_string("110100101");
    CHECK(b.slice(2, 4).to_string() == "0100");
    Bits c = b;
    c.splice(2, Bits::from_string("1111"));
    CHECK(c.to_string() == "111111101");
    CHECK(b.concat(Bits::from_string("01")).to_string() == "11010010101");
    CHECK(b.erase(2, 4).to_string() == "11101");

    // across word boundaries
    RngStream rng(7);
    Bits big = rng.bits(301);
    for (uint32_t pos : {0u, 63u, 64u, 120u}) {
        Bits s = big.slice(pos, 130);
        for (uint32_t i = 0; i < 130; i++) CHECK(s.get(i) == big.get(pos + i));
    }
}

TEST_CASE("xor and dot") {
    Bits a = Bits::from_string("1100");
    Bits b = Bits::from_string("1010");
    CHECK((a ^ b).to_string() == "0110");
    CHECK(a.dot(b) == true);   // overlap 1 position
    CHECK(a.dot(a) == false);  // two ones
    CHECK(a.popcount() == 2);
}

TEST_CASE("ordering is lexicographic") {
    CHECK(Bits::from_string("0011") < Bits::from_string("0100"));
    CHECK(Bits::from_string("10") < Bits::from_string("11"));
    RngStream rng(3);
    for (int i = 0; i < 200; i++) {
        Bits a = rng.bits(90), b = rng.bits(90);
        CHECK((a < b) == (a.to_string() < b.to_string()));
    }
}

TEST_CASE("rng streams are deterministic and independent") {
    RngStream a(42), b(42);
    for (int i = 0; i < 100; i++) CHECK(a.next_u64() == b.next_u64());
    RngStream c = a.child(1), d = a.child(2);
    CHECK(c.next_u64() != d.next_u64());
}

TEST_CASE("fixed weight sampling") {
    RngStream rng(5);
    for (int i = 0; i < 50; i++) {
        Bits t = rng.fixed_weight(24, 8);
        CHECK(t.size() == 24);
        CHECK(t.popcount() == 8);
    }
}

TEST_CASE("gf2 basis and coset sampling") {
    RngStream rng(11);
    const uint32_t w = 40;
    Gf2Basis basis(w);
    std::vector<Bits> gens;
    for (int i = 0; i < 6; i++) {
        Bits v = rng.bits(w);
        gens.push_back(v);
        basis.add(v);
    }
    // coordinates reconstruct members of the span
    for (const Bits& g : gens) {
        auto c = basis.coordinates(g);
        REQUIRE(c.has_value());
        Bits recon(w);
        for (uint32_t i = 0; i < basis.rank(); i++) {
            if (c->get(i)) recon ^= basis.rows()[i];
        }
        CHECK(recon == g);
    }
    // sampled solutions satisfy all parity constraints
    for (int t = 0; t < 100; t++) {
        Bits eps = rng.bits(basis.rank());
        Bits d = basis.sample_solution(eps, rng);
        for (uint32_t i = 0; i < basis.rank(); i++) CHECK(d.dot(basis.rows()[i]) == eps.get(i));
    }
}
