#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <densilab/shift.hpp>

using namespace densilab;

TEST_CASE("default parameters are admissible") {
    auto prm = derive_parameters();
    CHECK(prm.a == 12);
    CHECK(prm.eps == 0.05);
    CHECK_FALSE(shift_candidate_error(prm));
}

TEST_CASE("bad candidates are rejected with a reason") {
    ShiftParameters c;
    c.a = 20;
    c.eps = 0.01; // 2 eps a = 0.4 < 1 + 2 eps
    auto err = shift_candidate_error(c);
    REQUIRE(err);
    CHECK(err->find("difference-inclusion") != std::string::npos);

    c = ShiftParameters{};
    c.eps = 0.2;
    REQUIRE(shift_candidate_error(c));

    c = ShiftParameters{};
    c.a = 1;
    REQUIRE(shift_candidate_error(c));
}

TEST_CASE("spacing sequence b_p") {
    ShiftParameters prm;
    CHECK(prm.b(1) == 8);
    CHECK(prm.b(2) == 1748);
    CHECK(prm.b(3) == 98034);
    CHECK(prm.b(4) == 3052501);
    for (int p = 1; p <= 12; ++p) {
        CHECK(prm.b_real(p) >= 8.0 * p);
        if (p > 1) CHECK(prm.b_real(p) > prm.b_real(p - 1));
    }
    CHECK(prm.b_formula() == "max(8p, ceil(e^{2p} p^5))");
    CHECK_THROWS_AS(prm.b(0), std::invalid_argument);
}

TEST_CASE("partition classes") {
    CHECK(ShiftParameters::partition_class(1) == 1);
    CHECK(ShiftParameters::partition_class(2) == 2);
    CHECK(ShiftParameters::partition_class(3) == 1);
    CHECK(ShiftParameters::partition_class(4) == 3);
    CHECK(ShiftParameters::partition_class(12) == 3);
    // gaps inside A_p are exactly 2^p
    for (int p = 1; p <= 5; ++p) {
        std::uint64_t prev = 0;
        for (std::uint64_t u = 1; u <= 1024; ++u) {
            if (ShiftParameters::partition_class(u) != p) continue;
            if (prev) CHECK(u - prev == (std::uint64_t{1} << p));
            prev = u;
        }
    }
}

TEST_CASE("M(p) values") {
    CHECK(ShiftParameters::M(1) == 1.0);
    CHECK(ShiftParameters::M(2) == 2.0);
    CHECK(ShiftParameters::M(3) == 2.0);
    CHECK(ShiftParameters::M(4) == 4.0);
}

TEST_CASE("E_p membership") {
    ShiftParameters prm;
    // I_3^eps = [0.95, 1.05] * 1728 = [1641.6, 1814.4]; u=3 in A_1, b_1 = 8
    CHECK(ep_membership(prm, 1, 1648));
    CHECK_FALSE(ep_membership(prm, 1, 12));   // window too narrow around a^1
    CHECK_FALSE(ep_membership(prm, 1, 100));  // outside every window
    CHECK_FALSE(ep_membership(prm, 1, 1649)); // not a multiple of 8
    CHECK_FALSE(ep_membership(prm, 2, 1648)); // u=3 not in A_2

    auto e1 = enumerate_ep(prm, 1, 2000);
    REQUIRE_FALSE(e1.empty());
    for (std::uint64_t n : e1) {
        CHECK(n % prm.b(1) == 0);
        CHECK(ep_membership(prm, 1, n));
    }
    CHECK(e1.front() == 1648);
}

TEST_CASE("weight profile") {
    ShiftProfile profile(ShiftParameters{});
    CHECK(profile.log2_product(0) == 0.0);
    CHECK(profile.log2_product(100) == 0.0); // off every plateau and ramp
    CHECK(profile.log2_product(8) >= 1.0);   // on the b_1 plateau
    CHECK(profile.weight_at(8) == 1.0);      // inside the plateau: flat
    CHECK(profile.weight_at(13) == Catch::Approx(std::sqrt(2.0))); // on a ramp
    // w_n stays within the computed global bounds
    double lo = 2.0, hi = 0.0;
    for (std::uint64_t n = 0; n <= 100000; ++n) {
        double w = profile.weight_at(n);
        lo = std::min(lo, w);
        hi = std::max(hi, w);
    }
    CHECK(lo >= 0.5);
    CHECK(hi <= 2.0);
    CHECK(lo == Catch::Approx(std::exp2(-0.5)).margin(1e-12));
    CHECK(hi == Catch::Approx(std::exp2(0.5)).margin(1e-12));
}

TEST_CASE("characterization conditions at a small horizon") {
    ShiftParameters prm;
    auto rep = verify_characterization(prm, 1000000, 1);
    CHECK(rep.a_ok);
    CHECK(rep.b_ok);
    CHECK(rep.gap_ok);
    CHECK(rep.c_ok);
    CHECK(rep.d_ok);
    CHECK(rep.violations.empty());
    // qualifying p=1 windows below 1e6: u = 3 and u = 5
    REQUIRE(rep.windows.size() == 2);
    CHECK(rep.windows[0].u == 3);
    CHECK(rep.windows[1].u == 5);
    CHECK(rep.windows[0].count > 0);
    CHECK_THROWS_AS(verify_characterization(prm, 100, 1), std::invalid_argument);
}

TEST_CASE("F_p decay") {
    ShiftParameters prm;
    auto rep = fp_decay_report(prm, 0.5, 10, 3, 100000);
    REQUIRE(rep.tail.size() == 10);
    for (int p = 1; p < 10; ++p) CHECK(rep.tail[p] < rep.tail[p - 1]);
    CHECK(rep.tail[9] < 0.4);
    REQUIRE(rep.proxy.size() == 3);
    CHECK(rep.proxy[2] <= rep.proxy[0]);
    CHECK(rep.gp_count[0] > rep.gp_count[1]);
    CHECK_THROWS_AS(fp_decay_report(prm, 1.5, 10, 3, 1000), std::invalid_argument);
}

TEST_CASE("orbit hits") {
    ShiftProfile profile(ShiftParameters{});
    SECTION("empty vector never approaches e_0") {
        auto hits = orbit_hit_set(profile, {}, 0.5, 100);
        CHECK_FALSE(hits.nth(1));
    }
    SECTION("single spike returns near e_0 at its own index") {
        // x = x_16 e_16 with x_16 = 2^{-P(17)}: (B^16 x)_0 = 1 exactly
        double x16 = std::exp2(-profile.log2_product(17));
        auto hits = orbit_hit_set(profile, {{16, x16}}, 0.5, 100);
        bool found = false;
        for (std::uint64_t i = 1; hits.nth(i); ++i)
            if (*hits.nth(i) == 16) found = true;
        CHECK(found);
    }
}

TEST_CASE("parameter derivation is stable under perturbation search") {
    // the grid search must return the same admissible defaults it starts from
    auto prm = derive_parameters();
    auto again = derive_parameters();
    CHECK(prm.a == again.a);
    CHECK(prm.eps == again.eps);
    CHECK(prm.b_exponent == again.b_exponent);
}
