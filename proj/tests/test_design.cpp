#include "cascade/design.hpp"
#include "cascade/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace cascade;
using doctest::Approx;

TEST_CASE("sweep over 5.5 to 8.0") {
    const auto rows = sweep_voltage_ratio(SystemConfig{}, 5.5, 8.0, 0.1);
    REQUIRE(rows.size() == 26);
    CHECK(rows.front().voltage_ratio == Approx(5.5));
    CHECK(rows.back().voltage_ratio == Approx(8.0));

    std::size_t first_stable = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].verdict == Verdict::Stable) {
            first_stable = i;
            break;
        }
    }
    REQUIRE(first_stable < rows.size());
    CHECK(rows[first_stable].voltage_ratio == Approx(6.1));
    CHECK(rows[first_stable - 1].voltage_ratio == Approx(6.0));
    for (std::size_t i = first_stable; i < rows.size(); ++i) CHECK(rows[i].verdict == Verdict::Stable);
}

TEST_CASE("design_row") {
    const DesignRow r = design_row(SystemConfig{}, 6.2);
    CHECK(r.feasible);
    CHECK(r.module_voltage == Approx(311.0 / 6.2));
    CHECK(r.margin == Approx(0.146781).epsilon(1e-5));
    CHECK(r.slow_eigenvalue == Approx(-0.869166).epsilon(1e-5));
    CHECK(r.settling_estimate == Approx(4.0 / 0.869166).epsilon(1e-5));
    CHECK(r.power_factor == Approx(0.983998).epsilon(1e-5));

    const DesignRow unstable = design_row(SystemConfig{}, 5.8);
    CHECK(unstable.verdict == Verdict::Unstable);
    CHECK(std::isinf(unstable.settling_estimate));

    // S_C < P* once M exceeds V_g^2 / (|Z| P*) ~ 47.4.
    const DesignRow infeasible = design_row(SystemConfig{}, 50.0);
    CHECK_FALSE(infeasible.feasible);
    CHECK(std::isnan(infeasible.margin));
    CHECK(infeasible.verdict == Verdict::Unstable);
    CHECK(std::isinf(infeasible.settling_estimate));
}

TEST_CASE("recommendation") {
    SUBCASE("default constraints pick 6.2") {
        const Recommendation rec = recommend_voltage_ratio(SystemConfig{}, DesignConstraints{});
        REQUIRE(rec.row);
        CHECK(rec.row->voltage_ratio == Approx(6.2));
        CHECK(rec.row->power_factor == Approx(0.984).epsilon(1e-3));
        CHECK(rec.row->margin == Approx(0.147).epsilon(1e-2));
    }
    SUBCASE("margin 2 with PF 0.99 has no answer") {
        DesignConstraints c;
        c.min_margin = 2.0;
        c.min_power_factor = 0.99;
        const Recommendation rec = recommend_voltage_ratio(SystemConfig{}, c);
        CHECK_FALSE(rec.row);
        CHECK_FALSE(rec.binding_constraint.empty());
    }
    SUBCASE("no power factor floor and a tiny margin picks the smallest stable M") {
        DesignConstraints c;
        c.min_margin = 1e-9;
        c.min_power_factor = 0.0;
        const Recommendation rec = recommend_voltage_ratio(SystemConfig{}, c);
        REQUIRE(rec.row);
        CHECK(rec.row->voltage_ratio == Approx(6.05));
    }
    SUBCASE("range with nothing stable names stability") {
        DesignConstraints c;
        c.ratio_low = 5.0;
        c.ratio_high = 5.9;
        const Recommendation rec = recommend_voltage_ratio(SystemConfig{}, c);
        CHECK_FALSE(rec.row);
        CHECK(rec.binding_constraint.rfind("stability", 0) == 0);
    }
    SUBCASE("invalid constraints") {
        DesignConstraints c;
        c.ratio_high = c.ratio_low;
        CHECK_THROWS_AS(recommend_voltage_ratio(SystemConfig{}, c), InvalidConfig);
        c = DesignConstraints{};
        c.ratio_step = 0.0;
        CHECK_THROWS_AS(recommend_voltage_ratio(SystemConfig{}, c), InvalidConfig);
        c = DesignConstraints{};
        c.min_power_factor = 1.5;
        CHECK_THROWS_AS(recommend_voltage_ratio(SystemConfig{}, c), InvalidConfig);
    }
}

TEST_CASE("property: sweep rows are reproducible one at a time") {
    const auto rows = sweep_voltage_ratio(SystemConfig{}, 5.0, 9.0, 0.25);
    for (const DesignRow& r : rows) {
        const DesignRow again = design_row(SystemConfig{}, r.voltage_ratio);
        CHECK(again.margin == r.margin);
        CHECK(again.power_factor == r.power_factor);
        CHECK(again.verdict == r.verdict);
        CHECK(std::isfinite(r.settling_estimate) == (r.verdict == Verdict::Stable));
    }
}

TEST_CASE("property: recommendation satisfies its constraints") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        DesignConstraints c;
        c.min_power_factor = 0.7 + 0.3 * u(rng);
        c.min_margin = 0.01 + 2.0 * u(rng);
        c.ratio_low = 5.0 + u(rng);
        c.ratio_high = c.ratio_low + 0.5 + 3.0 * u(rng);
        c.ratio_step = 0.01 + 0.1 * u(rng);
        const Recommendation rec = recommend_voltage_ratio(SystemConfig{}, c);
        if (!rec.row) {
            CHECK_FALSE(rec.binding_constraint.empty());
            continue;
        }
        CHECK(rec.row->verdict == Verdict::Stable);
        CHECK(rec.row->margin >= c.min_margin);
        CHECK(rec.row->power_factor >= c.min_power_factor);
        CHECK(rec.row->voltage_ratio >= c.ratio_low - 1e-9);
        CHECK(rec.row->voltage_ratio <= c.ratio_high + 1e-9);
    }
}

TEST_CASE("property: fine sweep brackets the stability boundary") {
    // Root of M cos(arcsin(P* M |Z| / V_g^2)) = N by bisection.
    const double root = oracle::bisect([](double m) { return oracle::margin(m); }, 6.0, 6.1);
    CHECK(root == Approx(6.049424).epsilon(1e-6));
    const double step = 0.01;
    const auto rows = sweep_voltage_ratio(SystemConfig{}, 5.9, 6.2, step);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].verdict == Verdict::Stable && rows[i - 1].verdict != Verdict::Stable) {
            CHECK(rows[i - 1].voltage_ratio <= root);
            CHECK(rows[i].voltage_ratio >= root);
            CHECK(rows[i].voltage_ratio - rows[i - 1].voltage_ratio <= step + 1e-12);
        }
    }
}
