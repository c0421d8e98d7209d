#include <doctest.h>

#include <cmath>
#include <random>

#include "mhd1d/constitutive.hpp"

using namespace mhd1d;

TEST_CASE("pressure is gamma*rho*theta, bit-level for exact inputs")
{
    CHECK(pressure(2.0, 3.0, 1.0) == 6.0);
    CHECK(pressure(1.0, 1.0, 5.0 / 3.0) == 5.0 / 3.0);
    CHECK(pressure(0.5, 4.0, 2.0) == 4.0);
    CHECK_THROWS_AS(pressure(1.0, 0.0, 1.4), std::domain_error);
    CHECK_THROWS_AS(pressure(-1.0, 1.0, 1.4), std::domain_error);
}

TEST_CASE("internal energy equals theta (c_v = 1)")
{
    CHECK(internal_energy(1.0) == 1.0);
    CHECK(internal_energy(2.5) == 2.5);
    CHECK_THROWS_AS(internal_energy(-1.0), std::domain_error);
}

TEST_CASE("power-law conductivity")
{
    const auto law = ConductivityLaw::power_law(1.0, 2.0);
    CHECK(conductivity(law, 1.0, 3.0) == doctest::Approx(9.0).epsilon(1e-15));
    const auto law2 = ConductivityLaw::power_law(2.0, 0.5);
    CHECK(conductivity(law2, 1.0, 4.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK_THROWS_AS(conductivity(law, 1.0, 0.0), std::domain_error);
}

TEST_CASE("power-law conductivity is monotone increasing in theta")
{
    const auto law = ConductivityLaw::power_law(0.3, 1.7);
    double prev = 0.0;
    for (double th = 0.1; th < 5.0; th += 0.1) {
        const double k = conductivity(law, 1.0, th);
        CHECK(k > prev);
        prev = k;
    }
}

TEST_CASE("custom conductivity is floor-checked at every evaluation")
{
    const auto ok = ConductivityLaw::custom(1.0, 2.0, [](double, double th) {
        return 2.0 * th * th + 1.0;
    });
    CHECK(conductivity(ok, 1.0, 2.0) == doctest::Approx(9.0));

    const auto bad = ConductivityLaw::custom(1.0, 2.0, [](double, double th) {
        return 0.5 * th * th;
    });
    CHECK_THROWS_AS(conductivity(bad, 1.0, 2.0), ConstitutiveViolation);
}

TEST_CASE("total energy density examples")
{
    CHECK(total_energy_density(1.0, 0.0, {0, 0}, {0, 0}, 1.0) == 1.0);
    CHECK(total_energy_density(2.0, 1.0, {1, 0}, {0, 2}, 1.0) == 6.0);
    CHECK(total_energy_density(1.0, 0.0, {0, 0}, {1, 1}, 2.0) == 3.0);
    CHECK_THROWS_AS(total_energy_density(0.0, 0.0, {0, 0}, {0, 0}, 1.0), std::domain_error);
}

TEST_CASE("total energy density is rotation invariant in w and b")
{
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double rho = 0.5 + std::abs(dist(gen));
        const double th = 0.5 + std::abs(dist(gen));
        const double u = dist(gen);
        const vec2 w{dist(gen), dist(gen)};
        const vec2 b{dist(gen), dist(gen)};
        const double phi = dist(gen);
        const double c = std::cos(phi), s = std::sin(phi);
        const vec2 wr{c * w[0] - s * w[1], s * w[0] + c * w[1]};
        const vec2 br{c * b[0] - s * b[1], s * b[0] + c * b[1]};
        CHECK(total_energy_density(rho, u, w, b, th) ==
              doctest::Approx(total_energy_density(rho, u, wr, br, th)).epsilon(1e-13));
    }
}

TEST_CASE("entropy density examples")
{
    CHECK(entropy_density(1.0, 1.0, 1.4) == 0.0);
    CHECK(entropy_density(1.0, std::exp(1.0), 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(entropy_density(std::exp(1.0), 1.0, 2.0) == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK_THROWS_AS(entropy_density(0.0, 1.0, 1.4), std::domain_error);
}
