#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spiked/density.hpp"
#include "spiked/errors.hpp"
#include "spiked/numkit.hpp"
#include "spiked/variant_density.hpp"

using namespace spiked;
using namespace spiked::density;

namespace {

SpikedModel real_model(int m, double theta)
{
    return {2, m, theta, Variant::real};
}

SpikedModel singular_model(int n, int m, double theta)
{
    return {n, m, theta, Variant::singular};
}

numkit::QuadratureSpec spec()
{
    numkit::QuadratureSpec s;
    s.unit_nodes = 32;
    s.tail_epsilon = 1e-10;
    return s;
}

// Mass of a real-variant density after z = sin^2(phi), which removes both
// endpoint singularities.
double real_mass(const SpikedModel& m, bool largest)
{
    return numkit::integrate_unit(
        [&](double t) {
            const double phi = t * std::numbers::pi / 2;
            const double s = std::sin(phi);
            const double z = largest ? 1 - s * s : s * s;
            return std::numbers::pi * w1_real_regular(m, z);
        },
        spec());
}

}  // namespace

TEST_CASE("real smallest projection at theta = 0 and m = 2 is the arcsine law")
{
    const auto m = real_model(2, 0.0);
    for (double z : {0.01, 0.2, 0.5, 0.77, 0.999}) {
        CHECK(pdf_w1_real(m, z) == doctest::Approx(1 / (std::numbers::pi * std::sqrt(z * (1 - z)))).epsilon(1e-12));
    }
}

TEST_CASE("real densities normalize")
{
    CHECK(std::fabs(real_mass(real_model(5, 2.0), false) - 1) < 1e-6);
    CHECK(std::fabs(real_mass(real_model(4, 1.0), true) - 1) < 1e-6);
    for (int m = 2; m <= 8; ++m) {
        for (double theta : {0.0, 0.5, 10.0}) CHECK(std::fabs(real_mass(real_model(m, theta), false) - 1) < 1e-6);
    }
}

TEST_CASE("real largest projection is the reflection")
{
    const auto m2 = real_model(2, 0.0);
    CHECK(pdf_w2_real(m2, 0.5) == pdf_w1_real(m2, 0.5));
    const auto m4 = real_model(4, 1.0);
    for (double z : {0.05, 0.3, 0.6, 0.95}) CHECK(pdf_w2_real(m4, z) == pdf_w1_real(m4, 1 - z));
}

TEST_CASE("real smallest projection is symmetric at theta = 0")
{
    for (int m : {2, 3, 6}) {
        const auto model = real_model(m, 0.0);
        for (int i = 1; i <= 100; ++i) {
            const double z = i / 202.0;
            const double a = pdf_w1_real(model, z);
            CHECK(std::fabs(a - pdf_w1_real(model, 1 - z)) <= 1e-10 * a);
        }
    }
}

TEST_CASE("real variant preconditions")
{
    CHECK_THROWS_AS(pdf_w1_real({3, 5, 1.0, Variant::real}, 0.5), UnsupportedModel);
    CHECK_THROWS_AS(pdf_w1_real({2, 5, 1.0, Variant::complex}, 0.5), UnsupportedModel);
    CHECK_THROWS_AS(pdf_w1_real(real_model(3, 1.0), 0.0), DomainError);
}

TEST_CASE("singular m = 1 reference values")
{
    for (double z : {0.0, 0.25, 0.8}) {
        CHECK(pdf_y1_singular(singular_model(4, 1, 0.0), z) == doctest::Approx(3 * (1 - z) * (1 - z)).epsilon(1e-12));
    }
    CHECK(pdf_y1_singular(singular_model(3, 1, 1.0), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("singular m = 1 at theta = 0 is the Haar density")
{
    for (int n = 2; n <= 8; ++n) {
        for (int i = 0; i <= 20; ++i) {
            const double z = i / 20.0;
            CHECK(std::fabs(pdf_y1_singular(singular_model(n, 1, 0.0), z) - (n - 1) * std::pow(1 - z, n - 2)) < 1e-12);
        }
    }
}

TEST_CASE("singular densities normalize")
{
    const auto f = [](const SpikedModel& m) {
        return numkit::integrate_unit([&](double z) { return pdf_y1_singular(m, z); }, spec());
    };
    CHECK(std::fabs(f(singular_model(5, 4, 0.3)) - 1) < 1e-6);
    for (int m = 1; m <= 6; ++m) CHECK(std::fabs(f(singular_model(m + 1, m, 0.3)) - 1) < 1e-5);
    for (int n = 2; n <= 7; ++n) CHECK(std::fabs(f(singular_model(n, 1, 2.0)) - 1) < 1e-5);

    for (int m = 2; m <= 6; ++m) {
        const YnSingular yn(singular_model(m + 1, m, 0.3));
        CHECK(std::fabs(numkit::integrate_unit([&](double z) { return yn(z); }, spec()) - 1) < 1e-5);
    }
}

TEST_CASE("singular preconditions")
{
    CHECK_THROWS_AS(pdf_y1_singular(singular_model(5, 3, 1.0), 0.5), UnsupportedModel);
    CHECK_THROWS_AS(pdf_y1_singular(singular_model(5, 4, 0.0), 0.5), ThetaZeroSingularity);
    CHECK_THROWS_AS(pdf_yn_singular(singular_model(5, 4, 0.0), 0.5), ThetaZeroSingularity);
    CHECK_THROWS_AS(pdf_yn_singular(singular_model(5, 3, 1.0), 0.5), UnsupportedModel);
    CHECK_THROWS_AS(pdf_yn_singular(singular_model(2, 1, 1.0), 0.5), UnsupportedModel);
    CHECK_THROWS_AS(pdf_y1_singular({4, 5, 1.0, Variant::complex}, 0.5), UnsupportedModel);
}

TEST_CASE("variant c.d.f. tables")
{
    const auto arcsine = real_model(2, 0.0);
    for (double z : {0.01, 0.3, 0.5, 0.9}) {
        const double ref = 2 / std::numbers::pi * std::asin(std::sqrt(z));
        CHECK(std::fabs(cdf(Statistic::w1_real, arcsine, z) - ref) < 1e-8);
        CHECK(std::fabs(cdf(Statistic::w2_real, arcsine, z) - ref) < 1e-8);
    }
    const auto sing = singular_model(4, 3, 0.3);
    CHECK(std::fabs(cdf(Statistic::y1_sing, sing, 1.0) - 1) < 1e-6);
    CHECK(std::fabs(cdf(Statistic::yn_sing, sing, 1.0) - 1) < 1e-5);
}
