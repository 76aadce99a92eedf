#include <doctest.h>

#include <cmath>
#include <vector>

#include "spiked/density.hpp"
#include "spiked/errors.hpp"
#include "spiked/numkit.hpp"
#include "spiked/spike_density.hpp"

using namespace spiked;
using namespace spiked::density;

namespace {

SpikedModel complex_model(int n, int alpha, double theta)
{
    return {n, n + alpha, theta, Variant::complex};
}

double normalization(const Pdf& f)
{
    numkit::QuadratureSpec spec;
    spec.unit_nodes = 32;
    spec.tail_epsilon = 1e-10;
    return numkit::integrate_unit(f, spec);
}

}  // namespace

TEST_CASE("pdf_z1 reference values")
{
    CHECK(pdf_z1(complex_model(5, 3, 0.0), 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    for (double z : {0.0, 0.2, 0.7, 1.0}) CHECK(pdf_z1(complex_model(2, 0, 0.0), z) == doctest::Approx(1.0));

    // alpha = 0 closed form at beta = 1/2, n = 3, z = 0:
    // n (n - 1) (1 - b)^n / ((n - b) (1 - b)^(n + 1)) = 6 / (2.5 * 0.5) = 4.8.
    CHECK(pdf_z1(complex_model(3, 0, 1.0), 0.0) == doctest::Approx(4.8).epsilon(1e-12));
}

TEST_CASE("pdf_z1 matches the alpha = 0 formula on a grid")
{
    for (int n : {3, 5, 8}) {
        for (double theta : {0.3, 2.0}) {
            const double b = theta / (1 + theta);
            for (double z = 0.05; z < 1; z += 0.1) {
                const double ref = n * (n - 1) * std::pow(1 - b, n) * std::pow(1 - z, n - 2) /
                                   ((n - b) * std::pow(1 - b * (1 - z), n + 1));
                CHECK(pdf_z1(complex_model(n, 0, theta), z) == doctest::Approx(ref).epsilon(1e-11));
            }
        }
    }
}

TEST_CASE("nested sum agrees with the alpha = 0 and alpha = 1 fast paths")
{
    struct Case {
        int n, alpha;
        double theta, z;
    };
    for (const Case& c : {Case{4, 0, 2.0, 0.3}, Case{3, 1, 1.0, 0.5}, Case{6, 1, 0.2, 0.9}}) {
        const auto [general, fast] = pdf_z1_general_vs_fastpath(complex_model(c.n, c.alpha, c.theta), c.z);
        CHECK(std::fabs(general - fast) <= 1e-10 * std::max(1.0, std::fabs(fast)));
    }
}

TEST_CASE("pdf_z1 preconditions")
{
    CHECK_THROWS_AS(pdf_z1({3, 5, 1.0, Variant::real}, 0.5), UnsupportedModel);
    CHECK_THROWS_AS(pdf_z1(complex_model(3, 1, 1.0), 1.5), DomainError);
    CHECK_THROWS_AS(pdf_z1_general_vs_fastpath(complex_model(3, 2, 1.0), 0.5), UnsupportedModel);
}

TEST_CASE("asymptotic exponential law")
{
    CHECK(pdf_nz1_asymptotic(0.0, 0.0) == 1.0);
    for (double v : {0.1, 1.0, 2.5}) CHECK(cdf_nz1_asymptotic(3.0, v) == doctest::Approx(1 - std::exp(-4 * v)));
    CHECK(cdf_nz1_asymptotic(1.0, std::log(2.0) / 2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(pdf_nz1_asymptotic(1.0, -0.5), DomainError);
}

TEST_CASE("pdf_zn n = 2 at theta = 0 is uniform")
{
    for (double z : {0.0, 0.3, 0.8, 1.0}) CHECK(pdf_zn(complex_model(2, 0, 0.0), z) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pdf_zn n = 2 is the reflection of pdf_z1")
{
    for (int alpha : {0, 1, 3}) {
        for (double theta : {0.0, 0.5, 4.0}) {
            for (double z = 0.0; z <= 1.0; z += 0.125) {
                const auto m = complex_model(2, alpha, theta);
                CHECK(std::fabs(pdf_zn(m, z) - pdf_z1(m, 1 - z)) < 1e-8);
            }
        }
    }
}

TEST_CASE("closed forms agree with the generic integral")
{
    struct Case {
        int n, alpha;
        double theta, z;
    };
    for (const Case& c : {Case{3, 2, 3.0, 0.5}, Case{4, 0, 2.0, 0.2}, Case{3, 2, 3.0, 0.1}, Case{4, 1, 1.0, 0.85}}) {
        const auto m = complex_model(c.n, c.alpha, c.theta);
        const double closed = pdf_zn_closed(m, c.z);
        const double generic = ZnIntegral(m)(c.z);
        CHECK(std::fabs(closed - generic) <= 1e-6 * std::fabs(closed));
    }
}

TEST_CASE("pdf_zn closed form n = 2 normalizes")
{
    const auto m = complex_model(2, 1, 1.0);
    numkit::QuadratureSpec spec;
    spec.unit_nodes = 32;
    spec.tail_epsilon = 1e-12;
    CHECK(std::fabs(numkit::integrate_unit([&](double z) { return pdf_zn_closed(m, z); }, spec) - 1) < 1e-8);
}

TEST_CASE("pdf_zn preconditions")
{
    CHECK_THROWS_AS(pdf_zn(complex_model(3, 1, 0.0), 0.5), ThetaZeroSingularity);
    CHECK_THROWS_AS(pdf_zn_closed(complex_model(5, 1, 1.0), 0.5), UnsupportedModel);
}

TEST_CASE("n = 2 largest projection density is convex")
{
    for (int alpha : {0, 3}) {
        for (double theta : {0.0, 1.0, 5.0}) CHECK(check_zn_convexity_n2(complex_model(2, alpha, theta)));
    }
    CHECK_THROWS_AS(check_zn_convexity_n2(complex_model(3, 0, 1.0)), UnsupportedModel);
}

TEST_CASE("generic largest projection density normalizes")
{
    for (int n : {5, 7}) {
        const ZnIntegral f(complex_model(n, 2, 3.0));
        CHECK(std::fabs(normalization([&](double z) { return f(z); }) - 1) < 1e-6);
    }
}

TEST_CASE("second smallest projection density normalizes")
{
    const Z2Integral f(complex_model(4, 1, 3.0));
    CHECK(std::fabs(normalization([&](double z) { return f(z); }) - 1) < 1e-4);
    CHECK_THROWS_AS(pdf_z2(complex_model(2, 1, 3.0), 0.5), UnsupportedModel);
    CHECK_THROWS_AS(pdf_z2(complex_model(4, 1, 0.0), 0.5), ThetaZeroSingularity);
}

TEST_CASE("c.d.f. reference values")
{
    const auto haar = complex_model(4, 2, 0.0);
    for (double z : {0.1, 0.4, 0.9}) CHECK(cdf(Statistic::z1, haar, z) == doctest::Approx(1 - std::pow(1 - z, 3)).epsilon(1e-9));
    const SpikedModel models[] = {complex_model(3, 2, 3.0), complex_model(5, 1, 0.1), complex_model(4, 1, 3.0)};
    for (const auto& m : models) {
        for (Statistic s : {Statistic::z1, Statistic::zn, Statistic::z2}) {
            CHECK(std::fabs(cdf(s, m, 1.0) - 1) < 1e-6);
            CHECK(std::fabs(cdf(s, m, 1e-12)) < 1e-6);
        }
    }
}

TEST_CASE("c.d.f. is monotone on a fine grid")
{
    const SpikedModel m = complex_model(4, 1, 3.0);
    for (Statistic s : {Statistic::z1, Statistic::zn, Statistic::z2}) {
        const TabulatedCdf table(s, m);
        double prev = 0;
        for (int i = 0; i <= 1000; ++i) {
            const double v = table(i / 1000.0);
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("Haar mean of Z1 is 1/n")
{
    for (int n : {2, 4, 7}) {
        const auto m = complex_model(n, 2, 0.0);
        const double mean = normalization([&](double z) { return z * pdf_z1(m, z); });
        CHECK(std::fabs(mean - 1.0 / n) < 1e-8);
    }
}

TEST_CASE("n Z1 approaches the exponential law")
{
    for (double theta : {0.5, 1.0, 3.0}) {
        const int n = 40;
        const TabulatedCdf table(Statistic::z1, complex_model(n, 2, theta));
        double worst = 0;
        for (int i = 0; i <= 600; ++i) {
            const double v = i / 100.0;
            worst = std::max(worst, std::fabs(table(v / n) - cdf_nz1_asymptotic(theta, v)));
        }
        CHECK(worst <= 0.02);
    }
}

TEST_CASE("shifted-moment identity")
{
    const auto [lhs1, rhs1] = mehta_identity_check(1, 0, 2.0, 5.0);
    CHECK(lhs1 == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(rhs1 == doctest::Approx(-2.0).epsilon(1e-10));
    const auto [lhs2, rhs2] = mehta_identity_check(2, 1, 1.0, 3.0);
    CHECK(std::fabs(lhs2 - rhs2) <= 1e-6 * std::fabs(rhs2));
    const auto [lhs3, rhs3] = mehta_identity_check(3, 2, 0.5, 2.0);
    CHECK(std::fabs(lhs3 - rhs3) <= 1e-5 * std::fabs(rhs3));
    CHECK_THROWS_AS(mehta_identity_check(2, 1, 1.5, 1.5), DomainError);
}

TEST_CASE("Bessel determinant normalization")
{
    for (int alpha = 1; alpha <= 3; ++alpha) CHECK(std::fabs(kalpha_normalization_check(alpha) - 1) <= 1e-8);
}
