// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "spiked/density.hpp"
#include "spiked/montecarlo.hpp"
#include "spiked/numkit.hpp"
#include "spiked/spike_density.hpp"
#include "spiked/variant_density.hpp"

using namespace spiked;

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::size_t kSamples = 100000;
constexpr std::uint64_t kSeed = 42;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int index, const char* name, bool ok, const std::string& detail)
{
    std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", index, name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

SpikedModel complex_model(int n, int alpha, double theta)
{
    return {n, n + alpha, theta, Variant::complex};
}

numkit::QuadratureSpec unit_spec()
{
    numkit::QuadratureSpec s;
    s.unit_nodes = 32;
    s.tail_epsilon = 1e-10;
    return s;
}

// Mass of an arcsine-type density after z = sin^2(phi).
double arcsine_mass(const SpikedModel& m, bool largest)
{
    return numkit::integrate_unit(
        [&](double t) {
            const double s = std::sin(t * std::numbers::pi / 2);
            return std::numbers::pi * density::w1_real_regular(m, largest ? 1 - s * s : s * s);
        },
        unit_spec());
}

double unit_mass(Statistic stat, const SpikedModel& m)
{
    const auto f = density::make_pdf(stat, m);
    return numkit::integrate_unit(f, unit_spec());
}

numkit::GofReport ks_against_model(Statistic stat, const SpikedModel& model, const std::vector<double>& values)
{
    const density::TabulatedCdf table(stat, model);
    return numkit::ks_test(values, [&table](double z) { return table(z); });
}

std::vector<double> draw(Statistic stat, const SpikedModel& model, std::size_t count = kSamples)
{
    const auto spike = mc::make_spike(model.n, kSeed, mc::SpikeStyle::first_basis, model.variant == Variant::real);
    return mc::sample_wishart(stat, model, spike, kSeed, count).values;
}

void normalization_suite()
{
    const auto start = Clock::now();
    const double thetas[] = {0.1, 1.0, 3.0, 10.0};
    int configs = 0;
    int bad = 0;
    double worst[4] = {0, 0, 0, 0};  // regular, Z2, singular Yn, all others
    auto record = [&](double mass, double tol, int slot) {
        ++configs;
        const double err = std::fabs(mass - 1);
        worst[slot] = std::max(worst[slot], err);
        if (!(err <= tol)) ++bad;
    };

    for (double th : thetas) {
        record(numkit::integrate_halfline([th](double v) { return density::pdf_nz1_asymptotic(th, v); }, 1 + th),
               1e-6, 0);
        for (int n = 2; n <= 8; ++n) {
            for (int a = 0; a <= 4; ++a) {
                const auto m = complex_model(n, a, th);
                record(unit_mass(Statistic::z1, m), 1e-6, 0);
                record(unit_mass(Statistic::zn, m), 1e-6, 0);
                if (n >= 3) record(unit_mass(Statistic::z2, m), 1e-4, 1);
            }
        }
        for (int m = 2; m <= 6; ++m) {
            const SpikedModel real{2, m, th, Variant::real};
            record(arcsine_mass(real, false), 1e-6, 0);
            record(arcsine_mass(real, true), 1e-6, 0);
        }
        for (int n = 2; n <= 8; ++n) {
            record(unit_mass(Statistic::y1_sing, {n, 1, th, Variant::singular}), 1e-6, 0);
            if (n >= 3) {
                const SpikedModel sing{n, n - 1, th, Variant::singular};
                record(unit_mass(Statistic::y1_sing, sing), 1e-6, 0);
                record(unit_mass(Statistic::yn_sing, sing), 1e-5, 2);
            }
        }
    }
    const double elapsed = seconds_since(start);
    report(1, "normalization suite", bad == 0 && elapsed < 300,
           std::to_string(configs) + " densities, " + std::to_string(bad) + " outside tolerance; " +
               fmt("worst |mass - 1| %.2e (Z2 %.2e, Yn %.2e)", std::max(worst[0], worst[3]), worst[1], worst[2]) +
               fmt(", %.0f s", elapsed));
}

void haar_baseline()
{
    double worst = 0;
    for (int n = 2; n <= 8; ++n) {
        for (int a : {0, 2, 4}) {
            for (int i = 0; i <= 200; ++i) {
                const double z = i / 200.0;
                const double ref = (n - 1) * std::pow(1 - z, n - 2);
                worst = std::max(worst, std::fabs(density::pdf_z1(complex_model(n, a, 0.0), z) - ref));
            }
        }
    }
    report(2, "Haar baseline", worst <= 1e-10, fmt("max deviation %.2e", worst));
}

void dual_paths()
{
    double worst_fast = 0;
    for (int a : {0, 1}) {
        for (int n = 3; n <= 8; ++n) {
            for (double th : {0.5, 2.0, 10.0}) {
                for (int i = 0; i <= 20; ++i) {
                    const auto [general, fast] = density::pdf_z1_general_vs_fastpath(complex_model(n, a, th), i / 20.0);
                    worst_fast = std::max(worst_fast, std::fabs(general - fast) / std::max(1.0, std::fabs(fast)));
                }
            }
        }
    }
    double worst_closed = 0;
    for (int n = 2; n <= 4; ++n) {
        for (int a = 0; a <= 2; ++a) {
            for (double th : {1.0, 3.0}) {
                const auto m = complex_model(n, a, th);
                const density::ZnClosed closed(m);
                const density::ZnIntegral generic(m);
                for (int i = 0; i <= 100; ++i) {
                    const double c = closed(i / 100.0);
                    const double g = generic(i / 100.0);
                    const double scale = std::max(std::fabs(c), std::fabs(g));
                    if (scale > 0) worst_closed = std::max(worst_closed, std::fabs(c - g) / scale);
                }
            }
        }
    }
    report(3, "dual-path equality", worst_fast <= 1e-10 && worst_closed <= 1e-6,
           fmt("fast paths vs nested sum %.2e; closed forms vs integral %.2e relative", worst_fast, worst_closed));
}

void monte_carlo_concordance()
{
    struct Config {
        Statistic stat;
        SpikedModel model;
    };
    std::vector<Config> configs;
    for (int n = 3; n <= 7; ++n) configs.push_back({Statistic::z1, complex_model(n, 2, 3.0)});
    for (double th : {0.1, 1.0, 10.0}) configs.push_back({Statistic::z1, complex_model(3, 2, th)});
    for (int n = 2; n <= 4; ++n) configs.push_back({Statistic::zn, complex_model(n, 2, 3.0)});
    for (int n = 4; n <= 5; ++n) configs.push_back({Statistic::z2, complex_model(n, 1, 3.0)});

    bool ok = true;
    double worst_ks = 0;
    double slowest = 0;
    double critical = 0;
    for (const auto& c : configs) {
        const auto start = Clock::now();
        const auto rep = ks_against_model(c.stat, c.model, draw(c.stat, c.model));
        const double elapsed = seconds_since(start);
        critical = rep.critical_value_1pct;
        worst_ks = std::max(worst_ks, rep.ks_statistic);
        slowest = std::max(slowest, elapsed);
        if (!rep.passed || elapsed >= 60) {
            ok = false;
            std::printf("  %s n=%d m=%d theta=%g: ks %.5f, %.1f s\n", std::string(to_string(c.stat)).c_str(), c.model.n,
                        c.model.m, c.model.theta, rep.ks_statistic, elapsed);
        }
    }
    report(4, "Monte-Carlo concordance", ok,
           std::to_string(configs.size()) + " configurations; " +
               fmt("max KS %.5f vs critical %.5f; slowest %.1f s", worst_ks, critical, slowest));
}

void asymptotic_limit()
{
    double worst = 0;
    for (double th : {0.5, 1.0, 5.0}) {
        const auto values = draw(Statistic::nz1_asym, complex_model(30, 2, th));
        const auto rep = numkit::ks_test(values, [th](double v) { return density::cdf_nz1_asymptotic(th, v); }, 0.0,
                                         INFINITY);
        worst = std::max(worst, rep.ks_statistic);
    }
    report(5, "asymptotic limit", worst <= 0.02, fmt("max KS of n Z1 at n = 30: %.5f", worst));
}

void variant_suites()
{
    struct Config {
        Statistic stat;
        SpikedModel model;
    };
    std::vector<Config> configs;
    for (double th : {0.5, 2.0}) {
        configs.push_back({Statistic::w1_real, {2, 5, th, Variant::real}});
        configs.push_back({Statistic::w2_real, {2, 5, th, Variant::real}});
    }
    for (int n : {3, 5}) configs.push_back({Statistic::y1_sing, {n, 1, 0.3, Variant::singular}});
    for (int n = 3; n <= 5; ++n) {
        configs.push_back({Statistic::y1_sing, {n, n - 1, 0.3, Variant::singular}});
        configs.push_back({Statistic::yn_sing, {n, n - 1, 0.3, Variant::singular}});
    }
    bool ok = true;
    double worst_ks = 0;
    for (const auto& c : configs) {
        const auto rep = ks_against_model(c.stat, c.model, draw(c.stat, c.model));
        worst_ks = std::max(worst_ks, rep.ks_statistic);
        if (!rep.passed) {
            ok = false;
            std::printf("  %s n=%d m=%d theta=%g: ks %.5f\n", std::string(to_string(c.stat)).c_str(), c.model.n,
                        c.model.m, c.model.theta, rep.ks_statistic);
        }
    }

    const SpikedModel arcsine{2, 2, 0.0, Variant::real};
    double worst_arcsine = 0;
    for (int i = 1; i < 1000; ++i) {
        const double z = i / 1000.0;
        const double ref = 1 / (std::numbers::pi * std::sqrt(z * (1 - z)));
        worst_arcsine = std::max(worst_arcsine, std::fabs(density::pdf_w1_real(arcsine, z) / ref - 1));
    }
    const auto arcsine_rep = numkit::ks_test(draw(Statistic::w1_real, arcsine), [](double z) {
        return 2 / std::numbers::pi * std::asin(std::sqrt(z));
    });
    ok = ok && worst_arcsine <= 1e-12 && arcsine_rep.passed;
    report(6, "variant suites", ok,
           std::to_string(configs.size()) + " configurations, " +
               fmt("max KS %.5f; arcsine law: density %.1e relative, sampled KS %.5f", worst_ks, worst_arcsine,
                   arcsine_rep.ks_statistic));
}

void identity_oracles()
{
    double worst = 0;
    double worst_zero = 0;
    const double points[][2] = {{0.5, 2.0}, {1.0, 3.0}, {2.0, 5.0}};
    for (int n = 1; n <= 3; ++n) {
        for (int a = 0; a <= 2; ++a) {
            for (const auto& p : points) {
                const auto [lhs, rhs] = density::mehta_identity_check(n, a, p[0], p[1]);
                // (2, 5) is a root of the n = 2, alpha = 0 polynomial; compare
                // absolutely where the closed form vanishes.
                if (rhs == 0) {
                    worst_zero = std::max(worst_zero, std::fabs(lhs));
                } else {
                    worst = std::max(worst, std::fabs(lhs - rhs) / std::fabs(rhs));
                }
            }
        }
    }
    double worst_k = 0;
    for (int a = 1; a <= 3; ++a) worst_k = std::max(worst_k, std::fabs(density::kalpha_normalization_check(a) - 1));
    report(7, "identity oracles", worst <= 1e-5 && worst_zero <= 1e-10 && worst_k <= 1e-8,
           fmt("shifted-moment identity %.2e relative (%.1e absolute at roots); Bessel determinant %.2e", worst,
               worst_zero, worst_k));
}

void structural_invariants()
{
    double worst_sum = 0;
    const SpikedModel models[] = {complex_model(4, 2, 3.0), complex_model(7, 0, 0.5), {2, 5, 2.0, Variant::real}};
    for (const auto& m : models) {
        const auto spike = mc::make_spike(m.n, kSeed, mc::SpikeStyle::random, m.variant == Variant::real);
        for (std::uint64_t i = 0; i < 10000; ++i) {
            const auto p = mc::draw_projections(m, spike, kSeed, i);
            worst_sum = std::max(worst_sum, std::fabs(std::accumulate(p.begin(), p.end(), 0.0) - 1));
        }
    }

    double worst_reflection = 0;
    for (int a : {0, 1, 3}) {
        for (double th : {0.0, 0.5, 1.0, 5.0}) {
            const auto m = complex_model(2, a, th);
            for (int i = 0; i <= 100; ++i) {
                const double z = i / 100.0;
                worst_reflection = std::max(worst_reflection, std::fabs(density::pdf_zn(m, z) - density::pdf_z1(m, 1 - z)));
            }
        }
    }

    bool convex = true;
    for (int a : {0, 3}) {
        for (double th : {0.0, 1.0, 5.0}) convex = convex && density::check_zn_convexity_n2(complex_model(2, a, th));
    }

    auto simulate = [](const char* threads) {
        std::ostringstream out;
        std::ostringstream err;
        cli::run({"simulate", "--stat", "z2", "--n", "5", "--m", "7", "--theta", "3", "--samples", "20000", "--threads",
                  threads},
                 out, err);
        return out.str();
    };
    const std::string serial = simulate("1");
    const bool identical = !serial.empty() && serial == simulate("8");

    report(8, "structural invariants", worst_sum <= 1e-10 && worst_reflection <= 1e-8 && convex && identical,
           fmt("projection sums %.1e, n = 2 reflection %.1e, ", worst_sum, worst_reflection) +
               "convexity " + (convex ? "holds" : "violated") + ", simulate output " +
               (identical ? "identical" : "differs") + " for 1 and 8 workers");
}

void negative_control()
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run({"validate", "--stat", "z1", "--n", "3", "--m", "5", "--theta", "10", "--model-theta", "0"},
                              out, err);
    report(9, "negative control", code == cli::kValidationFailed,
           "validate of theta = 10 samples against theta = 0 exits with " + std::to_string(code));
}

// An exception inside a criterion counts as its failure.
void guarded(int index, const char* name, void (*criterion)())
{
    try {
        criterion();
    } catch (const std::exception& e) {
        report(index, name, false, std::string("threw ") + e.what());
    }
}

}  // namespace

int main()
{
    const auto start = Clock::now();
    guarded(1, "normalization suite", normalization_suite);
    guarded(2, "Haar baseline", haar_baseline);
    guarded(3, "dual-path equality", dual_paths);
    guarded(4, "Monte-Carlo concordance", monte_carlo_concordance);
    guarded(5, "asymptotic limit", asymptotic_limit);
    guarded(6, "variant suites", variant_suites);
    guarded(7, "identity oracles", identity_oracles);
    guarded(8, "structural invariants", structural_invariants);
    guarded(9, "negative control", negative_control);
    std::printf("%d of 9 criteria failed; total %.0f s\n", failures, seconds_since(start));
    return failures == 0 ? 0 : 1;
}
