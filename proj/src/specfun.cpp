#include "spiked/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "spiked/errors.hpp"
#include "spiked/numkit.hpp"

namespace spiked::specfun {

namespace {

constexpr long double kSeriesTol = 1e-17L;
constexpr int kSeriesCap = 10000;
constexpr long double kEulerGamma = 0.57721566490153286060651209008240243L;

bool is_nonpositive_integer(long double v)
{
    return v <= 0 && std::floor(v) == v;
}

// Sum of a hypergeometric-type series whose consecutive term ratio is
// ratio(k) = t_{k+1}/t_k and tends to `limit`. Stops once the geometric tail
// bound drops below the relative tolerance.
template <class Ratio>
long double sum_series(Ratio&& ratio, long double limit, const char* name)
{
    long double term = 1;
    long double sum = 1;
    for (int k = 0; k < kSeriesCap; ++k) {
        const long double r = ratio(k);
        term *= r;
        sum += term;
        if (term == 0) return sum;
        const long double next = std::max(std::fabs(ratio(k + 1)), std::fabs(limit));
        if (next < 1) {
            const long double tail = std::fabs(term) * next / (1 - next);
            if (tail <= kSeriesTol * std::fabs(sum)) return sum;
        }
    }
    throw NoConvergence(std::string(name) + " series exceeded the term cap");
}

long double terminating_2f1(long double a, long double b, long double c, long double x,
                            int terms)
{
    long double term = 1;
    long double sum = 1;
    for (int k = 0; k < terms; ++k) {
        if (c + k == 0) throw DomainError("2F1 lower parameter hits a pole");
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * x;
        sum += term;
    }
    return sum;
}

}  // namespace

double pochhammer(double a, int j)
{
    double p = 1;
    for (int k = 0; k < j; ++k) p *= a + k;
    return p;
}

double recip_gamma(double x)
{
    if (is_nonpositive_integer(x)) return 0;
    if (x > 170) return std::exp(-std::lgamma(x));
    return 1.0 / std::tgamma(x);
}

double log_factorial(int k)
{
    return std::lgamma(static_cast<double>(k) + 1.0);
}

long double factorial_l(int k)
{
    static const std::vector<long double> table = [] {
        std::vector<long double> t(171);
        t[0] = 1;
        for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * static_cast<long double>(i);
        return t;
    }();
    if (k < 0) throw DomainError("factorial of a negative integer");
    if (k < static_cast<int>(table.size())) return table[k];
    return std::exp(std::lgamma(static_cast<long double>(k) + 1));
}

long double laguerre_l(int rho, int M, long double z)
{
    if (M < 0) return 0;
    if (M == 0) return 1;
    if (M <= 30) {
        // binom(M+rho, M) * sum_j (-M)_j / (rho+1)_j z^j / j!
        long double term = 1;
        for (int k = 1; k <= M; ++k) term *= static_cast<long double>(rho + k) / k;
        long double sum = term;
        for (int j = 0; j < M; ++j) {
            term *= -static_cast<long double>(M - j) / ((rho + j + 1) * static_cast<long double>(j + 1)) * z;
            sum += term;
        }
        return sum;
    }
    long double prev = 1;
    long double cur = 1 + rho - z;
    for (int k = 1; k < M; ++k) {
        const long double next = ((2 * k + 1 + rho - z) * cur - (k + rho) * prev) / (k + 1);
        prev = cur;
        cur = next;
    }
    return cur;
}

double laguerre(int rho, int M, double z)
{
    return static_cast<double>(laguerre_l(rho, M, z));
}

long double gauss_2f1_l(long double a, long double b, long double c, long double x)
{
    if (x == 0) return 1;
    const bool a_term = is_nonpositive_integer(a);
    const bool b_term = is_nonpositive_integer(b);
    if (a_term || b_term) {
        int terms = std::numeric_limits<int>::max();
        if (a_term) terms = std::min(terms, static_cast<int>(-a));
        if (b_term) terms = std::min(terms, static_cast<int>(-b));
        return terminating_2f1(a, b, c, x, terms);
    }
    if (is_nonpositive_integer(c)) throw DomainError("2F1 lower parameter is a pole");
    if (x < 0) {
        // Pfaff: maps the argument into (0,1); pick a terminating image when one exists.
        const long double y = x / (x - 1);
        if (is_nonpositive_integer(c - a) && !is_nonpositive_integer(c - b)) {
            return std::pow(1 - x, -b) * gauss_2f1_l(c - a, b, c, y);
        }
        return std::pow(1 - x, -a) * gauss_2f1_l(a, c - b, c, y);
    }
    if (x >= 1) {
        if (x == 1 && c - a - b > 0) {
            return std::exp(std::lgamma(c) + std::lgamma(c - a - b) - std::lgamma(c - a) -
                            std::lgamma(c - b));
        }
        throw NoConvergence("2F1 argument outside the unit disc");
    }
    return sum_series(
        [&](int k) { return (a + k) * (b + k) / ((c + k) * (k + 1)) * x; }, x, "2F1");
}

double gauss_2f1(double a, double b, double c, double x)
{
    return static_cast<double>(gauss_2f1_l(a, b, c, x));
}

long double kummer_1f1_l(long double a, long double c, long double x)
{
    if (x == 0) return 1;
    if (is_nonpositive_integer(c)) throw DomainError("1F1 lower parameter is a pole");
    if (is_nonpositive_integer(a)) {
        long double term = 1;
        long double sum = 1;
        for (int k = 0; k < static_cast<int>(-a); ++k) {
            term *= (a + k) / ((c + k) * (k + 1)) * x;
            sum += term;
        }
        return sum;
    }
    if (x < 0) return std::exp(x) * kummer_1f1_l(c - a, c, -x);
    return sum_series([&](int k) { return (a + k) / ((c + k) * (k + 1)) * x; }, 0, "1F1");
}

double kummer_1f1(double a, double c, double x)
{
    return static_cast<double>(kummer_1f1_l(a, c, x));
}

double tricomi_u(double a, double c, double x)
{
    if (!(a > 0) || !(x > 0)) throw DomainError("tricomi_u requires a > 0 and x > 0");
    // s = x t moves the scale into the algebraic factor; the envelope is e^{-s}.
    auto integrand = [&](double s) {
        return std::exp(-s + (a - 1) * std::log(s) + (c - a - 1) * std::log1p(s / x));
    };
    numkit::QuadratureSpec spec;
    spec.tail_epsilon = 1e-12;
    const double integral = numkit::integrate_halfline(integrand, 1.0, spec);
    return integral * std::exp(-a * std::log(x) - std::lgamma(a));
}

long double appell_f2_l(long double a, long double b1, long double b2, long double c1,
                        long double c2, long double x, long double y)
{
    if (x == 0) return gauss_2f1_l(a, b2, c2, y);
    if (y == 0) return gauss_2f1_l(a, b1, c1, x);
    if (is_nonpositive_integer(c1) || is_nonpositive_integer(c2)) {
        throw DomainError("F2 lower parameter is a pole");
    }
    // Row m of the double series is A_m x^m 2F1(a+m, b2; c2; y). Inside the
    // region |x|+|y| < 1 this is the double series summed row by row; outside
    // it remains valid as long as the inner rows converge.
    const int rows = is_nonpositive_integer(b1) ? static_cast<int>(-b1) : kSeriesCap;
    long double coef = 1;
    long double sum = 0;
    long double prev_term = 0;
    int small_run = 0;
    for (int m = 0; m <= rows; ++m) {
        if (m > 0) coef *= (a + m - 1) * (b1 + m - 1) / ((c1 + m - 1) * m) * x;
        if (coef == 0) return sum;
        const long double term = coef * gauss_2f1_l(a + m, b2, c2, y);
        sum += term;
        if (m > 0 && prev_term != 0) {
            const long double r = std::fabs(term / prev_term);
            const bool small = r < 1 && std::fabs(term) * r / (1 - r) <= kSeriesTol * std::fabs(sum);
            small_run = small ? small_run + 1 : 0;
            if (small_run >= 3) return sum;
        }
        prev_term = term;
    }
    if (rows < kSeriesCap) return sum;
    throw NoConvergence("F2 outer series exceeded the term cap");
}

double appell_f2(double a, double b1, double b2, double c1, double c2, double x, double y)
{
    return static_cast<double>(appell_f2_l(a, b1, b2, c1, c2, x, y));
}

double bessel_i(int p, double x)
{
    p = std::abs(p);
    const long double h = static_cast<long double>(x) / 2;
    long double term = std::pow(h, p) / factorial_l(p);
    long double sum = term;
    const long double h2 = h * h;
    for (int k = 1; k < kSeriesCap; ++k) {
        term *= h2 / (static_cast<long double>(k) * (k + p));
        sum += term;
        if (term <= 1e-19L * sum) break;
    }
    return static_cast<double>(sum);
}

long double expint_scaled(int k, long double x)
{
    if (!(x > 0)) {
        if (x == 0 && k >= 2) return 1.0L / (k - 1);
        throw DomainError("expint_scaled requires x > 0");
    }
    if (k == 0) return 1 / x;
    constexpr long double eps = 1e-19L;
    if (x > 1) {
        // Modified Lentz evaluation of the continued fraction for e^x E_k(x).
        long double b = x + k;
        long double c = 1 / std::numeric_limits<long double>::min();
        long double d = 1 / b;
        long double h = d;
        for (int i = 1; i < 100000; ++i) {
            const long double an = -static_cast<long double>(i) * (k - 1 + i);
            b += 2;
            d = 1 / (an * d + b);
            c = b + an / c;
            const long double del = c * d;
            h *= del;
            if (std::fabs(del - 1) < eps) return h;
        }
        throw NoConvergence("exponential integral continued fraction");
    }
    long double ans = (k - 1 != 0) ? 1.0L / (k - 1) : -std::log(x) - kEulerGamma;
    long double fact = 1;
    for (int i = 1; i < kSeriesCap; ++i) {
        fact *= -x / i;
        long double del;
        if (i != k - 1) {
            del = -fact / (i - k + 1);
        } else {
            long double psi = -kEulerGamma;
            for (int ii = 1; ii <= k - 1; ++ii) psi += 1.0L / ii;
            del = fact * (-std::log(x) + psi);
        }
        ans += del;
        if (std::fabs(del) < std::fabs(ans) * eps) return ans * std::exp(x);
    }
    throw NoConvergence("exponential integral series");
}

void expint_scaled_range(int lo, long double x, std::span<long double> out)
{
    if (out.empty()) return;
    const int hi = lo + static_cast<int>(out.size()) - 1;
    // Forward steps e_{k+1} = (1 - x e_k) / k damp errors for k > x, backward
    // steps e_k = (1 - k e_{k+1}) / x damp them for k < x.
    const int pivot = std::clamp(static_cast<int>(std::lround(x)), lo, hi);
    out[pivot - lo] = expint_scaled(pivot, x);
    for (int k = pivot; k < hi; ++k) out[k + 1 - lo] = (1 - x * out[k - lo]) / k;
    for (int k = pivot - 1; k >= lo; --k) out[k - lo] = (1 - k * out[k + 1 - lo]) / x;
}

long double beta3_moment(int b, long double y)
{
    const long double beta = 2.0L / (static_cast<long double>(b) * (b + 1) * (b + 2));
    if (y == 0) return beta;
    // Kummer transform turns the alternating series into a positive one.
    long double term = 1;
    long double sum = 1;
    const long double c = b + 3;
    for (int k = 0; k < 100000; ++k) {
        term *= (3 + k) / ((c + k) * (k + 1)) * y;
        sum += term;
        if (k > y && term <= 1e-20L * sum) break;
    }
    return beta * std::exp(-y) * sum;
}

}  // namespace spiked::specfun
