#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace spiked::numkit {

// Determinant as sign * exp(log_magnitude); sign is 0 for a singular matrix.
template <class T>
struct BasicScaledDeterminant {
    int sign = 1;
    T log_magnitude = 0;

    T value() const { return sign == 0 ? T(0) : sign * std::exp(log_magnitude); }
};

using ScaledDeterminant = BasicScaledDeterminant<double>;

// LU with partial pivoting on a row-major d x d matrix (taken by value).
template <class T>
BasicScaledDeterminant<T> scaled_det(std::vector<T> a, std::size_t d)
{
    BasicScaledDeterminant<T> out;
    for (std::size_t k = 0; k < d; ++k) {
        std::size_t piv = k;
        T best = std::fabs(a[k * d + k]);
        for (std::size_t r = k + 1; r < d; ++r) {
            const T v = std::fabs(a[r * d + k]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0) return {0, 0};
        if (piv != k) {
            for (std::size_t c = 0; c < d; ++c) std::swap(a[k * d + c], a[piv * d + c]);
            out.sign = -out.sign;
        }
        const T pivot = a[k * d + k];
        if (pivot < 0) out.sign = -out.sign;
        out.log_magnitude += std::log(std::fabs(pivot));
        for (std::size_t r = k + 1; r < d; ++r) {
            const T f = a[r * d + k] / pivot;
            if (f == 0) continue;
            for (std::size_t c = k + 1; c < d; ++c) a[r * d + c] -= f * a[k * d + c];
        }
    }
    return out;
}

// Plain determinant for small, well-scaled matrices.
template <class T>
T det(std::vector<T> a, std::size_t d)
{
    T out = 1;
    for (std::size_t k = 0; k < d; ++k) {
        std::size_t piv = k;
        T best = std::fabs(a[k * d + k]);
        for (std::size_t r = k + 1; r < d; ++r) {
            const T v = std::fabs(a[r * d + k]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0) return 0;
        if (piv != k) {
            for (std::size_t c = 0; c < d; ++c) std::swap(a[k * d + c], a[piv * d + c]);
            out = -out;
        }
        const T pivot = a[k * d + k];
        out *= pivot;
        for (std::size_t r = k + 1; r < d; ++r) {
            const T f = a[r * d + k] / pivot;
            if (f == 0) continue;
            for (std::size_t c = k + 1; c < d; ++c) a[r * d + c] -= f * a[k * d + c];
        }
    }
    return out;
}

// Solves the d x d row-major system a x = b in place of b (partial pivoting).
template <class T>
void solve(std::vector<T> a, std::vector<T>& b, std::size_t d)
{
    for (std::size_t k = 0; k < d; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < d; ++r) {
            if (std::fabs(a[r * d + k]) > std::fabs(a[piv * d + k])) piv = r;
        }
        if (piv != k) {
            for (std::size_t c = 0; c < d; ++c) std::swap(a[k * d + c], a[piv * d + c]);
            std::swap(b[k], b[piv]);
        }
        for (std::size_t r = k + 1; r < d; ++r) {
            const T f = a[r * d + k] / a[k * d + k];
            for (std::size_t c = k; c < d; ++c) a[r * d + c] -= f * a[k * d + c];
            b[r] -= f * b[k];
        }
    }
    for (std::size_t k = d; k-- > 0;) {
        T s = b[k];
        for (std::size_t c = k + 1; c < d; ++c) s -= a[k * d + c] * b[c];
        b[k] = s / a[k * d + k];
    }
}

ScaledDeterminant scaled_det(const std::vector<double>& a, std::size_t d);

struct QuadratureSpec {
    int unit_nodes = 128;
    double tail_epsilon = 1e-12;
    // Dyadic refinement toward a t^(-1/2) endpoint needs about 70 panels at 1e-12.
    int max_panels = 128;
    double panel_growth = 1.5;

    void validate() const;
};

// Gauss-Legendre rule mapped to [0,1]. Rules are cached per node count.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre_unit(int count);

// Gauss-Laguerre rule for the weight x^alpha e^{-x} on (0, inf).
GaussRule gauss_laguerre(int count, double alpha);

using RealFunction = std::function<double(double)>;

double integrate(const RealFunction& f, double a, double b, const QuadratureSpec& spec = {});
double integrate_unit(const RealFunction& f, const QuadratureSpec& spec = {});
double integrate_halfline(const RealFunction& f, double decay_rate,
                          const QuadratureSpec& spec = {});

// A fixed panel layout on [0, x_max] with a Gauss-Legendre order per panel.
// Built once from a vector-valued probe of the integrand family, then reused
// so results do not depend on which members are evaluated together.
struct Panel {
    double a;
    double b;
    int nodes;
};

struct PanelPlan {
    std::vector<Panel> panels;

    // Flattened absolute nodes and weights.
    std::vector<double> nodes() const;
    std::vector<double> weights() const;
};

using VectorFunction = std::function<void(double, std::span<double>)>;

PanelPlan plan_halfline(const VectorFunction& f, std::size_t dim, double decay_rate,
                        const QuadratureSpec& spec);

struct HistogramBin {
    double left;
    double right;
    double density;
};

struct QQPoint {
    double level;
    double theoretical;
    double empirical;
};

struct GofReport {
    double ks_statistic = 0;
    std::size_t sample_count = 0;
    double critical_value_1pct = 0;
    bool passed = false;
    std::vector<HistogramBin> histogram;
    std::vector<QQPoint> qq;
};

// Two-sided Kolmogorov-Smirnov distance against a model c.d.f. on
// [support_lo, support_hi] (support_hi may be +inf).
double ks_distance(std::vector<double> samples, const RealFunction& model_cdf);

GofReport ks_test(std::vector<double> samples, const RealFunction& model_cdf,
                  double support_lo = 0.0, double support_hi = 1.0);

double critical_value_1pct(std::size_t sample_count);

// Inverse of a nondecreasing c.d.f. by bisection.
double quantile(const RealFunction& cdf, double p, double lo, double hi);

}  // namespace spiked::numkit
