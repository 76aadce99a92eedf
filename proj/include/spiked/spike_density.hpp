#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "spiked/model.hpp"

// Densities of Z_l = |v^H u_l|^2 for the complex single-spiked Wishart
// matrix, l in {1, 2, n}, plus the identity oracles behind them.
namespace spiked::density {

// Smallest-eigenvalue projection. Dispatches to the Haar law at theta = 0,
// the n = 2 finite sum, the alpha in {0, 1} closed forms, or the nested sum.
double pdf_z1(const SpikedModel& model, double z);

// (nested-sum value, closed-form value) for alpha in {0, 1}, n >= 3.
std::pair<double, double> pdf_z1_general_vs_fastpath(const SpikedModel& model, double z);

// Large-n limit of n * Z1: Exp(1 + theta).
double pdf_nz1_asymptotic(double theta, double v);
double cdf_nz1_asymptotic(double theta, double v);

// Largest-eigenvalue projection. Closed forms for n <= 4, otherwise the
// single x-integral with an analytic inner t-integral.
double pdf_zn(const SpikedModel& model, double z);
double pdf_zn_closed(const SpikedModel& model, double z);

// Second central differences of pdf_zn on 1001 points are >= -1e-8.
bool check_zn_convexity_n2(const SpikedModel& model);

// Second-smallest-eigenvalue projection (double integral over x and y).
double pdf_z2(const SpikedModel& model, double z);

// (brute-force integral, closed determinant) for the shifted-moment identity
// T_n(y, x) = int prod (y - z_j)(x - z_j)^alpha z_j^2 e^{-z_j} Delta^2 dz.
std::pair<double, double> mehta_identity_check(int n, int alpha, double y, double x);

// int_0^inf e^{-x} det[I_{j-i+2}(2 sqrt x)]_{alpha x alpha} dx, which equals 1.
double kalpha_normalization_check(int alpha);

// Evaluators that hoist the z-independent work out of repeated calls. All are
// immutable after construction and safe to call concurrently.

// Nested-sum form for n >= 3 (valid at theta = 0 as well).
class Z1Nested {
public:
    explicit Z1Nested(const SpikedModel& model);
    double operator()(double z) const;

private:
    int n_;
    int alpha_;
    long double beta_;
    std::vector<long double> g_;  // first-column cofactor sums
};

// Closed forms for n in {2, 3, 4}.
class ZnClosed {
public:
    explicit ZnClosed(const SpikedModel& model);
    double operator()(double z) const;

private:
    double eval_n2(long double z) const;
    double eval_n3(long double z) const;
    double eval_n4(long double z) const;
    long double g_term(int N, int b, int c, long double z) const;

    int n_;
    int alpha_;
    long double beta_;
    // z-independent F2 values at x = y = 1/(4 - beta), keyed by (N, b, c, k).
    std::vector<long double> f2_fixed_;
    // Power-series coefficients in x of F2(., 3, 3; ., .; x, x), keyed by (N, b, c).
    std::vector<std::vector<long double>> head_series_;
    std::size_t f2_index(int N, int b, int c, int k) const;
};

class ZnIntegral {
public:
    explicit ZnIntegral(const SpikedModel& model);
    double operator()(double z) const;

    std::size_t node_count() const { return x_.size(); }

private:
    long double integrand(long double x, const std::vector<long double>& t,
                          const std::vector<long double>& w, long double z) const;

    int n_;
    int alpha_;
    long double beta_;
    long double log_prefactor_;
    int x_power_;
    std::vector<long double> x_;
    std::vector<long double> w_;
    // Per x node: t nodes and z-free weights of the inner pencil integral.
    std::vector<std::vector<long double>> t_;
    std::vector<std::vector<long double>> tw_;
};

class Z2Integral {
public:
    // y_nodes: Gauss-Legendre order of the inner y rule.
    explicit Z2Integral(const SpikedModel& model, int y_nodes = 32);
    double operator()(double z) const;

    std::size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        long double weight;  // quadrature weight times the z-free factors
        long double d;       // x * y
        long double v_term;  // z-free part of the V determinant contribution
        std::vector<long double> q;  // U-part coefficients, index k = 0..K
    };
    Node make_node(long double x, long double y, long double weight) const;
    long double node_value(const Node& node, long double z) const;

    int n_;
    int alpha_;
    long double beta_;
    long double prefactor_;
    int y_nodes_;
    std::vector<std::vector<long double>> poly_;  // w^2 L^(2)_{N_i}(w) coefficients
    std::vector<Node> nodes_;
};

}  // namespace spiked::density
