#pragma once

#include <vector>

// Moment determinants of the weight mu_x(t) = t^a (1-t)^2 e^{-xt} on (0,1),
// shared by the largest-eigenvalue densities of the complex and singular models.
namespace spiked::detail {

// det[int t^{i+j-2} d mu_x]_{s x s}, i.e. the Hankel determinant of mu_x.
long double hankel_det(int a, int s, long double x);

// Discrete rule for the pencil integral
//   J(c) = int_0^1 det[t A^(a) - A^(a+1)]_{s x s} t^p (1-t)^2 e^{-xt} e^{cxt} dt,
// with A^(a)_{ij} = int t^{i+j-2} d mu_x. The determinant equals
// det(A^(a)) pi_s(t) with pi_s the monic orthogonal polynomial of mu_x, which
// is built by the discretized Stieltjes procedure instead of from raw moments.
// J(c) = sum_i weights[i] * exp(c * x * nodes[i]) for every c <= 1 - min_rate.
struct PencilRule {
    std::vector<long double> nodes;
    std::vector<long double> weights;

    long double operator()(long double c, long double x) const;
};

PencilRule pencil_rule(int a, int s, int p, long double x, long double min_rate);

}  // namespace spiked::detail
