#pragma once

#include <span>

// Special functions used by the eigenvector-projection densities.
// Double-precision entry points wrap extended-precision kernels (suffix _l)
// that the density code calls directly to keep cancellation under control.

namespace spiked::specfun {

// Rising factorial a(a+1)...(a+j-1). Exactly zero for a = -M when j > M.
double pochhammer(double a, int j);

// 1/Gamma(x), exactly zero at the poles x = 0, -1, -2, ...
double recip_gamma(double x);

// log(k!) for k >= 0.
double log_factorial(int k);
long double factorial_l(int k);

// Generalized Laguerre polynomial L^(rho)_M(z). Negative degree yields 0,
// which is the convention needed when derivative columns run past the degree.
double laguerre(int rho, int M, double z);
long double laguerre_l(int rho, int M, long double z);

// Gauss hypergeometric 2F1(a,b;c;x).
double gauss_2f1(double a, double b, double c, double x);
long double gauss_2f1_l(long double a, long double b, long double c, long double x);

// Confluent hypergeometric 1F1(a;c;x).
double kummer_1f1(double a, double c, double x);
long double kummer_1f1_l(long double a, long double c, long double x);

// Tricomi confluent hypergeometric U(a;c;x) from its Laplace-type integral.
double tricomi_u(double a, double c, double x);

// Appell F2(a; b1, b2; c1, c2; x, y).
double appell_f2(double a, double b1, double b2, double c1, double c2, double x,
                 double y);
long double appell_f2_l(long double a, long double b1, long double b2, long double c1,
                        long double c2, long double x, long double y);

// Modified Bessel function of the first kind, integer order.
double bessel_i(int p, double x);

// e^x E_k(x) for x > 0 (generalized exponential integral, scaled).
long double expint_scaled(int k, long double x);

// Fills out[j] = e^x E_{lo+j}(x) for j < out.size(), lo >= 1, x > 0. One
// direct evaluation near k = x, then recurrences run away from it in the
// stable direction.
void expint_scaled_range(int lo, long double x, std::span<long double> out);

// Integral over (0,1) of t^(b-1) (1-t)^2 e^(-y t), b >= 1, y >= 0.
long double beta3_moment(int b, long double y);

}  // namespace spiked::specfun
