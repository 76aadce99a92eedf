#pragma once

#include <vector>

#include "spiked/model.hpp"

// Projection densities for the real n = 2 model and the singular (m < n)
// complex model.
namespace spiked::density {

// Real variant, n = 2: smallest and largest eigenvector projections on (0, 1).
double pdf_w1_real(const SpikedModel& model, double z);
double pdf_w2_real(const SpikedModel& model, double z);

// pdf_w1_real(z) * sqrt(z (1 - z)), bounded on [0, 1]. With z = sin^2(phi)
// the probability element is 2 * w1_real_regular(z) dphi.
double w1_real_regular(const SpikedModel& model, double z);

// Singular variant, smallest nonzero eigenvalue: m = 1 or n - m = 1.
double pdf_y1_singular(const SpikedModel& model, double z);

// Singular variant, largest eigenvalue, n - m = 1.
double pdf_yn_singular(const SpikedModel& model, double z);

// Single x-integral behind pdf_yn_singular with the z-free work hoisted.
class YnSingular {
public:
    explicit YnSingular(const SpikedModel& model);
    double operator()(double z) const;

    std::size_t node_count() const { return x_.size(); }

private:
    long double integrand(long double x, const std::vector<long double>& t,
                          const std::vector<long double>& w, long double hankel,
                          long double z) const;

    int m_;
    long double beta_;
    long double log_prefactor_;
    std::vector<long double> x_;
    std::vector<long double> w_;
    std::vector<long double> hankel_;  // (-1)^{m-1} det A^(0), per node
    std::vector<std::vector<long double>> t_;
    std::vector<std::vector<long double>> tw_;
};

}  // namespace spiked::density
