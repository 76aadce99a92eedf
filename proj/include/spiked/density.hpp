#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "spiked/model.hpp"

// Uniform entry points over every statistic: density evaluators, tabulated
// c.d.f.s, and the grids the command-line tool emits.
namespace spiked::density {

using Pdf = std::function<double(double)>;

// Support of a statistic: [0, 1], or [0, inf) for nz1_asym.
struct Support {
    double lo = 0.0;
    double hi = 1.0;
};
Support support_of(Statistic stat);

// Checks that the model variant and dimensions suit the statistic; throws
// UnsupportedModel or ThetaZeroSingularity with the violated precondition.
void check_compatible(Statistic stat, const SpikedModel& model);

// Density evaluator with all z-independent work done up front. Values in
// (-1e-8, 0) are rounding noise and are clipped to 0; anything more negative
// raises NegativeDensity. Safe to call concurrently.
Pdf make_pdf(Statistic stat, const SpikedModel& model);

double pdf(Statistic stat, const SpikedModel& model, double z);
double cdf(Statistic stat, const SpikedModel& model, double z);

// Piecewise cubic Hermite c.d.f. built from adaptive Gauss-Legendre panel
// integrals of the density. Statistics with arcsine endpoint factors are
// tabulated in phi, z = sin^2(phi), where the density is bounded. Pieces are
// limited to stay monotone; the interpolation error is about 1e-8 absolute.
class TabulatedCdf {
public:
    TabulatedCdf(Statistic stat, const SpikedModel& model);
    double operator()(double z) const;

    std::size_t interval_count() const { return a_.size(); }
    // Total probability before normalization; 1 up to quadrature error.
    double total_mass() const { return mass_; }

private:
    bool arcsine_ = false;
    bool reflect_ = false;  // tabulated in 1 - z
    std::vector<double> a_;
    std::vector<double> b_;
    std::vector<double> fa_;  // c.d.f. at a
    std::vector<double> da_;  // density in the tabulation variable at a
    std::vector<double> db_;
    std::vector<double> fb_;
    double mass_ = 1.0;
    double theta_ = 0.0;
    bool exponential_ = false;
};

// Grid points: uniform on [z_min, z_max] including both ends. Arcsine-type
// statistics use the centers of equal cells in phi, z = sin^2(phi), so the
// grid concentrates near the endpoints without landing on a singularity.
std::vector<double> make_grid(Statistic stat, int points, double z_min, double z_max);

struct DensityCurve {
    std::vector<double> z;
    std::vector<double> value;
};

// Evaluates pdf (cumulative = false) or cdf on the grid; grid points are
// processed in parallel with results stored by index.
DensityCurve evaluate_curve(Statistic stat, const SpikedModel& model, const std::vector<double>& grid,
                            bool cumulative);

}  // namespace spiked::density
