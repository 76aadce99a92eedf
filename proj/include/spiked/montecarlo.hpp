#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spiked/model.hpp"

// Ground-truth sampler: draws spiked Wishart matrices, diagonalizes them and
// records squared projections of the spike onto the sample eigenvectors.
namespace spiked::mc {

using Complex = std::complex<double>;

// Counter-based generator: the stream for draw i depends only on (seed, i),
// so results are identical for any number of workers.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t index);
    std::uint64_t next();
    double uniform();  // in (0, 1]
    double normal();   // standard normal

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct SpikeVector {
    std::vector<Complex> entries;
    std::uint64_t construction_seed = 0;
};

enum class SpikeStyle { first_basis, random };

// Unit spike: e1, or a normalized Gaussian vector (real-valued if `real`).
SpikeVector make_spike(int n, std::uint64_t seed, SpikeStyle style, bool real = false);

// Eigenvalues ascending; eigenvector l occupies vectors[l * dim, (l + 1) * dim).
struct EigenSystem {
    int dim = 0;
    std::vector<double> eigenvalues;
    std::vector<Complex> vectors;

    std::span<const Complex> vector(int l) const
    {
        return {vectors.data() + static_cast<std::size_t>(l) * dim, static_cast<std::size_t>(dim)};
    }
};

// Cyclic complex Jacobi on a row-major Hermitian matrix. Stops when the
// off-diagonal Frobenius norm is below 1e-13 ||W||_F; throws
// EigensolverFailure after 60 sweeps.
EigenSystem eigh(std::vector<Complex> w, int dim);

// Largest of ||W u_l - lambda_l u_l|| / ||W||_F over l.
double max_residual(const std::vector<Complex>& w, const EigenSystem& es);

// All squared projections |v^H u_l|^2 of one draw, ascending in lambda_l.
// The singular variant yields the m projections on the positive eigenvalues.
std::vector<double> draw_projections(const SpikedModel& model, const SpikeVector& spike,
                                     std::uint64_t seed, std::uint64_t index);

struct SampleBatch {
    Statistic statistic = Statistic::z1;
    SpikedModel model;
    std::uint64_t seed = 0;
    std::vector<double> values;  // n * Z1 for nz1_asym, in [0, 1] otherwise
};

// Draws `count` samples of the statistic. Draw i uses Stream(seed, i) and its
// value lands in slot i. workers = 0 uses worker_count().
SampleBatch sample_wishart(Statistic stat, const SpikedModel& model, const SpikeVector& spike,
                           std::uint64_t seed, std::size_t count, unsigned workers = 0);

}  // namespace spiked::mc
