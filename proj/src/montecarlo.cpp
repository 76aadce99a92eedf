#include "spiked/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "spiked/errors.hpp"
#include "spiked/parallel.hpp"

namespace spiked::mc {

namespace {

constexpr int kMaxSweeps = 60;
constexpr double kOffDiagonalTol = 1e-13;
constexpr double kResidualTol = 1e-9;
// Beyond this size the Householder tridiagonal solver is much faster than
// Jacobi sweeps and meets the same residual bounds.
constexpr int kJacobiMaxDim = 12;

std::uint64_t splitmix(std::uint64_t& x)
{
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double frobenius(const std::vector<Complex>& w)
{
    double s = 0;
    for (const Complex& c : w) s += std::norm(c);
    return std::sqrt(s);
}

void sort_ascending(EigenSystem& es)
{
    const int d = es.dim;
    const int r = static_cast<int>(es.eigenvalues.size());
    std::vector<int> order(r);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return es.eigenvalues[a] < es.eigenvalues[b]; });
    EigenSystem out;
    out.dim = d;
    for (int l : order) {
        out.eigenvalues.push_back(es.eigenvalues[l]);
        const auto v = es.vector(l);
        out.vectors.insert(out.vectors.end(), v.begin(), v.end());
    }
    es = std::move(out);
}

EigenSystem eigh_householder(const std::vector<Complex>& w, int d)
{
    Eigen::MatrixXcd a(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) a(i, j) = w[static_cast<std::size_t>(i) * d + j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a);
    if (solver.info() != Eigen::Success) throw EigensolverFailure("tridiagonal QR did not converge");
    EigenSystem es;
    es.dim = d;
    for (int l = 0; l < d; ++l) {
        es.eigenvalues.push_back(solver.eigenvalues()(l));
        for (int i = 0; i < d; ++i) es.vectors.push_back(solver.eigenvectors()(i, l));
    }
    return es;
}

EigenSystem solve(std::vector<Complex> w, int d)
{
    return d > kJacobiMaxDim ? eigh_householder(w, d) : eigh(std::move(w), d);
}

}  // namespace

Stream::Stream(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t s = seed;
    std::uint64_t i = index ^ 0xd1b54a32d192ed03ULL;
    state_ = splitmix(s) ^ splitmix(i);
}

std::uint64_t Stream::next()
{
    return splitmix(state_);
}

double Stream::uniform()
{
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
}

double Stream::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
}

SpikeVector make_spike(int n, std::uint64_t seed, SpikeStyle style, bool real)
{
    if (n < 1) throw InvalidCount("spike dimension must be at least 1");
    SpikeVector v;
    v.construction_seed = seed;
    v.entries.assign(n, Complex(0, 0));
    if (style == SpikeStyle::first_basis) {
        v.entries[0] = 1;
        return v;
    }
    Stream rng(seed, ~0ULL);
    double norm = 0;
    for (Complex& c : v.entries) {
        c = real ? Complex(rng.normal(), 0) : Complex(rng.normal(), rng.normal());
        norm += std::norm(c);
    }
    norm = std::sqrt(norm);
    for (Complex& c : v.entries) c /= norm;
    return v;
}

EigenSystem eigh(std::vector<Complex> a, int d)
{
    const auto at = [&](int i, int j) -> Complex& { return a[static_cast<std::size_t>(i) * d + j]; };
    EigenSystem es;
    es.dim = d;
    es.vectors.assign(static_cast<std::size_t>(d) * d, Complex(0, 0));
    // Column-major accumulator: V(i, l) = vectors[l * d + i].
    const auto vec = [&](int i, int l) -> Complex& { return es.vectors[static_cast<std::size_t>(l) * d + i]; };
    for (int i = 0; i < d; ++i) vec(i, i) = 1;

    const double target = kOffDiagonalTol * frobenius(a);
    int sweep = 0;
    for (;; ++sweep) {
        double off = 0;
        for (int p = 0; p < d; ++p) {
            for (int q = p + 1; q < d; ++q) off += 2 * std::norm(at(p, q));
        }
        if (std::sqrt(off) <= target) break;
        if (sweep == kMaxSweeps) throw EigensolverFailure("Jacobi did not converge in 60 sweeps");
        for (int p = 0; p < d; ++p) {
            for (int q = p + 1; q < d; ++q) {
                const double mag = std::abs(at(p, q));
                if (mag == 0) continue;
                // Phase e^{i phi} makes the (p, q) entry real, then a real
                // rotation annihilates it.
                const Complex phase = at(p, q) / mag;
                const double app = at(p, p).real();
                const double aqq = at(q, q).real();
                const double tau = (aqq - app) / (2 * mag);
                const double t = (tau >= 0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1 + tau * tau));
                const double c = 1 / std::sqrt(1 + t * t);
                const double s = t * c;
                const Complex sp = s * std::conj(phase);
                const Complex cp = c * std::conj(phase);
                for (int k = 0; k < d; ++k) {
                    const Complex akp = at(k, p);
                    const Complex akq = at(k, q);
                    at(k, p) = c * akp - sp * akq;
                    at(k, q) = s * akp + cp * akq;
                }
                for (int k = 0; k < d; ++k) {
                    const Complex apk = at(p, k);
                    const Complex aqk = at(q, k);
                    at(p, k) = c * apk - std::conj(sp) * aqk;
                    at(q, k) = s * apk + std::conj(cp) * aqk;
                }
                at(p, q) = 0;
                at(q, p) = 0;
                at(p, p) = at(p, p).real();
                at(q, q) = at(q, q).real();
                for (int k = 0; k < d; ++k) {
                    const Complex vkp = vec(k, p);
                    const Complex vkq = vec(k, q);
                    vec(k, p) = c * vkp - sp * vkq;
                    vec(k, q) = s * vkp + cp * vkq;
                }
            }
        }
    }
    for (int i = 0; i < d; ++i) es.eigenvalues.push_back(at(i, i).real());
    sort_ascending(es);
    return es;
}

double max_residual(const std::vector<Complex>& w, const EigenSystem& es)
{
    const int d = es.dim;
    const double scale = frobenius(w);
    double worst = 0;
    for (std::size_t l = 0; l < es.eigenvalues.size(); ++l) {
        const auto u = es.vector(static_cast<int>(l));
        double r = 0;
        for (int i = 0; i < d; ++i) {
            Complex s = -es.eigenvalues[l] * u[i];
            for (int j = 0; j < d; ++j) s += w[static_cast<std::size_t>(i) * d + j] * u[j];
            r += std::norm(s);
        }
        worst = std::max(worst, std::sqrt(r));
    }
    return scale > 0 ? worst / scale : worst;
}

std::vector<double> draw_projections(const SpikedModel& model, const SpikeVector& spike, std::uint64_t seed,
                                     std::uint64_t index)
{
    const int n = model.n;
    const int m = model.m;
    const auto& v = spike.entries;
    Stream rng(seed, index);
    const bool real = model.variant == Variant::real;
    const double scale = real ? 1.0 : std::sqrt(0.5);

    // X = (I + (sqrt(1 + theta) - 1) v v^H) G, row-major n x m.
    std::vector<Complex> x(static_cast<std::size_t>(n) * m);
    for (Complex& g : x) {
        g = real ? Complex(rng.normal(), 0) : Complex(rng.normal(), rng.normal()) * scale;
    }
    const double lift = std::sqrt(1 + model.theta) - 1;
    if (lift != 0) {
        for (int j = 0; j < m; ++j) {
            Complex vg = 0;
            for (int i = 0; i < n; ++i) vg += std::conj(v[i]) * x[static_cast<std::size_t>(i) * m + j];
            for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i) * m + j] += lift * v[i] * vg;
        }
    }

    std::vector<double> out;
    if (model.variant != Variant::singular) {
        // W = X X^H.
        std::vector<Complex> w(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i) {
            for (int k = i; k < n; ++k) {
                Complex s = 0;
                for (int j = 0; j < m; ++j) {
                    s += x[static_cast<std::size_t>(i) * m + j] * std::conj(x[static_cast<std::size_t>(k) * m + j]);
                }
                w[static_cast<std::size_t>(i) * n + k] = s;
                w[static_cast<std::size_t>(k) * n + i] = std::conj(s);
            }
        }
        const EigenSystem es = solve(w, n);
        if (max_residual(w, es) > kResidualTol) throw EigensolverFailure("eigenpair residual above 1e-9 ||W||");
        for (int l = 0; l < n; ++l) {
            const auto u = es.vector(l);
            Complex p = 0;
            for (int i = 0; i < n; ++i) p += std::conj(v[i]) * u[i];
            out.push_back(std::norm(p));
        }
        return out;
    }

    // Rank m: u_l = X y_l / sqrt(lambda_l) with (lambda_l, y_l) from X^H X.
    std::vector<Complex> gram(static_cast<std::size_t>(m) * m);
    for (int a = 0; a < m; ++a) {
        for (int b = a; b < m; ++b) {
            Complex s = 0;
            for (int i = 0; i < n; ++i) {
                s += std::conj(x[static_cast<std::size_t>(i) * m + a]) * x[static_cast<std::size_t>(i) * m + b];
            }
            gram[static_cast<std::size_t>(a) * m + b] = s;
            gram[static_cast<std::size_t>(b) * m + a] = std::conj(s);
        }
    }
    const EigenSystem es = solve(gram, m);
    if (max_residual(gram, es) > kResidualTol) throw EigensolverFailure("eigenpair residual above 1e-9 ||W||");
    std::vector<Complex> vx(m, Complex(0, 0));
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < n; ++i) vx[j] += std::conj(v[i]) * x[static_cast<std::size_t>(i) * m + j];
    }
    for (int l = 0; l < m; ++l) {
        const auto y = es.vector(l);
        Complex p = 0;
        for (int j = 0; j < m; ++j) p += vx[j] * y[j];
        const double lambda = es.eigenvalues[l];
        if (!(lambda > 0)) throw EigensolverFailure("non-positive eigenvalue in a rank-m draw");
        out.push_back(std::norm(p) / lambda);
    }
    return out;
}

SampleBatch sample_wishart(Statistic stat, const SpikedModel& model, const SpikeVector& spike, std::uint64_t seed,
                           std::size_t count, unsigned workers)
{
    if (count < 1) throw InvalidCount("sample count must be at least 1");
    model.validate();
    if (variant_of(stat) != model.variant) {
        throw UnsupportedModel("statistic " + std::string(to_string(stat)) + " needs the " +
                               std::string(to_string(variant_of(stat))) + " variant");
    }
    if (static_cast<int>(spike.entries.size()) != model.n) throw UnsupportedModel("spike length must equal n");
    const int rank = model.variant == Variant::singular ? model.m : model.n;
    int slot = 0;
    double factor = 1;
    switch (stat) {
    case Statistic::z1:
    case Statistic::w1_real:
    case Statistic::y1_sing:
        slot = 0;
        break;
    case Statistic::nz1_asym:
        slot = 0;
        factor = model.n;
        break;
    case Statistic::z2:
        slot = 1;
        break;
    case Statistic::zn:
    case Statistic::w2_real:
    case Statistic::yn_sing:
        slot = rank - 1;
        break;
    }
    if (slot >= rank) throw UnsupportedModel("statistic needs at least two eigenvalues");

    SampleBatch batch;
    batch.statistic = stat;
    batch.model = model;
    batch.seed = seed;
    batch.values.resize(count);
    parallel_for(
        count,
        [&](std::size_t i) {
            const auto p = draw_projections(model, spike, seed, i);
            batch.values[i] = std::clamp(p[slot], 0.0, 1.0) * factor;
        },
        workers);
    return batch;
}

}  // namespace spiked::mc
