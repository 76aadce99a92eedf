#include "spiked/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

#include "spiked/errors.hpp"
#include "spiked/numkit.hpp"
#include "spiked/parallel.hpp"
#include "spiked/spike_density.hpp"
#include "spiked/variant_density.hpp"

namespace spiked::density {

namespace {

// Cancellation noise of the largest-projection integral near z = 1 reaches
// 5e-9 at n = 8.
constexpr double kClipFloor = -1e-8;
constexpr double kCdfTolerance = 1e-8;
constexpr int kPanelNodes = 6;
constexpr std::size_t kMaxIntervals = 1 << 15;

double clip(double v, double z)
{
    if (v >= 0) return v;
    if (v > kClipFloor) return 0;
    if (std::isnan(v)) throw NegativeDensity("density is NaN at z = " + std::to_string(z));
    throw NegativeDensity("density " + std::to_string(v) + " at z = " + std::to_string(z));
}

template <class Eval>
Pdf wrap(std::shared_ptr<const Eval> eval)
{
    return [eval](double z) { return clip((*eval)(z), z); };
}

Pdf wrap_fn(double (*fn)(const SpikedModel&, double), const SpikedModel& model)
{
    return [fn, model](double z) { return clip(fn(model, z), z); };
}

bool same_model(const SpikedModel& a, const SpikedModel& b)
{
    return a.n == b.n && a.m == b.m && a.theta == b.theta && a.variant == b.variant;
}

// Small shared caches so repeated pdf()/cdf() calls reuse the set-up work.
template <class Value>
class Cache {
public:
    template <class Make>
    std::shared_ptr<const Value> get(Statistic stat, const SpikedModel& model, Make&& make)
    {
        {
            std::lock_guard lock(mutex_);
            for (const auto& e : entries_) {
                if (e.stat == stat && same_model(e.model, model)) return e.value;
            }
        }
        auto value = std::make_shared<const Value>(make());
        std::lock_guard lock(mutex_);
        if (entries_.size() >= 16) entries_.erase(entries_.begin());
        entries_.push_back({stat, model, value});
        return value;
    }

private:
    struct Entry {
        Statistic stat;
        SpikedModel model;
        std::shared_ptr<const Value> value;
    };
    std::mutex mutex_;
    std::vector<Entry> entries_;
};

Cache<Pdf>& pdf_cache()
{
    static Cache<Pdf> cache;
    return cache;
}

Cache<TabulatedCdf>& cdf_cache()
{
    static Cache<TabulatedCdf> cache;
    return cache;
}

}  // namespace

Support support_of(Statistic stat)
{
    if (stat == Statistic::nz1_asym) return {0.0, std::numeric_limits<double>::infinity()};
    return {0.0, 1.0};
}

void check_compatible(Statistic stat, const SpikedModel& model)
{
    if (stat == Statistic::nz1_asym) {
        if (!std::isfinite(model.theta) || model.theta < 0) {
            throw UnsupportedModel("theta must be finite and >= 0");
        }
        return;
    }
    model.validate();
    const Variant need = variant_of(stat);
    if (model.variant != need) {
        throw UnsupportedModel(std::string(to_string(stat)) + " needs the " + std::string(to_string(need)) +
                               " variant");
    }
    switch (stat) {
    case Statistic::z1:
    case Statistic::zn:
        if (model.n < 2) throw UnsupportedModel(std::string(to_string(stat)) + " needs n >= 2");
        if (stat == Statistic::zn && model.n >= 3 && model.theta < 1e-8) {
            throw ThetaZeroSingularity("zn needs theta > 0 for n >= 3");
        }
        break;
    case Statistic::z2:
        if (model.n < 3) throw UnsupportedModel("z2 needs n >= 3");
        if (model.theta < 1e-8) throw ThetaZeroSingularity("z2 needs theta > 0");
        break;
    case Statistic::w1_real:
    case Statistic::w2_real:
        if (model.n != 2) throw UnsupportedModel("real variant densities cover n = 2 only");
        break;
    case Statistic::y1_sing:
        if (model.m != 1 && model.n - model.m != 1) {
            throw UnsupportedModel("y1_sing needs m = 1 or n - m = 1");
        }
        if (model.m > 1 && model.theta < 1e-8) throw ThetaZeroSingularity("y1_sing with n - m = 1 needs theta > 0");
        break;
    case Statistic::yn_sing:
        if (model.n - model.m != 1 || model.m < 2) throw UnsupportedModel("yn_sing needs n - m = 1 and m >= 2");
        if (model.theta < 1e-8) throw ThetaZeroSingularity("yn_sing needs theta > 0");
        break;
    default:
        break;
    }
}

Pdf make_pdf(Statistic stat, const SpikedModel& model)
{
    check_compatible(stat, model);
    switch (stat) {
    case Statistic::z1:
        if (model.theta == 0 || model.n == 2 || model.alpha() <= 1) return wrap_fn(pdf_z1, model);
        return wrap(std::make_shared<const Z1Nested>(model));
    case Statistic::z2:
        return wrap(std::make_shared<const Z2Integral>(model));
    case Statistic::zn:
        if (model.n <= 4) return wrap(std::make_shared<const ZnClosed>(model));
        return wrap(std::make_shared<const ZnIntegral>(model));
    case Statistic::nz1_asym: {
        const double theta = model.theta;
        return [theta](double v) { return pdf_nz1_asymptotic(theta, v); };
    }
    case Statistic::w1_real:
        return wrap_fn(pdf_w1_real, model);
    case Statistic::w2_real:
        return wrap_fn(pdf_w2_real, model);
    case Statistic::y1_sing:
        return wrap_fn(pdf_y1_singular, model);
    case Statistic::yn_sing:
        return wrap(std::make_shared<const YnSingular>(model));
    }
    throw UnsupportedModel("unknown statistic");
}

double pdf(Statistic stat, const SpikedModel& model, double z)
{
    const auto eval = pdf_cache().get(stat, model, [&] { return make_pdf(stat, model); });
    return (*eval)(z);
}

double cdf(Statistic stat, const SpikedModel& model, double z)
{
    const auto table = cdf_cache().get(stat, model, [&] { return TabulatedCdf(stat, model); });
    return (*table)(z);
}

// ---------------------------------------------------------------- TabulatedCdf

TabulatedCdf::TabulatedCdf(Statistic stat, const SpikedModel& model)
{
    check_compatible(stat, model);
    theta_ = model.theta;
    if (stat == Statistic::nz1_asym) {
        exponential_ = true;
        return;
    }
    arcsine_ = is_arcsine_type(stat);
    reflect_ = stat == Statistic::w2_real;

    // Density in the tabulation variable u: z = u, or z = sin^2(u) with
    // dz = 2 sqrt(z (1 - z)) du for the arcsine-type statistics.
    numkit::RealFunction g;
    double hi = 1.0;
    if (arcsine_) {
        hi = std::numbers::pi / 2;
        g = [model](double u) {
            const double s = std::sin(u);
            return 2 * clip(w1_real_regular(model, s * s), u);
        };
    } else {
        g = make_pdf(stat, model);
    }

    const numkit::GaussRule& rule = numkit::gauss_legendre_unit(kPanelNodes);
    auto panel = [&](double a, double b) {
        double s = 0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * g(a + (b - a) * rule.nodes[i]);
        return s * (b - a);
    };

    struct Pending {
        double a, b, ga, gb, mass;
    };
    struct Done {
        double a, b, ga, gb, mass;
    };
    constexpr int kInitial = 32;
    std::vector<double> edge_g(kInitial + 1);
    parallel_for(kInitial + 1, [&](std::size_t i) { edge_g[i] = g(hi * static_cast<double>(i) / kInitial); });
    std::vector<Pending> pending(kInitial);
    parallel_for(kInitial, [&](std::size_t i) {
        const double a = hi * static_cast<double>(i) / kInitial;
        const double b = hi * static_cast<double>(i + 1) / kInitial;
        pending[i] = {a, b, edge_g[i], edge_g[i + 1], panel(a, b)};
    });

    std::vector<Done> done;
    while (!pending.empty()) {
        if (done.size() + pending.size() > kMaxIntervals) {
            throw QuadratureFailure("c.d.f. table exceeded its interval budget");
        }
        struct Split {
            double gm, left, right;
        };
        std::vector<Split> split(pending.size());
        parallel_for(pending.size(), [&](std::size_t i) {
            const Pending& p = pending[i];
            const double mid = 0.5 * (p.a + p.b);
            split[i] = {g(mid), panel(p.a, mid), panel(mid, p.b)};
        });
        std::vector<Pending> next;
        for (std::size_t i = 0; i < pending.size(); ++i) {
            const Pending& p = pending[i];
            const Split& s = split[i];
            const double h = p.b - p.a;
            // Cubic Hermite prediction of the mass left of the midpoint.
            const double hermite_left = 0.5 * p.mass + h * (p.ga - p.gb) / 8;
            const bool ok = std::fabs(s.left + s.right - p.mass) <= 0.1 * kCdfTolerance &&
                            std::fabs(hermite_left - s.left) <= kCdfTolerance;
            if (ok) {
                done.push_back({p.a, p.b, p.ga, p.gb, s.left + s.right});
                continue;
            }
            const double mid = 0.5 * (p.a + p.b);
            next.push_back({p.a, mid, p.ga, s.gm, s.left});
            next.push_back({mid, p.b, s.gm, p.gb, s.right});
        }
        pending = std::move(next);
    }
    std::sort(done.begin(), done.end(), [](const Done& x, const Done& y) { return x.a < y.a; });
    double cum = 0;
    for (const Done& d : done) {
        // Fritsch-Carlson limiter: keeps each cubic piece monotone.
        double da = d.ga;
        double db = d.gb;
        const double rise = std::max(d.mass, 0.0);
        if (rise == 0) {
            da = db = 0;
        } else {
            const double ra = da * (d.b - d.a) / rise;
            const double rb = db * (d.b - d.a) / rise;
            const double r2 = ra * ra + rb * rb;
            if (r2 > 9) {
                da *= 3 / std::sqrt(r2);
                db *= 3 / std::sqrt(r2);
            }
        }
        a_.push_back(d.a);
        b_.push_back(d.b);
        fa_.push_back(cum);
        da_.push_back(da);
        db_.push_back(db);
        cum += rise;
        fb_.push_back(cum);
    }
    mass_ = cum;
}

double TabulatedCdf::operator()(double z) const
{
    if (exponential_) return z <= 0 ? 0.0 : cdf_nz1_asymptotic(theta_, z);
    if (std::isnan(z)) throw DomainError("c.d.f. argument is NaN");
    if (reflect_) {
        if (z <= 0) return 0;
        if (z >= 1) return 1;
    }
    const double zz = reflect_ ? 1 - z : z;
    double value;
    if (zz <= 0) {
        value = 0;
    } else if (zz >= 1) {
        value = mass_;
    } else {
        const double u = arcsine_ ? std::asin(std::sqrt(zz)) : zz;
        const auto it = std::upper_bound(a_.begin(), a_.end(), u);
        const std::size_t k = it == a_.begin() ? 0 : static_cast<std::size_t>(it - a_.begin()) - 1;
        const double h = b_[k] - a_[k];
        const double s = std::clamp((u - a_[k]) / h, 0.0, 1.0);
        const double s2 = s * s;
        const double s3 = s2 * s;
        value = (2 * s3 - 3 * s2 + 1) * fa_[k] + (s3 - 2 * s2 + s) * h * da_[k] + (-2 * s3 + 3 * s2) * fb_[k] +
                (s3 - s2) * h * db_[k];
    }
    value = std::clamp(value, 0.0, 1.0);
    return reflect_ ? 1 - value : value;
}

// ---------------------------------------------------------------- grids

std::vector<double> make_grid(Statistic stat, int points, double z_min, double z_max)
{
    if (points < 2) throw DomainError("grid needs at least 2 points");
    if (!(z_min < z_max)) throw DomainError("grid needs z_min < z_max");
    const Support sup = support_of(stat);
    if (z_min < sup.lo || z_max > sup.hi) throw DomainError("grid leaves the support of the statistic");
    std::vector<double> grid(points);
    if (is_arcsine_type(stat)) {
        const double p0 = std::asin(std::sqrt(z_min));
        const double p1 = std::asin(std::sqrt(z_max));
        for (int i = 0; i < points; ++i) {
            const double s = std::sin(p0 + (p1 - p0) * (i + 0.5) / points);
            grid[i] = s * s;
        }
        return grid;
    }
    for (int i = 0; i < points; ++i) grid[i] = z_min + (z_max - z_min) * i / (points - 1);
    grid.front() = z_min;
    grid.back() = z_max;
    return grid;
}

DensityCurve evaluate_curve(Statistic stat, const SpikedModel& model, const std::vector<double>& grid,
                            bool cumulative)
{
    DensityCurve curve;
    curve.z = grid;
    curve.value.assign(grid.size(), 0.0);
    if (cumulative) {
        const TabulatedCdf table(stat, model);
        for (std::size_t i = 0; i < grid.size(); ++i) curve.value[i] = table(grid[i]);
    } else {
        const Pdf f = make_pdf(stat, model);
        parallel_for(grid.size(), [&](std::size_t i) { curve.value[i] = f(grid[i]); });
    }
    return curve;
}

}  // namespace spiked::density
