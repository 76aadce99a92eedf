#include "spiked/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "spiked/errors.hpp"

namespace spiked::numkit {

ScaledDeterminant scaled_det(const std::vector<double>& a, std::size_t d)
{
    if (a.size() != d * d) throw DomainError("scaled_det: matrix size does not match dimension");
    return scaled_det<double>(a, d);
}

void QuadratureSpec::validate() const
{
    if (unit_nodes < 8) throw DomainError("QuadratureSpec.unit_nodes must be at least 8");
    if (!(tail_epsilon > 0)) throw DomainError("QuadratureSpec.tail_epsilon must be positive");
    if (max_panels < 1) throw DomainError("QuadratureSpec.max_panels must be positive");
    if (!(panel_growth >= 1)) throw DomainError("QuadratureSpec.panel_growth must be >= 1");
}

namespace {

GaussRule compute_gauss_legendre(int count)
{
    GaussRule rule;
    rule.nodes.resize(count);
    rule.weights.resize(count);
    const int half = (count + 1) / 2;
    for (int i = 0; i < half; ++i) {
        long double x = std::cos(std::numbers::pi_v<long double> * (i + 0.75L) / (count + 0.5L));
        long double dp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            long double p0 = 1;
            long double p1 = x;
            for (int k = 2; k <= count; ++k) {
                const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (count == 1) p0 = 1;
            dp = count * (x * p1 - p0) / (x * x - 1);
            const long double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-19L) break;
        }
        const long double w = 2 / ((1 - x * x) * dp * dp);
        // Map [-1,1] to [0,1]; node i is the largest-first root.
        rule.nodes[i] = static_cast<double>((1 - x) / 2);
        rule.nodes[count - 1 - i] = static_cast<double>((1 + x) / 2);
        rule.weights[i] = static_cast<double>(w / 2);
        rule.weights[count - 1 - i] = static_cast<double>(w / 2);
    }
    return rule;
}

double apply_rule(const GaussRule& rule, const RealFunction& f, double a, double b)
{
    const double h = b - a;
    double sum = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(a + h * rule.nodes[i]);
    return sum * h;
}

struct Adaptive {
    const RealFunction& f;
    const GaussRule& full;
    const GaussRule& half;
    const QuadratureSpec& spec;
    double abs_floor;
    double estimate = 0;
    int accepted = 0;

    double run(double a, double b, double qn, double qh, int depth)
    {
        if (std::fabs(qn - qh) <= std::max(spec.tail_epsilon * std::fabs(estimate), abs_floor)) {
            if (++accepted > spec.max_panels) {
                throw QuadratureFailure("integrate: max_panels reached without convergence");
            }
            return qn;
        }
        if (depth > 200) throw QuadratureFailure("integrate: subdivision depth exhausted");
        const double m = 0.5 * (a + b);
        const double ln = apply_rule(full, f, a, m);
        const double lh = apply_rule(half, f, a, m);
        const double rn = apply_rule(full, f, m, b);
        const double rh = apply_rule(half, f, m, b);
        estimate += ln + rn - qn;
        const double left = run(a, m, ln, lh, depth + 1);
        return left + run(m, b, rn, rh, depth + 1);
    }
};

double integrate_with_floor(const RealFunction& f, double a, double b, const QuadratureSpec& spec,
                            double abs_floor)
{
    spec.validate();
    if (a == b) return 0;
    const GaussRule& full = gauss_legendre_unit(spec.unit_nodes);
    const GaussRule& half = gauss_legendre_unit(spec.unit_nodes / 2);
    Adaptive ad{f, full, half, spec, abs_floor};
    const double qn = apply_rule(full, f, a, b);
    const double qh = apply_rule(half, f, a, b);
    ad.estimate = qn;
    return ad.run(a, b, qn, qh, 0);
}

// Local exponential decay rate of |f| just below x, or -1 if |f| is not decreasing.
double local_decay(double f_left, double f_right, double delta)
{
    if (f_right == 0) return std::numeric_limits<double>::infinity();
    if (f_left == 0) return -1;
    const double s = (std::log(std::fabs(f_left)) - std::log(std::fabs(f_right))) / delta;
    return s > 0 ? s : -1;
}

}  // namespace

const GaussRule& gauss_legendre_unit(int count)
{
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(count);
    if (it == cache.end()) it = cache.emplace(count, compute_gauss_legendre(count)).first;
    return it->second;
}

GaussRule gauss_laguerre(int count, double alpha)
{
    GaussRule rule;
    rule.nodes.resize(count);
    rule.weights.resize(count);
    long double z = 0;
    for (int i = 0; i < count; ++i) {
        // Initial guesses follow the usual asymptotic pattern for Laguerre zeros.
        if (i == 0) {
            z = (1.0L + alpha) * (3.0L + 0.92L * alpha) / (1.0L + 2.4L * count + 1.8L * alpha);
        } else if (i == 1) {
            z += (15.0L + 6.25L * alpha) / (1.0L + 0.9L * alpha + 2.5L * count);
        } else {
            const long double ai = i - 1;
            z += ((1.0L + 2.55L * ai) / (1.9L * ai) + 1.26L * ai * alpha / (1.0L + 3.5L * ai)) *
                 (z - rule.nodes[i - 2]) / (1.0L + 0.3L * alpha);
        }
        long double p1 = 0;
        long double p2 = 0;
        long double pp = 0;
        for (int iter = 0; iter < 200; ++iter) {
            p1 = 1;
            p2 = 0;
            for (int j = 1; j <= count; ++j) {
                const long double p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1 + alpha - z) * p2 - (j - 1 + alpha) * p3) / j;
            }
            pp = (count * p1 - (count + alpha) * p2) / z;
            const long double z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(z - z1) <= 1e-17L * std::fabs(z)) break;
        }
        rule.nodes[i] = static_cast<double>(z);
        rule.weights[i] = static_cast<double>(
            -std::exp(std::lgamma(alpha + count) - std::lgamma(static_cast<long double>(count))) /
            (pp * count * p2));
    }
    return rule;
}

double integrate(const RealFunction& f, double a, double b, const QuadratureSpec& spec)
{
    return integrate_with_floor(f, a, b, spec, 0.0);
}

double integrate_unit(const RealFunction& f, const QuadratureSpec& spec)
{
    return integrate(f, 0.0, 1.0, spec);
}

double integrate_halfline(const RealFunction& f, double decay_rate, const QuadratureSpec& spec)
{
    spec.validate();
    if (!(decay_rate > 0)) throw DomainError("integrate_halfline: decay_rate must be positive");
    double total = 0;
    double a = 0;
    double h = 1.0 / decay_rate;
    for (int panel = 0; panel < spec.max_panels; ++panel) {
        const double b = a + h;
        const double q = integrate_with_floor(f, a, b, spec, spec.tail_epsilon * std::fabs(total));
        total += q;
        if (total != 0 && std::fabs(q) <= spec.tail_epsilon * std::fabs(total)) {
            const double delta = 0.25 * h;
            const double fb = f(b);
            const double s = local_decay(f(b - delta), fb, delta);
            if (s > 0) {
                // Tail of an envelope whose log-slope only steepens beyond b.
                const double tail = std::isinf(s) ? 0.0 : std::fabs(fb) / s;
                if (tail <= spec.tail_epsilon * std::fabs(total)) return total;
            }
        }
        a = b;
        h *= spec.panel_growth;
    }
    throw QuadratureFailure("integrate_halfline: tail bound not reached within max_panels");
}

std::vector<double> PanelPlan::nodes() const
{
    std::vector<double> out;
    for (const auto& p : panels) {
        const GaussRule& r = gauss_legendre_unit(p.nodes);
        for (double t : r.nodes) out.push_back(p.a + (p.b - p.a) * t);
    }
    return out;
}

std::vector<double> PanelPlan::weights() const
{
    std::vector<double> out;
    for (const auto& p : panels) {
        const GaussRule& r = gauss_legendre_unit(p.nodes);
        for (double w : r.weights) out.push_back((p.b - p.a) * w);
    }
    return out;
}

PanelPlan plan_halfline(const VectorFunction& f, std::size_t dim, double decay_rate,
                        const QuadratureSpec& spec)
{
    spec.validate();
    if (!(decay_rate > 0)) throw DomainError("plan_halfline: decay_rate must be positive");
    PanelPlan plan;
    std::vector<double> total(dim, 0.0);
    std::vector<double> buf(dim);
    auto panel_sum = [&](double a, double b, int nodes) {
        const GaussRule& r = gauss_legendre_unit(nodes);
        std::vector<double> q(dim, 0.0);
        for (std::size_t i = 0; i < r.nodes.size(); ++i) {
            f(a + (b - a) * r.nodes[i], buf);
            for (std::size_t c = 0; c < dim; ++c) q[c] += r.weights[i] * buf[c];
        }
        for (auto& v : q) v *= (b - a);
        return q;
    };
    // A coarse geometric scan locates the peak of the family. Tolerances are
    // relative to peak / decay_rate and to the largest member, so regions where
    // the integrand is negligible, or a member vanishes identically, do not
    // demand accuracy below roundoff.
    double peak = 0;
    double peak_x = 0;
    for (double x = 0.01 / decay_rate; x < 1e7 / decay_rate; x *= 1.15) {
        f(x, buf);
        double here = 0;
        for (double v : buf) here = std::max(here, std::fabs(v));
        if (here > peak) {
            peak = here;
            peak_x = x;
        }
        if (peak > 0 && here < 1e-40 * peak) break;
    }
    const double floor_scale = peak / decay_rate;
    auto family_scale = [&](const std::vector<double>& fine) {
        double scale = floor_scale;
        for (std::size_t c = 0; c < dim; ++c) {
            scale = std::max({scale, std::fabs(total[c]), std::fabs(fine[c])});
        }
        return scale;
    };
    auto converged = [&](const std::vector<double>& fine, const std::vector<double>& coarse) {
        const double scale = family_scale(fine);
        for (std::size_t c = 0; c < dim; ++c) {
            if (std::fabs(fine[c] - coarse[c]) > spec.tail_epsilon * scale) return false;
        }
        return true;
    };

    double a = 0;
    double h = 1.0 / decay_rate;
    int splits = 0;
    while (plan.panels.size() < static_cast<std::size_t>(spec.max_panels)) {
        const double b = a + h;
        std::vector<double> coarse = panel_sum(a, b, 8);
        int nodes = 16;
        std::vector<double> fine;
        bool ok = false;
        for (; nodes <= spec.unit_nodes; nodes *= 2) {
            fine = panel_sum(a, b, nodes);
            if (converged(fine, coarse)) {
                ok = true;
                break;
            }
            coarse = fine;
        }
        if (!ok) {
            if (++splits > 60) throw QuadratureFailure("plan_halfline: panel refinement exhausted");
            h *= 0.5;
            continue;
        }
        plan.panels.push_back({a, b, nodes});
        splits = 0;
        bool done = b > peak_x;
        const double delta = 0.25 * h;
        std::vector<double> fb(dim);
        std::vector<double> fl(dim);
        f(b, fb);
        f(b - delta, fl);
        for (std::size_t c = 0; c < dim; ++c) total[c] += fine[c];
        const double scale = family_scale(total);
        for (std::size_t c = 0; c < dim; ++c) {
            if (scale == 0 || std::fabs(fine[c]) > spec.tail_epsilon * scale) {
                done = false;
                continue;
            }
            const double s = local_decay(fl[c], fb[c], delta);
            if (s <= 0) {
                // Not visibly decaying: only acceptable at roundoff level.
                if (std::fabs(fb[c]) * h > spec.tail_epsilon * scale) done = false;
                continue;
            }
            const double tail = std::isinf(s) ? 0.0 : std::fabs(fb[c]) / s;
            if (tail > spec.tail_epsilon * scale) done = false;
        }
        if (done) return plan;
        a = b;
        h *= spec.panel_growth;
    }
    throw QuadratureFailure("plan_halfline: tail bound not reached within max_panels");
}

double critical_value_1pct(std::size_t sample_count)
{
    return 1.628 / std::sqrt(static_cast<double>(sample_count));
}

double ks_distance(std::vector<double> samples, const RealFunction& model_cdf)
{
    if (samples.empty()) throw EmptySample("ks_test needs at least one sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = model_cdf(samples[i]);
        d = std::max(d, std::max((i + 1) / n - F, F - i / n));
    }
    return d;
}

namespace {

double sample_quantile(const std::vector<double>& sorted, double p)
{
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

double quantile(const RealFunction& cdf, double p, double lo, double hi)
{
    if (std::isinf(hi)) {
        hi = std::max(1.0, lo + 1.0);
        while (cdf(hi) < p && hi < 1e300) hi *= 2;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::fabs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

GofReport ks_test(std::vector<double> samples, const RealFunction& model_cdf, double support_lo,
                  double support_hi)
{
    if (samples.empty()) throw EmptySample("ks_test needs at least one sample");
    for (double v : samples) {
        if (!std::isfinite(v) || v < support_lo || v > support_hi) {
            throw DomainError("ks_test: sample outside the model support");
        }
    }
    std::sort(samples.begin(), samples.end());
    GofReport rep;
    rep.sample_count = samples.size();
    rep.ks_statistic = ks_distance(samples, model_cdf);
    rep.critical_value_1pct = critical_value_1pct(rep.sample_count);
    rep.passed = rep.ks_statistic <= rep.critical_value_1pct;

    // Freedman-Diaconis bins over the sample range clipped to the support.
    const double n = static_cast<double>(samples.size());
    const double lo = std::max(support_lo, samples.front());
    const double hi = std::min(support_hi, samples.back());
    const double iqr = sample_quantile(samples, 0.75) - sample_quantile(samples, 0.25);
    double width = 2.0 * iqr / std::cbrt(n);
    std::size_t bins = 1;
    if (hi > lo && width > 0) {
        bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
        bins = std::clamp<std::size_t>(bins, 1, 100000);
    }
    width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;
    std::vector<std::size_t> counts(bins, 0);
    for (double v : samples) {
        auto idx = static_cast<std::size_t>(std::floor((v - lo) / width));
        counts[std::min(idx, bins - 1)]++;
    }
    for (std::size_t b = 0; b < bins; ++b) {
        const double left = lo + width * static_cast<double>(b);
        const double right = b + 1 == bins ? (hi > lo ? hi : lo + width) : left + width;
        rep.histogram.push_back({left, right, static_cast<double>(counts[b]) / (n * (right - left))});
    }

    for (int k = 1; k <= 99; ++k) {
        const double p = k / 100.0;
        rep.qq.push_back({p, quantile(model_cdf, p, support_lo, support_hi), sample_quantile(samples, p)});
    }
    return rep;
}

}  // namespace spiked::numkit
