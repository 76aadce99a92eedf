#include "spiked/variant_density.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "hankel.hpp"
#include "spiked/errors.hpp"
#include "spiked/numkit.hpp"
#include "spiked/specfun.hpp"

namespace spiked::density {

namespace {

using ld = long double;

constexpr double kThetaFloor = 1e-8;

ld lfact(int k)
{
    return std::lgamma(static_cast<ld>(k) + 1);
}

void require_open_unit(double z)
{
    if (!(z > 0.0 && z < 1.0)) throw DomainError("z must lie in (0, 1)");
}

void require_unit(double z)
{
    if (!(z >= 0.0 && z <= 1.0)) throw DomainError("z must lie in [0, 1]");
}

void require_real_n2(const SpikedModel& model)
{
    model.validate();
    if (model.variant != Variant::real) throw UnsupportedModel("statistic needs the real variant");
    if (model.n != 2) throw UnsupportedModel("real variant densities cover n = 2 only");
}

void require_singular(const SpikedModel& model)
{
    model.validate();
    if (model.variant != Variant::singular) {
        throw UnsupportedModel("statistic needs the singular variant");
    }
}

}  // namespace

double w1_real_regular(const SpikedModel& model, double zd)
{
    require_real_n2(model);
    require_unit(zd);
    const int m = model.m;
    const ld beta = model.beta();
    const ld z = zd;
    const ld q = 1 - beta * (1 - z);
    const ld u = (1 - beta * z) / q;
    const ld f1 = specfun::gauss_2f1_l(m, (m - 1) / 2.0L, (m + 1) / 2.0L, -u) / (m - 1);
    const ld f2 = specfun::gauss_2f1_l(m, (m + 1) / 2.0L, (m + 3) / 2.0L, -u) / (m + 1);
    const ld pref = std::exp((m - 1) * std::log(2.0L) - m / 2.0L * std::log1p(static_cast<ld>(model.theta))) *
                    (m - 1) / std::numbers::pi_v<ld>;
    return static_cast<double>(pref * std::pow(q, -m) * (f1 - f2));
}

double pdf_w1_real(const SpikedModel& model, double z)
{
    require_open_unit(z);
    return w1_real_regular(model, z) / std::sqrt(z * (1 - z));
}

double pdf_w2_real(const SpikedModel& model, double z)
{
    return pdf_w1_real(model, 1 - z);
}

double pdf_y1_singular(const SpikedModel& model, double zd)
{
    require_singular(model);
    require_unit(zd);
    const int n = model.n;
    const int m = model.m;
    const ld beta = model.beta();
    const ld z = zd;
    if (m == 1) {
        return static_cast<double>((n - 1) * std::pow(1 - z, n - 2) /
                                   ((1 + static_cast<ld>(model.theta)) * std::pow(1 - beta * z, n)));
    }
    if (n - m != 1) throw UnsupportedModel("smallest singular projection needs m = 1 or n - m = 1");
    if (model.theta < kThetaFloor) {
        throw ThetaZeroSingularity("n - m = 1 density has a beta^(1-m) factor at theta = 0");
    }
    const ld q = 1 - (1 - z) * beta;
    const ld log_mb = std::log(m - beta);
    const ld log_beta = std::log(beta);
    ld sum = 0;
    for (int l = 0; l <= m - 2; ++l) {
        ld inner = 0;
        for (int k = 0; k <= m - 2 - l; ++k) {
            const ld log_a = lfact(m - l) + (m - 2 - l) * log_beta - std::log(static_cast<ld>(k + 2)) -
                             lfact(k) - lfact(m - 2 - l - k) - (k + 2) * log_mb;
            inner += std::exp(log_a);
        }
        const ld sign = l % 2 == 0 ? 1 : -1;
        sum += sign * inner * std::pow(1 - z, m - 2 - l) / std::pow(q, m - l + 1);
    }
    const ld tail = (m % 2 == 1 ? 1 : -1) / std::pow(m - beta * z, 2);
    return static_cast<double>(m * std::exp((1 - m) * log_beta + m * std::log1p(-beta)) * (sum + tail));
}

YnSingular::YnSingular(const SpikedModel& model) : m_(model.m), beta_(model.beta())
{
    require_singular(model);
    if (model.n - model.m != 1 || model.m < 2) {
        throw UnsupportedModel("largest singular projection needs n - m = 1 and m >= 2");
    }
    if (model.theta < kThetaFloor) {
        throw ThetaZeroSingularity("n - m = 1 density has a beta^(1-m) factor at theta = 0");
    }
    const int m = m_;
    log_prefactor_ = m * std::log1p(-beta_) + (1 - m) * std::log(beta_);
    for (int j = 1; j <= m; ++j) log_prefactor_ -= 2 * lfact(m - j);

    const ld sign = m % 2 == 0 ? -1 : 1;
    const std::array<ld, 6> probe_z{0.0L, 0.5L, 0.8L, 0.9L, 0.97L, 0.99L};
    auto probe = [&](double x, std::span<double> out) {
        const auto rule = detail::pencil_rule(1, m - 2, 0, x, 1 - beta_);
        const ld h = sign * detail::hankel_det(0, m - 1, x);
        for (std::size_t c = 0; c < probe_z.size(); ++c) {
            out[c] = static_cast<double>(integrand(x, rule.nodes, rule.weights, h, probe_z[c]));
        }
    };
    numkit::QuadratureSpec spec;
    spec.unit_nodes = 64;
    spec.tail_epsilon = 1e-10;
    spec.max_panels = 400;
    const auto plan = numkit::plan_halfline(probe, probe_z.size(), static_cast<double>(1 - beta_), spec);
    const auto nodes = plan.nodes();
    const auto weights = plan.weights();
    x_.assign(nodes.begin(), nodes.end());
    w_.assign(weights.begin(), weights.end());
    for (double x : nodes) {
        auto rule = detail::pencil_rule(1, m - 2, 0, x, 1 - beta_);
        t_.push_back(std::move(rule.nodes));
        tw_.push_back(std::move(rule.weights));
        hankel_.push_back(sign * detail::hankel_det(0, m - 1, x));
    }
}

ld YnSingular::integrand(ld x, const std::vector<ld>& t, const std::vector<ld>& w, ld hankel, ld z) const
{
    if (x <= 0) return 0;
    const ld c = beta_ * (1 - z) * x;
    ld inner = hankel;
    for (std::size_t i = 0; i < t.size(); ++i) inner += w[i] * std::exp(c * t[i]);
    return std::exp(log_prefactor_ + m_ * m_ * std::log(x) - (1 - beta_ * z) * x) * inner;
}

double YnSingular::operator()(double z) const
{
    require_unit(z);
    if (z == 1) return 0;  // the bracket vanishes identically at z = 1
    ld sum = 0;
    for (std::size_t i = 0; i < x_.size(); ++i) sum += w_[i] * integrand(x_[i], t_[i], tw_[i], hankel_[i], z);
    return static_cast<double>(sum);
}

double pdf_yn_singular(const SpikedModel& model, double z)
{
    require_unit(z);
    return YnSingular(model)(z);
}

}  // namespace spiked::density
