#include "spiked/spike_density.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "hankel.hpp"
#include "spiked/errors.hpp"
#include "spiked/numkit.hpp"
#include "spiked/specfun.hpp"

namespace spiked::density {

namespace {

using ld = long double;
using specfun::factorial_l;

constexpr double kThetaFloor = 1e-8;

ld lfact(int k)
{
    return std::lgamma(static_cast<ld>(k) + 1);
}

void require_complex(const SpikedModel& model)
{
    model.validate();
    if (model.variant != Variant::complex) {
        throw UnsupportedModel("statistic is defined for the complex variant only");
    }
    if (model.n < 2) throw UnsupportedModel("n must be at least 2");
}

void require_unit(double z)
{
    if (!(z >= 0.0 && z <= 1.0)) throw DomainError("z must lie in [0, 1]");
}

void require_positive_theta(const SpikedModel& model)
{
    if (model.theta < kThetaFloor) {
        throw ThetaZeroSingularity("density has a beta^(n-2) pole at theta = 0 for n >= 3");
    }
}

double haar(int n, double z)
{
    return (n - 1) * std::pow(1.0 - z, n - 2);
}

// n = 2 finite sum.
ld z1_n2(int alpha, ld beta, ld z)
{
    const ld q = 1 - beta * (1 - z);
    ld sum = 0;
    for (int k = 0; k <= alpha; ++k) {
        const ld c = factorial_l(k + 2) * factorial_l(2 * alpha - k) /
                     (factorial_l(k) * factorial_l(alpha - k));
        sum += c / (std::pow(2 - beta, 2 * alpha - k + 1) * std::pow(q, k + 3));
    }
    return std::pow(1 - beta, 2 + alpha) / factorial_l(alpha + 1) * sum;
}

ld z1_alpha0(int n, ld beta, ld z)
{
    const ld q = 1 - beta * (1 - z);
    return static_cast<ld>(n) * (n - 1) * std::pow(1 - beta, n) * std::pow(1 - z, n - 2) /
           ((n - beta) * std::pow(q, n + 1));
}

ld z1_alpha1(int n, ld beta, ld z)
{
    const ld q = 1 - beta * (1 - z);
    const ld arg = -1 / (n - beta);
    const ld f1 = specfun::gauss_2f1_l(-n + 1, 2, 3, arg);
    const ld f2 = specfun::gauss_2f1_l(-n + 2, 2, 3, arg);
    const ld pref = static_cast<ld>(n) * (static_cast<ld>(n) * n - 1) * std::pow(1 - beta, n + 1) *
                    std::pow(1 - z, n - 2) / (2 * std::pow(n - beta, 2) * std::pow(q, n + 1));
    return pref * (f1 + beta * (1 - z) / q * f2);
}

ld z1_fastpath(int n, int alpha, ld beta, ld z)
{
    return alpha == 0 ? z1_alpha0(n, beta, z) : z1_alpha1(n, beta, z);
}

// Beta(3, p) = 2 (p-1)! / (p+2)!.
ld beta3(int p)
{
    return 2 / (static_cast<ld>(p) * (p + 1) * (p + 2));
}

double finish(ld value)
{
    return static_cast<double>(value);
}

}  // namespace

// ---------------------------------------------------------------- Z1

Z1Nested::Z1Nested(const SpikedModel& model)
    : n_(model.n), alpha_(model.alpha()), beta_(model.beta()), g_(model.alpha() + 1, 0.0L)
{
    require_complex(model);
    if (n_ < 3) throw UnsupportedModel("nested-sum form needs n >= 3");
    const int a = alpha_;
    const int n = n_;
    const ld log_nb = std::log(static_cast<ld>(n) - beta_);
    ld base = 0;
    std::vector<int> upper(a);
    for (int j = 1; j <= a; ++j) {
        upper[j - 1] = n + a - j - 1;
        base += lfact(n + a - j - 1);
    }
    std::vector<int> k(a, 0);
    std::vector<ld> entries(static_cast<std::size_t>(a + 1) * a);
    std::vector<ld> minor(static_cast<std::size_t>(a) * a);
    for (;;) {
        int total = 0;
        ld logw = base;
        for (int j = 1; j <= a; ++j) {
            total += k[j - 1];
            logw -= lfact(j + k[j - 1] + 1) + lfact(k[j - 1]);
        }
        logw += lfact(a + total) - (a + total + 1) * log_nb;

        bool zero_column = false;
        for (int j = 1; j <= a && !zero_column; ++j) {
            bool any = false;
            for (int i = 0; i <= a; ++i) {
                const int arg = n + i - j - k[j - 1];
                const ld v = arg >= 1 ? 1 / factorial_l(arg - 1) : 0;
                entries[i * a + (j - 1)] = v;
                any = any || v != 0;
            }
            zero_column = !any;
        }
        if (!zero_column) {
            const ld w = std::exp(logw);
            for (int i = 0; i <= a; ++i) {
                std::size_t r = 0;
                for (int ii = 0; ii <= a; ++ii) {
                    if (ii == i) continue;
                    for (int c = 0; c < a; ++c) minor[r * a + c] = entries[ii * a + c];
                    ++r;
                }
                const ld m = numkit::det(minor, a);
                g_[i] += (i % 2 == 0 ? w : -w) * m;
            }
        }

        int pos = a - 1;
        while (pos >= 0 && k[pos] == upper[pos]) {
            k[pos] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++k[pos];
    }
}

double Z1Nested::operator()(double zd) const
{
    require_unit(zd);
    const ld z = zd;
    const ld q = 1 - beta_ * (1 - z);
    const ld r = -beta_ * (1 - z) / q;
    ld h = 0;
    ld rp = 1;
    for (int i = 0; i <= alpha_; ++i) {
        h += std::exp(lfact(n_ + alpha_) - lfact(n_ + i - 2)) * rp * g_[i];
        rp *= r;
    }
    return finish(std::pow(1 - beta_, n_ + alpha_) * std::pow(1 - z, n_ - 2) /
                  std::pow(q, n_ + 1) * h);
}

double pdf_z1(const SpikedModel& model, double z)
{
    require_complex(model);
    require_unit(z);
    if (model.theta == 0) return haar(model.n, z);
    if (model.n == 2) return finish(z1_n2(model.alpha(), model.beta(), z));
    if (model.alpha() <= 1) return finish(z1_fastpath(model.n, model.alpha(), model.beta(), z));
    return Z1Nested(model)(z);
}

std::pair<double, double> pdf_z1_general_vs_fastpath(const SpikedModel& model, double z)
{
    require_complex(model);
    require_unit(z);
    if (model.alpha() > 1 || model.n < 3) {
        throw UnsupportedModel("closed forms exist for alpha in {0, 1} and n >= 3");
    }
    return {Z1Nested(model)(z), finish(z1_fastpath(model.n, model.alpha(), model.beta(), z))};
}

double pdf_nz1_asymptotic(double theta, double v)
{
    if (!(v >= 0)) throw DomainError("v must be nonnegative");
    return (1 + theta) * std::exp(-(1 + theta) * v);
}

double cdf_nz1_asymptotic(double theta, double v)
{
    if (!(v >= 0)) throw DomainError("v must be nonnegative");
    return -std::expm1(-(1 + theta) * v);
}

// ---------------------------------------------------------------- Zn closed forms

namespace {

constexpr std::array<int, 3> kTupleA{5, 5, 4};
constexpr std::array<int, 3> kTupleB{7, 6, 6};
constexpr std::array<int, 3> kTupleC{6, 4, 5};
constexpr std::array<int, 3> kTupleD{6, 7, 5};

// Coefficients D_s with F2(A; 3, 3; c1, c2; x, x) = sum_s D_s x^s. Grouping
// the double series by m + n = s leaves z-free coefficients
// D_s = (A)_s / s! * sum_m binom(s, m) (3)_m (3)_{s-m} / ((c1)_m (c2)_{s-m}),
// truncated where the series is negligible at x_max.
std::vector<ld> equal_argument_f2(ld A, int c1, int c2, ld x_max)
{
    std::vector<ld> r1{1};
    std::vector<ld> r2{1};
    std::vector<ld> out;
    ld pref = 1;
    ld sum = 0;
    ld xs = 1;
    ld prev = 0;
    for (int s = 0; s < 50000; ++s) {
        if (s > 0) {
            pref *= (A + s - 1) / s;
            r1.push_back(r1.back() * (3 + s - 1) / (c1 + s - 1));
            r2.push_back(r2.back() * (3 + s - 1) / (c2 + s - 1));
            xs *= x_max;
        }
        ld inner = 0;
        ld binom = 1;
        for (int m = 0; m <= s; ++m) {
            inner += binom * r1[m] * r2[s - m];
            binom *= static_cast<ld>(s - m) / (m + 1);
        }
        out.push_back(pref * inner);
        const ld term = out.back() * xs;
        sum += term;
        if (s > 8 && term < prev && term < 1e-22L * sum) return out;
        prev = term;
    }
    throw NoConvergence("equal-argument F2 series did not converge");
}

}  // namespace

std::size_t ZnClosed::f2_index(int N, int b, int c, int k) const
{
    return ((static_cast<std::size_t>(N) * 4 + (b - 4)) * 4 + (c - 4)) * (alpha_ + 5) + k;
}

ZnClosed::ZnClosed(const SpikedModel& model)
    : n_(model.n), alpha_(model.alpha()), beta_(model.beta())
{
    require_complex(model);
    if (n_ < 2 || n_ > 4) throw UnsupportedModel("closed forms cover n in {2, 3, 4}");
    if (n_ >= 3) require_positive_theta(model);
    if (n_ != 4) return;
    const int a = alpha_;
    f2_fixed_.assign(5 * 4 * 4 * (a + 5), std::numeric_limits<ld>::quiet_NaN());
    const ld x = 1 / (4 - beta_);
    auto fill = [&](int N, int b, int c) {
        for (int k = 0; k <= a + N; ++k) {
            ld& slot = f2_fixed_[f2_index(N, b, c, k)];
            if (!std::isnan(slot)) continue;
            slot = specfun::appell_f2_l(3 * a + 13 - N + k, 3, 3, a + b, a + c, x, x);
        }
    };
    head_series_.resize(5 * 4 * 4);
    const ld x_max = 1 / (3 - beta_);
    auto series = [&](int N, int b, int c) {
        auto& slot = head_series_[f2_index(N, b, c, 0) / (a + 5)];
        if (slot.empty()) slot = equal_argument_f2(3 * a + 13 - N, a + b, a + c, x_max);
    };
    for (int k = 0; k < 3; ++k) {
        for (int N = k; N <= k + 2; ++N) {
            fill(N, kTupleA[k], kTupleB[k]);
            fill(N, kTupleC[k], kTupleD[k]);
            series(N, kTupleA[k], kTupleB[k]);
            series(N, kTupleC[k], kTupleD[k]);
        }
    }
}

double ZnClosed::eval_n2(ld z) const
{
    const int a = alpha_;
    const ld q = 1 - beta_ * (1 - z);
    const ld pref = 2 * factorial_l(2 * a + 3) * std::pow(1 - beta_, a + 2) /
                    (factorial_l(a + 1) * factorial_l(a + 3) * std::pow(2 - beta_, 2 * a + 4));
    return finish(pref * specfun::gauss_2f1_l(3, 2 * a + 4, a + 4, q / (2 - beta_)));
}

double ZnClosed::eval_n3(ld z) const
{
    const int a = alpha_;
    const ld q = 1 - beta_ * (1 - z);
    const ld x = 1 / (3 - beta_);
    const ld y = q / (3 - beta_);
    const ld f45 = specfun::appell_f2_l(3 * a + 8, 3, 3, a + 4, a + 5, x, y);
    const ld f54 = specfun::appell_f2_l(3 * a + 8, 3, 3, a + 5, a + 4, x, y);
    const ld pref = 4 * factorial_l(3 * a + 7) * std::pow(1 - beta_, a + 3) /
                    (factorial_l(a + 2) * factorial_l(a + 3) * factorial_l(a + 4) * beta_ *
                     std::pow(3 - beta_, 3 * a + 8));
    return finish(pref * (f45 - f54));
}

ld ZnClosed::g_term(int N, int b, int c, ld z) const
{
    const int a = alpha_;
    const ld q = 1 - beta_ * (1 - z);
    const ld common = beta3(a + b - 3) * beta3(a + c - 3) * factorial_l(a + N) / std::pow(q, a + N + 1);
    const ld x = 1 / (3 - beta_ * z);
    const auto& coef = head_series_[f2_index(N, b, c, 0) / (a + 5)];
    ld f2 = 0;
    for (auto it = coef.rbegin(); it != coef.rend(); ++it) f2 = f2 * x + *it;
    const ld head = factorial_l(3 * a + 12 - N) * std::pow(x, 3 * a + 13 - N) * f2;
    ld tail = 0;
    const ld x4 = 1 / (4 - beta_);
    for (int k = 0; k <= a + N; ++k) {
        tail += factorial_l(3 * a + 12 + k - N) / factorial_l(k) * std::pow(x4, 3 * a + 13 - N + k) *
                std::pow(q, k) * f2_fixed_[f2_index(N, b, c, k)];
    }
    return common * (head - tail);
}

double ZnClosed::eval_n4(ld z) const
{
    const int a = alpha_;
    ld sum = 0;
    for (int k = 0; k < 3; ++k) {
        const int ak = kTupleA[k];
        const int bk = kTupleB[k];
        const int ck = kTupleC[k];
        const int dk = kTupleD[k];
        sum += g_term(k, ak, bk, z) - g_term(k, ck, dk, z);
        sum += -2 * g_term(k + 1, ak, bk, z) + 2 * g_term(k + 1, ck, dk, z);
        sum += g_term(k + 2, ak, bk, z) - g_term(k + 2, ck, dk, z);
    }
    const ld pref = std::pow(1 - beta_, a + 4) /
                    (2 * factorial_l(a) * factorial_l(a + 1) * factorial_l(a + 2) * factorial_l(a + 3) *
                     beta_ * beta_);
    return finish(pref * sum);
}

double ZnClosed::operator()(double z) const
{
    require_unit(z);
    if (n_ >= 3 && z == 1) return 0;  // pencil polynomial is orthogonal to the weight
    switch (n_) {
    case 2:
        return eval_n2(z);
    case 3:
        return eval_n3(z);
    default:
        return eval_n4(z);
    }
}

double pdf_zn_closed(const SpikedModel& model, double z)
{
    return ZnClosed(model)(z);
}

// ---------------------------------------------------------------- Zn integral

ZnIntegral::ZnIntegral(const SpikedModel& model)
    : n_(model.n), alpha_(model.alpha()), beta_(model.beta())
{
    require_complex(model);
    if (n_ >= 3) require_positive_theta(model);
    const int n = n_;
    const int a = alpha_;
    x_power_ = n * n + n * a - n + 1;
    ld log_k = 0;
    for (int j = 1; j <= n; ++j) log_k -= lfact(n - j) + lfact(n + a - j);
    log_prefactor_ = lfact(n - 1) + log_k + (n + a) * std::log(1 - beta_);
    if (n > 2) log_prefactor_ -= (n - 2) * std::log(beta_);

    const std::array<ld, 6> probe_z{0.0L, 0.5L, 0.8L, 0.9L, 0.97L, 0.99L};
    auto probe = [&](double x, std::span<double> out) {
        const auto rule = detail::pencil_rule(a, n - 2, a, x, 1 - beta_);
        for (std::size_t c = 0; c < probe_z.size(); ++c) {
            out[c] = static_cast<double>(integrand(x, rule.nodes, rule.weights, probe_z[c]));
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
        auto rule = detail::pencil_rule(a, n - 2, a, x, 1 - beta_);
        t_.push_back(std::move(rule.nodes));
        tw_.push_back(std::move(rule.weights));
    }
}

ld ZnIntegral::integrand(ld x, const std::vector<ld>& t, const std::vector<ld>& w, ld z) const
{
    if (x <= 0) return 0;
    const ld c = beta_ * (1 - z) * x;
    ld inner = 0;
    for (std::size_t i = 0; i < t.size(); ++i) inner += w[i] * std::exp(c * t[i]);
    return std::exp(log_prefactor_ + x_power_ * std::log(x) - (1 - beta_ * z) * x) * inner;
}

double ZnIntegral::operator()(double z) const
{
    require_unit(z);
    if (n_ >= 3 && z == 1) return 0;  // pencil polynomial is orthogonal to the weight
    ld sum = 0;
    for (std::size_t i = 0; i < x_.size(); ++i) sum += w_[i] * integrand(x_[i], t_[i], tw_[i], z);
    return finish(sum);
}

double pdf_zn(const SpikedModel& model, double z)
{
    require_complex(model);
    require_unit(z);
    if (model.n >= 3) require_positive_theta(model);
    if (model.n <= 4) return ZnClosed(model)(z);
    return ZnIntegral(model)(z);
}

bool check_zn_convexity_n2(const SpikedModel& model)
{
    require_complex(model);
    if (model.n != 2) throw UnsupportedModel("convexity check applies to n = 2");
    const ZnClosed pdf(model);
    constexpr int points = 1001;
    std::vector<double> f(points);
    for (int i = 0; i < points; ++i) f[i] = pdf(static_cast<double>(i) / (points - 1));
    for (int i = 1; i + 1 < points; ++i) {
        if (f[i - 1] - 2 * f[i] + f[i + 1] < -1e-8) return false;
    }
    return true;
}

// ---------------------------------------------------------------- Z2 integral

Z2Integral::Z2Integral(const SpikedModel& model, int y_nodes)
    : n_(model.n), alpha_(model.alpha()), beta_(model.beta()), y_nodes_(y_nodes)
{
    require_complex(model);
    if (n_ < 3) throw UnsupportedModel("second-smallest projection needs n >= 3");
    require_positive_theta(model);
    const int n = n_;
    const int a = alpha_;
    const int K = n + a + 1;
    // Coefficients of w^2 L^(2)_N(w), N = n + i - 3 for 0-based row i.
    for (int i = 0; i < a + 3; ++i) {
        const int N = n + i - 3;
        std::vector<ld> c(K + 1, 0.0L);
        for (int j = 0; j <= N; ++j) {
            const ld binom = factorial_l(N + 2) / (factorial_l(N - j) * factorial_l(j + 2));
            c[j + 2] = (j % 2 == 0 ? 1 : -1) * binom / factorial_l(j);
        }
        poly_.push_back(std::move(c));
    }
    prefactor_ = (n % 2 == 0 ? 1 : -1) * std::pow(1 - beta_, n + a) / std::pow(beta_, n - 2);

    const numkit::GaussRule& yrule = numkit::gauss_legendre_unit(y_nodes_);
    const std::array<ld, 6> probe_z{0.0L, 0.5L, 0.8L, 0.9L, 0.97L, 1.0L};
    auto probe = [&](double x, std::span<double> out) {
        std::array<ld, probe_z.size()> acc{};
        for (std::size_t j = 0; j < yrule.nodes.size(); ++j) {
            const Node node = make_node(x, yrule.nodes[j], yrule.weights[j]);
            for (std::size_t c = 0; c < probe_z.size(); ++c) acc[c] += node_value(node, probe_z[c]);
        }
        for (std::size_t c = 0; c < probe_z.size(); ++c) out[c] = static_cast<double>(prefactor_ * acc[c]);
    };
    numkit::QuadratureSpec spec;
    spec.unit_nodes = 64;
    spec.tail_epsilon = 1e-10;
    spec.max_panels = 400;
    const double decay = static_cast<double>(n - 1 - beta_);
    const auto plan = numkit::plan_halfline(probe, probe_z.size(), decay, spec);
    const auto xs = plan.nodes();
    const auto xw = plan.weights();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = 0; j < yrule.nodes.size(); ++j) {
            nodes_.push_back(make_node(xs[i], yrule.nodes[j], xw[i] * yrule.weights[j]));
        }
    }
}

Z2Integral::Node Z2Integral::make_node(ld x, ld y, ld weight) const
{
    const int n = n_;
    const int a = alpha_;
    const int K = n + a + 1;
    const ld t = x * (1 - y);
    const ld b = -x;
    const ld u0 = -x * y;
    Node node;
    node.d = x * y;
    node.weight = weight * std::pow(x, 2 * a + 3) * std::pow(1 - y, a) * y * y *
                  std::exp(-x * (n - beta_ - y));

    // Derivatives g^(k)(b) of g(u) = L^(2)_N(u) are (-1)^k L^(2+k)_{N-k}(b).
    auto derivs = [&](int N) {
        std::vector<ld> g(std::max(N + 1, a + 1), 0.0L);
        for (int k = 0; k <= N; ++k) g[k] = (k % 2 == 0 ? 1 : -1) * specfun::laguerre_l(2 + k, N - k, b);
        return g;
    };

    // U matrix without its first column; the confluent columns are replaced by
    // Taylor remainders about b so the t^(2 alpha) factor is divided out exactly.
    const int du = a + 3;
    std::vector<ld> umat(static_cast<std::size_t>(du) * (du - 1));
    for (int i = 0; i < du; ++i) {
        const int N = n + i - 3;
        ld* row = &umat[static_cast<std::size_t>(i) * (du - 1)];
        if (a == 0) {
            row[0] = specfun::laguerre_l(2, N, u0);
            row[1] = specfun::laguerre_l(3, N - 1, u0);
            continue;
        }
        const auto g = derivs(N);
        ld at = 0;
        ld bt = 0;
        for (int k = a; k <= N; ++k) {
            bt += g[k] * std::pow(t, k - a) / factorial_l(k - 1);
            if (k >= a + 1) at += g[k] * (1 - static_cast<ld>(k) / a) * std::pow(t, k - a - 1) / factorial_l(k);
        }
        row[0] = at;
        row[1] = -bt;
        for (int r = 0; r < a; ++r) row[2 + r] = (r % 2 == 0 ? 1 : -1) * g[r];
    }
    node.q.assign(K + 1, 0.0L);
    std::vector<ld> minor(static_cast<std::size_t>(du - 1) * (du - 1));
    for (int i = 0; i < du; ++i) {
        std::size_t r = 0;
        for (int ii = 0; ii < du; ++ii) {
            if (ii == i) continue;
            std::copy_n(&umat[static_cast<std::size_t>(ii) * (du - 1)], du - 1, &minor[r * (du - 1)]);
            ++r;
        }
        const ld cof = (i % 2 == 0 ? 1 : -1) * numkit::det(minor, du - 1);
        for (int k = 0; k <= K; ++k) node.q[k] += cof * poly_[i][k];
    }

    // V determinant with its first column reduced the same way.
    const int dv = a + 1;
    std::vector<ld> vmat(static_cast<std::size_t>(dv) * dv);
    for (int i = 0; i < dv; ++i) {
        const int N = n + i - 2;
        ld* row = &vmat[static_cast<std::size_t>(i) * dv];
        if (a == 0) {
            row[0] = specfun::laguerre_l(2, N, u0);
            continue;
        }
        const auto h = derivs(N);
        ld head = 0;
        for (int k = a; k <= N; ++k) head += h[k] * std::pow(t, k - a) / factorial_l(k);
        row[0] = head;
        for (int r = 0; r < a; ++r) row[1 + r] = (r % 2 == 0 ? 1 : -1) * h[r];
    }
    node.v_term = factorial_l(n - 1) / factorial_l(n + a - 1) * numkit::det(vmat, dv);
    return node;
}

ld Z2Integral::node_value(const Node& node, ld z) const
{
    const ld gamma = 1 - beta_ * (1 - z);
    const ld arg = gamma * node.d;
    ld u = 0;
    if (node.q.size() > 2) {
        thread_local std::vector<ld> e;
        e.resize(node.q.size() - 2);
        specfun::expint_scaled_range(3, arg, e);
        ld gk = gamma * gamma;
        for (std::size_t k = 2; k < node.q.size(); ++k) {
            if (node.q[k] != 0) u += node.q[k] * factorial_l(static_cast<int>(k)) / gk * e[k - 2];
            gk *= gamma;
        }
    }
    const ld v = node.v_term * std::exp(-beta_ * node.d * (1 - z));
    return node.weight * (v - u);
}

double Z2Integral::operator()(double z) const
{
    require_unit(z);
    ld sum = 0;
    for (const Node& node : nodes_) sum += node_value(node, z);
    return finish(prefactor_ * sum);
}

double pdf_z2(const SpikedModel& model, double z)
{
    require_unit(z);
    return Z2Integral(model)(z);
}

// ---------------------------------------------------------------- identity oracles

std::pair<double, double> mehta_identity_check(int n, int alpha, double y, double x)
{
    if (n < 1 || alpha < 0) throw DomainError("mehta_identity_check needs n >= 1, alpha >= 0");
    if (alpha > 0 && x == y) throw DomainError("x = y makes the closed form singular");

    // Brute force: the integrand is a polynomial times z^2 e^{-z}, so a
    // generalized Gauss-Laguerre tensor rule of this order is exact.
    const numkit::GaussRule rule = numkit::gauss_laguerre(12, 2.0);
    const int q = static_cast<int>(rule.nodes.size());
    std::vector<int> idx(n, 0);
    ld lhs = 0;
    for (;;) {
        ld w = 1;
        ld val = 1;
        for (int j = 0; j < n; ++j) {
            const ld zj = rule.nodes[idx[j]];
            w *= rule.weights[idx[j]];
            val *= (y - zj) * std::pow(x - zj, alpha);
            for (int k = j + 1; k < n; ++k) {
                const ld diff = zj - rule.nodes[idx[k]];
                val *= diff * diff;
            }
        }
        lhs += w * val;
        int pos = n - 1;
        while (pos >= 0 && idx[pos] == q - 1) {
            idx[pos] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++idx[pos];
    }

    const int d = alpha + 1;
    std::vector<ld> mat(static_cast<std::size_t>(d) * d);
    for (int i = 1; i <= d; ++i) {
        mat[(i - 1) * d] = specfun::laguerre_l(2, n + i - 1, y);
        for (int j = 2; j <= alpha + 1; ++j) mat[(i - 1) * d + (j - 1)] = specfun::laguerre_l(j, n + i + 1 - j, x);
    }
    ld log_k = 0;
    for (int j = 1; j <= alpha + 1; ++j) log_k += lfact(n + j - 1);
    for (int j = 0; j <= n - 1; ++j) log_k += lfact(j + 1) + lfact(j + 2);
    for (int j = 0; j <= alpha - 1; ++j) log_k -= lfact(j);
    const int sign_exp = n + alpha * (n + alpha);
    const ld sign = sign_exp % 2 == 0 ? 1 : -1;
    const ld rhs = sign * std::exp(log_k) / std::pow(static_cast<ld>(x) - y, alpha) * numkit::det(mat, d);
    return {finish(lhs), finish(rhs)};
}

double kalpha_normalization_check(int alpha)
{
    if (alpha < 1) throw DomainError("kalpha_normalization_check needs alpha >= 1");
    auto integrand = [alpha](double x) {
        const double r = 2 * std::sqrt(x);
        std::vector<double> mat(static_cast<std::size_t>(alpha) * alpha);
        for (int i = 1; i <= alpha; ++i) {
            for (int j = 1; j <= alpha; ++j) mat[(i - 1) * alpha + (j - 1)] = specfun::bessel_i(j - i + 2, r);
        }
        return std::exp(-x) * numkit::scaled_det(mat, alpha).value();
    };
    return numkit::integrate_halfline(integrand, 1.0);
}

}  // namespace spiked::density
