#include "hankel.hpp"

#include <algorithm>
#include <cmath>

#include "spiked/numkit.hpp"

namespace spiked::detail {

namespace {

constexpr int kPanelNodes = 20;

struct Discrete {
    std::vector<long double> t;
    std::vector<long double> w;  // quadrature weight times (1-t)^2 e^{-xt}
};

// Gauss-Legendre panels on [0, T], where e^{-rate x t} t^deg is negligible
// beyond T. Panels start at eight e-folds of e^{-xt} and widen geometrically
// up to eight e-folds of e^{-rate x t}.
Discrete discretize(long double x, long double rate, int degree)
{
    const long double reach = 50.0L + 2.0L * degree;
    const long double span = rate * x > 0 ? std::min<long double>(1, reach / (rate * x)) : 1;
    const long double widest = x > 0 ? 8 / (rate * x) : 1;
    long double width = x > 0 ? 8 / x : 1;
    const numkit::GaussRule& rule = numkit::gauss_legendre_unit(kPanelNodes);
    Discrete d;
    for (long double a = 0; a < span;) {
        const long double h = std::min(width, span - a);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const long double t = a + h * static_cast<long double>(rule.nodes[i]);
            d.t.push_back(t);
            d.w.push_back(h * rule.weights[i] * (1 - t) * (1 - t) * std::exp(-x * t));
        }
        a += h;
        width = std::min(width * 1.5L, widest);
    }
    return d;
}

// Runs the Stieltjes procedure for t^a d on the nodes; fills pi with pi_s at
// each node and returns log prod_{k<s} ||pi_k||^2 = log det of the Hankel matrix.
long double stieltjes(const Discrete& d, int a, int s, std::vector<long double>& pi)
{
    const std::size_t q = d.t.size();
    std::vector<long double> mu(q);
    for (std::size_t i = 0; i < q; ++i) mu[i] = d.w[i] * std::pow(d.t[i], a);
    std::vector<long double> prev(q, 0.0L);
    pi.assign(q, 1.0L);
    long double log_det = 0;
    long double h_prev = 1;
    for (int k = 0; k < s; ++k) {
        long double h = 0;
        long double ht = 0;
        for (std::size_t i = 0; i < q; ++i) {
            const long double m = mu[i] * pi[i] * pi[i];
            h += m;
            ht += m * d.t[i];
        }
        const long double ak = ht / h;
        const long double bk = k == 0 ? 0 : h / h_prev;
        log_det += std::log(h);
        for (std::size_t i = 0; i < q; ++i) {
            const long double next = (d.t[i] - ak) * pi[i] - bk * prev[i];
            prev[i] = pi[i];
            pi[i] = next;
        }
        h_prev = h;
    }
    return log_det;
}

}  // namespace

long double hankel_det(int a, int s, long double x)
{
    if (s == 0) return 1;
    const Discrete d = discretize(x, 1, a + 2 * s);
    std::vector<long double> pi;
    return std::exp(stieltjes(d, a, s, pi));
}

long double PencilRule::operator()(long double c, long double x) const
{
    long double sum = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * std::exp(c * x * nodes[i]);
    return sum;
}

PencilRule pencil_rule(int a, int s, int p, long double x, long double min_rate)
{
    const Discrete d = discretize(x, min_rate, a + p + 2 * s);
    std::vector<long double> pi;
    const long double scale = std::exp(stieltjes(d, a, s, pi));
    PencilRule rule;
    rule.nodes = d.t;
    rule.weights.resize(d.t.size());
    for (std::size_t i = 0; i < d.t.size(); ++i) {
        rule.weights[i] = scale * pi[i] * std::pow(d.t[i], p) * d.w[i];
    }
    return rule;
}

}  // namespace spiked::detail
