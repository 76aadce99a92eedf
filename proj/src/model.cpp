#include "spiked/model.hpp"

#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "spiked/errors.hpp"

namespace spiked {

namespace {

constexpr std::array<std::pair<Statistic, std::string_view>, 8> kNames{{
    {Statistic::z1, "z1"},
    {Statistic::z2, "z2"},
    {Statistic::zn, "zn"},
    {Statistic::nz1_asym, "nz1_asym"},
    {Statistic::w1_real, "w1_real"},
    {Statistic::w2_real, "w2_real"},
    {Statistic::y1_sing, "y1_sing"},
    {Statistic::yn_sing, "yn_sing"},
}};

}  // namespace

void SpikedModel::validate() const
{
    if (n < 1) throw UnsupportedModel("n must be at least 1");
    if (m < 1) throw UnsupportedModel("m must be at least 1");
    if (!std::isfinite(theta) || theta < 0) throw UnsupportedModel("theta must be finite and >= 0");
    if (variant == Variant::singular) {
        if (m >= n) throw UnsupportedModel("singular variant requires m < n");
    } else if (m < n) {
        throw UnsupportedModel(std::string(to_string(variant)) + " variant requires m >= n");
    }
}

std::string_view to_string(Variant v)
{
    switch (v) {
    case Variant::complex:
        return "complex";
    case Variant::real:
        return "real";
    case Variant::singular:
        return "singular";
    }
    return "unknown";
}

std::string_view to_string(Statistic s)
{
    for (const auto& [stat, name] : kNames) {
        if (stat == s) return name;
    }
    return "unknown";
}

Statistic parse_statistic(std::string_view name)
{
    for (const auto& [stat, text] : kNames) {
        if (text == name) return stat;
    }
    throw UnsupportedModel("unknown statistic '" + std::string(name) + "'");
}

Variant variant_of(Statistic s)
{
    switch (s) {
    case Statistic::w1_real:
    case Statistic::w2_real:
        return Variant::real;
    case Statistic::y1_sing:
    case Statistic::yn_sing:
        return Variant::singular;
    default:
        return Variant::complex;
    }
}

bool is_arcsine_type(Statistic s)
{
    return s == Statistic::w1_real || s == Statistic::w2_real;
}

}  // namespace spiked
