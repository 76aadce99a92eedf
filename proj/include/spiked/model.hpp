#pragma once

#include <string>
#include <string_view>

namespace spiked {

enum class Variant { complex, real, singular };

// W ~ W_n(m, I + theta v v^H); alpha = m - n, beta = theta / (1 + theta).
struct SpikedModel {
    int n = 2;
    int m = 2;
    double theta = 0.0;
    Variant variant = Variant::complex;

    int alpha() const { return m - n; }
    double beta() const { return theta / (1.0 + theta); }

    // Throws UnsupportedModel when the variant invariants do not hold.
    void validate() const;
};

// Squared projections |v^H u_l|^2 onto sample eigenvectors.
enum class Statistic {
    z1,        // smallest eigenvalue, complex
    z2,        // second smallest, complex
    zn,        // largest, complex
    nz1_asym,  // n * Z1 in the large-n limit
    w1_real,   // smallest, real n = 2
    w2_real,   // largest, real n = 2
    y1_sing,   // smallest nonzero, singular
    yn_sing,   // largest, singular
};

std::string_view to_string(Variant v);
std::string_view to_string(Statistic s);
Statistic parse_statistic(std::string_view name);

// Variant a statistic is defined for.
Variant variant_of(Statistic s);

// Densities whose support endpoints carry z^{-1/2}(1-z)^{-1/2} factors.
bool is_arcsine_type(Statistic s);

}  // namespace spiked
