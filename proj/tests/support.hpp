#pragma once

// Shared test helpers: independent oracles and hand-rolled generators.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "acnet/ci_test.hpp"
#include "acnet/random.hpp"

namespace testing_support {

using Counts = std::vector<std::vector<std::vector<std::uint64_t>>>;  // [o][p][q]

/// Random table with dims <= max_rows x max_cols x max_slices, cells <= max_count.
inline Counts random_counts(acnet::Rng& rng, std::size_t max_rows, std::size_t max_cols, std::size_t max_slices,
                            std::uint64_t max_count, double zero_prob = 0.2) {
    const std::size_t r = 1 + rng.below(max_rows), c = 1 + rng.below(max_cols), s = 1 + rng.below(max_slices);
    Counts t(r, std::vector<std::vector<std::uint64_t>>(c, std::vector<std::uint64_t>(s)));
    for (auto& a : t)
        for (auto& b : a)
            for (auto& x : b) x = rng.bernoulli(zero_prob) ? 0 : rng.below(max_count + 1);
    return t;
}

inline acnet::ContingencyTable3D to_table(const Counts& t) {
    acnet::ContingencyTable3D table(t.size(), t[0].size(), t[0][0].size());
    for (std::size_t o = 0; o < t.size(); ++o)
        for (std::size_t p = 0; p < t[o].size(); ++p)
            for (std::size_t q = 0; q < t[o][p].size(); ++q)
                if (t[o][p][q]) table.add(o, p, q, t[o][p][q]);
    return table;
}

/// Loop-literal G^2: expected count E = C_{o*q} C_{*pq} / C_{**q}, and
/// G^2 = 2 sum C ln(C / E) over nonzero cells.
inline double oracle_g2(const Counts& t) {
    const std::size_t R = t.size(), C = t[0].size(), S = t[0][0].size();
    double g2 = 0.0;
    for (std::size_t q = 0; q < S; ++q) {
        double slice = 0.0;
        for (std::size_t o = 0; o < R; ++o)
            for (std::size_t p = 0; p < C; ++p) slice += static_cast<double>(t[o][p][q]);
        for (std::size_t o = 0; o < R; ++o)
            for (std::size_t p = 0; p < C; ++p) {
                const double n = static_cast<double>(t[o][p][q]);
                if (n == 0.0) continue;
                double row = 0.0, col = 0.0;
                for (std::size_t pp = 0; pp < C; ++pp) row += static_cast<double>(t[o][pp][q]);
                for (std::size_t oo = 0; oo < R; ++oo) col += static_cast<double>(t[oo][p][q]);
                g2 += 2.0 * n * std::log(n / (row * col / slice));
            }
    }
    return g2;
}

/// Upper tail of the chi-square distribution by composite Simpson quadrature.
/// With v = u^2 the density becomes 2 u^(k-1) exp(-u^2 / 2) / (2^(k/2) Gamma(k/2)),
/// smooth at the origin for every k >= 1; the tail is integrated directly.
inline double oracle_chi2_tail(double x, int k, int panels = 20000) {
    const double log_norm = std::log(2.0) - 0.5 * k * std::log(2.0) - std::lgamma(0.5 * k);
    auto f = [&](double u) {
        if (u == 0.0) return k == 1 ? std::exp(log_norm) : 0.0;
        return std::exp(log_norm + (k - 1) * std::log(u) - 0.5 * u * u);
    };
    const double a = std::sqrt(x), b = a + 16.0 + std::sqrt(static_cast<double>(k)) * 2.0;
    const double h = (b - a) / panels;
    double sum = f(a) + f(b);
    for (int i = 1; i < panels; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

inline std::vector<std::uint8_t> random_bits(acnet::Rng& rng, std::size_t n, double p) {
    std::vector<std::uint8_t> v(n);
    for (auto& x : v) x = rng.bernoulli(p) ? 1 : 0;
    return v;
}

}  // namespace testing_support
