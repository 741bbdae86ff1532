#pragma once

#include "afmsr/linalg.hpp"
#include "afmsr/network.hpp"

#include <complex>
#include <random>

namespace afmsr::testing {

inline CMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    CMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = cplx(n(rng), n(rng));
    return m;
}

inline CVector random_vector(std::size_t len, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    CVector v(len);
    for (auto& z : v) z = cplx(n(rng), n(rng));
    return v;
}

inline CMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
    const CMatrix a = random_matrix(n, n, rng);
    return hermitian_part(a);
}

/// A A^H + shift I, positive definite for shift > 0.
inline CMatrix random_pd(std::size_t n, std::mt19937_64& rng, double shift = 0.5) {
    const CMatrix a = random_matrix(n, n, rng);
    return hermitian_part(a * hermitian(a)) + shift * CMatrix::identity(n);
}

/// Rank-limited PSD matrix B B^H with B of shape n x rank.
inline CMatrix random_psd(std::size_t n, std::size_t rank, std::mt19937_64& rng) {
    const CMatrix b = random_matrix(n, rank, rng);
    return hermitian_part(b * hermitian(b));
}

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    double worst = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
    return worst;
}

inline double max_abs_diff(const CVector& a, const CVector& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    return worst;
}

/// |<a, b>| / (|a| |b|), 1 when parallel up to a complex factor.
inline double alignment(const CVector& a, const CVector& b) {
    return std::abs(inner(a, b)) / (a.norm() * b.norm());
}

/// Single-source topology with hop count in [min_hops, max_hops], relay and
/// destination groups of 1..max_size nodes and budgets in [0.5, 2].
inline Topology random_topology(std::mt19937_64& rng, std::size_t min_hops, std::size_t max_hops,
                                std::size_t max_size) {
    std::uniform_int_distribution<std::size_t> hops(min_hops, max_hops);
    std::uniform_int_distribution<std::size_t> size(1, max_size);
    std::uniform_real_distribution<double> budget(0.5, 2.0);
    std::uniform_real_distribution<double> noise(0.1, 1.0);
    Topology topo;
    const std::size_t m = hops(rng);
    topo.sizes.push_back(1);
    for (std::size_t k = 1; k <= m; ++k) topo.sizes.push_back(size(rng));
    for (std::size_t i = 1; i < m; ++i) topo.power_budgets.push_back(budget(rng));
    topo.sigma_s2 = 1.0;
    topo.sigma_n2 = noise(rng);
    return topo;
}

/// Random complex allocation (not constraint-normalised).
inline Allocation random_allocation(const Topology& topo, std::mt19937_64& rng) {
    Allocation alloc;
    for (std::size_t i = 1; i <= topo.relay_groups(); ++i) alloc.coeffs.push_back(random_vector(topo.sizes[i], rng));
    return alloc;
}

/// Scalar two-hop network with unit channels, variances and budget.
inline Topology scalar_topology() {
    Topology topo;
    topo.sizes = {1, 1, 1};
    topo.power_budgets = {1.0};
    topo.sigma_s2 = 1.0;
    topo.sigma_n2 = 1.0;
    return topo;
}

inline ChannelSet unit_channels(const Topology& topo) {
    ChannelSet ch;
    for (std::size_t k = 0; k < topo.hops(); ++k) {
        CMatrix h(topo.sizes[k + 1], topo.sizes[k]);
        for (std::size_t r = 0; r < h.rows(); ++r)
            for (std::size_t c = 0; c < h.cols(); ++c) h(r, c) = 1.0;
        ch.hops.push_back(std::move(h));
    }
    return ch;
}

// 0.5 * log2(4/3)
inline constexpr double kScalarSumRate = 0.20751874963942190927;

}  // namespace afmsr::testing
