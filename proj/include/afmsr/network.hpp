#pragma once

#include "afmsr/linalg.hpp"

#include <cstddef>
#include <random>
#include <vector>

namespace afmsr {

using Rng = std::mt19937_64;

/// An m-hop relay network: a source group, m-1 relay groups and a
/// destination group. Group k holds sizes[k] nodes.
struct Topology {
    std::vector<std::size_t> sizes;         ///< N_0, ..., N_m
    std::vector<double> power_budgets;      ///< P_{T,1}, ..., P_{T,m-1}
    double sigma_s2 = 1.0;                  ///< source symbol variance
    double sigma_n2 = 1.0;                  ///< noise variance, shared by every receiving group

    std::size_t hops() const noexcept { return sizes.empty() ? 0 : sizes.size() - 1; }
    std::size_t relay_groups() const noexcept { return hops() == 0 ? 0 : hops() - 1; }
    std::size_t group_size(std::size_t k) const { return sizes.at(k); }
    /// Budget of relay group i, 1 <= i <= m-1.
    double budget(std::size_t i) const { return power_budgets.at(i - 1); }

    /// Throws std::invalid_argument naming the first violated invariant.
    void validate() const;

    /// The three-hop (1, 4, 4, 2) network with unit budgets.
    static Topology reference();
};

/// One block-fading realisation. hop(k) carries group k to group k+1 and has
/// shape N_{k+1} x N_k, so hop(0) is H_s and hop(m-1) is H_d.
struct ChannelSet {
    std::vector<CMatrix> hops;

    const CMatrix& hop(std::size_t k) const { return hops.at(k); }
    const CMatrix& source() const { return hops.front(); }
    const CMatrix& destination() const { return hops.back(); }

    void validate(const Topology& topo) const;
};

/// Relay amplification coefficients; group(i) is a_i for 1 <= i <= m-1.
struct Allocation {
    std::vector<CVector> coeffs;

    const CVector& group(std::size_t i) const { return coeffs.at(i - 1); }
    CVector& group(std::size_t i) { return coeffs.at(i - 1); }

    void validate(const Topology& topo) const;

    /// A_i = sqrt(P_{T,i} / (N_i N_{i+1})) I for every group.
    static Allocation equal_power(const Topology& topo);
};

/// N_{i+1} a_i^H a_i
double group_power(const Topology& topo, const Allocation& alloc, std::size_t i);
/// True when every group meets its budget within rel_tol.
bool meets_power_constraints(const Topology& topo, const Allocation& alloc, double rel_tol = 1e-9);

/// Per-relay normalisation factors. gains[i-1][j] is the j-th diagonal entry
/// of F_i, and input_cov[i-1] is E(y_i y_i^H).
struct Normalizers {
    std::vector<std::vector<double>> gains;
    std::vector<CMatrix> input_cov;

    const std::vector<double>& f(std::size_t i) const { return gains.at(i - 1); }
    CMatrix f_matrix(std::size_t i) const { return CMatrix::diagonal(f(i)); }
};

/// Cascade of the network at one allocation. Indices follow the relay
/// groups: b[k] is B_k for k = 0..m-1 and to_end[k] is C_{k,m-1} for
/// k = 0..m (to_end[m] is the identity).
struct CascadeState {
    Normalizers norm;
    std::vector<CMatrix> b;
    std::vector<CMatrix> to_end;
    CMatrix phi;  ///< C_{0,m-1} C_{0,m-1}^H
    CMatrix z;    ///< sum_{k=1}^{m} C_{k,m-1} C_{k,m-1}^H

    std::size_t hops() const noexcept { return b.size(); }
    /// C_{first,last} = B_last ... B_first, identity of size N_first when first > last.
    CMatrix chain(std::size_t first, std::size_t last) const;
};

/// Draws every channel coefficient i.i.d. CN(0, 1).
ChannelSet draw_channels(const Topology& topo, Rng& rng);

/// Forward recursion for the F_i and E(y_i y_i^H).
Normalizers compute_normalizers(const Topology& topo, const ChannelSet& ch, const Allocation& alloc);

CascadeState compute_cascades(const Topology& topo, const ChannelSet& ch, const Allocation& alloc);
/// Same, with caller-supplied normalisation (used for fault injection).
CascadeState compute_cascades(const Topology& topo, const ChannelSet& ch, const Allocation& alloc,
                              Normalizers norm);

/// (1/m) log2(1 + (sigma_s^2 / sigma_n^2) (w^H Phi w) / (w^H Z w)), bits/s/Hz.
double sum_rate(const Topology& topo, const CascadeState& cascade, const CVector& w);

/// Per-phase signals of one symbol-level transmission. x[i-1], y[i-1] belong
/// to relay group i.
struct PropagationTrace {
    std::vector<CVector> x;
    std::vector<CVector> y;
    CVector d;
};

/// Symbol-level simulation of all m phases with fresh AWGN of variance
/// sigma_n^2 per entry per phase. Passing a null noise generator disables the
/// noise.
PropagationTrace propagate(const Topology& topo, const ChannelSet& ch, const Allocation& alloc,
                           const Normalizers& norm, const CVector& s, Rng* noise);

CVector propagate_symbols(const Topology& topo, const ChannelSet& ch, const Allocation& alloc, const CVector& s,
                          Rng& rng);
CVector propagate_noiseless(const Topology& topo, const ChannelSet& ch, const Allocation& alloc, const CVector& s);

/// Uniform QPSK symbols with E|s|^2 = sigma_s2, one vector of length
/// n_sources per symbol time.
std::vector<CVector> qpsk_source(std::size_t n_symbols, double sigma_s2, Rng& rng, std::size_t n_sources = 1);

inline constexpr std::size_t kDefaultPacketLength = 1500;

}  // namespace afmsr
