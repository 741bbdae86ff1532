#pragma once

#include "afmsr/linalg.hpp"
#include "afmsr/network.hpp"
#include "afmsr/optimizer.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace afmsr {

/// Uniform 16-level mid-rise quantiser applied to each real and imaginary
/// component on [-range_limit, range_limit].
struct QuantizerSpec {
    static constexpr unsigned bits_per_component = 4;
    static constexpr unsigned levels = 1u << bits_per_component;
    double range_limit = 1.0;

    /// Range for relay group i: sqrt(P_{T,i} / N_{i+1}), the largest
    /// component magnitude a budget-satisfying a_i can have.
    static QuantizerSpec for_group(const Topology& topo, std::size_t i);

    double step() const noexcept { return 2.0 * range_limit / levels; }
    unsigned level(double v) const noexcept;
    double reconstruct(unsigned level) const noexcept;
};

/// Feedback payload of one relay group. Each coefficient takes 8 bits: the
/// real-part level MSB first, then the imaginary-part level MSB first.
/// Coefficients follow relay index order. One bit per byte, values 0 or 1.
struct CoeffBits {
    std::vector<std::uint8_t> bits;

    std::size_t size() const noexcept { return bits.size(); }
    friend bool operator==(const CoeffBits&, const CoeffBits&) = default;
};

struct BscSpec {
    double pe = 0.0;
    void validate() const;
};

CoeffBits quantize_group(const CVector& a, const QuantizerSpec& spec);
/// Throws std::invalid_argument unless the length is a positive multiple of 8.
CVector dequantize_group(const CoeffBits& bits, const QuantizerSpec& spec);

/// Flips each bit independently with probability pe. One uniform draw is
/// consumed per bit whatever pe is, so generators seeded alike produce
/// nested flip patterns for increasing pe.
CoeffBits bsc_corrupt(const CoeffBits& bits, const BscSpec& spec, Rng& rng);

/// Quantise, corrupt and reconstruct every group of the allocation. The
/// result is what the relays apply; it is not rescaled onto the budget.
Allocation feedback_allocation(const Allocation& alloc, const Topology& topo, double pe, Rng& rng);

/// Sum rate realised when the relays apply the fed-back allocation and the
/// destination keeps the receiver of the solution.
double apply_feedback(const MsrSolution& solution, const Topology& topo, const ChannelSet& ch, double pe, Rng& rng);

}  // namespace afmsr
