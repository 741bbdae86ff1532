#include "afmsr/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace afmsr {

QuantizerSpec QuantizerSpec::for_group(const Topology& topo, std::size_t i) {
    if (i < 1 || i > topo.relay_groups()) throw std::out_of_range("quantizer: no relay group " + std::to_string(i));
    QuantizerSpec spec;
    spec.range_limit = std::sqrt(topo.budget(i) / static_cast<double>(topo.sizes[i + 1]));
    return spec;
}

unsigned QuantizerSpec::level(double v) const noexcept {
    const double cell = std::floor((v + range_limit) / step());
    if (!(cell > 0.0)) return 0;  // also catches NaN
    return static_cast<unsigned>(std::min(cell, static_cast<double>(levels - 1)));
}

double QuantizerSpec::reconstruct(unsigned level) const noexcept {
    return -range_limit + (static_cast<double>(level) + 0.5) * step();
}

void BscSpec::validate() const {
    if (!(pe >= 0.0 && pe <= 1.0)) throw std::invalid_argument("bsc: flip probability must lie in [0, 1]");
}

CoeffBits quantize_group(const CVector& a, const QuantizerSpec& spec) {
    if (!(spec.range_limit > 0.0)) throw std::invalid_argument("quantize_group: range limit must be positive");
    CoeffBits out;
    out.bits.reserve(a.size() * 2 * QuantizerSpec::bits_per_component);
    const auto push_level = [&](unsigned lv) {
        for (unsigned b = QuantizerSpec::bits_per_component; b-- > 0;) out.bits.push_back((lv >> b) & 1u);
    };
    for (const cplx& z : a) {
        push_level(spec.level(z.real()));
        push_level(spec.level(z.imag()));
    }
    return out;
}

CVector dequantize_group(const CoeffBits& bits, const QuantizerSpec& spec) {
    constexpr std::size_t per_coeff = 2 * QuantizerSpec::bits_per_component;
    if (bits.size() == 0 || bits.size() % per_coeff != 0) {
        throw std::invalid_argument("dequantize_group: bit count " + std::to_string(bits.size()) +
                                    " is not a positive multiple of 8");
    }
    const auto read_level = [&](std::size_t offset) {
        unsigned lv = 0;
        for (std::size_t b = 0; b < QuantizerSpec::bits_per_component; ++b) {
            const std::uint8_t bit = bits.bits[offset + b];
            if (bit > 1) throw std::invalid_argument("dequantize_group: bit values must be 0 or 1");
            lv = (lv << 1) | bit;
        }
        return lv;
    };
    CVector out(bits.size() / per_coeff);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const std::size_t base = k * per_coeff;
        out[k] = cplx(spec.reconstruct(read_level(base)),
                      spec.reconstruct(read_level(base + QuantizerSpec::bits_per_component)));
    }
    return out;
}

CoeffBits bsc_corrupt(const CoeffBits& bits, const BscSpec& spec, Rng& rng) {
    spec.validate();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    CoeffBits out = bits;
    for (auto& bit : out.bits) {
        if (u(rng) < spec.pe) bit ^= 1u;
    }
    return out;
}

Allocation feedback_allocation(const Allocation& alloc, const Topology& topo, double pe, Rng& rng) {
    alloc.validate(topo);
    const BscSpec bsc{pe};
    bsc.validate();
    Allocation out;
    for (std::size_t i = 1; i <= topo.relay_groups(); ++i) {
        const QuantizerSpec spec = QuantizerSpec::for_group(topo, i);
        out.coeffs.push_back(dequantize_group(bsc_corrupt(quantize_group(alloc.group(i), spec), bsc, rng), spec));
    }
    return out;
}

double apply_feedback(const MsrSolution& solution, const Topology& topo, const ChannelSet& ch, double pe, Rng& rng) {
    const Allocation applied = feedback_allocation(solution.alloc, topo, pe, rng);
    return sum_rate(topo, compute_cascades(topo, ch, applied), solution.w);
}

}  // namespace afmsr
