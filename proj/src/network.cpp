#include "afmsr/network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace afmsr {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

CVector hadamard(const CVector& a, const CVector& b) {
    CVector out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
    return out;
}

void add_noise(CVector& v, double variance, Rng& rng) {
    std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
    for (auto& z : v) z += cplx(n(rng), n(rng));
}

}  // namespace

// ---------------------------------------------------------------------------
// Topology / channels / allocations

void Topology::validate() const {
    if (sizes.size() < 3) {
        throw std::invalid_argument("topology: need at least two hops (source, one relay group, destination), got " +
                                    std::to_string(sizes.size()) + " group sizes");
    }
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        if (sizes[k] == 0) throw std::invalid_argument("topology: group " + std::to_string(k) + " is empty");
    }
    if (power_budgets.size() != relay_groups()) {
        throw std::invalid_argument("topology: expected " + std::to_string(relay_groups()) +
                                    " power budgets, got " + std::to_string(power_budgets.size()));
    }
    for (std::size_t i = 0; i < power_budgets.size(); ++i) {
        if (!positive_finite(power_budgets[i])) {
            throw std::invalid_argument("topology: power budget of relay group " + std::to_string(i + 1) +
                                        " must be positive");
        }
    }
    if (!positive_finite(sigma_s2)) throw std::invalid_argument("topology: sigma_s2 must be positive");
    if (!positive_finite(sigma_n2)) throw std::invalid_argument("topology: sigma_n2 must be positive");
}

Topology Topology::reference() {
    Topology topo;
    topo.sizes = {1, 4, 4, 2};
    topo.power_budgets = {1.0, 1.0};
    return topo;
}

void ChannelSet::validate(const Topology& topo) const {
    if (hops.size() != topo.hops()) {
        throw std::invalid_argument("channels: expected " + std::to_string(topo.hops()) + " hop matrices, got " +
                                    std::to_string(hops.size()));
    }
    for (std::size_t k = 0; k < hops.size(); ++k) {
        if (hops[k].rows() != topo.sizes[k + 1] || hops[k].cols() != topo.sizes[k]) {
            std::ostringstream os;
            os << "channels: hop " << k << " is " << hops[k].rows() << "x" << hops[k].cols() << ", expected "
               << topo.sizes[k + 1] << "x" << topo.sizes[k];
            throw std::invalid_argument(os.str());
        }
        if (!hops[k].all_finite()) throw std::invalid_argument("channels: non-finite entry in hop " + std::to_string(k));
    }
}

void Allocation::validate(const Topology& topo) const {
    if (coeffs.size() != topo.relay_groups()) {
        throw std::invalid_argument("allocation: expected " + std::to_string(topo.relay_groups()) +
                                    " relay groups, got " + std::to_string(coeffs.size()));
    }
    for (std::size_t i = 1; i <= coeffs.size(); ++i) {
        if (group(i).size() != topo.sizes[i]) {
            throw std::invalid_argument("allocation: group " + std::to_string(i) + " has " +
                                        std::to_string(group(i).size()) + " coefficients, expected " +
                                        std::to_string(topo.sizes[i]));
        }
    }
}

Allocation Allocation::equal_power(const Topology& topo) {
    Allocation alloc;
    for (std::size_t i = 1; i <= topo.relay_groups(); ++i) {
        const double n_i = static_cast<double>(topo.sizes[i]);
        const double n_next = static_cast<double>(topo.sizes[i + 1]);
        CVector a = CVector::ones(topo.sizes[i]);
        a *= std::sqrt(topo.budget(i) / (n_i * n_next));
        alloc.coeffs.push_back(std::move(a));
    }
    return alloc;
}

double group_power(const Topology& topo, const Allocation& alloc, std::size_t i) {
    return static_cast<double>(topo.sizes.at(i + 1)) * alloc.group(i).squared_norm();
}

bool meets_power_constraints(const Topology& topo, const Allocation& alloc, double rel_tol) {
    for (std::size_t i = 1; i <= topo.relay_groups(); ++i) {
        if (std::abs(group_power(topo, alloc, i) - topo.budget(i)) > rel_tol * topo.budget(i)) return false;
    }
    return true;
}

ChannelSet draw_channels(const Topology& topo, Rng& rng) {
    topo.validate();
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    ChannelSet ch;
    for (std::size_t k = 0; k < topo.hops(); ++k) {
        CMatrix h(topo.sizes[k + 1], topo.sizes[k]);
        for (std::size_t r = 0; r < h.rows(); ++r)
            for (std::size_t c = 0; c < h.cols(); ++c) {
                const double re = n(rng);
                const double im = n(rng);
                h(r, c) = cplx(re, im);
            }
        ch.hops.push_back(std::move(h));
    }
    return ch;
}

// ---------------------------------------------------------------------------
// Normalisation and cascades

Normalizers compute_normalizers(const Topology& topo, const ChannelSet& ch, const Allocation& alloc) {
    topo.validate();
    ch.validate(topo);
    alloc.validate(topo);

    Normalizers out;
    for (std::size_t i = 1; i <= topo.relay_groups(); ++i) {
        // E(x_i x_i^H)
        CMatrix rx = CMatrix::identity(topo.sizes[i]);
        rx *= topo.sigma_n2;
        if (i == 1) {
            rx += topo.sigma_s2 * (ch.source() * hermitian(ch.source()));
        } else {
            const CMatrix ha = ch.hop(i - 1) * CMatrix::diagonal(alloc.group(i - 1));
            rx += ha * out.input_cov.back() * hermitian(ha);
        }

        std::vector<double> f(topo.sizes[i]);
        for (std::size_t j = 0; j < f.size(); ++j) {
            const double power = rx(j, j).real();
            if (!(power > 0.0)) throw std::logic_error("compute_normalizers: non-positive relay input power");
            f[j] = 1.0 / std::sqrt(power);
        }
        const CMatrix fm = CMatrix::diagonal(f);
        out.input_cov.push_back(hermitian_part(fm * rx * fm));
        out.gains.push_back(std::move(f));
    }
    return out;
}

CascadeState compute_cascades(const Topology& topo, const ChannelSet& ch, const Allocation& alloc) {
    return compute_cascades(topo, ch, alloc, compute_normalizers(topo, ch, alloc));
}

CascadeState compute_cascades(const Topology& topo, const ChannelSet& ch, const Allocation& alloc,
                              Normalizers norm) {
    topo.validate();
    ch.validate(topo);
    alloc.validate(topo);
    const std::size_t m = topo.hops();
    if (norm.gains.size() != m - 1) throw std::invalid_argument("compute_cascades: normaliser count mismatch");
    for (std::size_t i = 1; i < m; ++i) {
        if (norm.f(i).size() != topo.sizes[i]) {
            throw std::invalid_argument("compute_cascades: normaliser of group " + std::to_string(i) +
                                        " has the wrong size");
        }
    }

    CascadeState st;
    st.b.reserve(m);
    st.b.push_back(ch.source());
    for (std::size_t k = 1; k < m; ++k) {
        st.b.push_back(ch.hop(k) * CMatrix::diagonal(alloc.group(k)) * norm.f_matrix(k));
    }

    st.to_end.assign(m + 1, CMatrix());
    st.to_end[m] = CMatrix::identity(topo.sizes[m]);
    for (std::size_t k = m; k-- > 0;) st.to_end[k] = st.to_end[k + 1] * st.b[k];

    st.phi = hermitian_part(st.to_end[0] * hermitian(st.to_end[0]));
    CMatrix z(topo.sizes[m], topo.sizes[m]);
    for (std::size_t k = 1; k <= m; ++k) z += st.to_end[k] * hermitian(st.to_end[k]);
    st.z = hermitian_part(z);
    st.norm = std::move(norm);
    return st;
}

CMatrix CascadeState::chain(std::size_t first, std::size_t last) const {
    const std::size_t m = hops();
    if (first > m) throw std::out_of_range("chain: start index beyond the destination");
    if (first > last) {
        const std::size_t n = first < m ? b[first].cols() : b[m - 1].rows();
        return CMatrix::identity(n);
    }
    if (last >= m) throw std::out_of_range("chain: end index beyond the last hop");
    CMatrix out = b[first];
    for (std::size_t k = first + 1; k <= last; ++k) out = b[k] * out;
    return out;
}

double sum_rate(const Topology& topo, const CascadeState& cascade, const CVector& w) {
    if (w.squared_norm() == 0.0) throw std::domain_error("sum_rate: receiver is the zero vector");
    const double q = std::max(0.0, rayleigh_quotient(w, cascade.phi, cascade.z));
    const double snr = topo.sigma_s2 / topo.sigma_n2;
    return std::log2(1.0 + snr * q) / static_cast<double>(topo.hops());
}

// ---------------------------------------------------------------------------
// Symbol-level propagation

PropagationTrace propagate(const Topology& topo, const ChannelSet& ch, const Allocation& alloc,
                           const Normalizers& norm, const CVector& s, Rng* noise) {
    topo.validate();
    ch.validate(topo);
    alloc.validate(topo);
    if (s.size() != topo.sizes[0]) {
        throw std::invalid_argument("propagate: source vector has length " + std::to_string(s.size()) +
                                    ", expected " + std::to_string(topo.sizes[0]));
    }
    const std::size_t m = topo.hops();

    PropagationTrace tr;
    for (std::size_t i = 1; i < m; ++i) {
        CVector x = i == 1 ? ch.source() * s : ch.hop(i - 1) * hadamard(alloc.group(i - 1), tr.y.back());
        if (noise != nullptr) add_noise(x, topo.sigma_n2, *noise);
        CVector y(x.size());
        const auto& f = norm.f(i);
        for (std::size_t j = 0; j < x.size(); ++j) y[j] = f[j] * x[j];
        tr.x.push_back(std::move(x));
        tr.y.push_back(std::move(y));
    }
    tr.d = ch.destination() * hadamard(alloc.group(m - 1), tr.y.back());
    if (noise != nullptr) add_noise(tr.d, topo.sigma_n2, *noise);
    return tr;
}

CVector propagate_symbols(const Topology& topo, const ChannelSet& ch, const Allocation& alloc, const CVector& s,
                          Rng& rng) {
    return propagate(topo, ch, alloc, compute_normalizers(topo, ch, alloc), s, &rng).d;
}

CVector propagate_noiseless(const Topology& topo, const ChannelSet& ch, const Allocation& alloc, const CVector& s) {
    return propagate(topo, ch, alloc, compute_normalizers(topo, ch, alloc), s, nullptr).d;
}

std::vector<CVector> qpsk_source(std::size_t n_symbols, double sigma_s2, Rng& rng, std::size_t n_sources) {
    if (n_symbols == 0) throw std::invalid_argument("qpsk_source: need at least one symbol");
    if (n_sources == 0) throw std::invalid_argument("qpsk_source: need at least one source");
    if (!positive_finite(sigma_s2)) throw std::invalid_argument("qpsk_source: sigma_s2 must be positive");
    const double amp = std::sqrt(sigma_s2 / 2.0);
    std::uniform_int_distribution<int> pick(0, 3);
    std::vector<CVector> out;
    out.reserve(n_symbols);
    for (std::size_t t = 0; t < n_symbols; ++t) {
        CVector s(n_sources);
        for (auto& z : s) {
            const int q = pick(rng);
            z = cplx((q & 1) ? -amp : amp, (q & 2) ? -amp : amp);
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace afmsr
