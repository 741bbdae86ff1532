#include "afmsr/validation.hpp"

#include "afmsr/harness.hpp"
#include "afmsr/network.hpp"
#include "afmsr/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>

namespace afmsr {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

Topology random_network(Rng& rng, std::size_t max_hops) {
    std::uniform_int_distribution<std::size_t> hops(2, max_hops);
    std::uniform_int_distribution<std::size_t> size(1, 5);
    std::uniform_real_distribution<double> budget(0.5, 2.0);
    std::uniform_real_distribution<double> snr(0.0, 20.0);
    Topology topo;
    const std::size_t m = hops(rng);
    topo.sizes.push_back(1);
    for (std::size_t k = 1; k <= m; ++k) topo.sizes.push_back(size(rng));
    for (std::size_t i = 1; i < m; ++i) topo.power_budgets.push_back(budget(rng));
    return with_snr_db(topo, snr(rng));
}

Allocation random_allocation(const Topology& topo, Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Allocation alloc;
    for (std::size_t i = 1; i <= topo.relay_groups(); ++i) {
        CVector a(topo.sizes[i]);
        for (auto& z : a) z = cplx(n(rng), n(rng));
        alloc.coeffs.push_back(std::move(a));
    }
    return alloc;
}

Normalizers scaled(Normalizers norm, double scale) {
    for (auto& group : norm.gains)
        for (auto& f : group) f *= scale;
    return norm;
}

CheckResult scalar_closed_form() {
    Topology topo;
    topo.sizes = {1, 1, 1};
    topo.power_budgets = {1.0};
    const ChannelSet ch{{CMatrix{{1.0}}, CMatrix{{1.0}}}};
    const double expected = 0.5 * std::log2(4.0 / 3.0);
    const double analytic = sum_rate(topo, compute_cascades(topo, ch, Allocation::equal_power(topo)), CVector{1.0});
    const double qr = alternate(topo, ch, {EigMethod::QR}).sum_rate;
    const double power = alternate(topo, ch, {EigMethod::Power}).sum_rate;
    const double err = std::max({std::abs(analytic - expected), std::abs(qr - expected), std::abs(power - expected)});
    return {"scalar-closed-form", err <= 1e-9, fmt("SR = %.9f (expected %.9f)", qr, expected)};
}

// Relay input power recomputed from the cascade matrices rather than from
// the normaliser recursion.
CheckResult normalization_analytic(Rng& rng, double scale) {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Topology topo = random_network(rng, 4);
        const ChannelSet ch = draw_channels(topo, rng);
        const Allocation alloc = random_allocation(topo, rng);
        const CascadeState st = compute_cascades(topo, ch, alloc, scaled(compute_normalizers(topo, ch, alloc), scale));
        for (std::size_t i = 1; i <= topo.relay_groups(); ++i) {
            const CMatrix head = st.chain(0, i - 1);
            CMatrix rx = topo.sigma_s2 * (head * hermitian(head));
            for (std::size_t k = 1; k <= i; ++k) {
                const CMatrix c = st.chain(k, i - 1);
                rx += topo.sigma_n2 * (c * hermitian(c));
            }
            const auto& f = st.norm.f(i);
            for (std::size_t j = 0; j < f.size(); ++j) worst = std::max(worst, std::abs(f[j] * f[j] * rx(j, j).real() - 1.0));
        }
    }
    return {"normalization-analytic", worst <= 1e-10, fmt("max |E|y|^2 - 1| = %.3g", worst)};
}

CheckResult normalization_monte_carlo(Rng& rng, double scale) {
    const Topology topo = with_snr_db(Topology::reference(), 10.0);
    const ChannelSet ch = draw_channels(topo, rng);
    const Allocation alloc = Allocation::equal_power(topo);
    const Normalizers norm = scaled(compute_normalizers(topo, ch, alloc), scale);
    const auto symbols = qpsk_source(100000, topo.sigma_s2, rng);
    std::vector<std::vector<double>> power;
    for (std::size_t i = 1; i <= topo.relay_groups(); ++i) power.emplace_back(topo.sizes[i], 0.0);
    for (const auto& s : symbols) {
        const PropagationTrace tr = propagate(topo, ch, alloc, norm, s, &rng);
        for (std::size_t i = 0; i < power.size(); ++i)
            for (std::size_t j = 0; j < power[i].size(); ++j) power[i][j] += std::norm(tr.y[i][j]);
    }
    double worst = 0.0;
    for (const auto& group : power)
        for (double p : group) worst = std::max(worst, std::abs(p / symbols.size() - 1.0));
    return {"normalization-monte-carlo", worst <= 0.02, fmt("max relative deviation %.4f over 1e5 symbols", worst)};
}

CheckResult cascade_equivalence(Rng& rng) {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Topology topo = random_network(rng, 4);
        const ChannelSet ch = draw_channels(topo, rng);
        const Allocation alloc = random_allocation(topo, rng);
        const CascadeState st = compute_cascades(topo, ch, alloc);
        const CVector s = qpsk_source(1, topo.sigma_s2, rng).front();
        const CVector diff = propagate_noiseless(topo, ch, alloc, s) - st.to_end[0] * s;
        worst = std::max(worst, diff.norm_inf());
    }
    return {"cascade-equivalence", worst <= 1e-10, fmt("max |d - C s| = %.3g", worst)};
}

CheckResult quadratic_form_identities(Rng& rng) {
    double worst = 0.0;
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Topology topo = random_network(rng, 3);
        const ChannelSet ch = draw_channels(topo, rng);
        const Allocation alloc = random_allocation(topo, rng);
        const CascadeState st = compute_cascades(topo, ch, alloc);
        CVector w(topo.sizes.back());
        for (auto& z : w) z = cplx(n(rng), n(rng));
        for (std::size_t i = 1; i <= topo.relay_groups(); ++i) {
            const CVector wi = normalize_receiver(w, st, i);
            const GroupForms forms = group_forms(topo, ch, st, wi, i);
            const double signal = quadratic_form(wi, st.phi).real();
            const double total = quadratic_form(wi, st.z).real();
            const double s_err = std::abs(quadratic_form(alloc.group(i), forms.signal).real() - signal) / signal;
            const double n_err =
                std::abs(quadratic_form(alloc.group(i), forms.noise).real() + forms.tail - total) / total;
            worst = std::max({worst, s_err, n_err});
        }
    }
    return {"quadratic-form-identities", worst <= 1e-9, fmt("max relative error %.3g", worst)};
}

CheckResult solver_consistency(Rng& rng) {
    const Topology topo = with_snr_db(Topology::reference(), 10.0);
    double worst = 0.0;
    bool budgets = true;
    bool monotone = true;
    for (int trial = 0; trial < 10; ++trial) {
        const ChannelSet ch = draw_channels(topo, rng);
        const MsrSolution qr = alternate(topo, ch, {EigMethod::QR});
        const MsrSolution power = alternate(topo, ch, {EigMethod::Power});
        worst = std::max(worst, std::abs(qr.sum_rate - power.sum_rate) / qr.sum_rate);
        budgets = budgets && meets_power_constraints(topo, qr.alloc) && meets_power_constraints(topo, power.alloc);
        for (const auto* sol : {&qr, &power})
            for (const auto& step : sol->receiver_steps) monotone = monotone && step.after >= step.before - 1e-10;
    }
    return {"solver-consistency", worst <= 1e-6 && budgets && monotone,
            fmt("QR vs power relative gap %.3g", worst) + (budgets ? ", budgets met" : ", budget violated") +
                (monotone ? ", receiver steps monotone" : ", receiver step decreased SR")};
}

CheckResult guarded(const char* name, const std::function<CheckResult()>& check) {
    try {
        return check();
    } catch (const std::exception& e) {
        return {name, false, std::string("threw: ") + e.what()};
    }
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidationOptions& opts) {
    Rng rng(opts.seed);
    std::vector<CheckResult> out;
    out.push_back(guarded("scalar-closed-form", [] { return scalar_closed_form(); }));
    out.push_back(guarded("normalization-analytic", [&] { return normalization_analytic(rng, opts.normalizer_scale); }));
    out.push_back(
        guarded("normalization-monte-carlo", [&] { return normalization_monte_carlo(rng, opts.normalizer_scale); }));
    out.push_back(guarded("cascade-equivalence", [&] { return cascade_equivalence(rng); }));
    out.push_back(guarded("quadratic-form-identities", [&] { return quadratic_form_identities(rng); }));
    out.push_back(guarded("solver-consistency", [&] { return solver_consistency(rng); }));
    return out;
}

}  // namespace afmsr
