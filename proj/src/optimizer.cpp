#include "afmsr/optimizer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace afmsr {

namespace {

void require_group(const Topology& topo, std::size_t i, const char* what) {
    if (i < 1 || i > topo.relay_groups()) {
        throw std::out_of_range(std::string(what) + ": relay group " + std::to_string(i) + " does not exist");
    }
}

// Scales a unit-norm direction so that N_{i+1} a^H a = P_{T,i}.
CVector onto_budget(CVector a, const Topology& topo, std::size_t i) {
    const double target = topo.budget(i) / static_cast<double>(topo.sizes[i + 1]);
    a *= std::sqrt(target / a.squared_norm());
    return a;
}

}  // namespace

void SolverOptions::validate() const {
    if (!(outer_tol > 0.0)) throw std::invalid_argument("solver: outer_tol must be positive");
    if (max_outer_iter == 0) throw std::invalid_argument("solver: max_outer_iter must be at least 1");
}

CVector receiver_step(const CascadeState& cascade, const SolverOptions& opts) {
    return generalized_dominant(cascade.phi, cascade.z, opts.eig_method).vector;
}

CMatrix tail_noise(const CascadeState& cascade, std::size_t i) {
    const std::size_t m = cascade.hops();
    if (i < 1 || i >= m) throw std::out_of_range("tail_noise: relay group " + std::to_string(i) + " does not exist");
    CMatrix t = cascade.to_end[m] * hermitian(cascade.to_end[m]);
    for (std::size_t k = i + 1; k < m; ++k) t += cascade.to_end[k] * hermitian(cascade.to_end[k]);
    return hermitian_part(t);
}

CVector normalize_receiver(const CVector& w, const CascadeState& cascade, std::size_t i) {
    const cplx q = quadratic_form(w, tail_noise(cascade, i));
    if (!(q.real() > 0.0)) throw std::domain_error("normalize_receiver: w^H T_i w is not positive");
    CVector out = w;
    out *= 1.0 / std::sqrt(q.real());
    return out;
}

GroupForms group_forms(const Topology& topo, const ChannelSet& ch, const CascadeState& cascade,
                       const CVector& w_i, std::size_t i) {
    require_group(topo, i, "group_forms");
    const std::size_t m = topo.hops();
    const std::size_t n_i = topo.sizes[i];
    if (w_i.size() != topo.sizes[m]) throw std::invalid_argument("group_forms: receiver length mismatch");
    if (cascade.hops() != m) throw std::invalid_argument("group_forms: cascade does not match the topology");

    // r = w_i^H C_{i+1,m-1} H_{i,i+1}; G = diag(r) F_i.
    const CVector u = hermitian(cascade.to_end[i + 1] * ch.hop(i)) * w_i;
    const auto& f = cascade.norm.f(i);
    std::vector<cplx> g(n_i);
    for (std::size_t j = 0; j < n_i; ++j) g[j] = std::conj(u[j]) * f[j];

    const CMatrix head = cascade.chain(0, i - 1);
    const CMatrix source_cov = head * hermitian(head);
    CMatrix noise_cov = CMatrix::identity(n_i);
    for (std::size_t k = 1; k < i; ++k) {
        const CMatrix c = cascade.chain(k, i - 1);
        noise_cov += c * hermitian(c);
    }

    // conj(G S G^H)
    const auto sandwich = [&](const CMatrix& s) {
        CMatrix out(n_i, n_i);
        for (std::size_t j = 0; j < n_i; ++j)
            for (std::size_t l = 0; l < n_i; ++l) out(j, l) = std::conj(g[j] * s(j, l) * std::conj(g[l]));
        return hermitian_part(out);
    };

    GroupForms forms;
    forms.signal = sandwich(source_cov);
    forms.noise = sandwich(noise_cov);
    forms.tail = quadratic_form(w_i, tail_noise(cascade, i)).real();
    const double weight = static_cast<double>(topo.sizes[i + 1]) / topo.budget(i) * forms.tail;
    forms.pencil = forms.noise + weight * CMatrix::identity(n_i);
    return forms;
}

CVector allocation_step(const GroupForms& forms, const Topology& topo, std::size_t i, const SolverOptions& opts) {
    require_group(topo, i, "allocation_step");
    if (forms.signal.rows() != topo.sizes[i]) throw std::invalid_argument("allocation_step: form size mismatch");
    const EigenResult e = generalized_dominant(forms.signal, forms.pencil, opts.eig_method);
    return onto_budget(e.vector, topo, i);
}

CVector allocation_step_rank_one(const GroupForms& forms, const Topology& topo, std::size_t i) {
    require_group(topo, i, "allocation_step_rank_one");
    const CMatrix& s = forms.signal;
    std::size_t pivot = 0;
    for (std::size_t k = 1; k < s.rows(); ++k) {
        if (s(k, k).real() > s(pivot, pivot).real()) pivot = k;
    }
    const double scale = s(pivot, pivot).real();
    if (!(scale > 0.0)) throw std::domain_error("allocation_step_rank_one: signal form is zero");
    CVector g = s.column(pivot);
    g *= 1.0 / std::sqrt(scale);
    return onto_budget(canonical_phase(Cholesky(forms.pencil).solve(g)), topo, i);
}

MsrSolution alternate(const Topology& topo, const ChannelSet& ch, const SolverOptions& opts) {
    topo.validate();
    ch.validate(topo);
    opts.validate();
    if (topo.sizes[0] != 1) throw std::invalid_argument("alternate: the optimiser supports a single source node");

    MsrSolution sol;
    sol.alloc = Allocation::equal_power(topo);
    CascadeState cascade = compute_cascades(topo, ch, sol.alloc);
    sol.w = receiver_step(cascade, opts);
    double previous = sum_rate(topo, cascade, sol.w);
    sol.sum_rate = previous;

    for (std::size_t t = 1; t <= opts.max_outer_iter; ++t) {
        for (std::size_t i = 1; i <= topo.relay_groups(); ++i) {
            const CVector w_i = normalize_receiver(sol.w, cascade, i);
            const GroupForms forms = group_forms(topo, ch, cascade, w_i, i);
            sol.alloc.group(i) = allocation_step(forms, topo, i, opts);
            cascade = compute_cascades(topo, ch, sol.alloc);
        }

        const double before = sum_rate(topo, cascade, sol.w);
        sol.w = receiver_step(cascade, opts);
        const double current = sum_rate(topo, cascade, sol.w);

        sol.outer_iterations = t;
        sol.sum_rate = current;
        if (opts.record_trace) {
            sol.trace.push_back(current);
            sol.receiver_steps.push_back({before, current});
        }
        if (std::abs(current - previous) < opts.outer_tol) {
            sol.converged = true;
            break;
        }
        previous = current;
    }
    return sol;
}

MsrSolution equal_power_baseline(const Topology& topo, const ChannelSet& ch, const SolverOptions& opts) {
    topo.validate();
    ch.validate(topo);
    opts.validate();

    MsrSolution sol;
    sol.alloc = Allocation::equal_power(topo);
    const CascadeState cascade = compute_cascades(topo, ch, sol.alloc);
    sol.w = receiver_step(cascade, opts);
    sol.sum_rate = sum_rate(topo, cascade, sol.w);
    sol.converged = true;
    return sol;
}

}  // namespace afmsr
