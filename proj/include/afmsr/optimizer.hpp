#pragma once

#include "afmsr/linalg.hpp"
#include "afmsr/network.hpp"

#include <cstddef>
#include <vector>

namespace afmsr {

struct SolverOptions {
    EigMethod eig_method = EigMethod::QR;
    double outer_tol = 1e-8;          ///< on |SR_t - SR_{t-1}|
    std::size_t max_outer_iter = 50;
    bool record_trace = true;

    void validate() const;
};

/// Sum rate immediately before and after one receiver update.
struct ReceiverStep {
    double before = 0.0;
    double after = 0.0;
};

struct MsrSolution {
    CVector w;
    Allocation alloc;
    double sum_rate = 0.0;
    std::size_t outer_iterations = 0;
    bool converged = false;
    /// Sum rate at the end of each outer iteration (when recorded).
    std::vector<double> trace;
    /// Every receiver update after the initial one.
    std::vector<ReceiverStep> receiver_steps;
};

/// Quadratic forms of relay group i at a fixed receiver and operating point:
/// w^H Phi w = a_i^H signal a_i and the v_1..v_i part of w^H Z w equals
/// a_i^H noise a_i.
struct GroupForms {
    CMatrix signal;       ///< M_i
    CMatrix noise;        ///< noise-through-group form
    double tail = 0.0;    ///< w_i^H T_i w_i
    CMatrix pencil;       ///< N_i = noise + (N_{i+1} / P_{T,i}) tail I
};

/// Dominant eigenvector of Z^{-1} Phi.
CVector receiver_step(const CascadeState& cascade, const SolverOptions& opts);

/// sum_{k=i+1}^{m} C_{k,m-1} C_{k,m-1}^H
CMatrix tail_noise(const CascadeState& cascade, std::size_t i);

/// w / sqrt(w^H T_i w)
CVector normalize_receiver(const CVector& w, const CascadeState& cascade, std::size_t i);

GroupForms group_forms(const Topology& topo, const ChannelSet& ch, const CascadeState& cascade,
                       const CVector& w_i, std::size_t i);

/// Dominant eigenvector of N_i^{-1} M_i scaled onto the group budget.
CVector allocation_step(const GroupForms& forms, const Topology& topo, std::size_t i, const SolverOptions& opts);

/// Closed form for the rank-one signal form: N_i^{-1} g with M_i = g g^H,
/// scaled onto the budget.
CVector allocation_step_rank_one(const GroupForms& forms, const Topology& topo, std::size_t i);

/// Alternating receiver / per-group allocation updates from the equal-power
/// start. Each outer iteration updates groups 1..m-1 in order, refreshing the
/// normalisers after every group, then re-solves the receiver.
MsrSolution alternate(const Topology& topo, const ChannelSet& ch, const SolverOptions& opts = {});

/// Equal-power allocation with the matched receiver.
MsrSolution equal_power_baseline(const Topology& topo, const ChannelSet& ch, const SolverOptions& opts = {});

}  // namespace afmsr
