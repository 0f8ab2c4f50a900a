/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The narrowgauge authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <ngb/criteria.hpp>
#include <ngb/dual_simplex.hpp>
#include <ngb/mip.hpp>

#include <functional>
#include <optional>
#include <vector>

namespace ngb {

struct winnow_params_t {
  std::optional<int> n0;         // unset: admit all of F
  std::optional<int> n1;         // unset: max(1, ceil(|F|/4))
  std::vector<int> n2{4, 2, 1};  // n2(d); the last entry covers deeper levels
  std::optional<int> k2;         // unset: ceil(avg solve pivots / 6)
  criterion_spec_t criterion;
  eval_weights_t weights;
  std::optional<std::vector<int>> clist;
  std::vector<int> excluded;  // never candidates (multi-tree ordering)
  bool skip_stage2 = false;   // F2 taken straight from the stage-1 ranking
  std::optional<double> v_lim_multiplier;

  int n0_for(int num_fractional) const;
  int n1_for(int num_fractional) const;
  int n2_at(int depth) const;
  int k2_for(double avg_solve_pivots) const;
  void validate() const;
};

// Delta x_o for (up, down); +inf marks a branch shown infeasible.
using stage1_probe_fn = std::function<std::pair<double, double>(const dual_simplex_t&, int)>;
using stage2_probe_fn =
  std::function<branch_probe_t(const dual_simplex_t&, int, const pivot_budget_t&)>;

struct winnow_context_t {
  int depth               = 0;
  double avg_solve_pivots = 0;
  double incumbent_obj    = inf;
  double lp_cutoff        = inf;
  const unit_costs_t* parent_unit_costs = nullptr;
  stage1_probe_fn stage1_probe;  // unset: one-pivot dual probe
  stage2_probe_fn stage2_probe;  // unset: eval_plain under the k2 budget
};

struct winnow_result_t {
  std::vector<int> f;
  std::vector<int> f0;
  std::vector<int> f1;
  std::vector<int> f2;
  std::vector<branch_eval_t> stage1_evals;   // aligned with f0
  std::vector<branch_probe_t> stage2_probes;  // aligned with f1
  std::vector<branch_eval_t> stage2_evals;    // aligned with f1, flavored for the criterion
  std::optional<branch_signal_t> signal;
  bool leaf    = false;  // nothing left to branch on
  int k2       = 0;
  int probes   = 0;  // truncated child solves
  int pivots   = 0;

  // stage-2 eval of a member of f2 (or f1)
  const branch_eval_t& eval_of(int var) const;
};

// Candidates restricted to the fixed list when one is active.
std::vector<int> candidate_set(const dual_simplex_t& node,
                               const mip_problem_t& problem,
                               const std::optional<std::vector<int>>& clist,
                               std::span<const int> excluded = {});

// F0: the n0 candidates whose fraction lies closest to 0.5.
std::vector<int> stage0(const dual_simplex_t& node, std::span<const int> f, int n0);

winnow_result_t stage1(const dual_simplex_t& node,
                       const mip_problem_t& problem,
                       const winnow_params_t& params,
                       const winnow_context_t& ctx);

// Top n2(depth) of the stage-1 ranking, used when stage 2 is skipped.
void stage2_from_stage1(const winnow_params_t& params, int depth, winnow_result_t& r);

// Runs stage 2 on r.f1 and fills r.f2.
void stage2(const dual_simplex_t& node,
            const mip_problem_t& problem,
            const winnow_params_t& params,
            const winnow_context_t& ctx,
            winnow_result_t& r);

winnow_result_t winnow(const dual_simplex_t& node,
                       const mip_problem_t& problem,
                       const winnow_params_t& params,
                       const winnow_context_t& ctx);

// m * max over fractional x_j of min(f_j-, f_j+).
double v_lim_for(std::span<const double> x, const mip_problem_t& problem, double m);

// Flavors plain probe evals as the criterion requires, building the node's UC table on the way.
std::vector<branch_eval_t> flavor_evals(const std::vector<branch_probe_t>& probes,
                                        const dual_simplex_t& node,
                                        const criterion_spec_t& spec,
                                        const eval_weights_t& weights,
                                        const unit_costs_t* parent_unit_costs);

}  // namespace ngb
