#pragma once

#include <span>
#include <string>
#include <vector>

#include "rmstx/linkmath.hpp"
#include "rmstx/sca.hpp"
#include "rmstx/solver.hpp"

namespace rmstx {

// Rank-one penalty factor schedule.  The initial factor is
// initial_scale * max(R0, 1) / tr(F0), where R0 is the sum-rate of the
// starting point; it grows by `growth` every `cadence` outer iterations while
// the relative rank-one gap is above tolerance.
struct PenaltySchedule {
  double initial_scale = 10.0;
  double growth = 2.0;
  int cadence = 5;
};

struct AoConfig {
  double convergence_threshold = 1e-3;  // relative change of the objective
  int max_outer_iterations = 50;
  PenaltySchedule penalty;
  double rank_one_tolerance = 1e-3;     // relative to tr(F)
  bool optimize_power = true;           // false freezes p at its start
  SolverOptions solver;

  void validate() const;
};

struct AoIteration {
  int iteration = 0;
  double sum_rate = 0.0;          // from the extracted beam and current powers
  double lifted_sum_rate = 0.0;   // from the lifted beam F
  double objective = 0.0;         // lifted sum-rate - penalty * rank-one gap
  double reference = 0.0;         // previous iterate's objective at this penalty
  double rank_one_gap = 0.0;      // relative to tr(F)
  double min_qos_slack = 0.0;
  double penalty = 0.0;
  SolverStatus beam_status = SolverStatus::optimal;
  SolverStatus power_status = SolverStatus::optimal;
  double wall_ms = 0.0;
};

struct AoTrace {
  std::vector<AoIteration> iterations;  // entry 0 is the starting point
  bool converged = false;
  bool rank_relaxed = false;            // final gap above tolerance
  int outer_iterations() const { return static_cast<int>(iterations.size()) - 1; }
};

enum class AoStatus { converged, max_iterations, infeasible, subproblem_failure };

std::string_view to_string(AoStatus status);

struct AoResult {
  TransmissionCoefficients f;
  PowerAllocation p;
  CMatrix f_matrix;  // final lifted beam
  AoTrace trace;
  AoStatus status = AoStatus::max_iterations;
  std::string diagnostic;
};

// Co-phased unit-modulus beam toward the user with the largest ||h_k|| and
// an equal power split; replaced by find_feasible_point when it violates QoS.
struct AoStart {
  ScaExpansionPoint point;
  TransmissionCoefficients f;
  bool feasible = true;
  double max_min_sinr = 0.0;
};

AoStart initialize(std::span<const UserChannel> channels, const LinkBudget& budget);

// Penalised lifted objective: sum-rate(F, p) - penalty * (tr F - ||F||_2).
double penalized_objective(const CMatrix& f_matrix, const RVector& powers,
                           std::span<const UserChannel> channels,
                           const LinkBudget& budget, double penalty);

// Beam subproblem at the expansion point for fixed powers.
PsdSubproblem build_beam_subproblem(const ScaExpansionPoint& at,
                                    std::span<const UserChannel> channels,
                                    const LinkBudget& budget, double penalty);
// Power subproblem at the expansion point for a fixed lifted beam.
SimplexSubproblem build_power_subproblem(const ScaExpansionPoint& at,
                                         std::span<const UserChannel> channels,
                                         const LinkBudget& budget);

// Alternating beam / power optimisation with SCA re-expansion per block.
AoResult optimize(std::span<const UserChannel> channels, const LinkBudget& budget,
                  const AoConfig& config = {});
// Same iteration from a caller-supplied start (used with frozen powers).
AoResult optimize_from(std::span<const UserChannel> channels,
                       const LinkBudget& budget, const AoConfig& config,
                       const TransmissionCoefficients& f0,
                       const PowerAllocation& p0);

}  // namespace rmstx
