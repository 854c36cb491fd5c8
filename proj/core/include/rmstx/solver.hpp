#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "rmstx/linkmath.hpp"

namespace rmstx {

enum class SolverStatus { optimal, max_iterations, infeasible };

std::string_view to_string(SolverStatus status);

struct SolverOptions {
  double tolerance = 1e-6;   // bound on the barrier duality gap
  int max_iterations = 200;  // Newton steps per subproblem
};

template <class Solution>
struct SolverReport {
  Solution solution;
  double objective = 0.0;
  int iterations = 0;
  double residual = 0.0;  // duality-gap bound of the last centred iterate
  SolverStatus status = SolverStatus::max_iterations;
};

// log2(scale * h^H F h + offset)
struct LiftedLogTerm {
  CVector channel;
  double scale = 0.0;
  double offset = 0.0;
};

// coeff * h^H F h >= rhs
struct LiftedQosRow {
  CVector channel;
  double coeff = 0.0;
  double rhs = 0.0;
};

// maximize  sum_j log2(scale_j tr(F H_j) + offset_j) - Re tr(C F) + constant
// s.t.      QoS rows, F_mm <= diag_cap, F >= 0
struct PsdSubproblem {
  std::vector<LiftedLogTerm> log_terms;
  CMatrix linear;
  double constant = 0.0;
  std::vector<LiftedQosRow> qos_rows;
  double diag_cap = 1.0;

  Eigen::Index dimension() const { return linear.rows(); }
  double objective(const CMatrix& f_matrix) const;
  // Every row and cap satisfied (not necessarily strictly) and F PSD up to tol.
  bool feasible(const CMatrix& f_matrix, double tol = 1e-9) const;
};

// log2(coeffs . p + offset)
struct SimplexLogTerm {
  RVector coeffs;
  double offset = 0.0;
};

// coeffs . p >= rhs
struct LinearRow {
  RVector coeffs;
  double rhs = 0.0;
};

// maximize  sum_j log2(a_j . p + b_j) - c . p + constant
// s.t.      QoS rows, sum p <= budget, p_k >= floor
struct SimplexSubproblem {
  std::vector<SimplexLogTerm> log_terms;
  RVector linear;
  double constant = 0.0;
  std::vector<LinearRow> qos_rows;
  double budget = 0.0;
  double floor = 0.0;

  Eigen::Index dimension() const { return linear.size(); }
  double objective(const RVector& powers) const;
  bool feasible(const RVector& powers, double tol = 1e-9) const;
};

SolverReport<CMatrix> solve_psd_subproblem(const PsdSubproblem& problem,
                                           const CMatrix& start,
                                           const SolverOptions& options = {});

SolverReport<RVector> solve_simplex_subproblem(const SimplexSubproblem& problem,
                                               const RVector& start,
                                               const SolverOptions& options = {});

// f_m = h_m / |h_m|, the maximiser of |h^H f| under |f_m| <= 1.
TransmissionCoefficients co_phase(const CVector& h);

struct FeasiblePoint {
  TransmissionCoefficients f;
  PowerAllocation p;
  bool feasible = false;
  double max_min_sinr = 0.0;  // best min_k SINR_k found over the candidate beams
  std::vector<double> slack;  // SINR_k - gamma_th at the returned point
};

// Starting pair satisfying the QoS rows strictly, the power budget and the
// element caps, or an infeasible report carrying the best max-min SINR.
FeasiblePoint find_feasible_point(std::span<const UserChannel> channels,
                                  const LinkBudget& budget);

struct RankOneExtraction {
  TransmissionCoefficients f;
  double gap = 0.0;           // tr(F) - sigma_1(F)
  double relative_gap = 0.0;  // gap / tr(F)
  bool zero_matrix = false;
  bool high_residual = false;
};

// f = sqrt(sigma_1) u_max, entries clipped to unit magnitude.  The global
// phase is fixed so the first non-negligible entry is real and positive.
RankOneExtraction extract_rank_one(const CMatrix& f_matrix,
                                   double residual_tolerance = 1e-3);

}  // namespace rmstx
