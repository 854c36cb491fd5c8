#include "rmstx/ao.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rmstx/channel.hpp"

namespace rmstx {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

double relative_gap(const CMatrix& f_matrix) {
  const double trace = f_matrix.trace().real();
  return trace > 0.0 ? std::max(rank_one_gap(f_matrix), 0.0) / trace : 0.0;
}

AoIteration record(int iteration, const CMatrix& f_matrix, const RVector& powers,
                   std::span<const UserChannel> channels, const LinkBudget& budget,
                   double penalty, double reference) {
  AoIteration it;
  it.iteration = iteration;
  const PowerAllocation p{powers};
  const RVector lifted = lifted_gains(channels, f_matrix);
  it.lifted_sum_rate = sum_rate_from_gains(lifted, p, budget);
  it.rank_one_gap = relative_gap(f_matrix);
  it.objective = it.lifted_sum_rate - penalty * rank_one_gap(f_matrix);
  it.reference = reference;
  it.penalty = penalty;
  it.min_qos_slack = qos_from_gains(lifted, p, budget).min_slack();
  it.sum_rate = sum_rate(channels, extract_rank_one(f_matrix).f, p, budget);
  return it;
}

}  // namespace

void AoConfig::validate() const {
  if (!(convergence_threshold > 0.0))
    throw std::invalid_argument("AoConfig: convergence threshold must be > 0");
  if (max_outer_iterations < 1)
    throw std::invalid_argument("AoConfig: max_outer_iterations must be >= 1");
  if (!(penalty.initial_scale > 0.0) || !(penalty.growth >= 1.0) || penalty.cadence < 1)
    throw std::invalid_argument("AoConfig: bad penalty schedule");
  if (!(rank_one_tolerance > 0.0))
    throw std::invalid_argument("AoConfig: rank-one tolerance must be > 0");
}

std::string_view to_string(AoStatus status) {
  switch (status) {
    case AoStatus::converged: return "converged";
    case AoStatus::max_iterations: return "max-iterations";
    case AoStatus::infeasible: return "infeasible";
    case AoStatus::subproblem_failure: return "subproblem-failure";
  }
  return "unknown";
}

AoStart initialize(std::span<const UserChannel> channels, const LinkBudget& budget) {
  if (channels.empty()) throw std::invalid_argument("initialize: no users");
  budget.validate();
  std::size_t strongest = 0;
  for (std::size_t k = 1; k < channels.size(); ++k)
    if (channels[k].coefficients.squaredNorm() > channels[strongest].coefficients.squaredNorm())
      strongest = k;

  AoStart start;
  start.f = co_phase(channels[strongest].coefficients);
  PowerAllocation p = PowerAllocation::equal_split(static_cast<int>(channels.size()),
                                                   budget.total_power);
  const QosReport qos = qos_satisfied(channels, start.f, p, budget);
  const bool strict = budget.sinr_threshold == 0.0 || qos.min_slack() > 0.0;
  if (!strict) {
    const FeasiblePoint fp = find_feasible_point(channels, budget);
    start.feasible = fp.feasible;
    start.max_min_sinr = fp.max_min_sinr;
    start.f = fp.f;
    p = fp.p;
  }
  start.point = {LiftedBeamMatrix::from_vector(start.f).matrix, p.powers};
  return start;
}

double penalized_objective(const CMatrix& f_matrix, const RVector& powers,
                           std::span<const UserChannel> channels,
                           const LinkBudget& budget, double penalty) {
  return sum_rate_from_gains(lifted_gains(channels, f_matrix), PowerAllocation{powers},
                             budget) -
         penalty * rank_one_gap(f_matrix);
}

PsdSubproblem build_beam_subproblem(const ScaExpansionPoint& at,
                                    std::span<const UserChannel> channels,
                                    const LinkBudget& budget, double penalty) {
  const Eigen::Index m = at.f_matrix.rows();
  const double total = at.powers.sum();
  const double gamma = budget.sinr_threshold;

  PsdSubproblem problem;
  problem.linear = CMatrix::Zero(m, m);
  for (std::size_t k = 0; k < channels.size(); ++k) {
    const int user = static_cast<int>(k);
    problem.log_terms.push_back({channels[k].coefficients, total, budget.noise_power});
    const CMatrix grad = g2_gradient(at, user, at.powers, channels, budget);
    problem.linear += grad;
    problem.constant += inner(grad, at.f_matrix) -
                        g2(at.f_matrix, user, at.powers, channels, budget);
    if (gamma > 0.0) {
      const double interference = total - at.powers[user];
      problem.qos_rows.push_back({channels[k].coefficients,
                                  at.powers[user] - gamma * interference,
                                  gamma * budget.noise_power});
    }
  }
  // tr(F) - (||F||_2)^lb = tr((I - u u^H) F)
  const CVector u = principal_eigenpair(at.f_matrix).vector;
  problem.linear += penalty * (CMatrix::Identity(m, m) - u * u.adjoint());
  problem.diag_cap = 1.0;
  return problem;
}

SimplexSubproblem build_power_subproblem(const ScaExpansionPoint& at,
                                         std::span<const UserChannel> channels,
                                         const LinkBudget& budget) {
  const auto k_users = static_cast<Eigen::Index>(channels.size());
  const double gamma = budget.sinr_threshold;

  SimplexSubproblem problem;
  problem.linear = RVector::Zero(k_users);
  problem.budget = budget.total_power;
  problem.floor = 1e-9 * budget.total_power;
  for (Eigen::Index k = 0; k < k_users; ++k) {
    const int user = static_cast<int>(k);
    const double t = lifted_gain(channels[static_cast<std::size_t>(k)].coefficients, at.f_matrix);
    problem.log_terms.push_back({RVector::Constant(k_users, t), budget.noise_power});
    const RVector grad = h2_gradient(at, user, at.f_matrix, channels, budget);
    problem.linear += grad;
    problem.constant += grad.dot(at.powers) -
                        h2(at.powers, user, at.f_matrix, channels, budget);
    if (gamma > 0.0) {
      RVector row = RVector::Constant(k_users, -gamma * t);
      row[k] = t;
      problem.qos_rows.push_back({row, gamma * budget.noise_power});
    }
  }
  return problem;
}

AoResult optimize(std::span<const UserChannel> channels, const LinkBudget& budget,
                  const AoConfig& config) {
  const AoStart start = initialize(channels, budget);
  if (!start.feasible) {
    AoResult result;
    result.f = start.f;
    result.p = {start.point.powers};
    result.f_matrix = start.point.f_matrix;
    result.status = AoStatus::infeasible;
    std::ostringstream msg;
    msg << "QoS infeasible: best max-min SINR " << start.max_min_sinr
        << " < threshold " << budget.sinr_threshold;
    result.diagnostic = msg.str();
    return result;
  }
  return optimize_from(channels, budget, config, start.f, {start.point.powers});
}

AoResult optimize_from(std::span<const UserChannel> channels,
                       const LinkBudget& budget, const AoConfig& config,
                       const TransmissionCoefficients& f0,
                       const PowerAllocation& p0) {
  config.validate();
  budget.validate();
  if (channels.empty()) throw std::invalid_argument("optimize: no users");
  if (p0.size() != static_cast<Eigen::Index>(channels.size()))
    throw std::invalid_argument("optimize: power vector size mismatch");

  const auto run_start = Clock::now();
  CMatrix f_matrix = LiftedBeamMatrix::from_vector(f0).matrix;
  RVector powers = p0.powers;

  const double r0 = sum_rate_from_gains(lifted_gains(channels, f_matrix), p0, budget);
  double penalty = config.penalty.initial_scale * std::max(r0, 1.0) /
                   std::max(f_matrix.trace().real(), 1e-12);

  AoResult result;
  AoTrace& trace = result.trace;
  trace.iterations.push_back(record(0, f_matrix, powers, channels, budget, penalty,
                                    penalized_objective(f_matrix, powers, channels,
                                                        budget, penalty)));
  trace.iterations.back().wall_ms = elapsed_ms(run_start);

  result.status = AoStatus::max_iterations;
  for (int r = 1; r <= config.max_outer_iterations; ++r) {
    const auto iter_start = Clock::now();
    if (r > 1 && (r - 1) % config.penalty.cadence == 0 &&
        relative_gap(f_matrix) > config.rank_one_tolerance)
      penalty *= config.penalty.growth;
    const double reference =
        penalized_objective(f_matrix, powers, channels, budget, penalty);

    const ScaExpansionPoint beam_at{f_matrix, powers};
    const PsdSubproblem beam_problem =
        build_beam_subproblem(beam_at, channels, budget, penalty);
    const auto beam = solve_psd_subproblem(beam_problem, f_matrix, config.solver);
    if (beam.status == SolverStatus::infeasible) {
      result.status = AoStatus::subproblem_failure;
      result.diagnostic = "beam subproblem infeasible at iteration " + std::to_string(r);
      break;
    }
    f_matrix = beam.solution;

    SolverStatus power_status = SolverStatus::optimal;
    if (config.optimize_power) {
      const ScaExpansionPoint power_at{f_matrix, powers};
      const SimplexSubproblem power_problem =
          build_power_subproblem(power_at, channels, budget);
      const auto power = solve_simplex_subproblem(power_problem, powers, config.solver);
      power_status = power.status;
      if (power.status == SolverStatus::infeasible) {
        result.status = AoStatus::subproblem_failure;
        result.diagnostic = "power subproblem infeasible at iteration " + std::to_string(r);
        break;
      }
      powers = power.solution;
    }

    AoIteration it = record(r, f_matrix, powers, channels, budget, penalty, reference);
    it.beam_status = beam.status;
    it.power_status = power_status;
    it.wall_ms = elapsed_ms(iter_start);
    trace.iterations.push_back(it);

    const double change = std::abs(it.objective - reference);
    if (change <= config.convergence_threshold * std::max(std::abs(reference), 1e-12)) {
      result.status = AoStatus::converged;
      trace.converged = true;
      break;
    }
  }

  const RankOneExtraction extraction = extract_rank_one(f_matrix, config.rank_one_tolerance);
  result.f = extraction.f;
  result.p = {powers};
  result.f_matrix = f_matrix;
  trace.rank_relaxed = extraction.high_residual;
  return result;
}

}  // namespace rmstx
