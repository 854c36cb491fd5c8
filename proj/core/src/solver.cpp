#include "rmstx/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "rmstx/channel.hpp"
#include "rmstx/sca.hpp"

namespace rmstx {
namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kInitialBarrier = 0.1;
constexpr double kBarrierShrink = 10.0;
constexpr double kCentredDecrement = 1e-10;
constexpr double kArmijo = 0.25;

double quad(const CVector& h, const CMatrix& f_matrix) {
  return h.dot(f_matrix * h).real();
}

// ---------------------------------------------------------------------------
// PSD subproblem

// Rank-one directions h h^H of the objective Hessian, normalised to unit h.
struct Direction {
  CVector unit;
  double norm_sq = 0.0;
};

class PsdBarrier {
 public:
  explicit PsdBarrier(const PsdSubproblem& problem) : problem_(problem) {
    for (const auto& term : problem.log_terms)
      log_dirs_.push_back(direction(term.channel));
    for (const auto& row : problem.qos_rows)
      row_dirs_.push_back(direction(row.channel));
  }

  int barrier_terms() const {
    return 2 * static_cast<int>(problem_.dimension()) +
           static_cast<int>(problem_.qos_rows.size());
  }

  bool strictly_feasible(const CMatrix& f_matrix) const {
    const Eigen::Index n = f_matrix.rows();
    for (Eigen::Index m = 0; m < n; ++m)
      if (!(f_matrix(m, m).real() < problem_.diag_cap)) return false;
    for (const auto& term : problem_.log_terms)
      if (!(term.scale * quad(term.channel, f_matrix) + term.offset > 0.0)) return false;
    for (const auto& row : problem_.qos_rows)
      if (!(row.coeff * quad(row.channel, f_matrix) - row.rhs > 0.0)) return false;
    const Eigen::LLT<CMatrix> llt(f_matrix);
    return llt.info() == Eigen::Success;
  }

  // Barrier-augmented objective; -inf outside the interior.
  double value(const CMatrix& f_matrix, double mu) const {
    const Eigen::LLT<CMatrix> llt(f_matrix);
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    double log_det = 0.0;
    for (Eigen::Index m = 0; m < f_matrix.rows(); ++m) {
      const double d = llt.matrixL()(m, m).real();
      if (!(d > 0.0)) return -std::numeric_limits<double>::infinity();
      log_det += 2.0 * std::log(d);
      const double slack = problem_.diag_cap - f_matrix(m, m).real();
      if (!(slack > 0.0)) return -std::numeric_limits<double>::infinity();
      log_det += std::log(slack);
    }
    double rows = 0.0;
    for (const auto& row : problem_.qos_rows) {
      const double q = row.coeff * quad(row.channel, f_matrix) - row.rhs;
      if (!(q > 0.0)) return -std::numeric_limits<double>::infinity();
      rows += std::log(q);
    }
    for (const auto& term : problem_.log_terms)
      if (!(term.scale * quad(term.channel, f_matrix) + term.offset > 0.0))
        return -std::numeric_limits<double>::infinity();
    return problem_.objective(f_matrix) + mu * (log_det + rows);
  }

  // Newton direction of the barrier objective at an interior F; returns the
  // squared Newton decrement through `decrement_sq`.
  CMatrix newton_step(const CMatrix& f_matrix, double mu, double& decrement_sq) const {
    const Eigen::Index n = f_matrix.rows();
    const Eigen::LLT<CMatrix> llt(f_matrix);
    const CMatrix f_inv = llt.solve(CMatrix::Identity(n, n));

    CMatrix grad = -problem_.linear + mu * f_inv;
    std::vector<CVector> basis;      // b_j with B_j = b_j b_j^H
    std::vector<double> curvature;   // d_j
    for (std::size_t j = 0; j < problem_.log_terms.size(); ++j) {
      const auto& term = problem_.log_terms[j];
      const Direction& dir = log_dirs_[j];
      if (term.scale == 0.0 || dir.norm_sq == 0.0) continue;
      const double arg = term.scale * quad(term.channel, f_matrix) + term.offset;
      const double w = term.scale * dir.norm_sq / (arg * kLn2);
      grad += w * (dir.unit * dir.unit.adjoint());
      basis.push_back(dir.unit);
      curvature.push_back(w * w * kLn2);
    }
    for (std::size_t r = 0; r < problem_.qos_rows.size(); ++r) {
      const auto& row = problem_.qos_rows[r];
      const Direction& dir = row_dirs_[r];
      if (row.coeff == 0.0 || dir.norm_sq == 0.0) continue;
      const double q = row.coeff * quad(row.channel, f_matrix) - row.rhs;
      const double w = row.coeff * dir.norm_sq / q;
      grad += mu * w * (dir.unit * dir.unit.adjoint());
      basis.push_back(dir.unit);
      curvature.push_back(mu * w * w);
    }
    for (Eigen::Index m = 0; m < n; ++m) {
      const double slack = problem_.diag_cap - f_matrix(m, m).real();
      grad(m, m) -= mu / slack;
      basis.push_back(CVector::Unit(n, m));
      curvature.push_back(mu / (slack * slack));
    }

    // Hessian (negated) = mu F^-1 . F^-1 + sum_j d_j <B_j, .> B_j; its
    // leading part inverts as Y -> F Y F / mu, the rest through Woodbury.
    const auto nb = static_cast<Eigen::Index>(basis.size());
    CMatrix mapped(n, nb);  // columns F b_j
    for (Eigen::Index j = 0; j < nb; ++j) mapped.col(j) = f_matrix * basis[static_cast<std::size_t>(j)];
    CMatrix basis_mat(n, nb);
    for (Eigen::Index j = 0; j < nb; ++j) basis_mat.col(j) = basis[static_cast<std::size_t>(j)];

    const CMatrix y0 = f_matrix * grad * f_matrix / mu;
    const CMatrix cross = basis_mat.adjoint() * mapped;  // b_i^H F b_j
    Eigen::MatrixXd system = cross.cwiseAbs2() / mu;
    RVector rhs(nb);
    for (Eigen::Index i = 0; i < nb; ++i) {
      system(i, i) += 1.0 / curvature[static_cast<std::size_t>(i)];
      rhs[i] = quad(basis_mat.col(i), y0);
    }
    const RVector z = system.ldlt().solve(rhs);

    CMatrix step = y0 - mapped * z.asDiagonal() * mapped.adjoint() / mu;
    step = 0.5 * (step + step.adjoint()).eval();
    decrement_sq = inner(grad, step);
    return step;
  }

 private:
  static Direction direction(const CVector& h) {
    const double norm_sq = h.squaredNorm();
    if (norm_sq == 0.0) return {h, 0.0};
    return {h / std::sqrt(norm_sq), norm_sq};
  }

  const PsdSubproblem& problem_;
  std::vector<Direction> log_dirs_;
  std::vector<Direction> row_dirs_;
};

// ---------------------------------------------------------------------------
// Simplex subproblem

class SimplexBarrier {
 public:
  explicit SimplexBarrier(const SimplexSubproblem& problem) : problem_(problem) {
    const Eigen::Index k = problem.dimension();
    rows_.reserve(static_cast<std::size_t>(k) + 1 + problem.qos_rows.size());
    for (Eigen::Index i = 0; i < k; ++i)
      rows_.push_back({RVector::Unit(k, i), problem.floor});
    rows_.push_back({-RVector::Ones(k), -problem.budget});
    for (const auto& row : problem.qos_rows) rows_.push_back(row);
  }

  int barrier_terms() const { return static_cast<int>(rows_.size()); }

  bool strictly_feasible(const RVector& p) const {
    for (const auto& row : rows_)
      if (!(row.coeffs.dot(p) - row.rhs > 0.0)) return false;
    for (const auto& term : problem_.log_terms)
      if (!(term.coeffs.dot(p) + term.offset > 0.0)) return false;
    return true;
  }

  double value(const RVector& p, double mu) const {
    if (!strictly_feasible(p)) return -std::numeric_limits<double>::infinity();
    double barrier = 0.0;
    for (const auto& row : rows_) barrier += std::log(row.coeffs.dot(p) - row.rhs);
    return problem_.objective(p) + mu * barrier;
  }

  RVector newton_step(const RVector& p, double mu, double& decrement_sq) const {
    const Eigen::Index k = p.size();
    RVector grad = -problem_.linear;
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(k, k);  // negated Hessian
    for (const auto& term : problem_.log_terms) {
      const double arg = term.coeffs.dot(p) + term.offset;
      grad += term.coeffs / (arg * kLn2);
      hess += term.coeffs * term.coeffs.transpose() / (arg * arg * kLn2);
    }
    for (const auto& row : rows_) {
      const double slack = row.coeffs.dot(p) - row.rhs;
      grad += mu * row.coeffs / slack;
      hess += mu * row.coeffs * row.coeffs.transpose() / (slack * slack);
    }
    const RVector step = hess.ldlt().solve(grad);
    decrement_sq = grad.dot(step);
    return step;
  }

 private:
  const SimplexSubproblem& problem_;
  std::vector<LinearRow> rows_;
};

// Damped Newton path-following shared by both subproblems.
template <class Barrier, class Point>
SolverReport<Point> path_follow(const Barrier& barrier, Point point,
                                const SolverOptions& options,
                                double initial_mu) {
  SolverReport<Point> report;
  const int terms = barrier.barrier_terms();
  double mu = initial_mu;
  int newton = 0;
  bool centred = false;
  while (newton < options.max_iterations) {
    double decrement_sq = 0.0;
    const Point step = barrier.newton_step(point, mu, decrement_sq);
    ++newton;
    if (!std::isfinite(decrement_sq)) break;
    if (decrement_sq / 2.0 <= kCentredDecrement) {
      centred = true;
      if (terms * mu <= options.tolerance) break;
      mu /= kBarrierShrink;
      centred = false;
      continue;
    }
    const double current = barrier.value(point, mu);
    double alpha = 1.0;
    Point trial = point + alpha * step;
    double trial_value = barrier.value(trial, mu);
    while (!(trial_value >= current + kArmijo * alpha * decrement_sq) && alpha > 1e-12) {
      alpha *= 0.5;
      trial = point + alpha * step;
      trial_value = barrier.value(trial, mu);
    }
    if (!(trial_value >= current)) {
      // No ascent available at this barrier weight; treat as centred.
      centred = true;
      if (terms * mu <= options.tolerance) break;
      mu /= kBarrierShrink;
      centred = false;
      continue;
    }
    point = trial;
  }
  report.solution = point;
  report.iterations = newton;
  report.residual = terms * mu;
  report.status = (centred && report.residual <= options.tolerance)
                      ? SolverStatus::optimal
                      : SolverStatus::max_iterations;
  return report;
}

}  // namespace

std::string_view to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::optimal: return "optimal";
    case SolverStatus::max_iterations: return "max-iterations";
    case SolverStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

double PsdSubproblem::objective(const CMatrix& f_matrix) const {
  double value = constant - inner(linear, f_matrix);
  for (const auto& term : log_terms)
    value += std::log2(term.scale * quad(term.channel, f_matrix) + term.offset);
  return value;
}

bool PsdSubproblem::feasible(const CMatrix& f_matrix, double tol) const {
  for (Eigen::Index m = 0; m < f_matrix.rows(); ++m)
    if (f_matrix(m, m).real() > diag_cap + tol) return false;
  for (const auto& row : qos_rows) {
    const double lhs = row.coeff * quad(row.channel, f_matrix);
    if (lhs < row.rhs - tol * std::max(1.0, std::abs(row.rhs))) return false;
  }
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(f_matrix, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >=
         -tol * std::max(1.0, f_matrix.trace().real());
}

double SimplexSubproblem::objective(const RVector& powers) const {
  double value = constant - linear.dot(powers);
  for (const auto& term : log_terms)
    value += std::log2(term.coeffs.dot(powers) + term.offset);
  return value;
}

bool SimplexSubproblem::feasible(const RVector& powers, double tol) const {
  if (powers.minCoeff() < floor * (1.0 - tol)) return false;
  if (powers.sum() > budget * (1.0 + tol)) return false;
  for (const auto& row : qos_rows) {
    const double lhs = row.coeffs.dot(powers);
    if (lhs < row.rhs - tol * std::max(std::abs(row.rhs), row.coeffs.cwiseAbs().dot(powers)))
      return false;
  }
  return true;
}

SolverReport<CMatrix> solve_psd_subproblem(const PsdSubproblem& problem,
                                           const CMatrix& start,
                                           const SolverOptions& options) {
  const Eigen::Index n = problem.dimension();
  if (start.rows() != n || start.cols() != n)
    throw std::invalid_argument("solve_psd_subproblem: start has wrong size");
  if (!(options.tolerance > 0.0))
    throw std::invalid_argument("solve_psd_subproblem: tolerance must be > 0");

  for (const auto& row : problem.qos_rows) {
    if (row.coeff <= 0.0 && row.rhs > 0.0) {
      SolverReport<CMatrix> report;
      report.solution = start;
      report.objective = -std::numeric_limits<double>::infinity();
      report.status = SolverStatus::infeasible;
      return report;
    }
  }

  PsdBarrier barrier(problem);

  // Pull the start into the interior of the PSD cone and the caps.
  CMatrix interior = start;
  if (!barrier.strictly_feasible(interior)) {
    const CMatrix centre = 0.5 * problem.diag_cap * CMatrix::Identity(n, n);
    double tau = 1e-4;
    bool found = false;
    for (int attempt = 0; attempt < 40 && !found; ++attempt, tau *= 0.5) {
      interior = (1.0 - tau) * start + tau * centre;
      found = barrier.strictly_feasible(interior);
    }
    if (!found) {
      SolverReport<CMatrix> report;
      report.solution = start;
      report.objective = problem.objective(start);
      report.status = SolverStatus::infeasible;
      return report;
    }
  }

  auto report = path_follow(barrier, interior, options, kInitialBarrier);
  report.objective = problem.objective(report.solution);

  // Ascent contract: never hand back something worse than a feasible start.
  if (problem.feasible(start)) {
    const double start_objective = problem.objective(start);
    if (start_objective > report.objective) {
      report.solution = start;
      report.objective = start_objective;
    }
  }
  return report;
}

SolverReport<RVector> solve_simplex_subproblem(const SimplexSubproblem& problem,
                                               const RVector& start,
                                               const SolverOptions& options) {
  const Eigen::Index k = problem.dimension();
  if (start.size() != k)
    throw std::invalid_argument("solve_simplex_subproblem: start has wrong size");
  if (!(problem.budget > 0.0) || problem.floor < 0.0 || k * problem.floor >= problem.budget)
    throw std::invalid_argument("solve_simplex_subproblem: bad budget or floor");

  SimplexBarrier barrier(problem);

  RVector interior = start;
  if (!barrier.strictly_feasible(interior)) {
    const RVector centre = RVector::Constant(
        k, problem.floor + (problem.budget - k * problem.floor) / (k + 1));
    double tau = 1e-6;
    bool found = false;
    for (int attempt = 0; attempt < 40 && !found; ++attempt) {
      interior = (1.0 - tau) * start + tau * centre;
      found = barrier.strictly_feasible(interior);
      tau = attempt < 20 ? tau * 2.0 : tau;  // widen toward the centre
    }
    if (!found) {
      SolverReport<RVector> report;
      report.solution = start;
      report.objective = -std::numeric_limits<double>::infinity();
      report.status = SolverStatus::infeasible;
      return report;
    }
  }

  auto report = path_follow(barrier, interior, options, kInitialBarrier);
  report.objective = problem.objective(report.solution);

  if (problem.feasible(start)) {
    const double start_objective = problem.objective(start);
    if (start_objective > report.objective) {
      report.solution = start;
      report.objective = start_objective;
    }
  }
  return report;
}

TransmissionCoefficients co_phase(const CVector& h) {
  CVector f(h.size());
  for (Eigen::Index m = 0; m < h.size(); ++m) {
    const double mag = std::abs(h[m]);
    f[m] = mag > 0.0 ? h[m] / mag : Complex(1.0, 0.0);
  }
  return {f};
}

namespace {

// Max-min SINR over the power budget for fixed beam gains: with every SINR
// equal to gamma and the budget spent, p_k = gamma / (1 + gamma) (P + s2 / t_k),
// which pins gamma = P / ((K - 1) P + s2 sum_k 1 / t_k).
double max_min_sinr(const RVector& gains, const LinkBudget& budget) {
  double inv_sum = 0.0;
  for (Eigen::Index k = 0; k < gains.size(); ++k) {
    if (!(gains[k] > 0.0)) return 0.0;
    inv_sum += 1.0 / gains[k];
  }
  const double total = budget.total_power;
  return total / ((gains.size() - 1) * total + budget.noise_power * inv_sum);
}

// Powers equalising every SINR at gamma (< the max-min value), scaled up
// to spend the whole budget, which only raises each SINR.
RVector equalising_powers(const RVector& gains, const LinkBudget& budget, double gamma) {
  RVector p(gains.size());
  for (Eigen::Index k = 0; k < gains.size(); ++k)
    p[k] = gamma / (1.0 + gamma) * (budget.total_power + budget.noise_power / gains[k]);
  return p * (budget.total_power / p.sum());
}

TransmissionCoefficients equal_gain_beam(std::span<const UserChannel> channels) {
  const auto k = static_cast<Eigen::Index>(channels.size());
  const Eigen::Index m = channels.front().coefficients.size();
  CMatrix h(m, k);
  for (Eigen::Index i = 0; i < k; ++i) h.col(i) = channels[static_cast<std::size_t>(i)].coefficients;
  CMatrix gram = h.adjoint() * h;
  gram.diagonal().array() += 1e-9 * gram.trace().real();
  CVector f = h * gram.ldlt().solve(CVector::Ones(k));
  const double peak = f.cwiseAbs().maxCoeff();
  if (peak > 0.0) f /= peak;
  return {f};
}

}  // namespace

FeasiblePoint find_feasible_point(std::span<const UserChannel> channels,
                                  const LinkBudget& budget) {
  if (channels.empty()) throw std::invalid_argument("find_feasible_point: no users");
  budget.validate();
  const auto k = static_cast<int>(channels.size());

  std::size_t strongest = 0;
  for (std::size_t i = 1; i < channels.size(); ++i)
    if (channels[i].coefficients.squaredNorm() > channels[strongest].coefficients.squaredNorm())
      strongest = i;

  FeasiblePoint point;
  point.f = co_phase(channels[strongest].coefficients);
  point.p = PowerAllocation::equal_split(k, budget.total_power);

  std::vector<TransmissionCoefficients> candidates{point.f};
  for (std::size_t i = 0; i < channels.size(); ++i)
    if (i != strongest) candidates.push_back(co_phase(channels[i].coefficients));
  if (k > 1 && k <= channels.front().coefficients.size())
    candidates.push_back(equal_gain_beam(channels));

  RVector best_gains = effective_gains(channels, point.f);
  point.max_min_sinr = max_min_sinr(best_gains, budget);
  for (const auto& candidate : candidates) {
    const RVector gains = effective_gains(channels, candidate);
    const double value = max_min_sinr(gains, budget);
    if (value > point.max_min_sinr) {
      point.max_min_sinr = value;
      point.f = candidate;
      best_gains = gains;
    }
  }

  const double gamma = budget.sinr_threshold;
  if (gamma == 0.0) {
    // Any start is feasible; keep the default one.
    point.f = candidates.front();
    point.p = PowerAllocation::equal_split(k, budget.total_power);
    point.feasible = true;
    point.slack = qos_satisfied(channels, point.f, point.p, budget).slack;
    return point;
  }

  if (point.max_min_sinr > gamma) {
    point.p = {equalising_powers(best_gains, budget, 0.5 * (gamma + point.max_min_sinr))};
    point.feasible = true;
  }
  point.slack = qos_satisfied(channels, point.f, point.p, budget).slack;
  if (point.feasible)
    point.feasible = *std::min_element(point.slack.begin(), point.slack.end()) > 0.0;
  return point;
}

RankOneExtraction extract_rank_one(const CMatrix& f_matrix,
                                   double residual_tolerance) {
  RankOneExtraction out;
  const Eigen::Index n = f_matrix.rows();
  const double trace = f_matrix.trace().real();
  if (n == 0 || !(trace > 1e-300)) {
    out.f = {CVector::Zero(n)};
    out.zero_matrix = true;
    out.high_residual = true;
    return out;
  }
  const PrincipalEigenpair top = principal_eigenpair(f_matrix);
  CVector f = std::sqrt(std::max(top.value, 0.0)) * top.vector;

  const double floor = 1e-12 * f.norm();
  for (Eigen::Index m = 0; m < n; ++m) {
    if (std::abs(f[m]) > floor) {
      f *= std::conj(f[m]) / std::abs(f[m]);
      break;
    }
  }
  for (Eigen::Index m = 0; m < n; ++m) {
    const double mag = std::abs(f[m]);
    if (mag > 1.0) f[m] /= mag;
  }
  out.f = {f};
  out.gap = std::max(trace - top.value, 0.0);
  out.relative_gap = out.gap / trace;
  out.high_residual = out.relative_gap > residual_tolerance;
  return out;
}

}  // namespace rmstx
