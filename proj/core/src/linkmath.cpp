#include "rmstx/linkmath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rmstx/channel.hpp"

namespace rmstx {

bool TransmissionCoefficients::is_valid() const {
  return values.size() > 0 && values.allFinite() &&
         max_magnitude() <= 1.0 + kMagnitudeTolerance;
}

double TransmissionCoefficients::max_magnitude() const {
  return values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff();
}

LiftedBeamMatrix LiftedBeamMatrix::from_vector(const TransmissionCoefficients& f) {
  return {f.values * f.values.adjoint()};
}

bool LiftedBeamMatrix::is_valid() const {
  if (matrix.rows() == 0 || matrix.rows() != matrix.cols() || !matrix.allFinite())
    return false;
  if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-9) return false;
  for (Eigen::Index m = 0; m < matrix.rows(); ++m)
    if (matrix(m, m).real() > 1.0 + 1e-9) return false;
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(matrix, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -1e-8 * std::max(trace(), 1.0);
}

PowerAllocation PowerAllocation::equal_split(int k_users, double total_power) {
  if (k_users < 1) throw std::invalid_argument("equal_split: k_users < 1");
  return {RVector::Constant(k_users, total_power / k_users)};
}

bool PowerAllocation::is_valid(double total_power) const {
  return powers.size() > 0 && powers.allFinite() && powers.minCoeff() > 0.0 &&
         total() <= total_power * (1.0 + 1e-12);
}

void LinkBudget::validate() const {
  if (!(noise_power > 0.0) || !std::isfinite(noise_power))
    throw std::invalid_argument("LinkBudget: noise power must be positive");
  if (!(total_power > 0.0) || !std::isfinite(total_power))
    throw std::invalid_argument("LinkBudget: total power must be positive");
  if (!(sinr_threshold >= 0.0) || !std::isfinite(sinr_threshold))
    throw std::invalid_argument("LinkBudget: SINR threshold must be >= 0");
}

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double effective_gain(const CVector& h, const TransmissionCoefficients& f) {
  if (h.size() != f.values.size())
    throw std::invalid_argument("effective_gain: dimension mismatch");
  return std::norm(h.dot(f.values));  // Eigen's dot conjugates the left operand
}

double lifted_gain(const CVector& h, const CMatrix& f_matrix) {
  if (h.size() != f_matrix.rows() || f_matrix.rows() != f_matrix.cols())
    throw std::invalid_argument("lifted_gain: dimension mismatch");
  return h.dot(f_matrix * h).real();
}

RVector effective_gains(std::span<const UserChannel> channels,
                        const TransmissionCoefficients& f) {
  RVector g(static_cast<Eigen::Index>(channels.size()));
  for (std::size_t k = 0; k < channels.size(); ++k)
    g[static_cast<Eigen::Index>(k)] = effective_gain(channels[k].coefficients, f);
  return g;
}

RVector lifted_gains(std::span<const UserChannel> channels,
                     const CMatrix& f_matrix) {
  RVector g(static_cast<Eigen::Index>(channels.size()));
  for (std::size_t k = 0; k < channels.size(); ++k)
    g[static_cast<Eigen::Index>(k)] = lifted_gain(channels[k].coefficients, f_matrix);
  return g;
}

double sinr(int k, const RVector& gains, const PowerAllocation& p,
            const LinkBudget& budget) {
  if (gains.size() != p.size() || k < 0 || k >= gains.size())
    throw std::invalid_argument("sinr: bad user index or dimensions");
  const double interference = p.total() - p.powers[k];
  return p.powers[k] * gains[k] /
         (gains[k] * interference + budget.noise_power);
}

double sum_rate_from_gains(const RVector& gains, const PowerAllocation& p,
                           const LinkBudget& budget) {
  double rate = 0.0;
  for (Eigen::Index k = 0; k < gains.size(); ++k)
    rate += std::log2(1.0 + sinr(static_cast<int>(k), gains, p, budget));
  return rate;
}

double sum_rate_difference_form(const RVector& gains, const PowerAllocation& p,
                                const LinkBudget& budget) {
  if (gains.size() != p.size())
    throw std::invalid_argument("sum_rate: dimension mismatch");
  const double total = p.total();
  double rate = 0.0;
  for (Eigen::Index k = 0; k < gains.size(); ++k) {
    const double interference = total - p.powers[k];
    rate += std::log2(total * gains[k] + budget.noise_power) -
            std::log2(interference * gains[k] + budget.noise_power);
  }
  return rate;
}

double sum_rate(std::span<const UserChannel> channels,
                const TransmissionCoefficients& f, const PowerAllocation& p,
                const LinkBudget& budget) {
  return sum_rate_from_gains(effective_gains(channels, f), p, budget);
}

double QosReport::min_slack() const {
  if (slack.empty()) return std::numeric_limits<double>::infinity();
  return *std::min_element(slack.begin(), slack.end());
}

QosReport qos_from_gains(const RVector& gains, const PowerAllocation& p,
                         const LinkBudget& budget) {
  QosReport report;
  const double gamma = budget.sinr_threshold;
  for (Eigen::Index k = 0; k < gains.size(); ++k) {
    const double s = sinr(static_cast<int>(k), gains, p, budget);
    report.slack.push_back(s - gamma);
    if (s < gamma * (1.0 - 1e-6)) report.satisfied = false;
  }
  return report;
}

QosReport qos_satisfied(std::span<const UserChannel> channels,
                        const TransmissionCoefficients& f,
                        const PowerAllocation& p, const LinkBudget& budget) {
  return qos_from_gains(effective_gains(channels, f), p, budget);
}

}  // namespace rmstx
