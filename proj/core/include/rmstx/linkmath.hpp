#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rmstx {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

struct UserChannel;

// Per-element transmissive coefficients f_m = beta_m * exp(j theta_m), |f_m| <= 1.
struct TransmissionCoefficients {
  CVector values;

  static constexpr double kMagnitudeTolerance = 1e-9;

  Eigen::Index size() const { return values.size(); }
  bool is_valid() const;
  double max_magnitude() const;
};

// Lifted beam F = f f^H.  Hermitian, PSD, diag <= 1.
struct LiftedBeamMatrix {
  CMatrix matrix;

  static LiftedBeamMatrix from_vector(const TransmissionCoefficients& f);

  Eigen::Index size() const { return matrix.rows(); }
  double trace() const { return matrix.trace().real(); }
  bool is_valid() const;
};

struct PowerAllocation {
  RVector powers;

  static PowerAllocation equal_split(int k_users, double total_power);

  Eigen::Index size() const { return powers.size(); }
  double total() const { return powers.sum(); }
  bool is_valid(double total_power) const;
};

struct LinkBudget {
  double noise_power = 0.0;     // sigma_k^2 [W], identical for every user
  double sinr_threshold = 0.0;  // gamma_th, linear
  double total_power = 0.0;     // P_t [W]

  void validate() const;
};

// Unit conversions.  P[W] = 10^((P[dBm] - 30) / 10).
double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);
double db_to_linear(double db);
double linear_to_db(double linear);

// |h^H f|^2
double effective_gain(const CVector& h, const TransmissionCoefficients& f);
// tr(F h h^H) = h^H F h
double lifted_gain(const CVector& h, const CMatrix& f_matrix);

RVector effective_gains(std::span<const UserChannel> channels,
                        const TransmissionCoefficients& f);
RVector lifted_gains(std::span<const UserChannel> channels,
                     const CMatrix& f_matrix);

// Every user hears the common beam, so interference passes through g_k too.
double sinr(int k, const RVector& gains, const PowerAllocation& p,
            const LinkBudget& budget);

// sum_k log2(1 + SINR_k)
double sum_rate_from_gains(const RVector& gains, const PowerAllocation& p,
                           const LinkBudget& budget);
// sum_k [log2(sum_i p_i g_k + s2) - log2(sum_{i!=k} p_i g_k + s2)]
double sum_rate_difference_form(const RVector& gains, const PowerAllocation& p,
                                const LinkBudget& budget);

double sum_rate(std::span<const UserChannel> channels,
                const TransmissionCoefficients& f, const PowerAllocation& p,
                const LinkBudget& budget);

struct QosReport {
  bool satisfied = true;
  std::vector<double> slack;  // SINR_k - gamma_th
  double min_slack() const;
};

QosReport qos_from_gains(const RVector& gains, const PowerAllocation& p,
                         const LinkBudget& budget);
QosReport qos_satisfied(std::span<const UserChannel> channels,
                        const TransmissionCoefficients& f,
                        const PowerAllocation& p, const LinkBudget& budget);

}  // namespace rmstx
