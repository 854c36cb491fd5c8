#pragma once

#include <random>
#include <vector>

#include "rmstx/linkmath.hpp"

namespace rmstx {

using Rng = std::mt19937_64;

struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double distance_to(const Position& other) const;
  double planar_radius() const;
};

// Uniform planar array of m_x (horizontal) by m_z (vertical) elements.
struct ArrayGeometry {
  int m_x = 1;
  int m_z = 1;
  double spacing = 0.05;     // d [m]
  double wavelength = 0.1;   // lambda [m]

  static ArrayGeometry half_wavelength(int m_x, int m_z,
                                       double wavelength = 0.1);

  int size() const { return m_x * m_z; }
  void validate() const;
};

struct PathParams {
  Complex gain;           // xi_{k,l}
  double azimuth = 0.0;   // theta_AoD in [0, 2 pi)
  double elevation = 0.0; // phi_AoD in [0, pi]
};

struct UserChannel {
  CVector coefficients;           // h_{t,k}
  std::vector<PathParams> paths;  // paths[0] is the LoS path
  Position position;
};

// Distance-based large-scale attenuation rho(d) = rho0 * d^-alpha, with
// separate exponents for the LoS path and the NLoS paths.
struct PathLossModel {
  double reference_gain_db = -30.0;  // rho0 at 1 m
  double los_exponent = 2.2;
  double nlos_exponent = 2.8;

  double attenuation(double distance_m, bool line_of_sight) const;
};

// Element (i_x, i_z) sits at flat index i_z * m_x + i_x.
CVector array_response(const ArrayGeometry& geom, double azimuth,
                       double elevation);

// h = sqrt(M / L) * sum_l xi_l a(theta_l, phi_l)
CVector channel_from_paths(const ArrayGeometry& geom,
                           const std::vector<PathParams>& paths);

UserChannel generate_channel(const ArrayGeometry& geom, int l_paths, Rng& rng,
                             const Position& user_position,
                             const Position& rms_position,
                             const PathLossModel& path_loss = {});

// Uniform over the disk of the given radius centred at the origin, z = 0.
std::vector<Position> place_users(int k_users, double radius, Rng& rng);

}  // namespace rmstx
