#include "rmstx/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rmstx {

double Position::distance_to(const Position& other) const {
  return std::hypot(x - other.x, y - other.y, z - other.z);
}

double Position::planar_radius() const { return std::hypot(x, y); }

ArrayGeometry ArrayGeometry::half_wavelength(int m_x, int m_z, double wavelength) {
  return {m_x, m_z, wavelength / 2.0, wavelength};
}

void ArrayGeometry::validate() const {
  if (m_x < 1 || m_z < 1)
    throw std::invalid_argument("ArrayGeometry: element counts must be >= 1");
  if (!(spacing > 0.0) || !(wavelength > 0.0))
    throw std::invalid_argument("ArrayGeometry: spacing and wavelength must be > 0");
}

double PathLossModel::attenuation(double distance_m, bool line_of_sight) const {
  const double alpha = line_of_sight ? los_exponent : nlos_exponent;
  return db_to_linear(reference_gain_db) * std::pow(distance_m, -alpha);
}

CVector array_response(const ArrayGeometry& geom, double azimuth,
                       double elevation) {
  geom.validate();
  if (!std::isfinite(azimuth) || !std::isfinite(elevation))
    throw std::invalid_argument("array_response: non-finite angle");

  const double wavenumber_d = 2.0 * std::numbers::pi / geom.wavelength * geom.spacing;
  const double u = std::sin(azimuth) * std::sin(elevation);
  const double v = std::cos(elevation);
  const double scale = 1.0 / std::sqrt(static_cast<double>(geom.size()));

  CVector a(geom.size());
  for (int iz = 0; iz < geom.m_z; ++iz) {
    for (int ix = 0; ix < geom.m_x; ++ix) {
      const double phase = -wavenumber_d * (ix * u + iz * v);
      a[iz * geom.m_x + ix] = scale * std::polar(1.0, phase);
    }
  }
  return a;
}

CVector channel_from_paths(const ArrayGeometry& geom,
                           const std::vector<PathParams>& paths) {
  if (paths.empty()) throw std::invalid_argument("channel_from_paths: no paths");
  CVector h = CVector::Zero(geom.size());
  for (const auto& path : paths)
    h += path.gain * array_response(geom, path.azimuth, path.elevation);
  return std::sqrt(static_cast<double>(geom.size()) / paths.size()) * h;
}

UserChannel generate_channel(const ArrayGeometry& geom, int l_paths, Rng& rng,
                             const Position& user_position,
                             const Position& rms_position,
                             const PathLossModel& path_loss) {
  geom.validate();
  if (l_paths < 1) throw std::invalid_argument("generate_channel: l_paths < 1");

  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  std::uniform_real_distribution<double> azimuth(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> elevation(0.0, std::numbers::pi);

  const double distance = user_position.distance_to(rms_position);
  UserChannel channel;
  channel.position = user_position;
  channel.paths.reserve(static_cast<std::size_t>(l_paths));
  for (int l = 0; l < l_paths; ++l) {
    // Draw order is fixed: re, im, azimuth, elevation.
    const double re = normal(rng);
    const double im = normal(rng);
    PathParams path;
    path.gain = std::sqrt(path_loss.attenuation(distance, l == 0)) * Complex(re, im);
    path.azimuth = azimuth(rng);
    path.elevation = elevation(rng);
    channel.paths.push_back(path);
  }
  channel.coefficients = channel_from_paths(geom, channel.paths);
  return channel;
}

std::vector<Position> place_users(int k_users, double radius, Rng& rng) {
  if (k_users < 1) throw std::invalid_argument("place_users: k_users < 1");
  if (!(radius > 0.0)) throw std::invalid_argument("place_users: radius <= 0");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Position> positions;
  positions.reserve(static_cast<std::size_t>(k_users));
  for (int k = 0; k < k_users; ++k) {
    const double r = radius * std::sqrt(unit(rng));
    const double angle = 2.0 * std::numbers::pi * unit(rng);
    positions.push_back({r * std::cos(angle), r * std::sin(angle), 0.0});
  }
  return positions;
}

}  // namespace rmstx
