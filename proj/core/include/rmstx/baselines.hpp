#pragma once

#include <span>

#include "rmstx/ao.hpp"
#include "rmstx/channel.hpp"

namespace rmstx {

struct BaselineResult {
  TransmissionCoefficients f;
  PowerAllocation p;
  AoStatus status = AoStatus::converged;  // only meaningful for EA
  CMatrix f_matrix;                        // EA only: final lifted beam
  AoTrace trace;                           // EA only
};

// EA: beam from the alternating optimiser with p frozen at P_t / K.
// QoS rows are not imposed on any baseline.
BaselineResult equal_allocation(std::span<const UserChannel> channels,
                                const LinkBudget& budget, const AoConfig& config = {});

// ZF-style common beam: least-squares solution of H^H f = 1 (all users at
// equal effective amplitude), f = H (H^H H)^-1 1, scaled so max |f_m| = 1.
// A 1e-9 * trace ridge keeps H^H H invertible.  Equal powers.
BaselineResult zf_beamforming(std::span<const UserChannel> channels,
                              const LinkBudget& budget);

// RA: uniform random phases at unit magnitude; powers uniform on the
// simplex sum p = P_t (Dirichlet(1, ..., 1) scaled by P_t).
BaselineResult random_allocation(std::span<const UserChannel> channels,
                                 const LinkBudget& budget, Rng& rng);

}  // namespace rmstx
