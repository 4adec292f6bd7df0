#pragma once

#include "manyiv/types.hpp"

namespace manyiv {

// Per-period moment contributions m_t (rows) entering a Newey-West estimate.
struct MomentMatrix {
  Matrix values;      // T x k_s
  int lag_length = 4;  // Bartlett truncation L
};

// Newey-West estimator with Bartlett weights w_l = 1 - l/(L+1):
//   S = G_0 + sum_{l=1..L} w_l (G_l + G_l'),
//   G_l = T^{-1} sum_{t=l+1..T} (m_t - mbar)(m_{t-l} - mbar)'.
// `centered` subtracts the column mean before the kernel sum (the
// continuously-updated convention); disable for the uncentered variant.
Matrix hac_covariance(const MomentMatrix& m, bool centered = true);

}  // namespace manyiv
