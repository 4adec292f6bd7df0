#include "manyiv/hac.hpp"

#include "manyiv/errors.hpp"

namespace manyiv {

Matrix hac_covariance(const MomentMatrix& m, bool centered) {
  const auto T = m.values.rows();
  const int L = m.lag_length;
  if (L < 0) throw config_error("hac: lag length must be nonnegative");
  if (T <= L)
    throw config_error("hac: lag length " + std::to_string(L) +
                       " requires more than " + std::to_string(L) +
                       " observations, got " + std::to_string(T));

  Matrix centered_m = m.values;
  if (centered)
    centered_m.rowwise() -= m.values.colwise().mean();

  Matrix S = centered_m.transpose() * centered_m / double(T);
  for (int l = 1; l <= L; ++l) {
    const double w = 1.0 - double(l) / double(L + 1);
    // G_l = T^{-1} sum_t m_t m_{t-l}'
    Matrix G = centered_m.bottomRows(T - l).transpose() *
               centered_m.topRows(T - l) / double(T);
    S += w * (G + G.transpose());
  }
  // kernel symmetry holds analytically; enforce it against rounding
  S = 0.5 * (S + S.transpose()).eval();
  return S;
}

}  // namespace manyiv
