#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "sparsecode/types.hpp"

namespace sparsecode {

/// Thrown when power iteration fails to reach the residual tolerance; carries
/// the last iterate so callers can salvage a rough estimate.
class PowerIterationError : public std::runtime_error {
 public:
  PowerIterationError(const std::string& what, SpectralPair last)
      : std::runtime_error(what), last_iterate(std::move(last)) {}
  SpectralPair last_iterate;
};

inline constexpr double kSpectralTolDefault = 1e-10;
inline constexpr std::size_t kSpectralMaxIterDefault = 10000;

/// Leading singular value and left singular vector by power iteration on
/// M M^T.  Start vector is the normalized first column of M (e_1 if zero),
/// so results are deterministic.  Converged when
/// |M M^T v - sigma^2 v| <= tol * sigma^2.
SpectralPair top_singular_pair(const Matrix& m, double tol = kSpectralTolDefault,
                               std::size_t max_iter = kSpectralMaxIterDefault);

/// As above plus the second singular value, obtained by deflation: power
/// iteration with the leading vector projected out each step.
std::pair<SpectralPair, double> top_two_singular_values(
    const Matrix& m, double tol = kSpectralTolDefault,
    std::size_t max_iter = kSpectralMaxIterDefault);

double spectral_norm(const Matrix& m, double tol = kSpectralTolDefault);

/// Frobenius-nearest matrix whose spectral norm is at most cap: singular
/// values above cap are clamped.  Returns the input unchanged (bitwise) when
/// it is already inside the ball.
Matrix clip_singular_values(const Matrix& m, double cap);

}  // namespace sparsecode
