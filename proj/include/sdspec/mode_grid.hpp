#pragma once

#include <cstddef>

namespace sdspec {

/// Positive sideband modes omega_m = 2 pi m / T, m = 1..M. The DC mode is
/// never part of the grid.
class ModeGrid {
 public:
  ModeGrid(double observation_time, std::size_t mode_count);

  /// M = floor(B T) modes, which tile the band |omega| <= 2 pi B.
  static ModeGrid for_band(double bandwidth, double observation_time);

  double observation_time() const noexcept { return time_; }
  std::size_t size() const noexcept { return modes_; }
  /// Frequency of mode m (1-based).
  double omega(std::size_t m) const;

 private:
  double time_;
  std::size_t modes_;
};

}  // namespace sdspec
