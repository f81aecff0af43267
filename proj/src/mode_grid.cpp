#include "sdspec/mode_grid.hpp"

#include <cmath>
#include <stdexcept>

#include "sdspec/spectral_models.hpp"

namespace sdspec {

ModeGrid::ModeGrid(double observation_time, std::size_t mode_count)
    : time_(observation_time), modes_(mode_count) {
  if (!(time_ > 0.0) || !std::isfinite(time_)) {
    throw std::invalid_argument("ModeGrid: observation time must be positive");
  }
  if (modes_ < 1) {
    throw std::invalid_argument("ModeGrid: need at least one mode");
  }
}

ModeGrid ModeGrid::for_band(double bandwidth, double observation_time) {
  if (!(bandwidth > 0.0)) {
    throw std::invalid_argument("ModeGrid: bandwidth must be positive");
  }
  // Guard against B*T landing a rounding error below an integer.
  const double bt = bandwidth * observation_time;
  const double modes = std::floor(bt * (1.0 + 1e-12));
  if (modes < 1.0) {
    throw std::invalid_argument("ModeGrid: time-bandwidth product below one mode");
  }
  return ModeGrid(observation_time, static_cast<std::size_t>(modes));
}

double ModeGrid::omega(std::size_t m) const {
  if (m < 1 || m > modes_) {
    throw std::out_of_range("ModeGrid: mode index out of range");
  }
  return kTwoPi * static_cast<double>(m) / time_;
}

}  // namespace sdspec
