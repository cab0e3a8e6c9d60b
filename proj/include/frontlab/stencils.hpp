#pragma once

#include <array>
#include <stdexcept>

namespace frontlab::stencil {

/// Central finite-difference weights on offsets -h..h, h = order / 2,
/// for the first and second derivative (before dividing by dx and dx^2).
struct Central {
  int half = 1;
  std::array<double, 7> first{};
  std::array<double, 7> second{};
};

inline Central central(int order) {
  Central s;
  switch (order) {
    case 2:
      s.half = 1;
      s.first = {-0.5, 0.0, 0.5};
      s.second = {1.0, -2.0, 1.0};
      break;
    case 4:
      s.half = 2;
      s.first = {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12};
      s.second = {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12};
      break;
    case 6:
      s.half = 3;
      s.first = {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60};
      s.second = {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90};
      break;
    default:
      throw std::invalid_argument("stencil order must be 2, 4 or 6");
  }
  return s;
}

}  // namespace frontlab::stencil
