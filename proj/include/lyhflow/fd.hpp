#pragma once
// Central finite differences on evaluators of flat value vectors.

#include <array>
#include <functional>
#include <vector>

namespace lyh {

// Space-time coordinate: y[0] is the time coordinate of the active picture,
// y[1..n] are the chart coordinates.
using Coord = std::array<double, 4>;

struct DerivativeStencil {
  double spatial_step = 1e-3;
  double time_step = 1e-3;
  int order = 4;

  void validate() const;
  double step(int dir) const { return dir == 0 ? time_step : spatial_step; }
  DerivativeStencil scaled(double factor) const {
    return {spatial_step * factor, time_step * factor, order};
  }
};

using VecField = std::function<std::vector<double>(const Coord&)>;

// offsets and weights of the central first / second derivative stencils
const std::vector<std::pair<int, double>>& first_stencil(int order);
const std::vector<std::pair<int, double>>& second_stencil(int order);

std::vector<double> fd_first(const VecField& f, const Coord& y, int dir, const DerivativeStencil& s);
std::vector<double> fd_second(const VecField& f, const Coord& y, int dir, const DerivativeStencil& s);
// mixed partial d_a d_b as a product of one-dimensional stencils (a != b)
std::vector<double> fd_mixed(const VecField& f, const Coord& y, int a, int b, const DerivativeStencil& s);

// All first derivatives: result[dir][component] for dir in 0..ndirs-1.
// Directions listed in `dirs`; the returned outer index follows `dirs`.
std::vector<std::vector<double>> fd_gradient(const VecField& f, const Coord& y, const std::vector<int>& dirs,
                                             const DerivativeStencil& s);

}  // namespace lyh
