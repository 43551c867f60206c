#include "lyhflow/fd.hpp"

#include "lyhflow/errors.hpp"

namespace lyh {

void DerivativeStencil::validate() const {
  if (!(spatial_step > 0.0) || !(time_step > 0.0)) throw ConfigError("stencil steps must be positive");
  if (order != 2 && order != 4 && order != 6) throw ConfigError("stencil order must be 2, 4 or 6");
}

const std::vector<std::pair<int, double>>& first_stencil(int order) {
  static const std::vector<std::pair<int, double>> o2{{-1, -0.5}, {1, 0.5}};
  static const std::vector<std::pair<int, double>> o4{
      {-2, 1.0 / 12.0}, {-1, -2.0 / 3.0}, {1, 2.0 / 3.0}, {2, -1.0 / 12.0}};
  static const std::vector<std::pair<int, double>> o6{{-3, -1.0 / 60.0}, {-2, 3.0 / 20.0}, {-1, -3.0 / 4.0},
                                                      {1, 3.0 / 4.0},    {2, -3.0 / 20.0}, {3, 1.0 / 60.0}};
  switch (order) {
    case 2: return o2;
    case 4: return o4;
    case 6: return o6;
  }
  throw ConfigError("stencil order must be 2, 4 or 6");
}

const std::vector<std::pair<int, double>>& second_stencil(int order) {
  static const std::vector<std::pair<int, double>> o2{{-1, 1.0}, {0, -2.0}, {1, 1.0}};
  static const std::vector<std::pair<int, double>> o4{
      {-2, -1.0 / 12.0}, {-1, 4.0 / 3.0}, {0, -5.0 / 2.0}, {1, 4.0 / 3.0}, {2, -1.0 / 12.0}};
  static const std::vector<std::pair<int, double>> o6{{-3, 1.0 / 90.0}, {-2, -3.0 / 20.0}, {-1, 3.0 / 2.0},
                                                      {0, -49.0 / 18.0}, {1, 3.0 / 2.0},   {2, -3.0 / 20.0},
                                                      {3, 1.0 / 90.0}};
  switch (order) {
    case 2: return o2;
    case 4: return o4;
    case 6: return o6;
  }
  throw ConfigError("stencil order must be 2, 4 or 6");
}

namespace {
void axpy(std::vector<double>& acc, double w, const std::vector<double>& v) {
  if (acc.empty()) acc.assign(v.size(), 0.0);
  for (size_t i = 0; i < v.size(); ++i) acc[i] += w * v[i];
}
}  // namespace

// Stencils are applied to differences so that constant fields give exact zeros:
// first derivatives pair the antisymmetric offsets, second derivatives
// subtract the centre value (the weights sum to zero).
std::vector<double> fd_first(const VecField& f, const Coord& y, int dir, const DerivativeStencil& s) {
  const double h = s.step(dir);
  std::vector<double> acc;
  for (auto [off, w] : first_stencil(s.order)) {
    if (off < 0) continue;
    Coord zp = y, zm = y;
    zp[dir] += off * h;
    zm[dir] -= off * h;
    std::vector<double> fp = f(zp);
    const std::vector<double> fm = f(zm);
    for (size_t i = 0; i < fp.size(); ++i) fp[i] -= fm[i];
    axpy(acc, w / h, fp);
  }
  return acc;
}

std::vector<double> fd_second(const VecField& f, const Coord& y, int dir, const DerivativeStencil& s) {
  const double h = s.step(dir);
  const std::vector<double> f0 = f(y);
  std::vector<double> acc(f0.size(), 0.0);
  for (auto [off, w] : second_stencil(s.order)) {
    if (off == 0) continue;
    Coord z = y;
    z[dir] += off * h;
    std::vector<double> fz = f(z);
    for (size_t i = 0; i < fz.size(); ++i) fz[i] -= f0[i];
    axpy(acc, w / (h * h), fz);
  }
  return acc;
}

std::vector<double> fd_mixed(const VecField& f, const Coord& y, int a, int b, const DerivativeStencil& s) {
  if (a == b) return fd_second(f, y, a, s);
  VecField inner = [&](const Coord& z) { return fd_first(f, z, b, s); };
  return fd_first(inner, y, a, s);
}

std::vector<std::vector<double>> fd_gradient(const VecField& f, const Coord& y, const std::vector<int>& dirs,
                                             const DerivativeStencil& s) {
  std::vector<std::vector<double>> out;
  out.reserve(dirs.size());
  for (int d : dirs) out.push_back(fd_first(f, y, d, s));
  return out;
}

}  // namespace lyh
