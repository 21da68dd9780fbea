#include "pleg/finite_difference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pleg::fd {

std::vector<double> fornberg_weights(double center,
                                     const std::vector<double>& offsets,
                                     int order) {
  const int n = static_cast<int>(offsets.size());
  if (order < 0 || order >= n) {
    throw std::invalid_argument("fornberg_weights: need more nodes than order");
  }
  // c[i][k]: weight of node i for derivative k
  std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0;
  double c4 = offsets[0] - center;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = offsets[i] - center;
    for (int j = 0; j < i; ++j) {
      const double c3 = offsets[i] - offsets[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][order];
  return w;
}

std::vector<Stencil> plan_stencils(int last, double spacing, int order,
                                   int accuracy) {
  if (order < 0) throw std::invalid_argument("negative derivative order");
  if (accuracy < 1) throw std::invalid_argument("accuracy must be positive");
  if (order == 0) {
    std::vector<Stencil> id(last + 1);
    for (int j = 0; j <= last; ++j) id[j] = {j, {1.0}};
    return id;
  }
  // centred: 2r+1 points reach order 2r+2-order; one-sided needs order+accuracy
  const int radius = (accuracy + order - 2 + 1) / 2;
  const int centred_width = 2 * std::max(radius, 1) + 1;
  const int sided_width = order + accuracy;
  if (last + 1 < sided_width) {
    throw std::invalid_argument("too few levels for the requested stencil");
  }
  const double scale = std::pow(spacing, order);
  std::vector<Stencil> plan(last + 1);
  for (int j = 0; j <= last; ++j) {
    const int half = centred_width / 2;
    int first;
    int width;
    if (j - half >= 0 && j + half <= last) {
      first = j - half;
      width = centred_width;
    } else {
      width = sided_width;
      first = std::clamp(j - width / 2, 0, last + 1 - width);
    }
    std::vector<double> offsets(width);
    for (int i = 0; i < width; ++i) offsets[i] = first + i;
    auto w = fornberg_weights(j, offsets, order);
    for (double& v : w) v /= scale;
    plan[j] = {first, std::move(w)};
  }
  return plan;
}

}  // namespace pleg::fd
