#include "rhlab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "rhlab/errors.hpp"

namespace rhlab::quadrature {

namespace {

template <unsigned N>
Rule composite(const std::vector<double>& breaks) {
  using Gauss = boost::math::quadrature::gauss<double, N>;
  const auto& abscissa = Gauss::abscissa();
  const auto& weight = Gauss::weights();
  // Boost stores the non-negative half of the symmetric rule on [-1, 1].
  std::vector<double> x;
  std::vector<double> w;
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    x.push_back(abscissa[i]);
    w.push_back(weight[i]);
    if (abscissa[i] != 0.0) {
      x.push_back(-abscissa[i]);
      w.push_back(weight[i]);
    }
  }
  Rule rule;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p];
    const double half = 0.5 * (breaks[p + 1] - a);
    for (std::size_t i = 0; i < x.size(); ++i) {
      rule.nodes.push_back(a + half * (x[i] + 1.0));
      rule.weights.push_back(half * w[i]);
    }
  }
  return rule;
}

// Integral over the box with vertex s and signed edge vectors extent[d] e_d,
// for an integrand singular at s with the given exponent.
// The integrand takes the offset from s, which stays exact near s where s + offset would round to s.
double vertex_box_integral(const OffsetIntegrand& f, int dim, const Point& extent, double exponent) {
  const Rule& rule = graded_rule();
  const double radial_power = 1.0 / (dim - exponent);
  const std::size_t m = rule.nodes.size();
  double total = 0.0;
  for (int k = 0; k < dim; ++k) {
    std::array<int, 2> tangent{};
    int nt = 0;
    for (int j = 0; j < dim; ++j) {
      if (j != k) tangent[nt++] = j;
    }
    const std::size_t face_points = nt == 1 ? m : m * m;
    double face_sum = 0.0;
    for (std::size_t q = 0; q < face_points; ++q) {
      Point y{0.0, 0.0, 0.0};
      y[k] = extent[k];
      double wq = 1.0;
      const std::size_t i0 = nt == 1 ? q : q / m;
      y[tangent[0]] = extent[tangent[0]] * rule.nodes[i0];
      wq *= rule.weights[i0];
      if (nt == 2) {
        const std::size_t i1 = q % m;
        y[tangent[1]] = extent[tangent[1]] * rule.nodes[i1];
        wq *= rule.weights[i1];
      }
      double radial = 0.0;
      for (std::size_t r = 0; r < m; ++r) {
        // The clamp keeps t^exponent and f finite; below it the integrand is flat in u.
        const double t = std::max(std::pow(rule.nodes[r], radial_power), 1e-100);
        Point offset{0.0, 0.0, 0.0};
        for (int d = 0; d < dim; ++d) offset[d] = t * y[d];
        radial += rule.weights[r] * std::pow(t, exponent) * f(offset);
      }
      face_sum += wq * radial;
    }
    double jacobian = 1.0;
    for (int d = 0; d < dim; ++d) jacobian *= std::abs(extent[d]);
    total += jacobian * face_sum * radial_power;
  }
  return total;
}

double tensor_integral(const Integrand& f, int dim, const Point& lower, const Point& upper) {
  const Rule& rule = uniform_rule();
  const std::size_t m = rule.nodes.size();
  std::size_t points = 1;
  for (int d = 0; d < dim; ++d) points *= m;
  double sum = 0.0;
  for (std::size_t q = 0; q < points; ++q) {
    std::size_t rest = q;
    Point x{0.0, 0.0, 0.0};
    double w = 1.0;
    for (int d = 0; d < dim; ++d) {
      const std::size_t i = rest % m;
      rest /= m;
      x[d] = lower[d] + (upper[d] - lower[d]) * rule.nodes[i];
      w *= rule.weights[i];
    }
    sum += w * f(x);
  }
  double volume = 1.0;
  for (int d = 0; d < dim; ++d) volume *= upper[d] - lower[d];
  return sum * volume;
}

}  // namespace

const Rule& graded_rule() {
  static const Rule rule = composite<10>({0.0, 1.0 / 64.0, 1.0 / 16.0, 0.25, 1.0});
  return rule;
}

const Rule& uniform_rule() {
  static const Rule rule = composite<10>({0.0, 0.5, 1.0});
  return rule;
}

double box_integral(const Integrand& f, int dim, const Point& lower, const Point& upper,
                    const std::optional<Singularity>& singularity) {
  if (!singularity) return tensor_integral(f, dim, lower, upper);
  const Point s = singularity->center;
  return singular_box_integral(
      [&](const Point& offset) {
        Point x = s;
        for (int d = 0; d < dim; ++d) x[d] += offset[d];
        return f(x);
      },
      dim, lower, upper, *singularity);
}

double singular_box_integral(const OffsetIntegrand& f, int dim, const Point& lower, const Point& upper,
                             const Singularity& singularity) {
  const Point& s = singularity.center;
  bool inside = true;
  for (int d = 0; d < dim; ++d) {
    if (s[d] < lower[d] || s[d] > upper[d]) inside = false;
  }
  if (!inside) {
    return tensor_integral(
        [&](const Point& x) {
          Point offset{0.0, 0.0, 0.0};
          for (int d = 0; d < dim; ++d) offset[d] = x[d] - s[d];
          return f(offset);
        },
        dim, lower, upper);
  }
  if (!(singularity.exponent < dim)) throw HypothesisError("singular integrand is not locally integrable");

  // Split at the singular point: up to 2^dim boxes with the singularity as a vertex.
  double total = 0.0;
  for (int corner = 0; corner < (1 << dim); ++corner) {
    Point extent{0.0, 0.0, 0.0};
    bool empty = false;
    for (int d = 0; d < dim; ++d) {
      extent[d] = ((corner >> d) & 1) ? upper[d] - s[d] : lower[d] - s[d];
      if (extent[d] == 0.0) empty = true;
    }
    if (!empty) total += vertex_box_integral(f, dim, extent, singularity.exponent);
  }
  return total;
}

}  // namespace rhlab::quadrature
