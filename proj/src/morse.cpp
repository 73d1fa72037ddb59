#include "confbend/morse.hpp"

#include <cmath>
#include <limits>

#include "confbend/stencil.hpp"

namespace confbend {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double segment_point_distance(const Vec& a, const Vec& d, const Vec& x) {
  const double dd = d.squaredNorm();
  double t = dd > 0.0 ? (x - a).dot(d) / dd : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * d - x).norm();
}

/// Distance between segments a + s·d and b + t·e, s, t ∈ [0, 1].
double segment_distance(const Vec& a, const Vec& d, const Vec& b, const Vec& e) {
  const Vec r = a - b;
  const double A = d.squaredNorm(), E = e.squaredNorm(), F = e.dot(r);
  double s = 0.0, t = 0.0;
  if (A <= 0.0 && E <= 0.0) return r.norm();
  if (A <= 0.0) {
    t = std::clamp(F / E, 0.0, 1.0);
  } else {
    const double C = d.dot(r);
    if (E <= 0.0) {
      s = std::clamp(-C / A, 0.0, 1.0);
    } else {
      const double B = d.dot(e);
      const double den = A * E - B * B;
      s = den > 0.0 ? std::clamp((B * F - C * E) / den, 0.0, 1.0) : 0.0;
      t = (B * s + F) / E;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-C / A, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((B - C) / A, 0.0, 1.0);
      }
    }
  }
  return (a + s * d - (b + t * e)).norm();
}

/// All lattice shifts in {−L, 0, L}ⁿ.
std::vector<Vec> image_shifts(const Grid& grid) {
  const int n = grid.dim();
  std::vector<Vec> shifts;
  int total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  for (int c = 0; c < total; ++c) {
    Vec s(n);
    int r = c;
    for (int i = 0; i < n; ++i) {
      s(i) = (r % 3 - 1) * grid.period(i);
      r /= 3;
    }
    shifts.push_back(s);
  }
  return shifts;
}

}  // namespace

Expr base_morse_expr(const Grid& grid, double v_floor) {
  const int n = grid.dim();
  Expr w(v_floor - n);
  for (int i = 0; i < n; ++i) w = w + cos(Expr(kTwoPi / grid.period(i)) * Expr::coord(i));
  return w;
}

ScalarField base_morse(const Grid& grid, double v_floor) {
  return sample(grid, base_morse_expr(grid, v_floor));
}

std::vector<Vec> base_morse_critical_points(const Grid& grid) {
  const int n = grid.dim();
  std::vector<Vec> pts;
  for (int mask = 0; mask < (1 << n); ++mask) {
    Vec p(n);
    for (int i = 0; i < n; ++i) p(i) = (mask >> i & 1) ? grid.period(i) / 2.0 : 0.0;
    pts.push_back(p);
  }
  return pts;
}

Vec periodic_delta(const Grid& grid, const Vec& a, const Vec& b) {
  Vec d = b - a;
  for (int i = 0; i < grid.dim(); ++i) {
    const double L = grid.period(i);
    d(i) -= L * std::round(d(i) / L);
  }
  return d;
}

double periodic_distance(const Grid& grid, const Vec& a, const Vec& b) {
  return periodic_delta(grid, a, b).norm();
}

Vec wrap(const Grid& grid, Vec x) {
  for (int i = 0; i < grid.dim(); ++i) {
    const double L = grid.period(i);
    x(i) -= L * std::floor(x(i) / L);
  }
  return x;
}

double plateau_bump(double r) {
  if (r <= 0.5) return 1.0;
  if (r >= 1.0) return 0.0;
  auto psi = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  const double a = psi(1.0 - r);
  const double b = psi(r - 0.5);
  return a / (a + b);
}

BumpFlow::BumpFlow(const Grid& grid, std::vector<Translation> moves, double support_radius, int rk4_steps)
    : grid_(grid), moves_(std::move(moves)), support_(support_radius), steps_(rk4_steps) {
  if (!(support_ > 0.0)) throw std::invalid_argument("BumpFlow: support radius must be positive");
  if (steps_ < 1) throw std::invalid_argument("BumpFlow: need at least one RK4 step");
  const auto shifts = image_shifts(grid_);
  for (std::size_t i = 0; i < moves_.size(); ++i) {
    const Vec di = moves_[i].destination - moves_[i].source;
    for (std::size_t j = 0; j < moves_.size(); ++j) {
      if (i == j) continue;
      const Vec dj = moves_[j].destination - moves_[j].source;
      for (const Vec& s : shifts) {
        if (j > i && segment_distance(moves_[i].source, di, moves_[j].source + s, dj) <= 2.0 * support_)
          throw CollisionError("move_points: tubes around segments " + std::to_string(i) + " and " +
                               std::to_string(j) + " intersect");
        if (segment_point_distance(moves_[i].source, di, moves_[j].destination + s) <= support_)
          throw CollisionError("move_points: destination " + std::to_string(j) + " lies in the tube of segment " +
                               std::to_string(i));
      }
    }
  }
}

Vec BumpFlow::field(int i, const Vec& x) const {
  const Translation& m = moves_[i];
  const Vec d = m.destination - m.source;
  // Nearest periodic image of the segment.
  const Vec rel = periodic_delta(grid_, m.source, x);
  const double dist = segment_point_distance(Vec::Zero(x.size()), d, rel);
  return plateau_bump(dist / support_) * d;
}

Vec BumpFlow::flow(int i, Vec x, double sign) const {
  const double h = 1.0 / steps_;
  for (int s = 0; s < steps_; ++s) {
    const Vec k1 = sign * field(i, x);
    const Vec k2 = sign * field(i, x + 0.5 * h * k1);
    const Vec k3 = sign * field(i, x + 0.5 * h * k2);
    const Vec k4 = sign * field(i, x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

Vec BumpFlow::forward(const Vec& x) const {
  Vec y = x;
  for (int i = 0; i < static_cast<int>(moves_.size()); ++i) y = flow(i, y, 1.0);
  return y;
}

Vec BumpFlow::inverse(const Vec& y) const {
  Vec x = y;
  for (int i = static_cast<int>(moves_.size()) - 1; i >= 0; --i) x = flow(i, x, -1.0);
  return x;
}

ScalarField move_points(const Grid& grid, const Expr& w, const std::vector<Translation>& moves, double support_radius,
                        int rk4_steps) {
  ScalarField v(grid);
  if (moves.empty()) {
    v = sample(grid, w);
    return v;
  }
  const BumpFlow h(grid, moves, support_radius, rk4_steps);
  for (Index p = 0; p < grid.points(); ++p) {
    const Vec x = h.inverse(grid.position(p));
    v(p) = w.eval(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }
  return v;
}

namespace {

double contraction_velocity(double x, double c, double L) {
  return -(L / kTwoPi) * std::sin(kTwoPi * (x - c) / L);
}

Vec contraction_integrate(const Grid& grid, const ContractionFlow& flow, Vec x, double sign, int steps) {
  const double h = flow.time / steps;
  for (int i = 0; i < grid.dim(); ++i) {
    const double c = flow.center(i), L = grid.period(i);
    double xi = x(i);
    for (int s = 0; s < steps; ++s) {
      const double k1 = sign * contraction_velocity(xi, c, L);
      const double k2 = sign * contraction_velocity(xi + 0.5 * h * k1, c, L);
      const double k3 = sign * contraction_velocity(xi + 0.5 * h * k2, c, L);
      const double k4 = sign * contraction_velocity(xi + h * k3, c, L);
      xi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    x(i) = xi;
  }
  return x;
}

}  // namespace

Vec contraction_inverse(const Grid& grid, const ContractionFlow& flow, const Vec& y, int rk4_steps) {
  return contraction_integrate(grid, flow, y, -1.0, rk4_steps);
}

Vec contraction_forward(const Grid& grid, const ContractionFlow& flow, const Vec& x, int rk4_steps) {
  return contraction_integrate(grid, flow, x, 1.0, rk4_steps);
}

Vec contraction_inverse_exact(const Grid& grid, const ContractionFlow& flow, const Vec& y) {
  Vec x(y.size());
  for (int i = 0; i < grid.dim(); ++i) {
    const double L = grid.period(i);
    const double k = kTwoPi / L;
    double d = y(i) - flow.center(i);
    d -= L * std::round(d / L);  // (−L/2, L/2]
    x(i) = flow.center(i) + 2.0 / k * std::atan(std::tan(k * d / 2.0) * std::exp(flow.time));
  }
  return x;
}

ScalarField contract_points(const Grid& grid, const Expr& w, const ContractionFlow& flow, int rk4_steps) {
  if (flow.center.size() != grid.dim()) throw std::invalid_argument("contract_points: center dimension mismatch");
  ScalarField v(grid);
  for (Index p = 0; p < grid.points(); ++p) {
    const Vec x = contraction_inverse(grid, flow, grid.position(p), rk4_steps);
    v(p) = w.eval(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }
  return v;
}

MorsePack make_morse_pack(const MetricField& g, ScalarField v, const Vec& p0, double r0, double v_floor) {
  const Grid& grid = g.grid();
  MorsePack pack;
  pack.v_max = -std::numeric_limits<double>::infinity();
  for (double x : v.values()) pack.v_max = std::max(pack.v_max, x);
  if (pack.v_max > v_floor + 1e-12)
    throw std::invalid_argument("make_morse_pack: v exceeds v_floor (max " + std::to_string(pack.v_max) + ")");
  const CovectorField dv = gradient(v, g.order());
  pack.m0 = std::numeric_limits<double>::infinity();
  for (Index p = 0; p < grid.points(); ++p) {
    if (periodic_distance(grid, p0, grid.position(p)) <= r0) continue;
    const Vec d = dv.vector(p);
    const double m = d.dot(g.inverse_matrix(p) * d);
    if (m < pack.m0) {
      pack.m0 = m;
      pack.m0_point = p;
    }
  }
  pack.v = std::move(v);
  return pack;
}

}  // namespace confbend
