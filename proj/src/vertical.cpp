#include "finsler/vertical.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace finsler {

namespace {

// Periodic trig differentiation matrices for an even node count
// (Fourier-exact; the order-2 matrix is not the square of the order-1 one).
struct ThetaMatrices {
  int n = 0;
  std::vector<double> d1;  // row-major n x n
  std::vector<double> d2;
};

ThetaMatrices build_theta_matrices(int n) {
  ThetaMatrices m;
  m.n = n;
  m.d1.assign(static_cast<std::size_t>(n) * n, 0.0);
  m.d2.assign(static_cast<std::size_t>(n) * n, 0.0);
  const double h = kTwoPi / n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * n + j;
      if (i == j) {
        m.d1[idx] = 0.0;
        m.d2[idx] = -n * n / 12.0 - 1.0 / 6.0;
      } else {
        const int d = i - j;
        const double sign = (d % 2 == 0) ? 1.0 : -1.0;
        const double s = std::sin(0.5 * h * d);
        m.d1[idx] = 0.5 * sign * std::cos(0.5 * h * d) / s;
        m.d2[idx] = -0.5 * sign / (s * s);
      }
    }
  }
  return m;
}

const ThetaMatrices& theta_matrices(int n) {
  static std::mutex mu;
  static std::map<int, ThetaMatrices> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_theta_matrices(n)).first;
  return it->second;
}

}  // namespace

std::span<const double> theta_diff_matrix(int ntheta, int order) {
  if (order != 1 && order != 2) {
    throw ConfigError("theta_diff_matrix: order must be 1 or 2");
  }
  if (ntheta % 2 != 0) {
    throw ConfigError("theta_diff_matrix: ntheta must be even");
  }
  const ThetaMatrices& tm = theta_matrices(ntheta);
  return order == 1 ? tm.d1 : tm.d2;
}

namespace {

// High-pass complement of the mode-<=cut projector; rows sum to zero
// analytically, applied in difference form so constants are annihilated
// bitwise and the projection itself fixes them exactly.
const std::vector<double>& theta_highpass_matrix(int n, int cut) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<double>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({n, cut});
  if (it != cache.end()) return it->second;

  std::vector<double> hp(static_cast<std::size_t>(n) * n, 0.0);
  const double h = kTwoPi / n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double p = 1.0;  // mode 0
      for (int m = 1; m <= cut; ++m) p += 2.0 * std::cos(m * h * (i - j));
      p /= n;
      hp[static_cast<std::size_t>(i) * n + j] = p - (i == j ? 1.0 : 0.0);
    }
  }
  return cache.emplace(std::make_pair(n, cut), std::move(hp)).first->second;
}

}  // namespace

HomogeneousField theta_lowpass(const HomogeneousField& f, int max_mode) {
  const GridSpec& g = f.grid();
  if (max_mode < 0 || 2 * max_mode + 1 >= g.ntheta) return f;
  const auto& hp = theta_highpass_matrix(g.ntheta, max_mode);
  const int nt = g.ntheta;

  HomogeneousField out = f;
  const std::size_t rows =
      static_cast<std::size_t>(f.components()) * g.nx1 * g.nx2;
  const double* src = f.raw().data();
  double* dst = out.raw().data();
  parallel_for(rows, [&](std::size_t b, std::size_t e) {
    for (std::size_t r = b; r < e; ++r) {
      const double* in = src + r * nt;
      double* o = dst + r * nt;
      for (int i = 0; i < nt; ++i) {
        const double* row = hp.data() + static_cast<std::size_t>(i) * nt;
        double s = 0.0;
        for (int j = 0; j < nt; ++j) s += row[j] * (in[j] - in[i]);
        o[i] = in[i] + s;
      }
    }
  });
  return out;
}

HomogeneousField theta_derivative(const HomogeneousField& f, int order) {
  if (order != 1 && order != 2) {
    throw ConfigError("theta_derivative: order must be 1 or 2");
  }
  const GridSpec& g = f.grid();
  if (g.ntheta % 2 != 0) {
    throw ConfigError("theta_derivative: ntheta must be even");
  }
  const ThetaMatrices& tm = theta_matrices(g.ntheta);
  const double* mat = (order == 1 ? tm.d1 : tm.d2).data();
  const int nt = g.ntheta;

  HomogeneousField out(g, f.degree(), f.variance());
  const std::size_t rows =
      static_cast<std::size_t>(f.components()) * g.nx1 * g.nx2;
  const double* src = f.raw().data();
  double* dst = out.raw().data();
  // difference form: rows of both matrices sum to zero analytically, so
  // constants differentiate to bitwise zero
  parallel_for(rows, [&](std::size_t b, std::size_t e) {
    for (std::size_t r = b; r < e; ++r) {
      const double* in = src + r * nt;
      double* o = dst + r * nt;
      for (int i = 0; i < nt; ++i) {
        const double* row = mat + static_cast<std::size_t>(i) * nt;
        const double center = in[i];
        double s = 0.0;
        for (int j = 0; j < nt; ++j) s += row[j] * (in[j] - center);
        o[i] = s;
      }
    }
  });
  return out;
}

HomogeneousField x_derivative(const HomogeneousField& f, int axis, int order) {
  if (axis != 1 && axis != 2) throw ConfigError("x_derivative: axis must be 1 or 2");
  if (order != 1 && order != 2) throw ConfigError("x_derivative: order must be 1 or 2");
  const GridSpec& g = f.grid();
  const int n = (axis == 1) ? g.nx1 : g.nx2;
  const double h = (axis == 1) ? g.hx1() : g.hx2();

  HomogeneousField out(g, f.degree(), f.variance());
  const int nt = g.ntheta;
  const std::size_t slabs = static_cast<std::size_t>(f.components()) *
                            (axis == 1 ? g.nx2 : g.nx1);

  // 4th-order central stencils: order 1 in difference form so constants
  // cancel exactly; order 2 grouped symmetrically
  const double c1 = 8.0 / (12.0 * h);
  const double c2 = 1.0 / (12.0 * h);
  const double q1 = 16.0 / (12.0 * h * h);
  const double q2 = 1.0 / (12.0 * h * h);
  const double q0 = 30.0 / (12.0 * h * h);

  parallel_for(slabs, [&](std::size_t b, std::size_t e) {
    for (std::size_t s = b; s < e; ++s) {
      const int c = static_cast<int>(s / (axis == 1 ? g.nx2 : g.nx1));
      const int other = static_cast<int>(s % (axis == 1 ? g.nx2 : g.nx1));
      for (int i = 0; i < n; ++i) {
        const int im2 = (i - 2 + n) % n, im1 = (i - 1 + n) % n;
        const int ip1 = (i + 1) % n, ip2 = (i + 2) % n;
        for (int k = 0; k < nt; ++k) {
          auto sample = [&](int idx) {
            return axis == 1 ? f.at(c, idx, other, k) : f.at(c, other, idx, k);
          };
          double v;
          if (order == 1) {
            v = c1 * (sample(ip1) - sample(im1)) -
                c2 * (sample(ip2) - sample(im2));
          } else {
            v = q1 * (sample(ip1) + sample(im1)) -
                q2 * (sample(ip2) + sample(im2)) - q0 * sample(i);
          }
          if (axis == 1) {
            out.at(c, i, other, k) = v;
          } else {
            out.at(c, other, i, k) = v;
          }
        }
      }
    }
  });
  return out;
}

HomogeneousField y_derivative(const HomogeneousField& f) {
  const GridSpec& g = f.grid();
  const FiberFrame& fr = fiber_frame(g);
  const HomogeneousField ft = theta_derivative(f, 1);
  const double k = f.degree();

  std::vector<Var> var = f.variance();
  var.push_back(Var::Lower);
  HomogeneousField out(g, f.degree() - 1, std::move(var));

  const int comps = f.components();
  const int nt = g.ntheta;
  for (int c = 0; c < comps; ++c) {
    for (int axis = 0; axis < 2; ++axis) {
      const int oc = c * 2 + axis;
      auto psi = f.component(c);
      auto psit = ft.component(c);
      auto o = out.component(oc);
      parallel_for(g.nodes(), [&](std::size_t b, std::size_t e) {
        for (std::size_t n = b; n < e; ++n) {
          const int it = static_cast<int>(n % nt);
          o[n] = k * psi[n] * fr.e(axis, it) + psit[n] * fr.m(axis, it);
        }
      });
    }
  }
  return out;
}

namespace {

// Decompose a flat component index of rank r into per-slot digits.
inline void digits(int comp, int rank, int* d) {
  for (int s = rank - 1; s >= 0; --s) {
    d[s] = comp & 1;
    comp >>= 1;
  }
}

inline int from_digits(const int* d, int rank) {
  int c = 0;
  for (int s = 0; s < rank; ++s) c = c * 2 + d[s];
  return c;
}

}  // namespace

HomogeneousField contract_unit_y(const HomogeneousField& f, int slot) {
  const GridSpec& g = f.grid();
  const int rank = f.rank();
  if (slot < 0 || slot >= rank) throw ConfigError("contract_unit_y: bad slot");
  const FiberFrame& fr = fiber_frame(g);

  std::vector<Var> var;
  for (int s = 0; s < rank; ++s) {
    if (s != slot) var.push_back(f.variance()[s]);
  }
  HomogeneousField out(g, f.degree() + 1, std::move(var));

  const int nt = g.ntheta;
  int d[8];
  for (int oc = 0; oc < out.components(); ++oc) {
    digits(oc, rank - 1, d);
    int full[8];
    for (int s = 0, t = 0; s < rank; ++s) {
      full[s] = (s == slot) ? 0 : d[t++];
    }
    auto o = out.component(oc);
    for (int y = 0; y < 2; ++y) {
      full[slot] = y;
      auto in = f.component(from_digits(full, rank));
      parallel_for(g.nodes(), [&](std::size_t b, std::size_t e) {
        for (std::size_t n = b; n < e; ++n) {
          const int it = static_cast<int>(n % nt);
          o[n] += fr.e(y, it) * in[n];
        }
      });
    }
  }
  return out;
}

HomogeneousField vertical_hessian(const HomogeneousField& scalar) {
  if (scalar.rank() != 0) {
    throw ConfigError("vertical_hessian expects a scalar field");
  }
  HomogeneousField hess = y_derivative(y_derivative(scalar));
  HomogeneousField out(scalar.grid(), scalar.degree() - 2,
                       {Var::Lower, Var::Lower});
  auto h11 = hess.component(0), h12 = hess.component(1),
       h21 = hess.component(2), h22 = hess.component(3);
  auto o11 = out.component(0), o12 = out.component(1), o21 = out.component(2),
       o22 = out.component(3);
  for (std::size_t n = 0; n < h11.size(); ++n) {
    o11[n] = h11[n];
    o22[n] = h22[n];
    o12[n] = 0.5 * (h12[n] + h21[n]);
    o21[n] = o12[n];
  }
  return out;
}

HomogeneousField trace(const HomogeneousField& f, int slot_a, int slot_b) {
  const int rank = f.rank();
  if (slot_a == slot_b || slot_a < 0 || slot_b < 0 || slot_a >= rank ||
      slot_b >= rank) {
    throw ConfigError("trace: bad slot pair");
  }
  if (f.variance()[slot_a] == f.variance()[slot_b]) {
    throw ConfigError("trace: slots must have opposite variance");
  }
  std::vector<Var> var;
  for (int s = 0; s < rank; ++s) {
    if (s != slot_a && s != slot_b) var.push_back(f.variance()[s]);
  }
  HomogeneousField out(f.grid(), f.degree(), std::move(var));

  int d[8];
  for (int oc = 0; oc < out.components(); ++oc) {
    digits(oc, rank - 2, d);
    int full[8];
    auto o = out.component(oc);
    for (int y = 0; y < 2; ++y) {
      for (int s = 0, t = 0; s < rank; ++s) {
        full[s] = (s == slot_a || s == slot_b) ? y : d[t++];
      }
      auto in = f.component(from_digits(full, rank));
      for (std::size_t n = 0; n < in.size(); ++n) o[n] += in[n];
    }
  }
  return out;
}

}  // namespace finsler
