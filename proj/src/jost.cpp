#include "resnls/jost.hpp"

#include "resnls/numerics.hpp"

#include <cmath>
#include <sstream>

namespace resnls {

namespace {

struct M2 {
  double a, b, c, d;  // [[a, b], [c, d]]
};

M2 operator+(const M2& x, const M2& y) { return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d}; }
M2 operator-(const M2& x, const M2& y) { return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d}; }
M2 operator*(double s, const M2& x) { return {s * x.a, s * x.b, s * x.c, s * x.d}; }
M2 mul(const M2& x, const M2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}
M2 comm(const M2& x, const M2& y) { return mul(x, y) - mul(y, x); }

// exp of a traceless 2x2 matrix: Omega^2 = d I.
M2 expm_traceless(const M2& w) {
  double d = w.a * w.a + w.b * w.c;
  double c, s;
  if (std::abs(d) < 1e-3) {
    c = 1.0 + d * (0.5 + d * (1.0 / 24 + d / 720.0));
    s = 1.0 + d * (1.0 / 6 + d * (1.0 / 120 + d / 5040.0));
  } else if (d > 0) {
    double r = std::sqrt(d);
    c = std::cosh(r);
    s = std::sinh(r) / r;
  } else {
    double r = std::sqrt(-d);
    c = std::cos(r);
    s = std::sin(r) / r;
  }
  return {c + s * w.a, s * w.b, s * w.c, c + s * w.d};
}

const double kGauss[3] = {0.5 - std::sqrt(15.0) / 10.0, 0.5, 0.5 + std::sqrt(15.0) / 10.0};

// V at the three Gauss nodes of every substep of every cell [x_j, x_{j+1}], j = 0..n-1.
struct Stepper {
  XGrid g;
  int ns = 1;
  double hs = 0;
  std::vector<double> vg;

  Stepper(const Potential& V, double h_max) : g(V.grid) {
    if (!(h_max > 0)) throw std::invalid_argument("jost: h_max must be positive");
    ns = std::max(1, static_cast<int>(std::ceil(g.dx / h_max - 1e-12)));
    hs = g.dx / ns;
    vg.resize(static_cast<size_t>(g.n) * ns * 3);
    for (int j = 0; j < g.n; ++j)
      for (int s = 0; s < ns; ++s)
        for (int i = 0; i < 3; ++i) vg[(static_cast<size_t>(j) * ns + s) * 3 + i] = V.eval(g.x(j) + (s + kGauss[i]) * hs);
  }

  // One Magnus step across substep (j,s); dir=+1 moves right, dir=-1 moves left.
  M2 step(int j, int s, double k2, int dir) const {
    const double* v = &vg[(static_cast<size_t>(j) * ns + s) * 3];
    double q1 = v[0] - k2, q2 = v[1] - k2, q3 = v[2] - k2;
    double h = dir * hs;
    if (dir < 0) std::swap(q1, q3);
    const M2 A1{0, 1, q1, 0}, A2{0, 1, q2, 0}, A3{0, 1, q3, 0};
    M2 a1 = h * A2;
    M2 a2 = (std::sqrt(15.0) * h / 3.0) * (A3 - A1);
    M2 a3 = (10.0 * h / 3.0) * (A3 - 2.0 * A2 + A1);
    M2 C1 = comm(a1, a2);
    M2 C2 = (-1.0 / 60.0) * comm(a1, 2.0 * a3 + C1);
    M2 om = a1 + (1.0 / 12.0) * a3 + (1.0 / 240.0) * comm(-20.0 * a1 - a3 + C1, a2 + C2);
    return expm_traceless(om);
  }

  // psi and psi' at every grid point, started from the far end of the given side.
  void run(double k, int side, ArrayXcd& psi, ArrayXcd& dpsi, cd* end = nullptr) const {
    const int n = g.n;
    psi.resize(n);
    dpsi.resize(n);
    const double k2 = k * k;
    cd y0, y1;
    if (side > 0) {
      double L = g.x0 + n * g.dx;
      y0 = std::polar(1.0, k * L);
      y1 = cd(0, k) * y0;
      for (int j = n - 1; j >= 0; --j) {
        for (int s = ns - 1; s >= 0; --s) {
          M2 P = step(j, s, k2, -1);
          cd z0 = P.a * y0 + P.b * y1, z1 = P.c * y0 + P.d * y1;
          y0 = z0;
          y1 = z1;
        }
        psi(j) = y0;
        dpsi(j) = y1;
      }
    } else {
      y0 = std::polar(1.0, -k * g.x0);
      y1 = cd(0, -k) * y0;
      psi(0) = y0;
      dpsi(0) = y1;
      for (int j = 0; j < n - 1; ++j) {
        for (int s = 0; s < ns; ++s) {
          M2 P = step(j, s, k2, 1);
          cd z0 = P.a * y0 + P.b * y1, z1 = P.c * y0 + P.d * y1;
          y0 = z0;
          y1 = z1;
        }
        psi(j + 1) = y0;
        dpsi(j + 1) = y1;
      }
      if (end) {
        for (int s = 0; s < ns; ++s) {
          M2 P = step(n - 1, s, k2, 1);
          cd z0 = P.a * y0 + P.b * y1, z1 = P.c * y0 + P.d * y1;
          y0 = z0;
          y1 = z1;
        }
      }
    }
    if (end) {
      end[0] = y0;
      end[1] = y1;
    }
  }

  // psi, psi' at the far end turned into m, m'.
  void far_end(double k, int side, const cd* end, cd& m, cd& dm) const {
    double x = side > 0 ? g.x0 : g.x0 + g.n * g.dx;
    cd e = std::polar(1.0, -side * k * x);
    m = e * end[0];
    dm = e * (end[1] - cd(0, side * k) * end[0]);
  }

  JostColumn column(double k, int side) const {
    ArrayXcd psi, dpsi;
    cd end[2];
    run(k, side, psi, dpsi, end);
    JostColumn c;
    far_end(k, side, end, c.end_m, c.end_dm);
    c.m.resize(g.n);
    c.dm.resize(g.n);
    for (int j = 0; j < g.n; ++j) {
      cd e = std::polar(1.0, -side * k * g.x(j));
      c.m(j) = e * psi(j);
      c.dm(j) = e * (dpsi(j) - cd(0, side * k) * psi(j));
    }
    return c;
  }
};

double bracket(double x) { return std::sqrt(1.0 + x * x); }

}  // namespace

JostColumn jost_column(const Potential& V, double k, int side, double h_max) {
  Stepper st(V, h_max);
  return st.column(k, side);
}

JostField solve_jost(const Potential& V, const KGrid& kg, const JostOptions& opt) {
  Stepper st(V, opt.h_max);
  JostField f;
  f.xg = V.grid;
  f.kg = kg;
  f.h_used = st.hs;
  const int n = V.grid.n, nk = kg.n;
  f.mp.resize(n, nk);
  f.mm.resize(n, nk);
  if (opt.x_derivative) {
    f.dx_mp.resize(n, nk);
    f.dx_mm.resize(n, nk);
  }
  // Wronskian of psi_+(k), psi_+(-k) evaluated at the left end, where it carries all accumulated error.
  std::vector<double> wres(nk, 0.0);
  std::vector<cd> left_psi(nk), left_dpsi(nk);
  f.end_m.resize(2 * nk);
  f.end_dm.resize(2 * nk);
  parallel_for(2 * nk, [&](int task) {
    int i = task % nk, side = task < nk ? 1 : -1;
    ArrayXcd psi, dpsi;
    double k = kg.k(i);
    cd end[2];
    st.run(k, side, psi, dpsi, end);
    st.far_end(k, side, end, f.end_m(task), f.end_dm(task));
    ArrayXXcd& m = side > 0 ? f.mp : f.mm;
    for (int j = 0; j < n; ++j) {
      cd e = std::polar(1.0, -side * k * V.grid.x(j));
      m(j, i) = e * psi(j);
      if (opt.x_derivative) (side > 0 ? f.dx_mp : f.dx_mm)(j, i) = e * (dpsi(j) - cd(0, side * k) * psi(j));
    }
    if (side > 0) {
      left_psi[i] = psi(0);
      left_dpsi[i] = dpsi(0);
    }
  });
  for (int i = kg.first_positive(); i < nk; ++i) {
    int r = kg.mirror(i);
    double k = kg.k(i);
    cd w = left_psi[i] * left_dpsi[r] - left_dpsi[i] * left_psi[r];
    wres[i] = std::abs(w + cd(0, 2.0 * k)) / (2.0 * std::abs(k));
  }
  f.wronskian_residual = *std::max_element(wres.begin(), wres.end());

  JostColumn c0p = st.column(0.0, 1), c0m = st.column(0.0, -1);
  f.m0p = c0p.m.real();
  f.m0m = c0m.m.real();
  f.dx_m0p = c0p.dm.real();
  f.dx_m0m = c0m.dm.real();

  bool finite = f.mp.allFinite() && f.mm.allFinite() && f.m0p.allFinite() && f.m0m.allFinite();
  if (!finite) {
    int worst = -1;
    for (int i = 0; i < nk && worst < 0; ++i)
      if (!f.mp.col(i).allFinite() || !f.mm.col(i).allFinite()) worst = i;
    std::ostringstream os;
    os << "solve_jost: non-finite Jost data";
    if (worst >= 0) os << " first at k=" << kg.k(worst);
    throw std::runtime_error(os.str());
  }
  if (opt.k_derivative) jost_k_derivative(f, V);
  return f;
}

void jost_k_derivative(JostField& field, const Potential& V) {
  const int n = field.xg.n, nk = field.kg.n;
  const double dk = field.kg.dk;
  field.dk_mp.resize(n, nk);
  field.dk_mm.resize(n, nk);
  ArrayXcd row(nk);
  for (int j = 0; j < n; ++j) {
    row = field.mp.row(j).transpose();
    field.dk_mp.row(j) = kderiv(row, dk).transpose();
    row = field.mm.row(j).transpose();
    field.dk_mm.row(j) = kderiv(row, dk).transpose();
  }
  // Re-solve check at one interior k with a finer difference step.
  const int i = field.kg.first_positive() + nk / 8;
  const double k = field.kg.k(i), d = dk / 4.0;
  Stepper st(V, field.h_used > 0 ? field.h_used * (1 + 1e-12) : 0.01);
  double worst = 0, scale = 1.0;
  for (int side : {1, -1}) {
    JostColumn a = st.column(k + 2 * d, side), b = st.column(k + d, side), c = st.column(k - d, side),
               e = st.column(k - 2 * d, side);
    ArrayXcd ref = (-a.m + 8.0 * b.m - 8.0 * c.m + e.m) / (12.0 * d);
    const ArrayXXcd& fd = side > 0 ? field.dk_mp : field.dk_mm;
    for (int j = 0; j < n; ++j) {
      double x = field.xg.x(j);
      if (side * x < -1.0) continue;
      scale = std::max(scale, std::abs(ref(j)));
      worst = std::max(worst, std::abs(fd(j, i) - ref(j)));
    }
  }
  field.dk_crosscheck = worst / scale;
  if (field.dk_crosscheck > 1e-4) {
    std::ostringstream os;
    os << "jost_k_derivative: k-grid too coarse, re-solve mismatch " << field.dk_crosscheck << " at k=" << k;
    throw std::runtime_error(os.str());
  }
}

double jost_ode_residual(const JostField& field, const Potential& V, int col, int side) {
  const XGrid& g = field.xg;
  const ArrayXXcd& M = side > 0 ? field.mp : field.mm;
  const double k = field.kg.k(col);
  ArrayXcd m = M.col(col);
  // Sixth-order centred second and first derivatives.
  const double c2[7] = {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90};
  const double c1[7] = {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0, 3.0 / 4, -3.0 / 20, 1.0 / 60};
  double worst = 0, scale = 0;
  for (int j = 3; j < g.n - 3; ++j) {
    cd m2 = 0, m1 = 0;
    for (int a = 0; a < 7; ++a) {
      m2 += c2[a] * m(j + a - 3);
      m1 += c1[a] * m(j + a - 3);
    }
    m2 /= g.dx * g.dx;
    m1 /= g.dx;
    cd vm = V.V(j) * m(j);
    worst = std::max(worst, std::abs(m2 + cd(0, 2.0 * side * k) * m1 - vm));
    scale = std::max(scale, std::abs(vm));
  }
  return scale > 0 ? worst / scale : worst;
}

BoundReport check_jost_bounds(const JostField& field, const Potential& V) {
  BoundReport r;
  const XGrid& g = field.xg;
  DecayWeights w1 = decay_weights(V, 1.0), w0 = decay_weights(V, 0.0);
  r.all_finite = field.mp.allFinite() && field.mm.allFinite();
  const bool have_dk = field.dk_mp.size() > 0, have_dx = field.dx_mp.size() > 0;
  for (int side : {1, -1}) {
    const ArrayXXcd& M = side > 0 ? field.mp : field.mm;
    const ArrayXd& W1 = side > 0 ? w1.plus : w1.minus;
    const ArrayXd& W0 = side > 0 ? w0.plus : w0.minus;
    const double wref = W1(g.index_of(-side * 1.0));
    const double wref0 = W0(g.index_of(-side * 1.0));
    for (int j = 0; j < g.n; ++j) {
      double x = g.x(j), sx = side * x;
      for (int i = 0; i < field.kg.n; ++i) {
        double k = field.kg.k(i), kb = bracket(k);
        double dev = std::abs(M(j, i) - 1.0);
        if (sx <= 1.0) r.c_m_growth = std::max(r.c_m_growth, dev * kb / bracket(x));
        if (sx < -1.0) continue;
        if (W1(j) > 1e-10 * wref) {
          r.c_m_minus_1 = std::max(r.c_m_minus_1, dev * kb / W1(j));
          if (have_dk) {
            const ArrayXXcd& D = side > 0 ? field.dk_mp : field.dk_mm;
            r.c_dk = std::max(r.c_dk, std::abs(D(j, i)) * std::abs(k) / W1(j));
          }
        }
        if (have_dx && W0(j) > 1e-10 * wref0) {
          const ArrayXXcd& D = side > 0 ? field.dx_mp : field.dx_mm;
          r.c_dx = std::max(r.c_dx, std::abs(D(j, i)) / W0(j));
        }
      }
    }
  }
  if (!std::isfinite(r.c_m_minus_1) || !std::isfinite(r.c_dk) || !std::isfinite(r.c_dx)) r.all_finite = false;
  return r;
}

}  // namespace resnls
