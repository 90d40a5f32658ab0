#include "resnls/nsd.hpp"

#include "resnls/numerics.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <sstream>

namespace resnls {

ArrayXcd apply_nsd(const SpectralTransform& tr, const ArrayXcd& g1, const ArrayXcd& g2, const ArrayXcd& g3, double t,
                   double alias_tol) {
  const KGrid& kg = tr.kgrid();
  if (g1.size() != kg.n || g2.size() != kg.n || g3.size() != kg.n)
    throw std::invalid_argument("apply_nsd: fields must live on the k-grid");
  ArrayXcd ph(kg.n);
  for (int i = 0; i < kg.n; ++i) ph(i) = std::polar(1.0, t * kg.k(i) * kg.k(i));
  const ArrayXcd u1 = tr.inverse(g1 * ph), u2 = tr.inverse(g2 * ph), u3 = tr.inverse(g3 * ph);
  ArrayXcd out = tr.forward(u1 * u2.conjugate() * u3) * ph.conjugate();
  const double edge = spectral_edge(out);
  if (edge > alias_tol) {
    std::ostringstream os;
    os << "apply_nsd: cubic output is " << edge << " of its peak at the k-grid edge; enlarge the k-grid";
    throw std::domain_error(os.str());
  }
  return out;
}

namespace {

ArrayXXcd assemble_sharp(const BasisSplit& s) {
  ArrayXXcd K(s.xg.n, s.kg.n);
  for (int i = 0; i < s.kg.n; ++i)
    for (int j = 0; j < s.xg.n; ++j) K(j, i) = (s.ks(j, i) + s.KR(j, i)) / kSqrt2Pi;
  return K;
}

}  // namespace

ArrayXcd SplitTransform::forward(const ArrayXcd& f) const {
  if (f.size() != s_.xg.n) throw std::invalid_argument("SplitTransform::forward: size mismatch");
  ArrayXcd g(s_.kg.n);
  for (int i = 0; i < s_.kg.n; ++i) {
    cd acc = 0;
    for (int j = 0; j < s_.xg.n; ++j) acc += std::conj(s_.ks(j, i) + s_.KR(j, i)) * f(j);
    g(i) = acc * s_.xg.dx / kSqrt2Pi;
  }
  return g;
}

ArrayXcd SplitTransform::inverse(const ArrayXcd& g) const {
  if (g.size() != s_.kg.n) throw std::invalid_argument("SplitTransform::inverse: size mismatch");
  const ArrayXXcd K = assemble_sharp(s_);
  return (K.matrix() * (g * s_.wk).matrix()).array();
}

SplitColumn split_column(const BasisSplit& s, double k) {
  const KGrid& kg = s.kg;
  const double pos = k / kg.dk + kg.n / 2 - 0.5;
  const int i = static_cast<int>(std::lround(pos));
  if (std::abs(pos - i) > 1e-9 || i < 0 || i >= kg.n) {
    std::ostringstream os;
    os << "split_column: k = " << k << " is not a node of the k-grid (dk = " << kg.dk << ")";
    throw std::invalid_argument(os.str());
  }
  SplitColumn c;
  c.ks.resize(s.xg.n);
  for (int j = 0; j < s.xg.n; ++j) c.ks(j) = s.ks(j, i);
  c.kr = s.KR.col(i);
  return c;
}

cd mu_regular_R1(const BasisSplit& s, const std::array<double, 4>& q) {
  std::array<SplitColumn, 4> c;
  for (int a = 0; a < 4; ++a) c[a] = split_column(s, q[a]);
  cd acc = 0;
  for (int j = 0; j < s.xg.n; ++j) {
    const cd f1 = std::conj(c[0].ks(j) + c[0].kr(j)), f2 = c[1].ks(j) + c[1].kr(j);
    const cd f3 = std::conj(c[2].ks(j) + c[2].kr(j)), f4 = c[3].ks(j) + c[3].kr(j);
    const cd s1 = std::conj(c[0].ks(j)), s2 = c[1].ks(j), s3 = std::conj(c[2].ks(j)), s4 = c[3].ks(j);
    acc += f1 * f2 * f3 * f4 - s1 * s2 * s3 * s4;
  }
  return acc * s.xg.dx;
}

namespace {

// Channels of K_S: (piece, exponent sign).
constexpr std::array<std::array<int, 2>, 5> kChannels{{{0, 1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

const ArrayXcd& channel_coef(const BasisSplit& s, int ch, const ArrayXcd& ones) {
  switch (ch) {
    case 0: return ones;
    case 1: return s.app;
    case 2: return s.apm;
    case 3: return s.amp;
    default: return s.amm;
  }
}

double min_limit_at_zero(const KGrid& kg, const ArrayXcd& c) {
  return std::min(std::abs(limit_at_zero(kg, c, 1)), std::abs(limit_at_zero(kg, c, -1)));
}

// Full linear convolution of three length-n arrays, length 3n - 2.
ArrayXcd conv3(const ArrayXcd& a, const ArrayXcd& b, const ArrayXcd& c) {
  const int n = static_cast<int>(a.size());
  int m = 1;
  while (m < 3 * n) m <<= 1;
  Eigen::FFT<double> fft;
  std::vector<cd> pa(m, 0.0), pb(m, 0.0), pc(m, 0.0), fa, fb, fc, out;
  for (int i = 0; i < n; ++i) {
    pa[i] = a(i);
    pb[i] = b(i);
    pc[i] = c(i);
  }
  fft.fwd(fa, pa);
  fft.fwd(fb, pb);
  fft.fwd(fc, pc);
  for (int i = 0; i < m; ++i) fa[i] *= fb[i] * fc[i];
  fft.inv(out, fa);
  ArrayXcd r(3 * n - 2);
  for (int i = 0; i < 3 * n - 2; ++i) r(i) = out[i];
  return r;
}

ArrayXcd reflect(const ArrayXcd& a, int e) { return e > 0 ? ArrayXcd(a) : ArrayXcd(a.reverse()); }

// Density of e2 l + e3 m + e4 n under e^{itl^2} f1(l) conj(e^{itm^2} f2(m)) e^{itn^2} f3(n); entry q sits at
// eta_q = (q - 3n/2 + 3/2) dk.
ArrayXcd density(const KGrid& kg, double t, const std::array<int, 4>& eps, const ArrayXcd& f1, const ArrayXcd& f2,
                 const ArrayXcd& f3) {
  ArrayXcd ph(kg.n);
  for (int i = 0; i < kg.n; ++i) ph(i) = std::polar(1.0, t * kg.k(i) * kg.k(i));
  const ArrayXcd a1 = reflect(f1 * ph, eps[1]);
  const ArrayXcd a2 = reflect((f2 * ph).conjugate(), eps[2]);
  const ArrayXcd a3 = reflect(f3 * ph, eps[3]);
  return conv3(a1, a2, a3) * (kg.dk * kg.dk);
}

// Index of eta = -e1 k_i in the density.
int center(const KGrid& kg, int i, int e1) { return e1 > 0 ? 2 * kg.n - 2 - i : i + kg.n - 1; }

cd at(const ArrayXcd& H, long q) { return q >= 0 && q < H.size() ? H(q) : cd(0.0); }

ArrayXcd contract_delta(const KGrid& kg, const ArrayXcd& H, int e1) {
  ArrayXcd S(kg.n);
  for (int i = 0; i < kg.n; ++i) S(i) = at(H, center(kg, i, e1));
  return S;
}

// dk sum_q b((q - qc) dk) H_q with b sampled as bj[j + off], j = q - qc.
ArrayXcd contract_regular(const KGrid& kg, const ArrayXcd& H, int e1, const ArrayXcd& bj, int off) {
  ArrayXcd S(kg.n);
  for (int i = 0; i < kg.n; ++i) {
    const long qc = center(kg, i, e1);
    cd acc = 0;
    for (long q = 0; q < H.size(); ++q) {
      const long j = q - qc + off;
      if (j >= 0 && j < bj.size()) acc += bj(j) * H(q);
    }
    S(i) = acc * kg.dk;
  }
  return S;
}

double dH(const ArrayXcd& H, long q, double dk, int order, cd& out) {
  if (order == 4)
    out = (-at(H, q + 2) + 8.0 * at(H, q + 1) - 8.0 * at(H, q - 1) + at(H, q - 2)) / (12.0 * dk);
  else
    out = (at(H, q + 1) - at(H, q - 1)) / (2.0 * dk);
  return std::abs(out);
}

struct PvResult {
  ArrayXcd S;
  double center_norm = 0;   // size of the central-cell correction
  double center_spread = 0; // |second-order minus fourth-order H'| relative to max |H'|
};

// p.v. int c zeta(xi)/xi H(xi - e1 k) dxi with zeta even: pairs +-j plus the central cell c zeta(0) H'(qc) dk.
// zj[j] = zeta(j dk) for j >= 0.
PvResult contract_pv(const KGrid& kg, const ArrayXcd& H, int e1, cd c, const ArrayXd& zj) {
  PvResult r;
  r.S.resize(kg.n);
  double dmax = 0, spread = 0;
  for (int i = 0; i < kg.n; ++i) {
    const long qc = center(kg, i, e1);
    cd d4, d2;
    dmax = std::max(dmax, dH(H, qc, kg.dk, 4, d4));
    dH(H, qc, kg.dk, 2, d2);
    spread = std::max(spread, std::abs(d4 - d2));
    const cd mid = c * zj(0) * d4;
    cd acc = mid;
    const long jmax = std::min<long>(zj.size() - 1, std::max<long>(qc, H.size() - 1 - qc));
    for (long j = 1; j <= jmax; ++j)
      acc += c * zj(j) / (j * kg.dk) * (at(H, qc + j) - at(H, qc - j));
    r.S(i) = acc * kg.dk;
    r.center_norm = std::max(r.center_norm, std::abs(mid) * kg.dk);
  }
  r.center_spread = dmax > 0 ? spread / dmax : 0.0;
  return r;
}

// Flat transform int rho_r(x) e^{i xi x} dx of rho_r = (chi_+^r)' on xi = j dk, j in [0, J].
struct CutoffTransform {
  ArrayXd re, im_over_xi;  // Re rho_r(j dk), Im rho_r(j dk) / (j dk) with the limit at j = 0
};
CutoffTransform cutoff_transform(int r, double dk, int J) {
  std::vector<double> gx, gw;
  gauss_legendre(64, gx, gw);
  const int pieces = 16;
  std::vector<double> xs, ws;
  for (int p = 0; p < pieces; ++p) {
    const double a = -1.0 + 2.0 * p / pieces, b = a + 2.0 / pieces;
    for (size_t q = 0; q < gx.size(); ++q) {
      const double x = 0.5 * (a + b) + 0.5 * (b - a) * gx[q];
      xs.push_back(x);
      ws.push_back(0.5 * (b - a) * gw[q] * r * std::pow(chi_plus(x), r - 1) * bump(x));
    }
  }
  CutoffTransform c;
  c.re.resize(J + 1);
  c.im_over_xi.resize(J + 1);
  for (int j = 0; j <= J; ++j) {
    const double xi = j * dk;
    double re = 0, im = 0, mom = 0;
    for (size_t q = 0; q < xs.size(); ++q) {
      re += ws[q] * std::cos(xi * xs[q]);
      im += ws[q] * std::sin(xi * xs[q]);
      mom += ws[q] * xs[q];
    }
    c.re(j) = re;
    c.im_over_xi(j) = j == 0 ? mom : im / xi;
  }
  return c;
}

double l2(const ArrayXcd& g, const ArrayXd& w) { return std::sqrt((g.abs2() * w).sum()); }

}  // namespace

std::vector<MuLTerm> mu_L_assemble(const BasisSplit& s, double drop_tol) {
  std::vector<MuLTerm> out;
  const ArrayXcd ones = ArrayXcd::Ones(s.kg.n);
  for (int side : {1, -1}) {
    const double h_limit = side > 0 ? s.T0 : s.T0 * s.T0;
    for (int code = 0; code < 625; ++code) {
      std::array<int, 4> ch;
      int c = code, n0 = 0, r = 0;
      bool ok = true;
      for (int a = 0; a < 4; ++a) {
        ch[a] = c % 5;
        c /= 5;
        const int piece = kChannels[ch[a]][0];
        if (piece == 0) ++n0;
        else if (piece == side) ++r;
        else ok = false;
      }
      if (!ok || r == 0) continue;
      MuLTerm t;
      t.side = side;
      t.r = r;
      t.weight = std::pow(h_limit, n0);
      bool zero = t.weight == 0.0;
      double vanish = 1e300;
      for (int a = 0; a < 4; ++a) {
        t.iota[a] = kChannels[ch[a]][0];
        t.sigma[a] = kChannels[ch[a]][1];
        const ArrayXcd& cf = channel_coef(s, ch[a], ones);
        if (t.iota[a] != 0) {
          t.coef[a] = &cf;
          if (cf.abs().maxCoeff() < drop_tol) zero = true;
          vanish = std::min(vanish, min_limit_at_zero(s.kg, cf));
        } else {
          t.coef[a] = nullptr;
        }
      }
      if (zero) continue;
      t.vanishing_at_zero = vanish;
      out.push_back(t);
    }
  }
  return out;
}

NsdCheckReport check_decomposition(const BasisSplit& s, const ArrayXcd& g1, const ArrayXcd& g2, const ArrayXcd& g3,
                                   double t, double gamma, double tol) {
  const KGrid& kg = s.kg;
  const XGrid& xg = s.xg;
  const int n = kg.n, nx = xg.n;
  if (g1.size() != n || g2.size() != n || g3.size() != n)
    throw std::invalid_argument("check_decomposition: fields must live on the k-grid");
  NsdCheckReport rep;
  SplitTransform tr(s);
  const ArrayXcd N = apply_nsd(tr, g1, g2, g3, t);
  rep.oracle_norm = l2(N, s.wk);
  if (rep.oracle_norm == 0) throw std::invalid_argument("check_decomposition: zero test profiles");

  ArrayXcd ph(n);
  for (int i = 0; i < n; ++i) ph(i) = std::polar(1.0, t * kg.k(i) * kg.k(i));
  const std::array<const ArrayXcd*, 3> g{&g1, &g2, &g3};

  // R1: every product with at least one K_R factor.
  ArrayXcd NR1;
  {
    std::array<ArrayXcd, 3> uf, us;
    for (int a = 0; a < 3; ++a) {
      const ArrayXcd ga = *g[a] * ph;
      us[a] = project(s, ga, Part::S);
      uf[a] = us[a] + project(s, ga, Part::R);
    }
    const ArrayXcd full = uf[0] * uf[1].conjugate() * uf[2];
    const ArrayXcd sonly = us[0] * us[1].conjugate() * us[2];
    NR1.resize(n);
    for (int i = 0; i < n; ++i) {
      cd acc = 0;
      for (int j = 0; j < nx; ++j)
        acc += std::conj(s.KR(j, i)) * full(j) + std::conj(s.ks(j, i)) * (full(j) - sonly(j));
      NR1(i) = acc * xg.dx / kSqrt2Pi * std::conj(ph(i));
    }
  }

  // Plane-wave channel sums P_{ch}(x) = sum_k w c_ch(k) e^{itk^2} g(k) e^{i sigma k x} for each input.
  const ArrayXcd ones = ArrayXcd::Ones(n);
  ArrayXXcd E(nx, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < nx; ++j) E(j, i) = std::polar(1.0, kg.k(i) * xg.x(j));
  std::array<std::array<ArrayXcd, 5>, 3> P;
  for (int a = 0; a < 3; ++a)
    for (int ch = 0; ch < 5; ++ch) {
      const ArrayXcd v = channel_coef(s, ch, ones) * *g[a] * ph * s.wk;
      P[a][ch] = kChannels[ch][1] > 0 ? ArrayXcd((E.matrix() * v.matrix()).array())
                                      : ArrayXcd((E.matrix().conjugate() * v.matrix()).array());
    }

  const double T0 = s.T0;
  const double c0 = std::pow(T0, 4);
  const double pref = 1.0 / (4.0 * kPi * kPi);
  std::array<ArrayXcd, 5> Y;
  for (auto& y : Y) y = ArrayXcd::Zero(nx);
  ArrayXcd N0 = ArrayXcd::Zero(n), NL = ArrayXcd::Zero(n), NR2 = ArrayXcd::Zero(n);

  const int J = 4 * n;
  std::array<CutoffTransform, 5> cut;
  for (int r = 1; r <= 4; ++r) cut[r] = cutoff_transform(r, kg.dk, J);
  double center_spread = 0;

  for (int code = 0; code < 625; ++code) {
    std::array<int, 4> ch;
    int c = code, n0 = 0, np = 0, nm = 0;
    for (int a = 0; a < 4; ++a) {
      ch[a] = c % 5;
      c /= 5;
      const int piece = kChannels[ch[a]][0];
      (piece == 0 ? n0 : piece > 0 ? np : nm) += 1;
    }
    ArrayXd w = ArrayXd::Ones(nx);
    for (int a = 0; a < 4; ++a) {
      const int piece = kChannels[ch[a]][0];
      w *= piece == 0 ? s.h0 : piece > 0 ? s.chip : s.chim;
    }
    int side = 0, r = 0;
    double weight = 0;
    if (np == 0 && nm == 0) {
      weight = c0;
      w -= c0;
    } else if (np == 0 || nm == 0) {
      side = np > 0 ? 1 : -1;
      r = side > 0 ? np : nm;
      weight = std::pow(side > 0 ? T0 : T0 * T0, n0);
      const ArrayXd& chi = side > 0 ? s.chip : s.chim;
      w -= weight * chi.pow(r);
    }
    // Regular weight in physical space.
    Y[ch[0]] += w * P[0][ch[1]] * P[1][ch[2]].conjugate() * P[2][ch[3]];
    for (int j = 0; j < nx; ++j) {
      const double wd = std::abs(w(j)) + (j > 1 && j < nx - 2 ? std::abs(w(j + 1) - w(j - 1)) / (2 * xg.dx) : 0.0);
      rep.r2_decay = std::max(rep.r2_decay, std::pow(1.0 + xg.x(j) * xg.x(j), 0.5 * (gamma - 1.0)) * wd);
    }
    if (weight == 0.0) continue;

    // Singular weight in frequency space.
    const std::array<int, 4> eps{-kChannels[ch[0]][1], kChannels[ch[1]][1], -kChannels[ch[2]][1], kChannels[ch[3]][1]};
    bool zero = false;
    for (int a = 0; a < 4; ++a)
      if (channel_coef(s, ch[a], ones).abs().maxCoeff() < 1e-12) zero = true;
    if (zero) continue;
    const ArrayXcd H = density(kg, t, eps, channel_coef(s, ch[1], ones) * g1, channel_coef(s, ch[2], ones) * g2,
                               channel_coef(s, ch[3], ones) * g3);
    const ArrayXcd outc = channel_coef(s, ch[0], ones).conjugate() * ph.conjugate() * pref;
    if (side == 0) {
      N0 += outc * (2.0 * kPi * weight) * contract_delta(kg, H, eps[0]);
      continue;
    }
    ++rep.l_terms;
    const CutoffTransform& ct = cut[r];
    PvResult pv = contract_pv(kg, H, eps[0], cd(0, side * weight), ct.re);
    center_spread = std::max(center_spread, pv.center_spread);
    rep.pv_center = std::max(rep.pv_center, pv.center_norm * pref);
    NL += outc * (kPi * weight * contract_delta(kg, H, eps[0]) + pv.S);
    ArrayXcd bj(2 * J + 1);
    for (int j = -J; j <= J; ++j) bj(j + J) = -weight * ct.im_over_xi(std::abs(j));
    NR2 += outc * contract_regular(kg, H, eps[0], bj, J);
  }
  if (center_spread > 0.1) {
    std::ostringstream os;
    os << "check_decomposition: p.v. central cell unresolved (derivative spread " << center_spread
       << "); refine the k-grid";
    throw std::domain_error(os.str());
  }
  for (int ch = 0; ch < 5; ++ch) {
    const ArrayXcd& cf = channel_coef(s, ch, ones);
    if (cf.abs().maxCoeff() < 1e-12) continue;
    const ArrayXcd v = Y[ch] * xg.dx;
    // sum_x e^{-i sigma k x} Y(x)
    const ArrayXcd tk = kChannels[ch][1] > 0 ? ArrayXcd((E.matrix().adjoint() * v.matrix()).array())
                                             : ArrayXcd((E.matrix().transpose() * v.matrix()).array());
    NR2 += cf.conjugate() * ph.conjugate() * pref * tk;
  }
  rep.delta = l2(N0, s.wk) / rep.oracle_norm;
  rep.L = l2(NL, s.wk) / rep.oracle_norm;
  rep.R1 = l2(NR1, s.wk) / rep.oracle_norm;
  rep.R2 = l2(NR2, s.wk) / rep.oracle_norm;
  rep.pv_center /= rep.oracle_norm;
  rep.residual = l2(N - (N0 + NL + NR1 + NR2), s.wk) / rep.oracle_norm;
  rep.pass = rep.residual < tol;
  return rep;
}

// ---------------------------------------------------------------------------------------------------------
// Trilinear forms

const char* to_string(TrilinearSpec::Dist d) {
  switch (d) {
    case TrilinearSpec::Dist::Delta: return "delta";
    case TrilinearSpec::Dist::PV: return "pv";
    default: return "regular";
  }
}

cd TrilinearSpec::b_at(double y) const {
  const double g = std::exp(-0.5 * width * width * y * y);
  switch (b) {
    case Dist::Delta: return 0.0;
    case Dist::PV: return times_y ? cd(0, -g) : (y == 0 ? cd(0.0) : g / cd(0, y));
    default: return times_y ? y * g : g;
  }
}

cd TrilinearSpec::inverse_b(double x) const {
  const double s = width;
  switch (b) {
    case Dist::Delta: return times_y ? 0.0 : 1.0 / kSqrt2Pi;
    case Dist::PV:
      if (times_y) return cd(0, -1) * std::exp(-0.5 * x * x / (s * s)) / s;
      return 0.5 * kSqrt2Pi * std::erf(x / (std::sqrt(2.0) * s));
    default: {
      const double B = std::exp(-0.5 * x * x / (s * s)) / s;
      return times_y ? cd(0, 1) * (x / (s * s)) * B : cd(B);
    }
  }
}

double TrilinearSpec::pv_limit() const { return b == Dist::PV && !times_y ? 1.0 : 0.0; }

ArrayXcd trilinear(const TrilinearSpec& spec, const KGrid& kg, const ArrayXcd& f1, const ArrayXcd& f2,
                   const ArrayXcd& f3) {
  if (f1.size() != kg.n || f2.size() != kg.n || f3.size() != kg.n)
    throw std::invalid_argument("trilinear: fields must live on the k-grid");
  for (int e : spec.eps)
    if (e != 1 && e != -1) throw std::invalid_argument("trilinear: signs must be +1 or -1");
  const ArrayXcd H = density(kg, spec.t, spec.eps, f1, f2, f3);
  const int e1 = spec.eps[0];
  ArrayXcd S;
  if (spec.b == TrilinearSpec::Dist::Delta) {
    S = spec.times_y ? ArrayXcd(ArrayXcd::Zero(kg.n)) : contract_delta(kg, H, e1);
  } else if (spec.singular()) {
    const int J = 4 * kg.n;
    ArrayXd zj(J + 1);
    for (int j = 0; j <= J; ++j) zj(j) = std::exp(-0.5 * spec.width * spec.width * j * j * kg.dk * kg.dk);
    S = contract_pv(kg, H, e1, cd(0, -1), zj).S;
  } else {
    const int J = 4 * kg.n;
    ArrayXcd bj(2 * J + 1);
    for (int j = -J; j <= J; ++j) bj(j + J) = spec.b_at(j * kg.dk);
    S = contract_regular(kg, H, e1, bj, J);
  }
  for (int i = 0; i < kg.n; ++i) S(i) *= std::polar(1.0, -spec.t * kg.k(i) * kg.k(i));
  return S;
}

double check_inverse_fd(const TrilinearSpec& spec, const KGrid& kg, const ArrayXcd& f1, const ArrayXcd& f2,
                        const ArrayXcd& f3, const ArrayXd& x) {
  if (x.size() < 2) throw std::invalid_argument("check_inverse_fd: need an x-grid");
  const double dx = x(1) - x(0);
  const ArrayXcd T = trilinear(spec, kg, f1, f2, f3);
  const ArrayXd wk = k_weights(kg);
  auto u = [&](const ArrayXcd& f, double y) {
    cd acc = 0;
    for (int i = 0; i < kg.n; ++i) acc += wk(i) * f(i) * std::polar(1.0, kg.k(i) * y + spec.t * kg.k(i) * kg.k(i));
    return acc / kSqrt2Pi;
  };
  const int e1 = spec.eps[0], e2 = spec.eps[1], e3 = spec.eps[2], e4 = spec.eps[3];
  ArrayXcd G(x.size());
  for (int j = 0; j < x.size(); ++j) {
    const double y = x(j);
    G(j) = std::pow(2.0 * kPi, 1.5) * spec.inverse_b(e1 * y) * u(f1, -e1 * e2 * y) * std::conj(u(f2, e1 * e3 * y)) *
           u(f3, -e1 * e4 * y);
  }
  double num = 0, den = 0;
  for (int i = 0; i < kg.n; ++i) {
    cd acc = 0;
    for (int j = 0; j < x.size(); ++j) acc += G(j) * std::polar(1.0, -kg.k(i) * x(j));
    const cd rhs = acc * dx / kSqrt2Pi;
    const cd lhs = T(i) * std::polar(1.0, spec.t * kg.k(i) * kg.k(i));
    num = std::max(num, std::abs(lhs - rhs));
    den = std::max(den, std::abs(rhs));
  }
  return den > 0 ? num / den : num;
}

double check_commutation(const TrilinearSpec& spec, const KGrid& kg, const ArrayXcd& f1, const ArrayXcd& f2,
                         const ArrayXcd& f3) {
  const ArrayXcd T = trilinear(spec, kg, f1, f2, f3);
  const ArrayXcd d1 = kderiv(f1, kg.dk), d2 = kderiv(f2, kg.dk), d3 = kderiv(f3, kg.dk);
  const int e1 = spec.eps[0], e2 = spec.eps[1], e3 = spec.eps[2], e4 = spec.eps[3];
  TrilinearSpec ys = spec;
  ys.times_y = true;
  const ArrayXcd rhs = -static_cast<double>(e2) * trilinear(spec, kg, d1, f2, f3) +
                       static_cast<double>(e3) * trilinear(spec, kg, f1, d2, f3) -
                       static_cast<double>(e4) * trilinear(spec, kg, f1, f2, d3) -
                       cd(0, 2.0 * spec.t) * trilinear(ys, kg, f1, f2, f3);
  double num = 0, den = 0;
  for (int i = 2; i < kg.n - 2; ++i) {
    const cd lhs = static_cast<double>(e1) * (T(i + 1) - T(i - 1)) / (2.0 * kg.dk);
    num += std::norm(lhs - rhs(i));
    den += std::norm(rhs(i));
  }
  if (den == 0) return std::sqrt(num);
  return std::sqrt(num / den);
}

}  // namespace resnls
