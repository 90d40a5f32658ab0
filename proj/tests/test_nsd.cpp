#include <catch_amalgamated.hpp>

#include "resnls/nsd.hpp"
#include "resnls/numerics.hpp"

#include <cmath>

using namespace resnls;

namespace {

BasisSplit make_split(const Potential& V, const KGrid& kg) {
  const JostField f = solve_jost(V, kg);
  const ScatteringData sd = coefficients(f, V);
  return split(build_basis(f, sd), f, sd, 3.0, 1e9);
}

void gaussians(const KGrid& kg, ArrayXcd& g1, ArrayXcd& g2, ArrayXcd& g3) {
  g1.resize(kg.n);
  g2.resize(kg.n);
  g3.resize(kg.n);
  for (int i = 0; i < kg.n; ++i) {
    const double k = kg.k(i);
    g1(i) = std::exp(-k * k);
    g2(i) = cd(1, 0.5) * std::exp(-(k - 0.5) * (k - 0.5));
    g3(i) = std::exp(-0.8 * (k + 0.3) * (k + 0.3));
  }
}

int node(const KGrid& kg, double k) { return static_cast<int>(std::lround(k / kg.dk + kg.n / 2 - 0.5)); }

}  // namespace

TEST_CASE("free cubic nonlinearity of Gaussians in closed form") {
  const XGrid xg = XGrid::box(40, 512);
  const auto ft = build_fast_transform(free_potential(xg), xg);
  const ArrayXd k = ft->kgrid().points();
  const ArrayXcd g = (-0.5 * k * k).exp().cast<cd>();
  const ArrayXcd out = apply_nsd(*ft, g, g, g, 0.0);
  const ArrayXcd exact = ((-k * k / 6.0).exp() / std::sqrt(3.0)).cast<cd>();
  CHECK((out - exact).abs().maxCoeff() < 1e-12);
}

TEST_CASE("decomposition is delta-only for V = 0") {
  const XGrid xg = XGrid::box(32, 256);
  const BasisSplit s = make_split(free_potential(xg), fft_kgrid(xg));
  ArrayXcd g1, g2, g3;
  gaussians(s.kg, g1, g2, g3);
  const NsdCheckReport r = check_decomposition(s, g1, g2, g3, 0.0);
  CHECK(r.residual < 1e-8);
  CHECK(r.l_terms == 0);
  CHECK(r.R1 < 1e-12);
  CHECK(mu_L_assemble(s).empty());
}

TEST_CASE("decomposition on the Poschl-Teller well") {
  const XGrid xg = XGrid::box(16, 256);
  const BasisSplit s = make_split(poschl_teller(1, xg), fft_kgrid(xg));
  ArrayXcd g1, g2, g3;
  gaussians(s.kg, g1, g2, g3);
  const NsdCheckReport r = check_decomposition(s, g1, g2, g3, 0.0);
  CHECK(r.residual < 1e-3);
  CHECK(r.l_terms > 0);
  for (const MuLTerm& t : mu_L_assemble(s)) CHECK(t.vanishing_at_zero < 1e-4);
}

TEST_CASE("regular spectral distribution against a brute-force sum over patterns") {
  const XGrid xg = XGrid::box(16, 512);
  const KGrid kg{0.04, 200};
  const BasisSplit s = make_split(poschl_teller(1, xg), kg);
  const std::array<double, 4> q{0.5, -0.3, 0.1, 1.02};
  std::array<SplitColumn, 4> col;
  for (int a = 0; a < 4; ++a) {
    col[a] = split_column(s, q[a]);
    const int i = node(kg, q[a]);
    REQUIRE(std::abs(kg.k(i) - q[a]) < 1e-12);
    for (int j = 0; j < xg.n; j += 29) {
      CHECK(std::abs(col[a].ks(j) - s.ks(j, i)) < 1e-13);
      CHECK(std::abs(col[a].kr(j) - s.KR(j, i)) < 1e-13);
    }
  }
  cd oracle = 0;
  for (int mask = 1; mask < 16; ++mask)
    for (int j = 0; j < xg.n; ++j) {
      cd p = 1;
      for (int a = 0; a < 4; ++a) {
        cd v = (mask >> a) & 1 ? col[a].kr(j) : col[a].ks(j);
        p *= a % 2 == 0 ? std::conj(v) : v;
      }
      oracle += p * xg.dx;
    }
  const cd got = mu_regular_R1(s, q);
  CHECK(std::abs(got - oracle) < 1e-10 * std::max(1.0, std::abs(oracle)));
  CHECK_THROWS_AS(split_column(s, 0.123), std::invalid_argument);
}

TEST_CASE("trilinear inverse-Fourier identity and commutation order") {
  using Dist = TrilinearSpec::Dist;
  const ArrayXd xs = ArrayXd::LinSpaced(601, -30, 30);
  const auto profiles = [](const KGrid& kg, ArrayXcd& f1, ArrayXcd& f2, ArrayXcd& f3) {
    gaussians(kg, f1, f2, f3);
    for (int i = 0; i < kg.n; ++i) f3(i) *= std::polar(1.0, 0.3 * kg.k(i));
  };
  for (Dist d : {Dist::Delta, Dist::PV, Dist::Regular}) {
    TrilinearSpec spec;
    spec.b = d;
    spec.t = 1.0;
    const KGrid kg = KGrid::symmetric(8.0, 512);
    ArrayXcd f1, f2, f3;
    profiles(kg, f1, f2, f3);
    CHECK(check_inverse_fd(spec, kg, f1, f2, f3, xs) < 1e-6);
  }
  TrilinearSpec spec;
  spec.b = Dist::Delta;
  std::vector<double> res;
  for (int n : {256, 512}) {
    const KGrid kg = KGrid::symmetric(8.0, n);
    ArrayXcd f1, f2, f3;
    profiles(kg, f1, f2, f3);
    res.push_back(check_commutation(spec, kg, f1, f2, f3));
  }
  CHECK(std::log2(res[0] / res[1]) > 1.8);
}
