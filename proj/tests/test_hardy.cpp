#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "dhl/hardy.hpp"
#include "dhl/operators.hpp"
#include "support.hpp"

using namespace dhl;
using testing_support::random_seq;
using testing_support::rel_dev;

namespace {

// Composite Simpson rule for int_0^1 r^{n-1} psi(r) dr.
double radial_integral_simpson(int n) {
  const int N = 200000;
  const double h = 1.0 / N;
  auto f = [n](double r) {
    const double s = 1.0 - r * r;
    return s > 0.0 ? std::pow(r, n - 1) * std::exp(-1.0 / s) : 0.0;
  };
  double acc = f(0.0) + f(1.0);
  for (int k = 1; k < N; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(k * h);
  return acc * h / 3.0;
}

double normalization_oracle(int n) {
  const double sphere = n == 1 ? 2.0 : n == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
  return std::pow(4.0, n) / (sphere * radial_integral_simpson(n));
}

// t^-n Phi(j / t) written out from the definition.
double phi_td(double c, int n, double t, double r2) {
  if (r2 == 0.0) return 0.0;
  const double r = 4.0 * std::sqrt(r2) / t;
  if (r >= 1.0) return 0.0;
  return std::pow(t, -n) * c * std::exp(-1.0 / (1.0 - r * r));
}

std::vector<double> grid_points(double g, double cap) {
  std::vector<double> ts;
  for (int k = 1;; ++k) {
    const double t = 4.0 * std::pow(g, k);
    if (t > cap) break;
    ts.push_back(t);
  }
  return ts;
}

// max over grid t of |(Phi_t^d * b)(j)| by explicit convolution per t.
LatticeSeq grand_maximal_oracle(const LatticeSeq& b, const BumpProfile& prof, const Box& out, double g, double cap) {
  std::vector<double> best(out.volume(), 0.0);
  for (double t : grid_points(g, cap)) {
    const auto conv = convolve(b, bump_discretize(prof, t));
    for (std::size_t k = 0; k < out.volume(); ++k) best[k] = std::max(best[k], std::fabs(conv.at(out.point_at(k))));
  }
  return LatticeSeq(out, std::move(best));
}

}  // namespace

TEST_CASE("profile normalization against an independent quadrature") {
  for (int n = 1; n <= 3; ++n) {
    const BumpProfile prof(n);
    CHECK(prof.normalization() == doctest::Approx(normalization_oracle(n)).epsilon(1e-10));
    CHECK(prof.sup_norm() == doctest::Approx(prof.normalization() / std::numbers::e).epsilon(1e-15));
  }
}

TEST_CASE("lattice Riemann sums of Phi integrate to one") {
  for (int n = 1; n <= 2; ++n) {
    const BumpProfile prof(n);
    const double t = n == 1 ? 2000.0 : 300.0;
    const auto d = bump_discretize(prof, t);
    double sum = std::pow(t, -n) * prof.normalization() * std::exp(-1.0);
    for (double v : d.values()) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("profile shape") {
  const BumpProfile prof(2);
  double prev = kInfinity;
  for (int k = 0; k <= 300; ++k) {
    const double r = 0.3 * k / 300.0;
    const double v = prof.value_sq(r * r);
    CHECK(v >= 0.0);
    CHECK(v <= prev);
    prev = v;
    if (r >= 0.25) CHECK(v == 0.0);
  }
  const std::vector<double> x{0.1, -0.05};
  CHECK(prof(x) == prof.value_sq(0.0125));
}

TEST_CASE("bump discretization") {
  const BumpProfile p1(1);
  CHECK(bump_discretize(p1, 3.0).is_zero());
  CHECK(bump_discretize(BumpProfile(2), 4.0).is_zero());
  const auto d8 = bump_discretize(p1, 8.0);
  CHECK(d8.box() == Box({-1}, {3}));
  const double expect = normalization_oracle(1) * std::exp(-4.0 / 3.0) / 8.0;
  CHECK(d8.at(Point{1}) == doctest::Approx(expect).epsilon(1e-10));
  CHECK(d8.at(Point{-1}) == d8.at(Point{1}));
  CHECK(d8.at(Point{0}) == 0.0);
  for (int k = 0; k <= 70; ++k) {
    const double t = 0.1 * std::pow(10.0, k / 10.0);
    if (t > 1e4) break;
    CHECK(bump_discretize(p1, t).at(Point{0}) == 0.0);
  }
  const BumpProfile p2(2);
  const auto d = bump_discretize(p2, 23.0);
  for (std::size_t k = 0; k < d.size(); ++k) {
    const Point j = d.box().point_at(k);
    const double r = std::sqrt(static_cast<double>(squared_norm(j)));
    if (d[k] != 0.0) CHECK((r > 0.0 && r < 23.0 / 4.0));
    CHECK(d[k] == doctest::Approx(phi_td(normalization_oracle(2), 2, 23.0, r * r)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(bump_discretize(p1, 0.0), DomainError);
  CHECK_THROWS_AS(bump_discretize(p1, -2.0), DomainError);
}

TEST_CASE("grand maximal of a delta") {
  const BumpProfile prof(2);
  TGrid grid;
  grid.t_cap = 200.0;
  const Box out({-8, -8}, {17, 17});
  const auto gm = grand_maximal(LatticeSeq::delta({0, 0}), prof, out, grid);
  CHECK(gm.at(Point{0, 0}) == 0.0);
  const double c = normalization_oracle(2);
  for (std::size_t k = 0; k < out.volume(); ++k) {
    const Point j = out.point_at(k);
    if (j == Point{0, 0}) continue;
    const double r2 = static_cast<double>(squared_norm(j));
    double on_grid = 0.0;
    for (double t : grid_points(1.01, 200.0)) on_grid = std::max(on_grid, phi_td(c, 2, t, r2));
    // Dense scan over the continuum of t > 4|j|.
    double dense = 0.0;
    const double t0 = 4.0 * std::sqrt(r2);
    for (int s = 1; s <= 20000; ++s) dense = std::max(dense, phi_td(c, 2, t0 * std::pow(50.0, s / 20000.0), r2));
    CHECK(gm[k] == doctest::Approx(on_grid).epsilon(1e-10));
    CHECK(gm[k] <= dense * (1.0 + 1e-10));
    CHECK(gm[k] >= 0.99 * dense);
  }
}

TEST_CASE("grand maximal matches explicit per-t convolutions") {
  for (int n = 1; n <= 2; ++n) {
    const BumpProfile prof(n);
    const Box in(Point(static_cast<std::size_t>(n), -2), Point(static_cast<std::size_t>(n), n == 1 ? 9 : 6));
    const auto b = random_seq(in, 31 + static_cast<std::uint64_t>(n));
    const Box out(Point(static_cast<std::size_t>(n), -25), Point(static_cast<std::size_t>(n), n == 1 ? 61 : 43));
    for (double cap : {60.0, 300.0}) {
      TGrid grid;
      grid.t_cap = cap;
      grid.envelope_stop = false;
      const auto gm = grand_maximal(b, prof, out, grid);
      CHECK(rel_dev(gm, grand_maximal_oracle(b, prof, out, 1.01, cap)) <= 1e-12);
    }
  }
}

TEST_CASE("envelope stop does not change values") {
  const BumpProfile prof(2);
  const auto b = random_seq(Box({0, 0}, {7, 7}), 2, 0.0, 1.0);
  const Box out({-10, -10}, {27, 27});
  TGrid with, without;
  without.envelope_stop = false;
  GrandMaximalStats s1, s2;
  const auto a = grand_maximal(b, prof, out, with, &s1);
  const auto c = grand_maximal(b, prof, out, without, &s2);
  CHECK(a == c);
  CHECK(s1.stopped_by_envelope);
  CHECK(s1.steps < s2.steps);
  CHECK(s2.t_cap == 64.0 * 7.0);
  CHECK_FALSE(s2.stopped_by_envelope);
}

TEST_CASE("batch equals single calls bit for bit") {
  const BumpProfile prof(2);
  std::vector<LatticeSeq> inputs;
  std::vector<Box> outs;
  for (std::uint64_t s = 0; s < 4; ++s) {
    const Point o{static_cast<std::int64_t>(s) * 3, -static_cast<std::int64_t>(s)};
    inputs.push_back(random_seq(Box(o, {20, 20}), 40 + s));
    outs.push_back(Box({o[0] - 30, o[1] - 30}, {80, 80}));
  }
  TGrid grid;
  grid.growth = 1.05;
  const auto batch = grand_maximal_batch(inputs, prof, outs, grid);
  for (std::size_t k = 0; k < inputs.size(); ++k) CHECK(batch[k] == grand_maximal(inputs[k], prof, outs[k], grid));
  std::vector<Box> bad = outs;
  bad[1].origin[0] += 1;
  CHECK_THROWS_AS(grand_maximal_batch(inputs, prof, bad, grid), DomainError);
}

TEST_CASE("grid validation and trivial caps") {
  const BumpProfile prof(1);
  const auto b = LatticeSeq::delta({0});
  const Box out({-5}, {11});
  TGrid g;
  g.growth = 1.0;
  CHECK_THROWS_AS(grand_maximal(b, prof, out, g), DomainError);
  g.growth = 1.01;
  g.t_cap = 3.0;
  GrandMaximalStats st;
  const auto z = grand_maximal(translate(b, Point{2}), prof, out, g, &st);
  CHECK(z.is_zero());
  CHECK(st.trivial);
  g.t_cap = 4.02;
  CHECK_THROWS_AS(grand_maximal(b, prof, out, g), DomainError);
  CHECK_THROWS_AS(grand_maximal(b, BumpProfile(2), out, TGrid{}), DomainError);
}

TEST_CASE("small t contributes nothing") {
  // t <= 4 leaves only the origin in the support, where Phi_t^d vanishes.
  const BumpProfile prof(2);
  const auto b = random_seq(Box({0, 0}, {5, 5}), 77);
  for (double t : {0.5, 1.0, 2.5, 4.0}) CHECK(convolve(b, bump_discretize(prof, t)).is_zero());
}

TEST_CASE("grand maximal homogeneity and translation") {
  const BumpProfile prof(2);
  const auto b = random_seq(Box({1, -3}, {16, 12}), 5);
  const Box out({-20, -25}, {56, 52});
  const TGrid grid;
  const auto base = grand_maximal(b, prof, out, grid);
  for (double a : {-2.0, 0.5, 16.0}) CHECK(grand_maximal(scale(a, b), prof, out, grid) == scale(std::fabs(a), base));
  for (double a : {-3.3, 0.7}) {
    CHECK(rel_dev(grand_maximal(scale(a, b), prof, out, grid), scale(std::fabs(a), base)) <= 1e-13);
  }
  const Point v{-7, 40};
  const Box moved({-27, 15}, {56, 52});
  CHECK(grand_maximal(translate(b, v), prof, moved, grid) == translate(base, v));
}

TEST_CASE("pointwise majorization by the maximal function") {
  for (int n = 1; n <= 2; ++n) {
    const BumpProfile prof(n);
    const double cap = std::pow(1.5, n) * prof.sup_norm();
    for (std::uint64_t s = 0; s < 6; ++s) {
      const Box in(Point(static_cast<std::size_t>(n), 0), Point(static_cast<std::size_t>(n), 5 + 3 * static_cast<std::int64_t>(s)));
      const auto b = random_seq(in, 60 + s, s % 2 ? 0.0 : -1.0, 1.0);
      const Box out = dilate_box(in, 4.0);
      const auto gm = grand_maximal(b, prof, out, TGrid{});
      const auto m = hl_maximal(b, out);
      for (std::size_t k = 0; k < out.volume(); ++k) CHECK(gm[k] <= cap * m[k]);
    }
  }
}

TEST_CASE("grid refinement stability") {
  for (int n = 1; n <= 2; ++n) {
    const BumpProfile prof(n);
    const auto b = random_seq(Box(Point(static_cast<std::size_t>(n), 0), Point(static_cast<std::size_t>(n), 8)), 9);
    const Box out = dilate_box(b.box(), 8.0);
    const TGrid g;
    const auto coarse = grand_maximal(b, prof, out, g);
    const auto fine = grand_maximal(b, prof, out, g.refined());
    for (std::size_t k = 0; k < out.volume(); ++k) {
      if (fine[k] == 0.0) continue;
      CHECK(std::fabs(coarse[k] - fine[k]) <= 0.01 * fine[k]);
    }
  }
}

TEST_CASE("hardy norm basics") {
  const BumpProfile prof(1);
  const auto zero = LatticeSeq::zeros(Box({0}, {5}));
  const auto z = hardy_norm(zero, 1.0, prof);
  CHECK(z.value == 0.0);
  CHECK_THROWS_AS(hardy_norm(zero, 0.0, prof), DomainError);
  HardyConfig bad;
  bad.dilation = 0.5;
  CHECK_THROWS_AS(hardy_norm(LatticeSeq::delta({0}), 1.0, prof, bad), DomainError);

  // Delta: 1 + sum over the box of the per-point grid maximum of Phi_t^d(j).
  HardyConfig cfg;
  cfg.compute_tail = false;
  const auto e = hardy_norm(LatticeSeq::delta({0}), 1.0, prof, cfg);
  const double c = normalization_oracle(1);
  double expect = 1.0;
  for (std::size_t k = 0; k < e.box.volume(); ++k) {
    const double j = static_cast<double>(e.box.point_at(k)[0]);
    double best = 0.0;
    for (double t : grid_points(1.01, 64.0)) best = std::max(best, phi_td(c, 1, t, j * j));
    expect += best;
  }
  CHECK(e.value == doctest::Approx(expect).epsilon(1e-10));
  CHECK(std::isnan(e.tail_diagnostic));
}

TEST_CASE("hardy norm quasi-norm properties") {
  const BumpProfile prof(2);
  const auto b = random_seq(Box({2, 2}, {6, 5}), 17);
  for (double p : {0.5, 2.0 / 3.0, 1.0, 2.0}) {
    const auto e = hardy_norm(b, p, prof);
    CHECK(e.value >= lp_norm(b, p));
    CHECK(e.value > 0.0);
    CHECK(e.tail_diagnostic >= 0.0);
    const auto s = hardy_norm(scale(-4.0, b), p, prof);
    CHECK(s.value == doctest::Approx(4.0 * e.value).epsilon(1e-14));
    const auto t = hardy_norm(translate(b, Point{-31, 12}), p, prof);
    CHECK(t.value == e.value);
  }
  // Zero padding around b does not change the estimate.
  const auto padded = restrict_to(b, Box({-3, -1}, {15, 12}));
  CHECK(hardy_norm(padded, 1.0, prof).value == hardy_norm(b, 1.0, prof).value);
}

TEST_CASE("potential quasi-norm matches the composed operators") {
  const BumpProfile prof(1);
  const auto a = random_seq(Box({-3}, {7}), 3);
  HardyConfig cfg;
  cfg.compute_tail = false;
  const auto e = potential_hardy_norm(a, 0.5, 2.0, prof, cfg);
  const Box box = dilate_box(a.box(), 8.0);
  const auto f = riesz_apply(a, 0.5, box);
  TGrid g;
  g.t_cap = 64.0 * 7.0;
  const auto gm = grand_maximal(f, prof, box, g);
  CHECK(e.box == box);
  CHECK(e.lp_term == lp_norm(f, 2.0));
  CHECK(e.maximal_term == lp_norm(gm, 2.0));
  const auto with_tail = potential_hardy_norm(a, 0.5, 2.0, prof);
  CHECK(with_tail.value == e.value);
  CHECK(with_tail.tail_diagnostic >= 0.0);
}

TEST_CASE("estimate serialization") {
  HardyEstimate e;
  e.value = 1.5;
  e.box = Box({0}, {3});
  e.tail_diagnostic = std::nan("");
  const auto j = to_json(e);
  CHECK(j["value"] == 1.5);
  CHECK(j["D"] == 8.0);
  CHECK(j["tail_diagnostic"].is_null());
  CHECK(j["box"]["shape"][0] == 3);
}

TEST_CASE("batch estimators equal single calls") {
  const BumpProfile prof(2);
  std::vector<LatticeSeq> inputs;
  for (std::uint64_t s = 0; s < 3; ++s) inputs.push_back(random_seq(Box({static_cast<std::int64_t>(s), 0}, {4, 3}), s));
  inputs.push_back(random_seq(Box({0, 0}, {2, 5}), 9));
  inputs.push_back(LatticeSeq::zeros(Box({0, 0}, {2, 2})));
  HardyConfig cfg;
  cfg.grid.growth = 1.05;
  const auto h = hardy_norm_batch(inputs, 0.5, prof, cfg);
  const auto ph = potential_hardy_norm_batch(inputs, 0.5, 1.0, prof, cfg);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const auto single = hardy_norm(inputs[k], 0.5, prof, cfg);
    CHECK(h[k].value == single.value);
    CHECK(h[k].tail_diagnostic == single.tail_diagnostic);
    CHECK(ph[k].value == potential_hardy_norm(inputs[k], 0.5, 1.0, prof, cfg).value);
  }
  CHECK(h.back().value == 0.0);
}

TEST_CASE("stored box measurement") {
  const BumpProfile prof(1);
  const auto b = random_seq(Box({0}, {4}), 21);
  const auto padded = restrict_to(b, Box({-2}, {8}));
  HardyConfig cfg;
  cfg.compute_tail = false;
  cfg.use_stored_box = true;
  const auto e = hardy_norm(padded, 1.0, prof, cfg);
  CHECK(e.box == dilate_box(padded.box(), 8.0));
  TGrid g;
  g.t_cap = 64.0 * 8.0;
  CHECK(e.maximal_term == lp_norm(grand_maximal(padded, prof, e.box, cfg.grid), 1.0));
  const auto fields = potential_fields_batch(std::span<const LatticeSeq>(&padded, 1), 0.5, prof, 8.0, TGrid{});
  CHECK(fields.front().potential == riesz_apply(padded, 0.5, e.box));
  CHECK(fields.front().maximal == grand_maximal(fields.front().potential, prof, e.box, g));
}
