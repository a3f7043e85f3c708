#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "dhl/atoms.hpp"
#include "dhl/io.hpp"
#include "dhl/operators.hpp"
#include "dhl/probes.hpp"

using namespace dhl;

namespace {

// sum_{1 <= i <= m} 2 i^(alpha - 1): the n = 1 kernel sum at the cube center.
double centered_kernel_oracle(std::int64_t m, double alpha) {
  long double s = 0.0L;
  for (std::int64_t i = m; i >= 1; --i) s += 2.0L * std::pow(static_cast<long double>(i), alpha - 1.0);
  return static_cast<double>(s);
}

ProbeConfig small(ProbeKind kind, std::vector<ProbeCase> cases, std::vector<std::int64_t> scales, int trials) {
  auto c = ProbeConfig::defaults(kind);
  c.cases = std::move(cases);
  c.scales = std::move(scales);
  c.trials = trials;
  c.seed = 77;
  return c;
}

}  // namespace

TEST_CASE("log-log slope fit") {
  const std::vector<double> x{1, 2, 4, 8};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 0.7));
  CHECK(*fit_loglog_slope(x, y) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(*fit_loglog_slope(x, {5, 5, 5, 5}) == doctest::Approx(0.0).scale(1.0));
  CHECK_FALSE(fit_loglog_slope({1, 2}, {1, 2}).has_value());
  // Zero entries cannot be logged and do not count.
  CHECK_FALSE(fit_loglog_slope({0, 1, 2}, {0, 1, 2}).has_value());
  CHECK_FALSE(fit_loglog_slope({1, 2, 4}, {0, 1, 2}).has_value());
}

TEST_CASE("probe names") {
  for (auto k : all_probe_kinds()) CHECK(parse_probe_kind(probe_name(k)) == k);
  CHECK_FALSE(parse_probe_kind("nope").has_value());
  CHECK(probe_name(ProbeKind::main_theorem) == "main");
}

TEST_CASE("config validation") {
  auto c = small(ProbeKind::kernel, {{1, 0.5, 1.0, {}}}, {1, 2, 4}, 2);
  CHECK_NOTHROW(c.validate(ProbeKind::kernel));
  auto bad = c;
  bad.scales = {1, 4, 4};
  CHECK_THROWS_AS(bad.validate(ProbeKind::kernel), DomainError);
  bad = c;
  bad.trials = 0;
  CHECK_THROWS_AS(bad.validate(ProbeKind::kernel), DomainError);
  bad = c;
  bad.cases = {{1, 1.0, 1.0, {}}};
  CHECK_THROWS_AS(bad.validate(ProbeKind::kernel), DomainError);
  bad = c;
  bad.cases = {{1, 0.5, 2.0, {}}};
  CHECK_THROWS_AS(bad.validate(ProbeKind::lp_lq), DomainError);
  CHECK_THROWS_AS(bad.validate(ProbeKind::atom_uniform), DomainError);
  bad = c;
  bad.scales = {0, 1, 2};
  CHECK_NOTHROW(bad.validate(ProbeKind::kernel));
  CHECK_THROWS_AS(bad.validate(ProbeKind::atom_pointwise), DomainError);
  for (auto k : all_probe_kinds()) CHECK_NOTHROW(ProbeConfig::defaults(k).validate(k));
}

TEST_CASE("config json") {
  ProbeConfig c = ProbeConfig::defaults(ProbeKind::kernel);
  c.merge_json(nlohmann::json::parse(
      R"({"cases":[{"n":2,"alpha":1.0}],"scales":[1,3,9],"trials":4,"seed":5,"growth":1.02,"t_cap":null,
          "csv":"k.csv","kernel":{"trials":2}})"));
  CHECK(c.cases.size() == 1);
  CHECK(c.cases[0].n == 2);
  CHECK(c.scales == std::vector<std::int64_t>{1, 3, 9});
  CHECK(c.trials == 4);
  CHECK(c.seed == 5);
  CHECK(c.grid.growth == 1.02);
  CHECK(c.csv_path == "k.csv");
  CHECK_THROWS_AS(c.merge_json(nlohmann::json::parse(R"({"trails":3})")), FormatError);
  CHECK_THROWS_AS(c.merge_json(nlohmann::json::parse(R"({"trials":"3"})")), FormatError);
  CHECK_THROWS_AS(c.merge_json(nlohmann::json::parse(R"({"cases":[{"n":1,"beta":2}]})")), FormatError);
  const auto echo = c.to_json();
  ProbeConfig back;
  back.merge_json(nlohmann::json::parse(dump_json17(echo)));
  CHECK(dump_json17(back.to_json()) == dump_json17(echo));
}

TEST_CASE("kernel probe") {
  auto c = small(ProbeKind::kernel, {{1, 0.5, 1.0, {}}}, {0, 1, 16, 4096}, 5);
  const auto r = probe_kernel_estimate(c);
  REQUIRE(r.series.size() == 1);
  const auto& s = r.series[0];
  CHECK(s.scales[0].values[0] == 0.0);
  CHECK(s.scales[0].reference == 0.0);
  for (const auto& sc : s.scales) {
    const double expect = centered_kernel_oracle(sc.scale, 0.5) / std::sqrt(2.0 * sc.scale + 1.0);
    CHECK(sc.reference == doctest::Approx(expect).epsilon(1e-12));
    for (double v : sc.values) CHECK(std::isfinite(v));
    CHECK(sc.max >= sc.median);
  }
  CHECK(std::fabs(s.scales.back().reference / (2.0 * std::numbers::sqrt2) - 1.0) <= 0.02);
  CHECK(s.slope.has_value());
  CHECK(r.pass == (*s.slope <= 0.05));
}

TEST_CASE("insufficient scales do not pass") {
  const auto r = probe_kernel_estimate(small(ProbeKind::kernel, {{1, 0.5, 1.0, {}}}, {1, 2}, 1));
  CHECK_FALSE(r.pass);
  CHECK(r.series[0].note == "insufficient scales");
  CHECK(std::isnan(r.series[0].scales.back().slope_so_far));
}

TEST_CASE("atom pointwise probe matches a direct recomputation") {
  auto c = small(ProbeKind::atom_pointwise, {{1, 0.5, 1.0, {}}}, {1, 2, 4}, 3);
  const auto r = probe_atom_pointwise(c);
  const BumpProfile prof(1);
  std::uint64_t seed = c.seed;
  for (const auto& sc : r.series[0].scales) {
    for (double v : sc.values) {
      std::mt19937_64 rng(seed++);
      const std::int64_t m = sc.scale;
      const Point center{-m + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(2 * m + 1))};
      const auto a = atom_generate(DiscreteCube(center, m), 1.0, rng());
      const Box box = dilate_box(a.seq.box(), 8.0);
      TGrid g = c.grid;
      g.t_cap = 64.0 * static_cast<double>(2 * m + 1);
      const auto gm = grand_maximal(riesz_apply(a.seq, 0.5, box), prof, box, g);
      const double norm = std::pow(2.0 * m + 1.0, 0.5 - 1.0);
      CHECK(v == lp_norm(gm, kInfinity) / norm);
    }
  }
}

TEST_CASE("singleton main probe reproduces the atom-uniform numerator") {
  const std::vector<ProbeCase> cases{{1, 0.5, 1.0, {}}, {1, 0.5, 0.5, {}}};
  auto u = small(ProbeKind::atom_uniform, cases, {1, 2, 4}, 2);
  auto m = small(ProbeKind::main_theorem, cases, {1, 2, 4}, 2);
  m.combination_size = 1;
  const auto ru = probe_atom_uniform(u);
  const auto rm = probe_main_theorem(m);
  for (std::size_t s = 0; s < cases.size(); ++s) {
    CHECK(ru.series[s].worst_tail >= 0.0);
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& a = ru.series[s].scales[k];
      const auto& b = rm.series[s].scales[k];
      for (std::size_t t = 0; t < 2; ++t) {
        CHECK(std::fabs(b.numerators[t] / a.values[t] - 1.0) <= 0.01);
        CHECK(a.tails[t] >= 0.0);
        CHECK(b.masses[t] == 1.0);
        CHECK(b.values[t] > 0.0);
      }
    }
  }
}

TEST_CASE("main probe ratio is scale invariant") {
  const BumpProfile prof(1);
  const auto a = atom_generate(DiscreteCube({0}, 3), 0.5, 4);
  const auto b = atom_generate(DiscreteCube({2}, 3), 0.5, 5);
  const auto comb = atomic_combine({{a, b}, {0.3, -0.8}, 0.5}).seq;
  HardyConfig hc;
  hc.compute_tail = false;
  hc.grid.growth = 1.05;
  const double q = ExponentSet::make(1, 0.25, 0.5).q;
  const auto ratio = [&](const LatticeSeq& x) {
    return potential_hardy_norm(x, 0.25, q, prof, hc).value / hardy_norm(x, 0.5, prof, hc).value;
  };
  CHECK(ratio(scale(7.0, comb)) == doctest::Approx(ratio(comb)).epsilon(1e-13));
}

TEST_CASE("lp-lq probe on a delta") {
  auto c = small(ProbeKind::lp_lq, {{1, 0.25, 2.0, {}}}, {0, 1, 2}, 1);
  const auto r = probe_lp_lq(c);
  REQUIRE(r.series.size() == 2);
  const double q0 = 4.0;
  CHECK(r.series[0].q == doctest::Approx(q0));
  // Hand summation of sum_{j != 0} |j|^((alpha - 1) q0) over the output box.
  const Box box = dilate_box(Box({0}, {1}), 8.0);
  long double s = 0.0L;
  for (std::int64_t j = box.origin[0]; j < box.origin[0] + box.shape[0]; ++j) {
    if (j != 0) s += std::pow(static_cast<long double>(std::llabs(j)), (0.25 - 1.0) * q0);
  }
  const double expect = static_cast<double>(std::pow(s, 1.0L / q0));
  CHECK(r.series[0].scales[0].values[0] == doctest::Approx(expect).epsilon(1e-13));
  // M_alpha delta(j) = (2|j| + 1)^(alpha - 1).
  long double t = 0.0L;
  for (std::int64_t j = box.origin[0]; j < box.origin[0] + box.shape[0]; ++j) {
    t += std::pow(std::pow(2.0L * static_cast<long double>(std::llabs(j)) + 1.0L, 0.25L - 1.0L), q0);
  }
  CHECK(r.series[1].scales[0].values[0] ==
        doctest::Approx(static_cast<double>(std::pow(t, 1.0L / q0))).epsilon(1e-13));
  CHECK(r.series[0].label == "riesz");
  CHECK(r.series[1].label == "fractional-maximal");

  // The ratio does not see translations.
  const LatticeSeq chi(Box({-2}, {5}), std::vector<double>(5, 1.0));
  const auto ratio = [&](const LatticeSeq& b) {
    return lp_norm(riesz_apply(b, 0.25, dilate_box(b.box(), 8.0)), q0) / lp_norm(b, 2.0);
  };
  CHECK(ratio(translate(chi, Point{1234})) == ratio(chi));
}

TEST_CASE("majorization probe") {
  auto c = small(ProbeKind::majorization, {{1, 0.5, 1.0, {}}, {2, 0.5, 1.0, {}}}, {2, 4, 8}, 4);
  const auto r = probe_pointwise_majorization(c);
  CHECK(r.pass);
  for (const auto& s : r.series) {
    CHECK(s.violations == 0);
    const double bound = std::pow(1.5, s.params.n) * BumpProfile(s.params.n).sup_norm();
    CHECK(s.c_hat <= bound);
    CHECK(s.scales[0].reference == bound);
  }
  // Delta at the origin: the maximal function vanishes there.
  const BumpProfile prof(1);
  const auto gm = grand_maximal(LatticeSeq::delta({0}), prof, Box({0}, {1}), TGrid{});
  CHECK(gm[0] == 0.0);
}

TEST_CASE("reports are deterministic") {
  auto c = small(ProbeKind::atom_uniform, {{1, 0.5, 1.0, {}}}, {1, 2, 3}, 2);
  const auto a = dump_json17(report_to_json(probe_atom_uniform(c)));
  const auto b = dump_json17(report_to_json(probe_atom_uniform(c)));
  CHECK(a == b);
  auto k = small(ProbeKind::kernel, {{2, 1.0, 1.0, {}}}, {1, 2, 4}, 3);
  const auto rk = probe_kernel_estimate(k);
  CHECK(dump_json17(report_to_json(rk)) == dump_json17(report_to_json(probe_kernel_estimate(k))));
  const auto csv = report_to_csv(rk);
  CHECK(csv.rfind("series,n,alpha,p,scale,max,median,slope_so_far,reference\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  const auto j = nlohmann::json::parse(dump_json17(report_to_json(rk)));
  CHECK(j["probe"] == "kernel");
  CHECK(j["config"]["seed"] == 77);
  CHECK(j["series"][0]["scales"].size() == 3);
}
