#include "dhl/probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "dhl/atoms.hpp"
#include "dhl/io.hpp"
#include "dhl/operators.hpp"
#include "dhl/parallel.hpp"

namespace dhl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Output points handled per grand-maximal batch; bounds peak memory.
constexpr std::size_t kBatchVolume = std::size_t{1} << 22;

double unit_draw(std::mt19937_64& rng) { return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0; }

std::int64_t draw_in(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

Point draw_point(std::mt19937_64& rng, int n, std::int64_t radius) {
  Point c(static_cast<std::size_t>(n));
  for (auto& x : c) x = draw_in(rng, -radius, radius);
  return c;
}

Box centered_box(int n, std::int64_t m) {
  return Box(Point(static_cast<std::size_t>(n), -m), Point(static_cast<std::size_t>(n), 2 * m + 1));
}

double median_of(std::vector<double> v) {
  std::erase_if(v, [](double x) { return !std::isfinite(x); });
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// Stable per-trial seed: base seed plus the running trial index over
// (case, scale, trial).
struct TrialCounter {
  std::uint64_t base;
  std::uint64_t next = 0;
  std::uint64_t take() { return base + next++; }
};

// Splits [0, count) into runs whose total output volume stays bounded.
template <class Fn>
void for_each_chunk(std::size_t count, std::size_t volume_each, Fn&& fn) {
  const std::size_t per = std::max<std::size_t>(1, kBatchVolume / std::max<std::size_t>(volume_each, 1));
  for (std::size_t b = 0; b < count; b += per) fn(b, std::min(count, b + per));
}

void summarize(ScaleStats& s, bool& finite) {
  s.max = 0.0;
  bool any = false;
  for (double v : s.values) {
    if (!std::isfinite(v)) {
      finite = false;
      continue;
    }
    s.max = any ? std::max(s.max, v) : v;
    any = true;
  }
  if (!any) s.max = kNaN;
  s.median = median_of(s.values);
}

// Fills slopes and C_hat and sets the verdict from the slope rule.
void finish_series(ProbeSeries& series, double tol) {
  std::vector<double> xs, ys;
  series.c_hat = 0.0;
  for (auto& s : series.scales) {
    summarize(s, series.finite);
    xs.push_back(static_cast<double>(s.scale));
    ys.push_back(s.max);
    const auto so_far = fit_loglog_slope(xs, ys);
    s.slope_so_far = so_far ? *so_far : kNaN;
    if (std::isfinite(s.max)) series.c_hat = std::max(series.c_hat, s.max);
  }
  series.slope = fit_loglog_slope(xs, ys);
  series.pass = true;
  series.note.clear();
  if (!series.finite) {
    series.pass = false;
    series.note = "non-finite trial value";
  } else if (!series.slope) {
    series.pass = false;
    series.note = "insufficient scales";
  } else if (*series.slope > tol) {
    series.pass = false;
    series.note = "slope above tolerance";
  }
}

ProbeReport assemble(ProbeKind kind, const ProbeConfig& cfg, std::vector<ProbeSeries> series) {
  ProbeReport r;
  r.kind = kind;
  r.config = cfg;
  r.series = std::move(series);
  r.pass = !r.series.empty() &&
           std::all_of(r.series.begin(), r.series.end(), [](const ProbeSeries& s) { return s.pass; });
  return r;
}

ProbeSeries new_series(const ProbeCase& c, double q, std::string label = {}) {
  ProbeSeries s;
  s.label = std::move(label);
  s.params = c;
  s.q = q;
  return s;
}

ScaleStats new_scale(std::int64_t m) {
  ScaleStats s;
  s.scale = m;
  s.reference = kNaN;
  s.slope_so_far = kNaN;
  return s;
}

void fail(const std::string& field, const std::string& why) {
  throw DomainError("probe config: \"" + field + "\" " + why);
}

std::vector<Atom> draw_atoms(const ProbeCase& c, std::int64_t m, const ProbeConfig& cfg, TrialCounter& seeds) {
  std::vector<Atom> atoms;
  for (int t = 0; t < cfg.trials; ++t) {
    std::mt19937_64 rng(seeds.take());
    const Point center = draw_point(rng, c.n, m);
    atoms.push_back(atom_generate(DiscreteCube(center, m), c.p, rng()));
  }
  return atoms;
}

// Potential and grand maximal fields for same-shape atoms, in batches.
template <class Fn>
void atom_fields(const std::vector<Atom>& atoms, double alpha, const BumpProfile& profile, double dilation,
                 const TGrid& grid, Fn&& consume) {
  if (atoms.empty()) return;
  const std::size_t vol = dilate_box(atoms.front().seq.box(), dilation).volume();
  for_each_chunk(atoms.size(), vol, [&](std::size_t b, std::size_t e) {
    std::vector<LatticeSeq> in;
    for (std::size_t k = b; k < e; ++k) in.push_back(atoms[k].seq);
    const auto fields = potential_fields_batch(in, alpha, profile, dilation, grid);
    for (std::size_t k = b; k < e; ++k) consume(k, fields[k - b]);
  });
}

}  // namespace

std::string probe_name(ProbeKind kind) {
  switch (kind) {
    case ProbeKind::kernel:
      return "kernel";
    case ProbeKind::atom_pointwise:
      return "atom-pointwise";
    case ProbeKind::atom_uniform:
      return "atom-uniform";
    case ProbeKind::main_theorem:
      return "main";
    case ProbeKind::lp_lq:
      return "lp-lq";
    case ProbeKind::majorization:
      return "majorization";
  }
  return "unknown";
}

std::optional<ProbeKind> parse_probe_kind(const std::string& name) {
  for (auto k : all_probe_kinds()) {
    if (probe_name(k) == name) return k;
  }
  return std::nullopt;
}

std::vector<ProbeKind> all_probe_kinds() {
  return {ProbeKind::kernel,       ProbeKind::atom_pointwise, ProbeKind::atom_uniform,
          ProbeKind::main_theorem, ProbeKind::lp_lq,          ProbeKind::majorization};
}

void ProbeConfig::validate(ProbeKind kind) const {
  if (cases.empty()) fail("cases", "must not be empty");
  if (trials < 1) fail("trials", "must be at least 1");
  if (!(slope_tolerance > 0.0) || !std::isfinite(slope_tolerance)) fail("slope_tolerance", "must be positive");
  if (!(tail_tolerance > 0.0) || !std::isfinite(tail_tolerance)) fail("tail_tolerance", "must be positive");
  if (!(dilation >= 1.0) || !std::isfinite(dilation)) fail("dilation", "must be >= 1");
  if (combination_size < 1) fail("combination_size", "must be at least 1");
  try {
    grid.validate();
  } catch (const DomainError& e) {
    fail("growth", std::string("is invalid: ") + e.what());
  }
  const std::int64_t min_scale = (kind == ProbeKind::kernel || kind == ProbeKind::lp_lq) ? 0 : 1;
  for (const auto& c : cases) {
    const auto& ladder = scales_for(c);
    if (ladder.empty()) fail("scales", "must not be empty");
    for (std::size_t k = 0; k < ladder.size(); ++k) {
      if (ladder[k] < min_scale) fail("scales", "must be >= " + std::to_string(min_scale));
      if (k > 0 && ladder[k] <= ladder[k - 1]) fail("scales", "must be strictly increasing");
    }
    if (c.n < 1 || c.n > 3) fail("n", "must lie in 1..3");
    switch (kind) {
      case ProbeKind::kernel:
        if (!(c.alpha > 0.0 && c.alpha < c.n)) fail("alpha", "must lie in (0, n)");
        break;
      case ProbeKind::atom_pointwise:
      case ProbeKind::atom_uniform:
      case ProbeKind::main_theorem:
        try {
          ExponentSet::make(c.n, c.alpha, c.p);
        } catch (const DomainError& e) {
          fail("cases", std::string("hold an inconsistent exponent set: ") + e.what());
        }
        break;
      case ProbeKind::lp_lq:
        if (!(c.alpha > 0.0 && c.alpha < c.n)) fail("alpha", "must lie in (0, n)");
        if (!(c.p > 1.0 && c.p < c.n / c.alpha)) fail("p", "must lie in (1, n/alpha) for lp-lq");
        break;
      case ProbeKind::majorization:
        break;
    }
  }
}

ProbeConfig ProbeConfig::defaults(ProbeKind kind) {
  ProbeConfig c;
  const auto ladder = [](std::int64_t top) {
    std::vector<std::int64_t> v;
    for (std::int64_t m = 1; m <= top; m *= 2) v.push_back(m);
    return v;
  };
  switch (kind) {
    case ProbeKind::kernel:
      c.scales = ladder(1024);
      c.trials = 8;
      c.cases = {{1, 0.5, 1.0, ladder(4096)}, {1, 0.3, 1.0, ladder(4096)}, {2, 0.3, 1.0, {}}, {2, 0.5, 1.0, {}},
                 {2, 1.0, 1.0, {}}};
      break;
    case ProbeKind::atom_pointwise:
      c.scales = ladder(64);
      c.cases = {{1, 0.5, 1.0, {}}};
      break;
    case ProbeKind::atom_uniform:
      c.scales = ladder(32);
      c.cases = {{1, 0.5, 1.0, {}}, {1, 0.5, 0.5, {}}, {2, 1.0, 2.0 / 3.0, {}}};
      break;
    case ProbeKind::main_theorem:
      c.scales = ladder(16);
      c.cases = {{1, 0.25, 1.0, {}}, {1, 0.25, 0.5, {}}};
      break;
    case ProbeKind::lp_lq:
      c.scales = ladder(64);
      c.trials = 1;
      c.cases = {{1, 0.25, 2.0, {}}, {2, 0.5, 2.0, {}}};
      break;
    case ProbeKind::majorization:
      c.scales = {4, 8, 16, 32};
      c.trials = 25;
      c.dilation = 2.0;
      c.cases = {{1, 0.5, 1.0, {}}, {2, 0.5, 1.0, {}}};
      break;
  }
  return c;
}

namespace {

std::vector<std::int64_t> read_scales(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array()) throw FormatError("probe config: \"" + field + "\" must be an array of integers");
  std::vector<std::int64_t> v;
  for (const auto& e : j) {
    if (!e.is_number_integer()) throw FormatError("probe config: \"" + field + "\" must be an array of integers");
    v.push_back(e.get<std::int64_t>());
  }
  return v;
}

double read_number(const nlohmann::json& j, const std::string& field) {
  if (!j.is_number()) throw FormatError("probe config: \"" + field + "\" must be a number");
  return j.get<double>();
}

std::int64_t read_integer(const nlohmann::json& j, const std::string& field) {
  if (!j.is_number_integer()) throw FormatError("probe config: \"" + field + "\" must be an integer");
  return j.get<std::int64_t>();
}

}  // namespace

void ProbeConfig::merge_json(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("probe config: top level must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "cases") {
      if (!value.is_array()) throw FormatError("probe config: \"cases\" must be an array");
      cases.clear();
      for (const auto& e : value) {
        if (!e.is_object()) throw FormatError("probe config: each case must be an object");
        ProbeCase c;
        for (const auto& [ck, cv] : e.items()) {
          if (ck == "n") {
            c.n = static_cast<int>(read_integer(cv, "n"));
          } else if (ck == "alpha") {
            c.alpha = read_number(cv, "alpha");
          } else if (ck == "p") {
            c.p = read_number(cv, "p");
          } else if (ck == "scales") {
            c.scales = read_scales(cv, "scales");
          } else {
            throw FormatError("probe config: unknown case field \"" + ck + "\"");
          }
        }
        cases.push_back(std::move(c));
      }
    } else if (key == "scales") {
      scales = read_scales(value, key);
    } else if (key == "trials") {
      trials = static_cast<int>(read_integer(value, key));
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) throw FormatError("probe config: \"seed\" must be a nonnegative integer");
      seed = value.get<std::uint64_t>();
    } else if (key == "growth") {
      grid.growth = read_number(value, key);
    } else if (key == "t_cap") {
      if (value.is_null()) {
        grid.t_cap.reset();
      } else {
        grid.t_cap = read_number(value, key);
      }
    } else if (key == "envelope_stop") {
      if (!value.is_boolean()) throw FormatError("probe config: \"envelope_stop\" must be a boolean");
      grid.envelope_stop = value.get<bool>();
    } else if (key == "dilation") {
      dilation = read_number(value, key);
    } else if (key == "slope_tolerance") {
      slope_tolerance = read_number(value, key);
    } else if (key == "tail_tolerance") {
      tail_tolerance = read_number(value, key);
    } else if (key == "combination_size") {
      combination_size = static_cast<int>(read_integer(value, key));
    } else if (key == "json") {
      if (!value.is_string()) throw FormatError("probe config: \"json\" must be a string");
      json_path = value.get<std::string>();
    } else if (key == "csv") {
      if (!value.is_string()) throw FormatError("probe config: \"csv\" must be a string");
      csv_path = value.get<std::string>();
    } else if (parse_probe_kind(key)) {
      if (!value.is_object()) throw FormatError("probe config: \"" + key + "\" must be an object");
    } else {
      throw FormatError("probe config: unknown field \"" + key + "\"");
    }
  }
}

nlohmann::ordered_json ProbeConfig::to_json() const {
  nlohmann::ordered_json j;
  auto cs = nlohmann::ordered_json::array();
  for (const auto& c : cases) {
    nlohmann::ordered_json e{{"n", c.n}, {"alpha", c.alpha}, {"p", c.p}};
    if (!c.scales.empty()) e["scales"] = c.scales;
    cs.push_back(std::move(e));
  }
  j["cases"] = std::move(cs);
  j["scales"] = scales;
  j["trials"] = trials;
  j["seed"] = seed;
  j["growth"] = grid.growth;
  j["t_cap"] = grid.t_cap ? nlohmann::ordered_json(*grid.t_cap) : nlohmann::ordered_json(nullptr);
  j["envelope_stop"] = grid.envelope_stop;
  j["dilation"] = dilation;
  j["slope_tolerance"] = slope_tolerance;
  j["tail_tolerance"] = tail_tolerance;
  j["combination_size"] = combination_size;
  return j;
}

std::optional<double> fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < std::min(x.size(), y.size()); ++k) {
    if (x[k] > 0.0 && y[k] > 0.0 && std::isfinite(x[k]) && std::isfinite(y[k])) {
      lx.push_back(std::log(x[k]));
      ly.push_back(std::log(y[k]));
    }
  }
  if (lx.size() < 3) return std::nullopt;
  const double count = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

ProbeReport probe_kernel_estimate(const ProbeConfig& cfg) {
  cfg.validate(ProbeKind::kernel);
  TrialCounter seeds{cfg.seed};
  std::vector<ProbeSeries> out;
  for (const auto& c : cfg.cases) {
    auto series = new_series(c, kNaN);
    for (std::int64_t m : cfg.scales_for(c)) {
      auto s = new_scale(m);
      std::vector<std::uint64_t> trial_seeds;
      for (int t = 0; t < cfg.trials; ++t) trial_seeds.push_back(seeds.take());
      s.values.assign(trial_seeds.size(), 0.0);
      const double norm = std::pow(static_cast<double>(2 * m + 1), c.alpha);
      parallel_for(
          trial_seeds.size(),
          [&](std::size_t b, std::size_t e) {
            for (std::size_t t = b; t < e; ++t) {
              std::mt19937_64 rng(trial_seeds[t]);
              const Point center = draw_point(rng, c.n, 1000000);
              Point k = center;
              if (t % 2 == 1) {
                for (int l = 0; l < c.n; ++l) k[l] += draw_in(rng, -m, m);
              } else if (t > 0) {
                for (int l = 0; l < c.n; ++l) k[l] += draw_in(rng, -3 * m - 1, 3 * m + 1);
                const auto axis = static_cast<std::size_t>(draw_in(rng, 0, c.n - 1));
                const std::int64_t mag = draw_in(rng, m + 1, 3 * m + 1);
                k[axis] = center[axis] + ((rng() & 1) ? mag : -mag);
              }
              s.values[t] = kernel_sum(k, DiscreteCube(center, m), c.alpha) / norm;
            }
          },
          1);
      s.reference = s.values.front();
      series.scales.push_back(std::move(s));
    }
    finish_series(series, cfg.slope_tolerance);
    out.push_back(std::move(series));
  }
  return assemble(ProbeKind::kernel, cfg, std::move(out));
}

ProbeReport probe_atom_pointwise(const ProbeConfig& cfg) {
  cfg.validate(ProbeKind::atom_pointwise);
  TrialCounter seeds{cfg.seed};
  std::vector<ProbeSeries> out;
  for (const auto& c : cfg.cases) {
    const auto ex = ExponentSet::make(c.n, c.alpha, c.p);
    const BumpProfile profile(c.n);
    auto series = new_series(c, ex.q);
    for (std::int64_t m : cfg.scales_for(c)) {
      auto s = new_scale(m);
      const auto atoms = draw_atoms(c, m, cfg, seeds);
      const double card = std::pow(static_cast<double>(2 * m + 1), c.n);
      const double norm = std::pow(card, c.alpha / c.n - 1.0 / c.p);
      s.values.assign(atoms.size(), 0.0);
      atom_fields(atoms, c.alpha, profile, cfg.dilation, cfg.grid, [&](std::size_t k, const PotentialFields& f) {
        s.values[k] = lp_norm(f.maximal, kInfinity) / norm;
      });
      series.scales.push_back(std::move(s));
    }
    finish_series(series, cfg.slope_tolerance);
    out.push_back(std::move(series));
  }
  return assemble(ProbeKind::atom_pointwise, cfg, std::move(out));
}

ProbeReport probe_atom_uniform(const ProbeConfig& cfg) {
  cfg.validate(ProbeKind::atom_uniform);
  TrialCounter seeds{cfg.seed};
  std::vector<ProbeSeries> out;
  for (const auto& c : cfg.cases) {
    const auto ex = ExponentSet::make(c.n, c.alpha, c.p);
    const BumpProfile profile(c.n);
    auto series = new_series(c, ex.q);
    series.worst_tail = 0.0;
    for (std::int64_t m : cfg.scales_for(c)) {
      auto s = new_scale(m);
      const auto atoms = draw_atoms(c, m, cfg, seeds);
      s.values.assign(atoms.size(), 0.0);
      s.tails.assign(atoms.size(), 0.0);
      atom_fields(atoms, c.alpha, profile, cfg.dilation, cfg.grid, [&](std::size_t k, const PotentialFields& f) {
        s.values[k] = lp_norm(f.maximal, ex.q);
      });
      atom_fields(atoms, c.alpha, profile, 2.0 * cfg.dilation, cfg.grid,
                  [&](std::size_t k, const PotentialFields& f) {
                    const double wide = lp_norm(f.maximal, ex.q);
                    s.tails[k] = s.values[k] == 0.0 ? 0.0 : std::fabs(wide - s.values[k]) / s.values[k];
                  });
      for (double t : s.tails) series.worst_tail = std::isfinite(t) ? std::max(series.worst_tail, t) : kNaN;
      series.scales.push_back(std::move(s));
    }
    finish_series(series, cfg.slope_tolerance);
    if (series.pass && !(series.worst_tail <= cfg.tail_tolerance)) {
      series.pass = false;
      series.note = "tail diagnostic above tolerance";
    }
    out.push_back(std::move(series));
  }
  return assemble(ProbeKind::atom_uniform, cfg, std::move(out));
}

ProbeReport probe_main_theorem(const ProbeConfig& cfg) {
  cfg.validate(ProbeKind::main_theorem);
  TrialCounter seeds{cfg.seed};
  std::vector<ProbeSeries> out;
  HardyConfig hc;
  hc.dilation = cfg.dilation;
  hc.grid = cfg.grid;
  hc.compute_tail = false;
  hc.use_stored_box = true;
  const bool single = cfg.combination_size == 1;
  for (const auto& c : cfg.cases) {
    const auto ex = ExponentSet::make(c.n, c.alpha, c.p);
    const BumpProfile profile(c.n);
    auto series = new_series(c, ex.q);
    for (std::int64_t m : cfg.scales_for(c)) {
      auto s = new_scale(m);
      std::vector<LatticeSeq> inputs;
      for (int t = 0; t < cfg.trials; ++t) {
        std::mt19937_64 rng(seeds.take());
        AtomicCombination comb;
        comb.p = c.p;
        for (int k = 0; k < cfg.combination_size; ++k) {
          const Point center = draw_point(rng, c.n, m);
          comb.atoms.push_back(atom_generate(DiscreteCube(center, m), c.p, rng()));
          comb.coefficients.push_back(single ? 1.0 : unit_draw(rng));
        }
        auto r = atomic_combine(comb);
        s.masses.push_back(r.coefficient_mass);
        inputs.push_back(single ? std::move(r.seq) : restrict_to(r.seq, centered_box(c.n, 2 * m)));
      }
      const std::size_t vol = dilate_box(inputs.front().box(), cfg.dilation).volume();
      s.values.assign(inputs.size(), 0.0);
      s.numerators.assign(inputs.size(), 0.0);
      for_each_chunk(inputs.size(), vol, [&](std::size_t b, std::size_t e) {
        const std::span<const LatticeSeq> part(inputs.data() + b, e - b);
        const auto den = hardy_norm_batch(part, c.p, profile, hc);
        const auto num = potential_hardy_norm_batch(part, c.alpha, ex.q, profile, hc);
        for (std::size_t k = b; k < e; ++k) {
          s.numerators[k] = num[k - b].maximal_term;
          s.values[k] = num[k - b].value / den[k - b].value;
        }
      });
      series.scales.push_back(std::move(s));
    }
    finish_series(series, cfg.slope_tolerance);
    out.push_back(std::move(series));
  }
  return assemble(ProbeKind::main_theorem, cfg, std::move(out));
}

ProbeReport probe_lp_lq(const ProbeConfig& cfg) {
  cfg.validate(ProbeKind::lp_lq);
  TrialCounter seeds{cfg.seed};
  std::vector<ProbeSeries> out;
  for (const auto& c : cfg.cases) {
    const double q0 = 1.0 / (1.0 / c.p - c.alpha / c.n);
    auto riesz = new_series(c, q0, "riesz");
    auto maximal = new_series(c, q0, "fractional-maximal");
    for (std::int64_t m : cfg.scales_for(c)) {
      auto sr = new_scale(m);
      auto sm = new_scale(m);
      const Box box = centered_box(c.n, m);
      const Box out_box = dilate_box(box, cfg.dilation);
      for (int t = 0; t < cfg.trials; ++t) {
        std::mt19937_64 rng(seeds.take());
        std::vector<double> v(box.volume(), 1.0);
        if (t > 0) {
          for (auto& x : v) x = 0.5 * (unit_draw(rng) + 1.0);
        }
        const LatticeSeq b(box, std::move(v));
        const double base = lp_norm(b, c.p);
        sr.values.push_back(lp_norm(riesz_apply(b, c.alpha, out_box), q0) / base);
        sm.values.push_back(lp_norm(frac_maximal(b, c.alpha, out_box), q0) / base);
      }
      riesz.scales.push_back(std::move(sr));
      maximal.scales.push_back(std::move(sm));
    }
    finish_series(riesz, cfg.slope_tolerance);
    finish_series(maximal, cfg.slope_tolerance);
    out.push_back(std::move(riesz));
    out.push_back(std::move(maximal));
  }
  return assemble(ProbeKind::lp_lq, cfg, std::move(out));
}

ProbeReport probe_pointwise_majorization(const ProbeConfig& cfg) {
  cfg.validate(ProbeKind::majorization);
  TrialCounter seeds{cfg.seed};
  std::vector<ProbeSeries> out;
  for (const auto& c : cfg.cases) {
    const BumpProfile profile(c.n);
    const double bound = std::pow(1.5, c.n) * profile.sup_norm();
    auto series = new_series(c, kNaN);
    for (std::int64_t side : cfg.scales_for(c)) {
      auto s = new_scale(side);
      s.reference = bound;
      const Box box(Point(static_cast<std::size_t>(c.n), 0), Point(static_cast<std::size_t>(c.n), side));
      const Box out_box = dilate_box(box, cfg.dilation);
      for (int t = 0; t < cfg.trials; ++t) {
        std::mt19937_64 rng(seeds.take());
        std::vector<double> v(box.volume());
        for (auto& x : v) x = t % 2 ? 0.5 * (unit_draw(rng) + 1.0) : unit_draw(rng);
        const LatticeSeq b(box, std::move(v));
        const auto gm = grand_maximal(b, profile, out_box, cfg.grid);
        const auto hl = hl_maximal(b, out_box);
        double worst = 0.0;
        for (std::size_t k = 0; k < gm.size(); ++k) {
          if (gm[k] == 0.0) continue;
          const double ratio = hl[k] == 0.0 ? std::numeric_limits<double>::infinity() : gm[k] / hl[k];
          if (!(gm[k] <= bound * hl[k])) ++series.violations;
          worst = std::max(worst, ratio);
        }
        s.values.push_back(worst);
      }
      series.scales.push_back(std::move(s));
    }
    finish_series(series, cfg.slope_tolerance);
    // The cap is pointwise; the slope is informational here.
    series.pass = series.finite && series.violations == 0;
    series.note = series.pass ? "" : (series.finite ? "majorization violated" : "non-finite trial value");
    out.push_back(std::move(series));
  }
  return assemble(ProbeKind::majorization, cfg, std::move(out));
}

ProbeReport run_probe(ProbeKind kind, const ProbeConfig& cfg) {
  switch (kind) {
    case ProbeKind::kernel:
      return probe_kernel_estimate(cfg);
    case ProbeKind::atom_pointwise:
      return probe_atom_pointwise(cfg);
    case ProbeKind::atom_uniform:
      return probe_atom_uniform(cfg);
    case ProbeKind::main_theorem:
      return probe_main_theorem(cfg);
    case ProbeKind::lp_lq:
      return probe_lp_lq(cfg);
    case ProbeKind::majorization:
      return probe_pointwise_majorization(cfg);
  }
  throw DomainError("run_probe: unknown probe");
}

namespace {

nlohmann::ordered_json num_or_null(double x) {
  return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json array_of(const std::vector<double>& v) {
  auto a = nlohmann::ordered_json::array();
  for (double x : v) a.push_back(num_or_null(x));
  return a;
}

std::string csv_cell(double x) { return std::isfinite(x) ? format_double17(x) : std::string(); }

}  // namespace

nlohmann::ordered_json report_to_json(const ProbeReport& r) {
  nlohmann::ordered_json j;
  j["probe"] = probe_name(r.kind);
  j["version"] = kVersion;
  j["verdict"] = r.pass ? "pass" : "fail";
  j["config"] = r.config.to_json();
  auto series = nlohmann::ordered_json::array();
  for (const auto& s : r.series) {
    nlohmann::ordered_json e;
    if (!s.label.empty()) e["label"] = s.label;
    e["n"] = s.params.n;
    e["alpha"] = s.params.alpha;
    e["p"] = s.params.p;
    e["q"] = num_or_null(s.q);
    e["slope"] = s.slope ? num_or_null(*s.slope) : nlohmann::ordered_json(nullptr);
    e["c_hat"] = num_or_null(s.c_hat);
    e["finite"] = s.finite;
    if (r.kind == ProbeKind::atom_uniform) e["worst_tail"] = num_or_null(s.worst_tail);
    if (r.kind == ProbeKind::majorization) e["violations"] = s.violations;
    e["verdict"] = s.pass ? "pass" : "fail";
    e["note"] = s.note;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& sc : s.scales) {
      nlohmann::ordered_json row;
      row["scale"] = sc.scale;
      row["max"] = num_or_null(sc.max);
      row["median"] = num_or_null(sc.median);
      row["slope_so_far"] = num_or_null(sc.slope_so_far);
      row["reference"] = num_or_null(sc.reference);
      row["values"] = array_of(sc.values);
      if (!sc.tails.empty()) row["tails"] = array_of(sc.tails);
      if (!sc.numerators.empty()) row["numerators"] = array_of(sc.numerators);
      if (!sc.masses.empty()) row["coefficient_mass"] = array_of(sc.masses);
      rows.push_back(std::move(row));
    }
    e["scales"] = std::move(rows);
    series.push_back(std::move(e));
  }
  j["series"] = std::move(series);
  return j;
}

std::string report_to_csv(const ProbeReport& r) {
  std::ostringstream os;
  os << "series,n,alpha,p,scale,max,median,slope_so_far,reference\n";
  for (const auto& s : r.series) {
    for (const auto& sc : s.scales) {
      os << (s.label.empty() ? probe_name(r.kind) : s.label) << ',' << s.params.n << ','
         << format_double17(s.params.alpha) << ',' << format_double17(s.params.p) << ',' << sc.scale << ','
         << csv_cell(sc.max) << ',' << csv_cell(sc.median) << ',' << csv_cell(sc.slope_so_far) << ','
         << csv_cell(sc.reference) << '\n';
    }
  }
  return os.str();
}

}  // namespace dhl
