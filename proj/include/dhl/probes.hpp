#pragma once

// Empirical probes of the scale-uniform inequalities. Each probe sweeps a
// ladder of scales, records a measured quantity per random trial and fits
// the slope of log(max quantity) against log(scale); a bounded constant
// shows up as a slope near zero.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dhl/hardy.hpp"
#include "dhl/lattice.hpp"
#include "json.hpp"

namespace dhl {

inline constexpr const char* kVersion = "dhl 1.0.0";

enum class ProbeKind { kernel, atom_pointwise, atom_uniform, main_theorem, lp_lq, majorization };

/// "kernel", "atom-pointwise", "atom-uniform", "main", "lp-lq", "majorization".
std::string probe_name(ProbeKind kind);
std::optional<ProbeKind> parse_probe_kind(const std::string& name);
std::vector<ProbeKind> all_probe_kinds();

/// One parameter point. `p` is the atom exponent, or p0 for lp-lq; kernel
/// ignores p and majorization ignores alpha and p.
struct ProbeCase {
  int n = 1;
  double alpha = 0.5;
  double p = 1.0;
  /// Overrides the config ladder when nonempty.
  std::vector<std::int64_t> scales;
};

struct ProbeConfig {
  std::vector<ProbeCase> cases;
  /// Cube radii m, or box sides for majorization.
  std::vector<std::int64_t> scales;
  int trials = 20;
  std::uint64_t seed = 1;
  TGrid grid{1.05, std::nullopt, true};
  double dilation = 8.0;
  double slope_tolerance = 0.05;
  /// Largest admissible tail diagnostic in atom-uniform.
  double tail_tolerance = 0.05;
  /// Atoms per combination in main.
  int combination_size = 8;
  std::string json_path;
  std::string csv_path;

  const std::vector<std::int64_t>& scales_for(const ProbeCase& c) const {
    return c.scales.empty() ? scales : c.scales;
  }
  /// Throws DomainError naming the offending field.
  void validate(ProbeKind kind) const;

  static ProbeConfig defaults(ProbeKind kind);
  /// Overwrites the fields present in `j`. Unknown keys are rejected except
  /// probe names, which hold per-suite overrides and are skipped here.
  void merge_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
};

struct ScaleStats {
  std::int64_t scale = 0;
  /// Measured quantity per trial, in trial order.
  std::vector<double> values;
  /// atom-uniform: relative change of the value when D doubles.
  std::vector<double> tails;
  /// main: maximal term of the H^q numerator per trial.
  std::vector<double> numerators;
  /// main: sum |lambda_k|^p per trial.
  std::vector<double> masses;
  double max = 0.0;
  double median = 0.0;
  /// kernel: ratio at k = k0; majorization: the analytic cap. NaN otherwise.
  double reference = 0.0;
  /// Fit over this and all smaller scales; NaN below three usable points.
  double slope_so_far = 0.0;
};

struct ProbeSeries {
  std::string label;
  ProbeCase params;
  /// Target exponent (q or q0); NaN when it does not apply.
  double q = 0.0;
  std::vector<ScaleStats> scales;
  std::optional<double> slope;
  double c_hat = 0.0;
  bool finite = true;
  double worst_tail = 0.0;
  std::size_t violations = 0;
  bool pass = false;
  /// Reason for a failed verdict, empty on pass.
  std::string note;
};

struct ProbeReport {
  ProbeKind kind = ProbeKind::kernel;
  ProbeConfig config;
  std::vector<ProbeSeries> series;
  bool pass = false;
};

/// Least-squares slope of log y against log x over points with x, y > 0;
/// nullopt with fewer than three such points.
std::optional<double> fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// kernel_sum(k, Q_{k0,m}, alpha) / (2m+1)^alpha with trial 0 at k = k0 and
/// later trials alternating between k inside and outside the cube.
ProbeReport probe_kernel_estimate(const ProbeConfig& cfg);
/// max_j grand_maximal(I_alpha a)(j) / (#Q)^(alpha/n - 1/p) over random atoms.
ProbeReport probe_atom_pointwise(const ProbeConfig& cfg);
/// ||grand_maximal(I_alpha a)||_q over the dilated support box of a.
ProbeReport probe_atom_uniform(const ProbeConfig& cfg);
/// ||I_alpha b||_{H^q} / ||b||_{H^p} for b a combination of atoms on cubes of
/// radius m centered in Q_{0,m}.
ProbeReport probe_main_theorem(const ProbeConfig& cfg);
/// ||T b||_{q0} / ||b||_{p0} for T = I_alpha and M_alpha; trial 0 is the
/// indicator of Q_{0,m}, later trials are random nonnegative fills.
ProbeReport probe_lp_lq(const ProbeConfig& cfg);
/// max_j grand_maximal(b)(j) / hl_maximal(b)(j) against (3/2)^n ||Phi||_inf.
ProbeReport probe_pointwise_majorization(const ProbeConfig& cfg);

ProbeReport run_probe(ProbeKind kind, const ProbeConfig& cfg);

nlohmann::ordered_json report_to_json(const ProbeReport& r);
/// Columns: series, n, alpha, p, scale, max, median, slope_so_far,
/// reference. Missing values are left empty.
std::string report_to_csv(const ProbeReport& r);

}  // namespace dhl
