#pragma once

// Mollifier, its lattice discretization, the grand maximal function
// sup_t |Phi_t^d * b| and the H^p quasi-norm estimate
//
//   ||b||_{H^p} ~ ||b||_p + ||sup_t |Phi_t^d * b| ||_p
//
// with Phi(x) = c * psi(4|x|), psi(r) = exp(-1/(1 - r^2)) on r < 1, and
// Phi_t^d(j) = t^-n Phi(j / t) for j != 0, Phi_t^d(0) = 0.

#include <optional>
#include <span>
#include <vector>

#include "dhl/lattice.hpp"
#include "json.hpp"

namespace dhl {

/// psi(r) = exp(-1 / (1 - r^2)) for |r| < 1, else 0.
double bump_psi(double r);

class BumpProfile {
 public:
  /// Normalizes the profile in dimension n by quadrature of the radial
  /// integral.
  explicit BumpProfile(int n);

  int dim() const { return n_; }
  /// c with the integral of Phi over R^n equal to 1.
  double normalization() const { return c_; }
  /// ||Phi||_inf = c / e.
  double sup_norm() const { return sup_; }
  static constexpr double support_radius() { return 0.25; }

  /// Phi at a point with |x|^2 = r2.
  double value_sq(double r2) const;
  double operator()(std::span<const double> x) const;

 private:
  int n_ = 1;
  double c_ = 0.0;
  double sup_ = 0.0;
};

/// Lattice sequence t^-n Phi(j / t) on the smallest box holding its support,
/// with the value at 0 set to 0.
LatticeSeq bump_discretize(const BumpProfile& profile, double t);

/// Geometric grid t_k = 4 g^k, k >= 1, up to t_cap.
struct TGrid {
  double growth = 1.01;
  /// Unset: 64 * (support diameter + 1) of the input.
  std::optional<double> t_cap;
  bool envelope_stop = true;

  void validate() const;
  /// Grid with the log-step halved.
  TGrid refined() const;
};

struct GrandMaximalStats {
  double t_cap = 0.0;
  /// Last grid value that was evaluated (0 when none was).
  double t_last = 0.0;
  std::size_t steps = 0;
  bool stopped_by_envelope = false;
  /// t_cap < 4: nothing to scan, the result is all zeros.
  bool trivial = false;
};

/// max over grid t of |(Phi_t^d * b)(j)| for j in out_box.
LatticeSeq grand_maximal(const LatticeSeq& b, const BumpProfile& profile, const Box& out_box, const TGrid& grid,
                         GrandMaximalStats* stats = nullptr);

/// Same for several inputs sharing one shape and one output placement
/// relative to their origins. The per-t kernel transform is shared; each
/// result equals the single-input call bit for bit.
std::vector<LatticeSeq> grand_maximal_batch(std::span<const LatticeSeq> inputs, const BumpProfile& profile,
                                            std::span<const Box> out_boxes, const TGrid& grid,
                                            std::vector<GrandMaximalStats>* stats = nullptr);

/// Bounding box of the nonzero entries; nullopt for the zero sequence.
std::optional<Box> support_box(const LatticeSeq& b);

struct HardyConfig {
  double dilation = 8.0;
  TGrid grid;
  bool compute_tail = true;
  /// Measure on the stored box of b instead of its trimmed support.
  bool use_stored_box = false;
};

struct HardyEstimate {
  double value = 0.0;
  double p = 1.0;
  double dilation = 8.0;
  /// Box on which the maximal function was summed.
  Box box;
  double lp_term = 0.0;
  double maximal_term = 0.0;
  /// |value(2D) - value(D)| / value(D); NaN when not computed.
  double tail_diagnostic = 0.0;
};

/// ||b||_p + ||grand_maximal(b)||_p over the support box dilated by D.
HardyEstimate hardy_norm(const LatticeSeq& b, double p, const BumpProfile& profile, const HardyConfig& cfg = {});

/// Batch form; inputs whose measured boxes share a shape run together and
/// each entry equals the single call.
std::vector<HardyEstimate> hardy_norm_batch(std::span<const LatticeSeq> inputs, double p, const BumpProfile& profile,
                                            const HardyConfig& cfg = {});

struct PotentialFields {
  /// I_alpha a on dilate_box(a.box(), D).
  LatticeSeq potential;
  /// Its grand maximal function on the same box.
  LatticeSeq maximal;
};

/// I_alpha a and its grand maximal function for inputs of one shape, taken
/// on their stored boxes. An unset t-cap becomes 64 * (diameter + 1) of
/// that box.
std::vector<PotentialFields> potential_fields_batch(std::span<const LatticeSeq> inputs, double alpha,
                                                    const BumpProfile& profile, double dilation, const TGrid& grid);

/// Quasi-norm of I_alpha a for a finitely supported a. The potential is
/// evaluated on the support box of a dilated by D and both terms are taken
/// over that box. The t-cap default follows the support of a.
HardyEstimate potential_hardy_norm(const LatticeSeq& a, double alpha, double q, const BumpProfile& profile,
                                   const HardyConfig& cfg = {});

/// Batch form; each entry equals the single call.
std::vector<HardyEstimate> potential_hardy_norm_batch(std::span<const LatticeSeq> atoms, double alpha, double q,
                                                      const BumpProfile& profile, const HardyConfig& cfg = {});

nlohmann::ordered_json to_json(const HardyEstimate& e);

}  // namespace dhl
