#pragma once

// (p, inf, N_p)-atoms on Z^n: a is supported in a discrete cube Q,
// ||a||_inf <= (#Q)^(-1/p), and sum_{j in Q} j^beta a(j) = 0 for every
// multi-index of order at most N_p = floor(n (1/p - 1)).

#include <cstdint>
#include <vector>

#include "dhl/lattice.hpp"
#include "json.hpp"

namespace dhl {

/// floor(n (1/p - 1)) for 0 < p <= 1, robust to p given as a rounded
/// fraction such as 2.0 / 3.0.
int moment_order(double p, int n);

struct MomentResidual {
  MultiIndex beta;
  /// sum_{j in Q} j^beta a(j).
  double value = 0.0;
  /// sum_{j in Q} |j^beta| |a(j)|.
  double scale = 0.0;
  /// |value| / scale, or 0 when scale is 0.
  double relative = 0.0;
};

struct AtomReport {
  int moment_order = 0;
  bool support_ok = false;
  bool bound_ok = false;
  bool moments_ok = false;
  /// Largest |a(j)| with j outside Q.
  double support_violation = 0.0;
  /// ||a||_inf / (#Q)^(-1/p).
  double bound_ratio = 0.0;
  /// Largest relative moment residual.
  double worst_moment = 0.0;
  std::vector<MomentResidual> moments;

  bool accepted() const { return support_ok && bound_ok && moments_ok; }
};

/// Checks the three atom conditions. The size bound allows 1e-12 relative
/// slack; moments are compared relative to sum |j^beta| |a(j)|.
AtomReport atom_validate(const LatticeSeq& a, const DiscreteCube& cube, double p, double tol_rel);

struct Atom {
  LatticeSeq seq;
  DiscreteCube cube;
  double p = 1.0;
  int moment_order = 0;
};

/// Random atom on `cube`: uniform draws in [-1, 1] projected onto the null
/// space of the centered moment map, rescaled so ||a||_inf = (#Q)^(-1/p).
Atom atom_generate(const DiscreteCube& cube, double p, std::uint64_t seed);

struct AtomicCombination {
  std::vector<Atom> atoms;
  std::vector<double> coefficients;
  double p = 1.0;
};

struct CombinationResult {
  LatticeSeq seq;
  /// sum_k |lambda_k|^p.
  double coefficient_mass = 0.0;
};

/// sum_k lambda_k a_k on the covering box of the atoms.
CombinationResult atomic_combine(const AtomicCombination& c);

/// Sequence fields plus "p", "cube_center", "cube_radius" and
/// "moment_residuals".
nlohmann::ordered_json atom_to_json(const Atom& a);

/// Reads an atom file. Missing cube fields default to the smallest cube that
/// holds the stored box, anchored at its lower corner; a missing "p" is
/// taken from `default_p`.
Atom atom_from_json(const nlohmann::json& j, double default_p);

}  // namespace dhl
