#include "dhl/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "dhl/io.hpp"

namespace dhl {

namespace {

void check_p(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("atoms: p must lie in (0, 1]");
}

// Uniform in [-1, 1) from the top 53 bits, independent of the standard
// library's distribution implementation.
double unit_draw(std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

}  // namespace

int moment_order(double p, int n) {
  check_p(p);
  if (n < 1) throw DomainError("moment_order: dimension must be positive");
  const double x = static_cast<double>(n) * (1.0 / p - 1.0);
  return static_cast<int>(std::floor(x + 1e-9));
}

AtomReport atom_validate(const LatticeSeq& a, const DiscreteCube& cube, double p, double tol_rel) {
  if (a.dim() != cube.dim()) throw DomainError("atom_validate: dimension mismatch");
  AtomReport r;
  r.moment_order = moment_order(p, a.dim());
  const double bound = std::pow(cube.cardinality(), -1.0 / p);

  double sup = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double v = std::fabs(a[k]);
    sup = std::max(sup, v);
    if (v != 0.0 && !cube.contains(a.box().point_at(k))) r.support_violation = std::max(r.support_violation, v);
  }
  r.support_ok = r.support_violation == 0.0;
  r.bound_ratio = sup / bound;
  r.bound_ok = sup <= bound * (1.0 + 1e-12);

  r.moments_ok = true;
  for (const auto& beta : multi_indices_up_to(a.dim(), r.moment_order)) {
    CompensatedSum value, scale;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (a[k] == 0.0) continue;
      const Point j = a.box().point_at(k);
      if (!cube.contains(j)) continue;
      const double mono = beta.monomial(j);
      value.add(mono * a[k]);
      scale.add(std::fabs(mono) * std::fabs(a[k]));
    }
    MomentResidual m{beta, value.value(), scale.value(), 0.0};
    m.relative = m.scale > 0.0 ? std::fabs(m.value) / m.scale : 0.0;
    if (m.relative > tol_rel) r.moments_ok = false;
    r.worst_moment = std::max(r.worst_moment, m.relative);
    r.moments.push_back(std::move(m));
  }
  return r;
}

Atom atom_generate(const DiscreteCube& cube, double p, std::uint64_t seed) {
  const int n = cube.dim();
  const int order = moment_order(p, n);
  const auto betas = multi_indices_up_to(n, order);
  const Box box = cube.box();
  const auto size = static_cast<Eigen::Index>(box.volume());
  const auto constraints = static_cast<Eigen::Index>(betas.size());
  if (size <= constraints) {
    throw DomainError("atom_generate: cube has " + std::to_string(size) + " points but there are " +
                      std::to_string(constraints) + " moment constraints");
  }

  // Columns span the centered, radius-normalized monomials on Q.
  Eigen::MatrixXd A(size, constraints);
  const double radius = static_cast<double>(std::max<std::int64_t>(cube.radius, 1));
  std::vector<double> x(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < size; ++i) {
    const Point j = box.point_at(static_cast<std::size_t>(i));
    for (int l = 0; l < n; ++l) x[l] = static_cast<double>(j[l] - cube.center[l]) / radius;
    for (Eigen::Index c = 0; c < constraints; ++c) A(i, c) = betas[static_cast<std::size_t>(c)].monomial(x);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  const Eigen::Index rank = qr.rank();
  const Eigen::MatrixXd basis = qr.householderQ() * Eigen::MatrixXd::Identity(size, rank);

  std::mt19937_64 rng(seed);
  const double target = std::pow(cube.cardinality(), -1.0 / p);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Eigen::VectorXd draw(size);
    for (Eigen::Index i = 0; i < size; ++i) draw(i) = unit_draw(rng);
    Eigen::VectorXd y = draw - basis * (basis.transpose() * draw);
    y -= basis * (basis.transpose() * y);
    if (y.norm() < 1e-8 * draw.norm()) continue;

    Eigen::Index arg = 0;
    const double peak = y.cwiseAbs().maxCoeff(&arg);
    std::vector<double> vals(static_cast<std::size_t>(size));
    const double s = target / peak;
    for (Eigen::Index i = 0; i < size; ++i) {
      const double v = y(i) * s;
      vals[static_cast<std::size_t>(i)] = std::fabs(v) > target ? std::copysign(target, v) : v;
    }
    vals[static_cast<std::size_t>(arg)] = std::copysign(target, y(arg));
    return Atom{LatticeSeq(box, std::move(vals)), cube, p, order};
  }
  throw DomainError("atom_generate: projection stayed degenerate after 100 draws");
}

CombinationResult atomic_combine(const AtomicCombination& c) {
  if (c.atoms.empty()) throw DomainError("atomic_combine: empty combination");
  if (c.atoms.size() != c.coefficients.size()) throw DomainError("atomic_combine: one coefficient per atom");
  const int n = c.atoms.front().seq.dim();
  Box cover = c.atoms.front().seq.box();
  for (const auto& a : c.atoms) {
    if (a.seq.dim() != n) throw DomainError("atomic_combine: mixed dimensions");
    if (a.p != c.p) throw DomainError("atomic_combine: mixed p");
    cover = covering_box(cover, a.seq.box());
  }
  std::vector<double> vals(cover.volume(), 0.0);
  double mass = 0.0;
  for (std::size_t k = 0; k < c.atoms.size(); ++k) {
    const LatticeSeq& a = c.atoms[k].seq;
    const double lambda = c.coefficients[k];
    for (std::size_t f = 0; f < a.size(); ++f) vals[cover.flat_index(a.box().point_at(f))] += lambda * a[f];
    mass += std::pow(std::fabs(lambda), c.p);
  }
  return CombinationResult{LatticeSeq(cover, std::move(vals)), mass};
}

nlohmann::ordered_json atom_to_json(const Atom& a) {
  auto j = seq_to_json(a.seq);
  j["p"] = a.p;
  j["cube_center"] = a.cube.center;
  j["cube_radius"] = a.cube.radius;
  const auto report = atom_validate(a.seq, a.cube, a.p, 0.0);
  auto residuals = nlohmann::ordered_json::array();
  for (const auto& m : report.moments) {
    residuals.push_back({{"beta", m.beta.components}, {"value", m.value}, {"relative", m.relative}});
  }
  j["moment_residuals"] = std::move(residuals);
  return j;
}

Atom atom_from_json(const nlohmann::json& j, double default_p) {
  Atom a;
  a.seq = seq_from_json(j);
  a.p = default_p;
  if (j.contains("p")) {
    if (!j["p"].is_number()) throw FormatError("atom: \"p\" must be a number");
    a.p = j["p"].get<double>();
  }
  const int n = a.seq.dim();
  if (j.contains("cube_center") || j.contains("cube_radius")) {
    if (!j.contains("cube_center") || !j.contains("cube_radius") || !j["cube_center"].is_array() ||
        !j["cube_radius"].is_number_integer()) {
      throw FormatError("atom: \"cube_center\" and \"cube_radius\" must both be present");
    }
    Point center;
    for (const auto& e : j["cube_center"]) {
      if (!e.is_number_integer()) throw FormatError("atom: \"cube_center\" must hold integers");
      center.push_back(e.get<std::int64_t>());
    }
    if (static_cast<int>(center.size()) != n) throw FormatError("atom: \"cube_center\" length must equal n");
    try {
      a.cube = DiscreteCube(std::move(center), j["cube_radius"].get<std::int64_t>());
    } catch (const DomainError& e) {
      throw FormatError(std::string("atom: ") + e.what());
    }
  } else {
    std::int64_t extent = 1;
    for (auto s : a.seq.shape()) extent = std::max(extent, s);
    const std::int64_t radius = extent / 2;
    Point center(a.seq.origin());
    for (auto& c : center) c += radius;
    a.cube = DiscreteCube(std::move(center), radius);
  }
  check_p(a.p);
  a.moment_order = moment_order(a.p, n);
  return a;
}

}  // namespace dhl
