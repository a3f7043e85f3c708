#include "dhl/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dhl/fft.hpp"
#include "dhl/operators.hpp"
#include "dhl/parallel.hpp"

namespace dhl {

double bump_psi(double r) {
  const double s = 1.0 - r * r;
  return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

BumpProfile::BumpProfile(int n) : n_(n) {
  if (n < 1) throw DomainError("BumpProfile: dimension must be positive");
  auto radial = [n](double r) { return std::pow(r, n - 1) * bump_psi(r); };
  double err = 0.0;
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(radial, 0.0, 1.0, 20, 1e-14, &err);
  const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
  // int Phi = c * 4^-n * |S^{n-1}| * int_0^1 r^{n-1} psi(r) dr.
  c_ = std::pow(4.0, n) / (sphere * integral);
  sup_ = c_ * std::exp(-1.0);
}

double BumpProfile::value_sq(double r2) const {
  const double s = 1.0 - 16.0 * r2;
  return s > 0.0 ? c_ * std::exp(-1.0 / s) : 0.0;
}

double BumpProfile::operator()(std::span<const double> x) const {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return value_sq(r2);
}

namespace {

// t^-n Phi(v / t) from the exact integer |v|^2, evaluated as
// exp(-t^2 / (t^2 - 16 |v|^2)) to avoid cancellation near the rim.
double scaled_bump(const BumpProfile& profile, double t, std::int64_t r2) {
  if (r2 == 0) return 0.0;
  const double tt = t * t;
  const double gap = tt - 16.0 * static_cast<double>(r2);
  if (!(gap > 0.0)) return 0.0;
  return std::pow(t, -profile.dim()) * profile.normalization() * std::exp(-tt / gap);
}

// Largest h with h < t / 4.
std::int64_t support_halfwidth(double t) {
  const double q = t / 4.0;
  auto h = static_cast<std::int64_t>(std::ceil(q)) - 1;
  return std::max<std::int64_t>(h, 0);
}

}  // namespace

LatticeSeq bump_discretize(const BumpProfile& profile, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("bump_discretize: t must be positive");
  const int n = profile.dim();
  const std::int64_t h = support_halfwidth(t);
  const Box box(Point(static_cast<std::size_t>(n), -h), Point(static_cast<std::size_t>(n), 2 * h + 1));
  std::vector<double> vals(box.volume());
  for (std::size_t k = 0; k < vals.size(); ++k) vals[k] = scaled_bump(profile, t, squared_norm(box.point_at(k)));
  return LatticeSeq(box, std::move(vals));
}

void TGrid::validate() const {
  if (!(growth > 1.0) || !std::isfinite(growth)) throw DomainError("TGrid: growth factor must be > 1");
  if (t_cap && std::isnan(*t_cap)) throw DomainError("TGrid: t_cap is NaN");
}

TGrid TGrid::refined() const {
  TGrid g = *this;
  g.growth = std::sqrt(growth);
  return g;
}

std::optional<Box> support_box(const LatticeSeq& b) {
  const int n = b.dim();
  Point lo(static_cast<std::size_t>(n), 0), hi(static_cast<std::size_t>(n), 0);
  bool any = false;
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (b[k] == 0.0) continue;
    const Point p = b.box().point_at(k);
    for (int l = 0; l < n; ++l) {
      lo[l] = any ? std::min(lo[l], p[l]) : p[l];
      hi[l] = any ? std::max(hi[l], p[l]) : p[l];
    }
    any = true;
  }
  if (!any) return std::nullopt;
  Point shape(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) shape[l] = hi[l] - lo[l] + 1;
  return Box(std::move(lo), std::move(shape));
}

namespace {

double default_t_cap(const LatticeSeq& b) {
  const auto sb = support_box(b);
  if (!sb) return 4.0;
  std::int64_t diam = 0;
  for (auto s : sb->shape) diam = std::max(diam, s - 1);
  return 64.0 * static_cast<double>(diam + 1);
}

// Odometer over the rows of a box: calls row(first_index_tuple) for every
// combination of the leading n-1 coordinates within [lo, hi].
template <class Fn>
void for_each_row(const Point& lo, const Point& hi, Fn&& row) {
  const std::size_t n = lo.size();
  Point idx(lo);
  while (true) {
    row(idx);
    if (n == 1) return;
    std::size_t l = n - 1;
    while (l-- > 0) {
      if (++idx[l] <= hi[l]) break;
      idx[l] = lo[l];
      if (l == 0) return;
    }
  }
}

// Shared state for a batch of inputs with a common shape S and a common
// output placement [u0, u0 + T) relative to the input origin.
class GrandMaximalEngine {
 public:
  GrandMaximalEngine(std::span<const LatticeSeq> inputs, const BumpProfile& profile, const Point& u0, const Point& T,
                     const TGrid& grid)
      : inputs_(inputs), profile_(profile), n_(inputs.front().dim()), S_(inputs.front().shape()), u0_(u0), T_(T),
        grid_(grid) {
    out_volume_ = 1;
    for (auto t : T_) out_volume_ *= static_cast<std::size_t>(t);
    in_strides_ = strides_of(S_);
    out_strides_ = strides_of(T_);
  }

  std::vector<LatticeSeq> run(std::span<const Box> out_boxes, std::vector<GrandMaximalStats>* stats_out) {
    const std::size_t count = inputs_.size();
    std::vector<std::vector<double>> running(count, std::vector<double>(out_volume_, 0.0));
    std::vector<GrandMaximalStats> stats(count);
    std::vector<double> l1(count), envelope(count);
    std::vector<double> floor(count, 0.0);
    std::vector<bool> done(count, false);
    spectra_.assign(count, Spectrum());
    for (std::size_t k = 0; k < count; ++k) {
      stats[k].t_cap = grid_.t_cap ? *grid_.t_cap : default_t_cap(inputs_[k]);
      l1[k] = lp_norm(inputs_[k], 1.0);
      envelope[k] = profile_.sup_norm() * l1[k];
      if (stats[k].t_cap < 4.0) {
        stats[k].trivial = true;
        done[k] = true;
      } else if (4.0 * grid_.growth > stats[k].t_cap) {
        throw DomainError("grand_maximal: the t-grid has no point in (4, t_cap]");
      } else if (l1[k] == 0.0) {
        done[k] = true;
      }
    }

    for (int step = 1;; ++step) {
      const double t = 4.0 * std::pow(grid_.growth, step);
      std::vector<std::size_t> active;
      for (std::size_t k = 0; k < count; ++k) {
        if (done[k]) continue;
        if (t > stats[k].t_cap) {
          done[k] = true;
          continue;
        }
        if (grid_.envelope_stop && std::pow(t, -n_) * envelope[k] < floor[k]) {
          stats[k].stopped_by_envelope = true;
          done[k] = true;
          continue;
        }
        active.push_back(k);
      }
      if (active.empty()) break;
      evaluate(t, active, running);
      for (std::size_t k : active) {
        stats[k].t_last = t;
        ++stats[k].steps;
        floor[k] = *std::min_element(running[k].begin(), running[k].end());
      }
    }

    std::vector<LatticeSeq> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.emplace_back(out_boxes[k], std::move(running[k]));
    if (stats_out) *stats_out = std::move(stats);
    return out;
  }

 private:
  struct KernelPoint {
    Point v;
    double w;
  };

  void evaluate(double t, const std::vector<std::size_t>& active, std::vector<std::vector<double>>& running) {
    const std::int64_t h = support_halfwidth(t);
    Point vlo(static_cast<std::size_t>(n_)), vhi(static_cast<std::size_t>(n_));
    Point ulo(static_cast<std::size_t>(n_)), uhi(static_cast<std::size_t>(n_));
    for (int l = 0; l < n_; ++l) {
      vlo[l] = std::max(-h, u0_[l] - (S_[l] - 1));
      vhi[l] = std::min(h, u0_[l] + T_[l] - 1);
      ulo[l] = std::max(u0_[l], vlo[l]);
      uhi[l] = std::min(u0_[l] + T_[l] - 1, S_[l] - 1 + vhi[l]);
      // No offset pairs an input point with an output point.
      if (vlo[l] > vhi[l] || ulo[l] > uhi[l]) return;
    }

    std::vector<KernelPoint> kernel;
    const Box vbox(vlo, [&] {
      Point s(static_cast<std::size_t>(n_));
      for (int l = 0; l < n_; ++l) s[l] = vhi[l] - vlo[l] + 1;
      return s;
    }());
    for (std::size_t f = 0; f < vbox.volume(); ++f) {
      Point v = vbox.point_at(f);
      const double w = scaled_bump(profile_, t, squared_norm(v));
      if (w != 0.0) kernel.push_back({std::move(v), w});
    }
    if (kernel.empty()) return;

    // Padding that keeps wrapped terms off the read window [ulo, uhi].
    Point need(static_cast<std::size_t>(n_));
    double overlap = 1.0;
    for (int l = 0; l < n_; ++l) {
      need[l] = std::max(S_[l] - 1 + vhi[l] - ulo[l], uhi[l] - vlo[l]) + 1;
      overlap *= static_cast<double>(std::min(S_[l], T_[l]));
    }
    const double direct_cost = static_cast<double>(kernel.size()) * overlap;
    Point padded = choose_padding(need);
    double pvol = 1.0;
    for (auto p : padded) pvol *= static_cast<double>(p);
    const double fft_cost = kFftCostFactor * pvol * std::log2(std::max(pvol, 2.0));

    if (direct_cost <= fft_cost) {
      parallel_for(active.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t a = b; a < e; ++a) direct_step(inputs_[active[a]], kernel, running[active[a]]);
      }, 1);
      return;
    }
    fft_step(padded, kernel, ulo, uhi, active, running);
  }

  Point choose_padding(const Point& need) {
    if (fft_) {
      bool fits = true;
      for (int l = 0; l < n_; ++l) fits = fits && fft_->shape()[l] >= need[l];
      if (fits) return fft_->shape();
    }
    // S + T - 1 suffices for every t; grow ahead of the current need so the
    // padding, and with it the input spectra, changes only a few times.
    Point p(static_cast<std::size_t>(n_));
    for (int l = 0; l < n_; ++l) {
      const std::int64_t sat = S_[l] + T_[l] - 1;
      const std::int64_t ahead = static_cast<std::int64_t>(std::ceil(1.25 * static_cast<double>(need[l])));
      p[l] = next_smooth_size(std::max(need[l], std::min(sat, ahead)));
    }
    return p;
  }

  void direct_step(const LatticeSeq& in, const std::vector<KernelPoint>& kernel, std::vector<double>& running) const {
    std::vector<double> acc(out_volume_, 0.0);
    const auto vals = in.values();
    Point jlo(static_cast<std::size_t>(n_)), jhi(static_cast<std::size_t>(n_));
    for (const auto& kp : kernel) {
      bool empty = false;
      for (int l = 0; l < n_; ++l) {
        jlo[l] = std::max(u0_[l], kp.v[l]);
        jhi[l] = std::min(u0_[l] + T_[l] - 1, S_[l] - 1 + kp.v[l]);
        if (jlo[l] > jhi[l]) empty = true;
      }
      if (empty) continue;
      const std::size_t last = static_cast<std::size_t>(n_ - 1);
      const auto run = static_cast<std::size_t>(jhi[last] - jlo[last] + 1);
      for_each_row(jlo, jhi, [&](const Point& j) {
        std::size_t oi = 0, ii = 0;
        for (std::size_t l = 0; l < last; ++l) {
          oi += static_cast<std::size_t>(j[l] - u0_[l]) * out_strides_[l];
          ii += static_cast<std::size_t>(j[l] - kp.v[l]) * in_strides_[l];
        }
        oi += static_cast<std::size_t>(jlo[last] - u0_[last]);
        ii += static_cast<std::size_t>(jlo[last] - kp.v[last]);
        double* o = acc.data() + oi;
        const double* x = vals.data() + ii;
        const double w = kp.w;
        for (std::size_t c = 0; c < run; ++c) o[c] += w * x[c];
      });
    }
    for (std::size_t k = 0; k < out_volume_; ++k) running[k] = std::max(running[k], std::fabs(acc[k]));
  }

  void fft_step(const Point& padded, const std::vector<KernelPoint>& kernel, const Point& ulo, const Point& uhi,
                const std::vector<std::size_t>& active, std::vector<std::vector<double>>& running) {
    if (!fft_ || fft_->shape() != padded) {
      fft_ = std::make_unique<RealFft>(padded);
      for (auto& s : spectra_) s = Spectrum();
    }
    const RealFft& fft = *fft_;
    const auto& ps = fft.strides();

    RealBuffer kbuf = fft.make_real();
    for (const auto& kp : kernel) {
      std::size_t off = 0;
      for (int l = 0; l < n_; ++l) {
        const std::int64_t w = ((kp.v[l] % padded[l]) + padded[l]) % padded[l];
        off += static_cast<std::size_t>(w) * ps[l];
      }
      kbuf[off] = kp.w;
    }
    const Spectrum kspec = fft.forward(kbuf);
    const double inv = 1.0 / static_cast<double>(fft.volume());
    const std::size_t last = static_cast<std::size_t>(n_ - 1);

    parallel_for(active.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t a = b; a < e; ++a) {
        const std::size_t k = active[a];
        if (spectra_[k].empty()) {
          RealBuffer in = fft.make_real();
          const auto vals = inputs_[k].values();
          const auto run = static_cast<std::size_t>(S_[last]);
          Point lo(static_cast<std::size_t>(n_), 0), hi(S_);
          for (auto& x : hi) x -= 1;
          for_each_row(lo, hi, [&](const Point& s) {
            std::size_t src = 0, dst = 0;
            for (std::size_t l = 0; l < last; ++l) {
              src += static_cast<std::size_t>(s[l]) * in_strides_[l];
              dst += static_cast<std::size_t>(s[l]) * ps[l];
            }
            std::copy_n(vals.data() + src, run, in.data() + dst);
          });
          spectra_[k] = fft.forward(in);
        }
        Spectrum prod(fft.spectrum_size());
        const Spectrum& x = spectra_[k];
        for (std::size_t f = 0; f < prod.size(); ++f) prod[f] = x[f] * kspec[f];
        const RealBuffer conv = fft.inverse(prod);

        // Read u from circular index u mod P. Outputs outside [ulo, uhi]
        // receive no kernel mass at this t and their slots alias other
        // positions, so they are skipped.
        std::vector<double>& r = running[k];
        for_each_row(ulo, uhi, [&](const Point& u) {
          std::size_t oi = 0, ci = 0;
          for (std::size_t l = 0; l < last; ++l) {
            oi += static_cast<std::size_t>(u[l] - u0_[l]) * out_strides_[l];
            const std::int64_t w = ((u[l] % padded[l]) + padded[l]) % padded[l];
            ci += static_cast<std::size_t>(w) * ps[l];
          }
          for (std::int64_t ul = ulo[last]; ul <= uhi[last]; ++ul) {
            const std::int64_t w = ((ul % padded[last]) + padded[last]) % padded[last];
            const double v = std::fabs(conv[ci + static_cast<std::size_t>(w)] * inv);
            double& slot = r[oi + static_cast<std::size_t>(ul - u0_[last])];
            slot = std::max(slot, v);
          }
        });
      }
    }, 1);
  }

  // Relative weight of one FFT element operation against one direct
  // multiply-add.
  static constexpr double kFftCostFactor = 1.5;

  std::span<const LatticeSeq> inputs_;
  const BumpProfile& profile_;
  int n_;
  Point S_, u0_, T_;
  TGrid grid_;
  std::size_t out_volume_ = 0;
  std::vector<std::size_t> in_strides_, out_strides_;
  std::unique_ptr<RealFft> fft_;
  std::vector<Spectrum> spectra_;
};

}  // namespace

std::vector<LatticeSeq> grand_maximal_batch(std::span<const LatticeSeq> inputs, const BumpProfile& profile,
                                            std::span<const Box> out_boxes, const TGrid& grid,
                                            std::vector<GrandMaximalStats>* stats) {
  grid.validate();
  if (inputs.empty()) return {};
  if (inputs.size() != out_boxes.size()) throw DomainError("grand_maximal_batch: one output box per input");
  const int n = inputs.front().dim();
  if (n != profile.dim()) throw DomainError("grand_maximal: profile dimension mismatch");
  Point u0(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) u0[l] = out_boxes[0].origin[l] - inputs[0].origin()[l];
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    if (inputs[k].dim() != n || out_boxes[k].dim() != n) throw DomainError("grand_maximal: dimension mismatch");
    if (inputs[k].shape() != inputs[0].shape() || out_boxes[k].shape != out_boxes[0].shape) {
      throw DomainError("grand_maximal_batch: inputs must share one shape");
    }
    for (int l = 0; l < n; ++l) {
      if (out_boxes[k].origin[l] - inputs[k].origin()[l] != u0[l]) {
        throw DomainError("grand_maximal_batch: outputs must share one placement");
      }
    }
  }
  GrandMaximalEngine engine(inputs, profile, u0, out_boxes[0].shape, grid);
  return engine.run(out_boxes, stats);
}

LatticeSeq grand_maximal(const LatticeSeq& b, const BumpProfile& profile, const Box& out_box, const TGrid& grid,
                         GrandMaximalStats* stats) {
  std::vector<GrandMaximalStats> s;
  auto out = grand_maximal_batch(std::span<const LatticeSeq>(&b, 1), profile, std::span<const Box>(&out_box, 1),
                                 grid, stats ? &s : nullptr);
  if (stats) *stats = s.front();
  return std::move(out.front());
}

namespace {

void check_p(double p) {
  if (!(p > 0.0)) throw DomainError("hardy_norm: p must be positive");
}

void check_dilation(double d) {
  if (!(d >= 1.0) || !std::isfinite(d)) throw DomainError("hardy_norm: dilation D must be >= 1");
}

HardyEstimate zero_estimate(const LatticeSeq& b, double p, double dilation) {
  HardyEstimate e;
  e.p = p;
  e.dilation = dilation;
  e.box = b.box();
  e.tail_diagnostic = 0.0;
  return e;
}

double relative_change(double wide, double base) { return base == 0.0 ? 0.0 : std::fabs(wide - base) / base; }

}  // namespace

namespace {

// Box each input is measured on, or nullopt for the zero sequence.
std::optional<Box> base_box(const LatticeSeq& b, const HardyConfig& cfg) {
  const auto sb = support_box(b);
  if (!sb) return std::nullopt;
  return cfg.use_stored_box ? b.box() : *sb;
}

TGrid capped_grid(const TGrid& grid, const Point& shape) {
  TGrid g = grid;
  if (!g.t_cap) {
    std::int64_t diam = 0;
    for (auto s : shape) diam = std::max(diam, s - 1);
    g.t_cap = 64.0 * static_cast<double>(diam + 1);
  }
  return g;
}

void attach_tails(std::vector<HardyEstimate>& base, const std::vector<HardyEstimate>& far) {
  for (std::size_t k = 0; k < base.size(); ++k) base[k].tail_diagnostic = relative_change(far[k].value, base[k].value);
}

}  // namespace

std::vector<HardyEstimate> hardy_norm_batch(std::span<const LatticeSeq> inputs, double p, const BumpProfile& profile,
                                            const HardyConfig& cfg) {
  check_p(p);
  check_dilation(cfg.dilation);
  std::vector<HardyEstimate> out(inputs.size());
  std::map<Point, std::vector<std::size_t>> groups;
  std::vector<LatticeSeq> trimmed(inputs.size());
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const auto bb = base_box(inputs[k], cfg);
    if (!bb) {
      out[k] = zero_estimate(inputs[k], p, cfg.dilation);
      continue;
    }
    trimmed[k] = restrict_to(inputs[k], *bb);
    groups[bb->shape].push_back(k);
  }
  for (const auto& [shape, members] : groups) {
    std::vector<LatticeSeq> group;
    std::vector<Box> boxes;
    for (std::size_t k : members) {
      group.push_back(trimmed[k]);
      boxes.push_back(dilate_box(trimmed[k].box(), cfg.dilation));
    }
    const auto gm = grand_maximal_batch(group, profile, boxes, cfg.grid);
    for (std::size_t a = 0; a < members.size(); ++a) {
      HardyEstimate& e = out[members[a]];
      e.p = p;
      e.dilation = cfg.dilation;
      e.box = boxes[a];
      e.lp_term = lp_norm(group[a], p);
      e.maximal_term = lp_norm(gm[a], p);
      e.value = e.lp_term + e.maximal_term;
      e.tail_diagnostic = std::nan("");
    }
  }
  if (cfg.compute_tail) {
    HardyConfig wide = cfg;
    wide.dilation = 2.0 * cfg.dilation;
    wide.compute_tail = false;
    attach_tails(out, hardy_norm_batch(inputs, p, profile, wide));
  }
  return out;
}

HardyEstimate hardy_norm(const LatticeSeq& b, double p, const BumpProfile& profile, const HardyConfig& cfg) {
  return hardy_norm_batch(std::span<const LatticeSeq>(&b, 1), p, profile, cfg).front();
}

std::vector<PotentialFields> potential_fields_batch(std::span<const LatticeSeq> inputs, double alpha,
                                                    const BumpProfile& profile, double dilation, const TGrid& grid) {
  check_dilation(dilation);
  std::vector<PotentialFields> out;
  if (inputs.empty()) return out;
  std::vector<LatticeSeq> potentials;
  std::vector<Box> boxes;
  for (const auto& a : inputs) {
    if (a.shape() != inputs.front().shape()) throw DomainError("potential_fields_batch: inputs must share one shape");
    boxes.push_back(dilate_box(a.box(), dilation));
    potentials.push_back(riesz_apply(a, alpha, boxes.back(), RieszMethod::fft));
  }
  auto gm = grand_maximal_batch(potentials, profile, boxes, capped_grid(grid, inputs.front().shape()));
  for (std::size_t k = 0; k < inputs.size(); ++k) out.push_back({std::move(potentials[k]), std::move(gm[k])});
  return out;
}

std::vector<HardyEstimate> potential_hardy_norm_batch(std::span<const LatticeSeq> atoms, double alpha, double q,
                                                      const BumpProfile& profile, const HardyConfig& cfg) {
  check_p(q);
  check_dilation(cfg.dilation);
  std::vector<HardyEstimate> out(atoms.size());
  // Group nonzero inputs by measured shape so each group runs as one batch.
  std::map<Point, std::vector<std::size_t>> groups;
  std::vector<LatticeSeq> trimmed(atoms.size());
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const auto bb = base_box(atoms[k], cfg);
    if (!bb) {
      out[k] = zero_estimate(atoms[k], q, cfg.dilation);
      continue;
    }
    trimmed[k] = restrict_to(atoms[k], *bb);
    groups[bb->shape].push_back(k);
  }
  for (const auto& [shape, members] : groups) {
    std::vector<LatticeSeq> group;
    for (std::size_t k : members) group.push_back(trimmed[k]);
    const auto fields = potential_fields_batch(group, alpha, profile, cfg.dilation, cfg.grid);
    for (std::size_t a = 0; a < members.size(); ++a) {
      HardyEstimate& e = out[members[a]];
      e.p = q;
      e.dilation = cfg.dilation;
      e.box = fields[a].potential.box();
      e.lp_term = lp_norm(fields[a].potential, q);
      e.maximal_term = lp_norm(fields[a].maximal, q);
      e.value = e.lp_term + e.maximal_term;
      e.tail_diagnostic = std::nan("");
    }
  }
  if (cfg.compute_tail) {
    HardyConfig wide = cfg;
    wide.dilation = 2.0 * cfg.dilation;
    wide.compute_tail = false;
    attach_tails(out, potential_hardy_norm_batch(atoms, alpha, q, profile, wide));
  }
  return out;
}

HardyEstimate potential_hardy_norm(const LatticeSeq& a, double alpha, double q, const BumpProfile& profile,
                                   const HardyConfig& cfg) {
  return potential_hardy_norm_batch(std::span<const LatticeSeq>(&a, 1), alpha, q, profile, cfg).front();
}

nlohmann::ordered_json to_json(const HardyEstimate& e) {
  nlohmann::ordered_json j;
  j["value"] = e.value;
  j["p"] = e.p;
  j["D"] = e.dilation;
  j["box"] = {{"origin", e.box.origin}, {"shape", e.box.shape}};
  j["lp_term"] = e.lp_term;
  j["maximal_term"] = e.maximal_term;
  if (std::isnan(e.tail_diagnostic)) {
    j["tail_diagnostic"] = nullptr;
  } else {
    j["tail_diagnostic"] = e.tail_diagnostic;
  }
  return j;
}

}  // namespace dhl
