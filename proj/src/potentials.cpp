#include "twodisk/potentials.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <list>
#include <unordered_map>

namespace twodisk {

namespace {

constexpr unsigned kH = 1, kHG = 2, kG = 4, kGG = 8;

struct Sample {
  double h{0.0}, g{0.0};
  Vec2 hg, gg;
  unsigned mask{0};
};

struct ValGrad {
  double v{0.0};
  Vec2 g;
  ValGrad& operator+=(const ValGrad& o) {
    v += o.v;
    g += o.g;
    return *this;
  }
  double norm() const { return std::abs(v) + g.norm(); }
};

RegionTag tag_of(int j) { return static_cast<RegionTag>(j); }

/// Quadrature tables for one region's source data: a three-level disk rule
/// with cached data values, a quadtree fallback when a matrix-region support
/// straddles the inclusions, and a polar rule centered at the target for
/// near-singular and interior evaluations. Interior gradient evaluations are
/// principal values; the polar rule's equispaced angular sums cancel the
/// divergent part exactly and the local jump -pi*f(X) is added explicitly.
class RegionIntegrator {
 public:
  struct Node {
    Vec2 y;
    double w;
    Vec2 f;
    double f3;
  };

  RegionIntegrator(int j, const TwoDiskConfig& cfg, const RegionSource& rs,
                   const QuadratureGrid& grid)
      : j_(j), cfg_(cfg), rs_(rs), grid_(grid) {
    grid.validate();
    if (!(rs_.has_f || rs_.has_f3))
      throw Error(Status::invalid_argument, "region has no source data");
    if (j_ == 0) {
      domain_ = rs_.support;
      for (int i = 1; i <= 2; ++i) {
        Disk d = cfg_.disk(i);
        double dist = (domain_.center - d.center).norm();
        if (dist < domain_.radius + d.radius) straddle_ = true;
      }
    } else {
      Disk d = cfg_.disk(j_);
      double dist = (rs_.support.center - d.center).norm();
      domain_ = (dist + rs_.support.radius <= d.radius) ? rs_.support : d;
    }
    if (straddle_) {
      tree_ = fill(quadtree_region0_rule(domain_, cfg_.disk(1), cfg_.disk(2), grid_.cell_gauss,
                                         grid_.max_depth));
    } else {
      level_[0] = fill(disk_rule(domain_, grid_.n_r, grid_.n_theta));
      level_[1] = fill(disk_rule(domain_, std::max(8, grid_.n_r / 2), grid_.n_theta / 2));
      level_[2] = fill(disk_rule(domain_, std::max(8, grid_.n_r / 4), grid_.n_theta / 4));
    }
    const auto& base = straddle_ ? tree_ : level_[0];
    for (const Node& n : base) {
      f3_total_ += n.w * n.f3;
      f_total_ += n.w * n.f;
    }
    cutoff_ = 2.0 * std::max(domain_.radius / grid_.n_r,
                             2.0 * M_PI * domain_.radius / grid_.n_theta);
    calibrate();
  }

  bool has_f() const { return rs_.has_f; }
  bool has_f3() const { return rs_.has_f3; }
  double f3_integral() const { return f3_total_; }
  Vec2 f_integral() const { return f_total_; }
  double quad_error() const { return quad_err_; }
  const Disk& domain() const { return domain_; }

  Vec2 data_f(Vec2 p) const { return rs_.has_f ? rs_.f(p) : Vec2{}; }

  Sample evaluate(Vec2 X, unsigned mask) const {
    Sample s;
    s.mask = mask;
    double sd = (X - domain_.center).norm() - domain_.radius;
    if (sd < cutoff_) {
      auto nodes = fill(polar_rule_at(X, domain_, grid_.near_n_r, grid_.near_n_theta),
                        /*mask_region=*/straddle_);
      kernels(X, nodes, mask, s);
    } else if (straddle_) {
      kernels(X, tree_, mask, s);
    } else {
      int lev = sd < grid_.mid_dist * domain_.radius ? 0
                : sd < grid_.far_dist * domain_.radius ? 1
                                                       : 2;
      kernels(X, level_[lev], mask, s);
    }
    if ((mask & kHG) && rs_.has_f && static_cast<int>(cfg_.classify(X, 0.0).tag) == j_)
      s.hg -= M_PI * rs_.f(X);
    return s;
  }

  double center_reg_value(Vec2 X, Complex ci, double ri) const {
    Complex t = std::conj(X.cplx() - ci) / (ri * ri);
    double s = 0.0;
    for (const Node& n : level_[0]) {
      if (n.f3 == 0.0) continue;
      double q = std::abs(1.0 + (ci - n.y.cplx()) * t);
      if (q == 0.0) throw Error(Status::singular_evaluation, "regrouping kernel vanished");
      s += n.w * n.f3 * std::log(q);
    }
    return s;
  }

  Vec2 center_reg_gradient(Vec2 X, Complex ci, double ri) const {
    Complex t = std::conj(X.cplx() - ci) / (ri * ri);
    Complex acc{0.0, 0.0};
    for (const Node& n : level_[0]) {
      if (n.f3 == 0.0) continue;
      Complex B = (ci - n.y.cplx()) / (ri * ri);
      Complex q = 1.0 + (ci - n.y.cplx()) * t;
      if (std::abs(q) == 0.0)
        throw Error(Status::singular_evaluation, "regrouping kernel vanished");
      acc += n.w * n.f3 * (B / q);
    }
    return Vec2(acc);
  }

 private:
  std::vector<Node> fill(const std::vector<QuadNode>& raw, bool mask_region = false) const {
    std::vector<Node> out;
    out.reserve(raw.size());
    for (const QuadNode& q : raw) {
      if (mask_region && static_cast<int>(cfg_.classify(q.y, 0.0).tag) != j_) continue;
      Node n;
      n.y = q.y;
      n.w = q.w;
      n.f = rs_.has_f ? rs_.f(q.y) : Vec2{};
      n.f3 = rs_.has_f3 ? rs_.f3(q.y) : 0.0;
      out.push_back(n);
    }
    return out;
  }

  void kernels(Vec2 X, const std::vector<Node>& nodes, unsigned mask, Sample& s) const {
    double h = 0.0, g = 0.0;
    double hgx = 0.0, hgy = 0.0, ggx = 0.0, ggy = 0.0;
    const bool wh = mask & kH, whg = mask & kHG, wg = mask & kG, wgg = mask & kGG;
    for (const Node& n : nodes) {
      double ux = n.y.x - X.x, uy = n.y.y - X.y;
      double r2 = ux * ux + uy * uy;
      if (r2 == 0.0) continue;
      if (wh || whg) {
        double uf = ux * n.f.x + uy * n.f.y;
        if (wh) h += n.w * uf / r2;
        if (whg) {
          double inv4 = 1.0 / (r2 * r2);
          hgx += n.w * (2.0 * ux * uf - n.f.x * r2) * inv4;
          hgy += n.w * (2.0 * uy * uf - n.f.y * r2) * inv4;
        }
      }
      if ((wg || wgg) && n.f3 != 0.0) {
        if (wg) g += n.w * n.f3 * 0.5 * std::log(r2);
        if (wgg) {
          double c = n.w * n.f3 / r2;
          ggx -= c * ux;
          ggy -= c * uy;
        }
      }
    }
    if (wh) s.h = h;
    if (whg) s.hg = {hgx, hgy};
    if (wg) s.g = g;
    if (wgg) s.gg = {ggx, ggy};
  }

  void calibrate() {
    quad_err_ = 0.0;
    unsigned mask = (rs_.has_f ? (kH | kHG) : 0u) | (rs_.has_f3 ? (kG | kGG) : 0u);
    auto diff = [&](const Sample& a, const Sample& b) {
      double e = 0.0;
      if (rs_.has_f) e = std::max({e, std::abs(a.h - b.h), (a.hg - b.hg).norm()});
      if (rs_.has_f3) e = std::max({e, std::abs(a.g - b.g), (a.gg - b.gg).norm()});
      return e;
    };
    Vec2 far = domain_.center + Vec2{2.2 * domain_.radius, 0.7 * domain_.radius};
    Sample s0;
    s0.mask = mask;
    if (straddle_) {
      kernels(far, tree_, mask, s0);
      auto ref = fill(polar_rule_at(far, domain_, std::min(64, 2 * grid_.near_n_r),
                                    2 * grid_.near_n_theta),
                      true);
      Sample s1;
      kernels(far, ref, mask, s1);
      quad_err_ = diff(s0, s1);
      return;
    }
    kernels(far, level_[0], mask, s0);
    auto ref = fill(disk_rule(domain_, std::min(64, 2 * grid_.n_r), 2 * grid_.n_theta));
    Sample s1;
    kernels(far, ref, mask, s1);
    quad_err_ = diff(s0, s1);

    Vec2 nearp = domain_.center + Vec2{0.45 * domain_.radius, 0.15 * domain_.radius};
    auto p0 = fill(polar_rule_at(nearp, domain_, grid_.near_n_r, grid_.near_n_theta));
    auto p1 = fill(polar_rule_at(nearp, domain_, std::min(64, 2 * grid_.near_n_r),
                                 2 * grid_.near_n_theta));
    Sample n0, n1;
    kernels(nearp, p0, mask, n0);
    kernels(nearp, p1, mask, n1);
    quad_err_ = std::max(quad_err_, diff(n0, n1));
  }

  int j_;
  TwoDiskConfig cfg_;
  RegionSource rs_;
  QuadratureGrid grid_;
  Disk domain_;
  bool straddle_{false};
  std::vector<Node> level_[3];
  std::vector<Node> tree_;
  double cutoff_{0.0};
  double f3_total_{0.0};
  Vec2 f_total_;
  double quad_err_{0.0};
};

struct CacheKey {
  int j;
  std::uint64_t xb, yb;
  bool operator==(const CacheKey& o) const { return j == o.j && xb == o.xb && yb == o.yb; }
};

struct CacheKeyHash {
  size_t operator()(const CacheKey& k) const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
      h ^= v;
      h *= 1099511628211ull;
    };
    mix(static_cast<std::uint64_t>(k.j));
    mix(k.xb);
    mix(k.yb);
    return static_cast<size_t>(h);
  }
};

class SampleCache {
 public:
  explicit SampleCache(size_t cap = 100000) : cap_(cap) {}

  Sample* find(const CacheKey& k) {
    auto it = map_.find(k);
    if (it == map_.end()) return nullptr;
    lru_.splice(lru_.begin(), lru_, it->second);
    return &it->second->second;
  }

  void put(const CacheKey& k, const Sample& s) {
    auto it = map_.find(k);
    if (it != map_.end()) {
      it->second->second = s;
      lru_.splice(lru_.begin(), lru_, it->second);
      return;
    }
    lru_.emplace_front(k, s);
    map_[k] = lru_.begin();
    if (map_.size() > cap_) {
      map_.erase(lru_.back().first);
      lru_.pop_back();
    }
  }

 private:
  size_t cap_;
  std::list<std::pair<CacheKey, Sample>> lru_;
  std::unordered_map<CacheKey, std::list<std::pair<CacheKey, Sample>>::iterator, CacheKeyHash>
      map_;
};

std::uint64_t bits_of(double v) {
  std::uint64_t b;
  std::memcpy(&b, &v, sizeof b);
  return b;
}

}  // namespace

struct SolutionEvaluator::Impl {
  TwoDiskConfig cfg;
  PiecewiseSource src;
  SeriesPolicy policy;
  QuadratureGrid grid;
  mutable std::optional<RegionIntegrator> integ[3];
  mutable SampleCache cache;

  Impl(const TwoDiskConfig& c, const PiecewiseSource& s, const SeriesPolicy& p,
       const QuadratureGrid& g)
      : cfg(c), src(s), policy(p), grid(g) {
    grid.validate();
    if (!src.empty()) src.check_support(cfg);
  }

  bool active(int j) const { return src.region[j].has_f || src.region[j].has_f3; }

  const RegionIntegrator& integrator(int j) const {
    if (!integ[j]) integ[j].emplace(j, cfg, src.region[j], grid);
    return *integ[j];
  }

  Sample sample(int j, Complex w, unsigned mask) const {
    CacheKey key{j, bits_of(w.real()), bits_of(w.imag())};
    if (Sample* hit = cache.find(key)) {
      if ((hit->mask & mask) == mask) return *hit;
      mask |= hit->mask;
    }
    Sample s = integrator(j).evaluate(Vec2(w), mask);
    cache.put(key, s);
    return s;
  }

  EvalReport run(Vec2 x, std::optional<RegionTag> hint, bool want_v, bool want_g) const;
};

EvalReport SolutionEvaluator::Impl::run(Vec2 x, std::optional<RegionTag> hint, bool want_v,
                                        bool want_g) const {
  EvalReport rep;
  rep.x_region = hint ? Region{*hint, false, 0} : cfg.classify(x);
  if (src.empty()) return rep;
  const RegionTag xr = rep.x_region.tag;
  const Complex xc = x.cplx();
  SeriesWalker walker(cfg, policy);

  double total = 0.0;
  Vec2 gtot;
  double ab_amp = 1.0 / std::max(1.0 - std::abs(cfg.alpha * cfg.beta), 1e-3);

  unsigned mask_f = (want_v ? kH : 0u) | (want_g ? kHG : 0u);
  unsigned mask_g = (want_v ? kG : 0u) | (want_g ? kGG : 0u);

  for (int j = 0; j < 3; ++j) {
    if (!active(j)) continue;
    const RegionIntegrator& ri = integrator(j);
    rep.quad_error += ri.quad_error() * ab_amp;
    AuxBranch br = aux_branch(xr, tag_of(j), cfg);

    if (ri.has_f()) {
      double v = 0.0;
      Vec2 g;
      for (const auto& ct : br.closed) {
        if (ct.map == BaseMap::identity) {
          Sample s = sample(j, xc, mask_f);
          v += ct.coeff * s.h;
          g += ct.coeff * s.hg;
          continue;
        }
        // same-inclusion branch: the inversion sends x near the center to a
        // far-field point of h_j; switch to the analytic limit when the
        // mapped point would overflow the far expansion's accuracy.
        const int i = (ct.map == BaseMap::inv1) ? 1 : 2;
        Disk di = cfg.disk(i);
        Complex tc = xc - di.center.cplx();
        double t = std::abs(tc);
        Complex Fc = ri.f_integral().cplx();
        if (t < 1e-8 * di.radius) {
          double r2 = di.radius * di.radius;
          if (want_v) v += ct.coeff * (-(Fc * std::conj(tc)).real() / r2);
          if (want_g) g += ct.coeff * Vec2(-Fc / r2);
        } else {
          ConjMoebius m = walker.base_map(ct.map);
          Complex w = m.apply(xc);
          Sample s = sample(j, w, mask_f);
          v += ct.coeff * s.h;
          if (want_g) g += ct.coeff * m.pullback_gradient(xc, s.hg);
        }
      }
      SeriesStats stats;
      auto term = [&](double wt, Complex w, const ConjMoebius& iter, const ConjMoebius* tail,
                      Complex tp) -> ValGrad {
        ValGrad r;
        Sample s = sample(j, w, mask_f);
        if (want_v) r.v = wt * s.h;
        if (want_g) {
          Vec2 g1 = iter.pullback_gradient(tp, s.hg);
          r.g = wt * (tail ? tail->pullback_gradient(xc, g1) : g1);
        }
        return r;
      };
      std::function<double(Complex)> limit = [&](Complex fp) {
        return sample(j, fp, kH).h;
      };
      if (want_v && !want_g) {
        v += walker.run<double>(
            br, xc, stats,
            [&](double wt, Complex w, const ConjMoebius&, const ConjMoebius*, Complex) {
              return wt * sample(j, w, kH).h;
            },
            &limit);
      } else {
        ValGrad r = walker.run<ValGrad>(br, xc, stats, term);
        v += r.v;
        g += r.g;
      }
      total -= v;
      gtot -= g;
      rep.terms_used = std::max(rep.terms_used, stats.terms_used);
      rep.tail_estimate += stats.tail_estimate;
    }

    if (ri.has_f3()) {
      double v = 0.0;
      Vec2 g;
      double corr = 0.0;
      Complex ci{0.0, 0.0};
      double r_i = 1.0;
      if (j == 1) {
        corr = cfg.alpha / (1.0 - cfg.alpha);
        ci = cfg.c1.cplx();
        r_i = cfg.r1;
      } else if (j == 2) {
        corr = cfg.beta / (1.0 - cfg.beta);
        ci = cfg.c2.cplx();
        r_i = cfg.r2;
      }
      const double F3 = ri.f3_integral();
      const bool regroup = (j != 0) && (xr == tag_of(j));

      if (regroup) {
        const double ai = (j == 1) ? cfg.alpha : cfg.beta;
        const double ki = (j == 1) ? cfg.k1 : cfg.k2;
        Sample s = sample(j, xc, mask_g);
        if (want_v) {
          v += (1.0 / ki) * s.g;
          v += (ai / ki) * (2.0 * F3 * std::log(r_i) + ri.center_reg_value(x, ci, r_i));
          v += corr * F3 * (2.0 * ai / ki) * std::log(r_i);
        }
        if (want_g) {
          g += (1.0 / ki) * s.gg;
          g += (ai / ki) * ri.center_reg_gradient(x, ci, r_i);
        }
      } else {
        for (const auto& ct : br.closed) {
          // only the matrix-region branch has a closed term here (identity)
          if (ct.map != BaseMap::identity) continue;
          Sample s = sample(j, xc, mask_g);
          v += ct.coeff * s.g;
          g += ct.coeff * s.gg;
        }
      }

      SeriesStats stats;
      auto termv = [&](Complex w) {
        double val = sample(j, w, kG).g;
        if (corr != 0.0) {
          double d = std::abs(w - ci);
          if (d == 0.0) throw Error(Status::singular_evaluation, "mapped point hit a center");
          val += corr * F3 * std::log(d);
        }
        return val;
      };
      auto term = [&](double wt, Complex w, const ConjMoebius& iter, const ConjMoebius* tail,
                      Complex tp) -> ValGrad {
        ValGrad r;
        if (want_v) r.v = wt * termv(w);
        if (want_g) {
          Vec2 gv = sample(j, w, kGG).gg;
          if (corr != 0.0) gv += corr * F3 * Vec2(1.0 / std::conj(w - ci));
          Vec2 g1 = iter.pullback_gradient(tp, gv);
          r.g = wt * (tail ? tail->pullback_gradient(xc, g1) : g1);
        }
        return r;
      };
      std::function<double(Complex)> limit = [&](Complex fp) { return termv(fp); };
      AuxBranch brs = br;
      if (regroup) brs.closed.clear();
      if (want_v && !want_g) {
        v += walker.run<double>(
            brs, xc, stats,
            [&](double wt, Complex w, const ConjMoebius&, const ConjMoebius*, Complex) {
              return wt * termv(w);
            },
            &limit);
      } else {
        ValGrad r = walker.run<ValGrad>(brs, xc, stats, term);
        v += r.v;
        g += r.g;
      }
      total += v;
      gtot += g;
      rep.terms_used = std::max(rep.terms_used, stats.terms_used);
      rep.tail_estimate += stats.tail_estimate;
    }
  }

  rep.value = want_v ? total : 0.0;
  rep.grad = want_g ? gtot : Vec2{};
  return rep;
}

SolutionEvaluator::SolutionEvaluator(const TwoDiskConfig& cfg, const PiecewiseSource& src,
                                     const SeriesPolicy& policy, const QuadratureGrid& grid)
    : impl_(std::make_unique<Impl>(cfg, src, policy, grid)) {}
SolutionEvaluator::~SolutionEvaluator() = default;
SolutionEvaluator::SolutionEvaluator(SolutionEvaluator&&) noexcept = default;

const TwoDiskConfig& SolutionEvaluator::config() const { return impl_->cfg; }

EvalReport SolutionEvaluator::value(Vec2 x, std::optional<RegionTag> region) const {
  return impl_->run(x, region, true, false);
}

EvalReport SolutionEvaluator::gradient(Vec2 x, std::optional<RegionTag> region) const {
  return impl_->run(x, region, false, true);
}

EvalReport SolutionEvaluator::value_and_gradient(Vec2 x, std::optional<RegionTag> region) const {
  return impl_->run(x, region, true, true);
}

TensorReport SolutionEvaluator::higher_derivative(Vec2 x, int m) const {
  if (m < 2 || m > 4)
    throw Error(Status::invalid_argument, "higher derivative order must lie in [2, 4]");
  double dmin = 1e300;
  for (int i = 1; i <= 2; ++i)
    dmin = std::min(dmin, std::abs(impl_->cfg.disk(i).boundary_distance(x)));
  double h0 = std::min(dmin / 10.0, 0.02 * std::min(impl_->cfg.r1, impl_->cfg.r2));
  if (h0 < 1e-7)
    throw Error(Status::too_close_to_interface,
                "finite-difference step underflows this close to an interface");

  TensorReport rep;
  rep.order = m;
  auto grad_at = [&](Vec2 p) {
    EvalReport e = impl_->run(p, std::nullopt, false, true);
    rep.terms_used = std::max(rep.terms_used, e.terms_used);
    rep.tail_estimate = std::max(rep.tail_estimate, e.tail_estimate);
    rep.quad_error = std::max(rep.quad_error, e.quad_error);
    return e.grad;
  };
  std::function<std::vector<double>(Vec2, int, double)> tens = [&](Vec2 p, int order,
                                                                   double h) {
    if (order == 1) {
      Vec2 g = grad_at(p);
      return std::vector<double>{g.x, g.y};
    }
    std::vector<double> out;
    out.reserve(size_t{1} << order);
    for (int axis = 0; axis < 2; ++axis) {
      Vec2 e = axis == 0 ? Vec2{h, 0.0} : Vec2{0.0, h};
      auto plus = tens(p + e, order - 1, h);
      auto minus = tens(p - e, order - 1, h);
      for (size_t i = 0; i < plus.size(); ++i) out.push_back((plus[i] - minus[i]) / (2.0 * h));
    }
    return out;
  };

  auto t1 = tens(x, m, h0);
  auto t2 = tens(x, m, h0 / 2.0);
  rep.entries.resize(t1.size());
  rep.fd_error = 0.0;
  double frob = 0.0;
  for (size_t i = 0; i < t1.size(); ++i) {
    double r = (4.0 * t2[i] - t1[i]) / 3.0;
    rep.entries[i] = r;
    rep.fd_error = std::max(rep.fd_error, std::abs(r - t2[i]));
    frob += r * r;
  }
  rep.norm = std::sqrt(frob);
  return rep;
}

namespace {

Sample one_shot(int region, Vec2 x, const PiecewiseSource& src, const TwoDiskConfig& cfg,
                const QuadratureGrid& grid, unsigned mask) {
  if (region < 0 || region > 2)
    throw Error(Status::invalid_argument, "region index must be 0, 1, or 2");
  const RegionSource& rs = src.region[region];
  if (!(rs.has_f || rs.has_f3)) return Sample{};
  RegionIntegrator ri(region, cfg, rs, grid);
  return ri.evaluate(x, mask);
}

}  // namespace

double potential_h(int region, Vec2 x, const PiecewiseSource& src, const TwoDiskConfig& cfg,
                   const QuadratureGrid& grid) {
  return one_shot(region, x, src, cfg, grid, kH).h;
}

double potential_g(int region, Vec2 x, const PiecewiseSource& src, const TwoDiskConfig& cfg,
                   const QuadratureGrid& grid) {
  return one_shot(region, x, src, cfg, grid, kG).g;
}

Vec2 potential_h_gradient(int region, Vec2 x, const PiecewiseSource& src,
                          const TwoDiskConfig& cfg, const QuadratureGrid& grid) {
  return one_shot(region, x, src, cfg, grid, kHG).hg;
}

Vec2 potential_g_gradient(int region, Vec2 x, const PiecewiseSource& src,
                          const TwoDiskConfig& cfg, const QuadratureGrid& grid) {
  return one_shot(region, x, src, cfg, grid, kGG).gg;
}

}  // namespace twodisk
