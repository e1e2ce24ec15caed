#include "functional.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "stencils.hpp"

namespace cheegerpack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Gauss-3 nodes/weights on [0,1]; exact for the quartic well and the
// |u|^{2N/(N-1)} integrand (degree <= 4) along each edge.
constexpr double kGx[3] = {0.11270166537925831, 0.5, 0.88729833462074169};
constexpr double kGw[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

inline double well(double s) {
  double t = s * (1 - s);
  return t * t;
}
inline double dwell(double s) { return 2 * s * (1 - s) * (1 - 2 * s); }

struct PhaseTerms {
  double dirichlet = 0;  // edge-sum |grad u|^2 quadrature
  double well = 0;       // int u^2(1-u)^2
  double volq = 0;       // int u^q
};

// volume exponent 2N/(N-1): 4 in 2D, 3 in 3D
inline double qpow(double s, int dim) { return dim == 2 ? s * s * s * s : s * s * s; }
inline double dqpow(double s, int dim) { return dim == 2 ? 4 * s * s * s : 3 * s * s; }

inline double masked(const double* u, const DomainMask& mask, std::size_t i) {
  return mask.is_inside(i) ? u[i] : 0.0;
}

PhaseTerms phase_terms(const GridSpec& g, const DomainMask& mask, const double* u) {
  PhaseTerms t;
  for (const auto& fam : detail::dirichlet_families(g)) {
    double s = 0;
    detail::for_each_edge(g, fam, [&](std::size_t i, std::size_t j) {
      double d = masked(u, mask, j) - masked(u, mask, i);
      s += d * d;
    });
    t.dirichlet += fam.weight * fam.inv_len2 * s;
  }
  double wsum = 0, qsum = 0;
  for (const auto& fam : detail::axis_families(g)) {
    detail::for_each_edge(g, fam, [&](std::size_t i, std::size_t j) {
      double a = masked(u, mask, i), b = masked(u, mask, j);
      for (int n = 0; n < 3; ++n) {
        double s = a + (b - a) * kGx[n];
        wsum += kGw[n] * well(s);
        qsum += kGw[n] * qpow(s, g.dim);
      }
    });
  }
  double w = g.node_weight();
  t.dirichlet *= w;
  t.well = w * wsum / g.dim;
  t.volq = w * qsum / g.dim;
  return t;
}

// accumulates c_dir * d(dirichlet)/du + c_well * d(well)/du + c_q * d(volq)/du
void phase_terms_grad(const GridSpec& g, const DomainMask& mask, const double* u, double c_dir,
                      double c_well, double c_q, double* grad) {
  double w = g.node_weight();
  for (const auto& fam : detail::dirichlet_families(g)) {
    double c = 2 * w * c_dir * fam.weight * fam.inv_len2;
    detail::for_each_edge(g, fam, [&](std::size_t i, std::size_t j) {
      double d = masked(u, mask, j) - masked(u, mask, i);
      grad[j] += c * d;
      grad[i] -= c * d;
    });
  }
  double cw = w * c_well / g.dim, cq = w * c_q / g.dim;
  for (const auto& fam : detail::axis_families(g)) {
    detail::for_each_edge(g, fam, [&](std::size_t i, std::size_t j) {
      double a = masked(u, mask, i), b = masked(u, mask, j);
      double gi = 0, gj = 0;
      for (int n = 0; n < 3; ++n) {
        double s = a + (b - a) * kGx[n];
        double dw = cw * kGw[n] * dwell(s) + cq * kGw[n] * dqpow(s, g.dim);
        gi += dw * (1 - kGx[n]);
        gj += dw * kGx[n];
      }
      grad[i] += gi;
      grad[j] += gj;
    });
  }
}

void zero_masked(const GridSpec& g, const DomainMask& mask, double* grad) {
  if (mask.all_inside) return;
  for (std::size_t i = 0; i < g.node_count(); ++i)
    if (!mask.inside[i]) grad[i] = 0.0;
}

}  // namespace

void PhaseSystem::validate() const {
  grid.validate();
  if (phases.empty()) throw std::invalid_argument("functional: need k >= 1 phases");
  for (const auto& u : phases) {
    if (u.size() != grid.node_count())
      throw std::invalid_argument("functional: phase length does not match grid");
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (!(u[i] >= 0.0 && u[i] <= 1.0))
        throw std::invalid_argument("functional: phase values must lie in [0,1]");
      if (!mask.is_inside(i) && u[i] != 0.0)
        throw std::invalid_argument("functional: phase nonzero outside mask");
    }
  }
}

void EnergyParams::validate(int dim) const {
  double critical = double(dim - 1) / dim;
  if (!(alpha > critical))
    throw std::invalid_argument("functional: alpha must exceed (N-1)/N");
  if (!(eps > 0)) throw std::invalid_argument("functional: eps must be positive");
  if (!(p >= 1)) throw std::invalid_argument("functional: p must be >= 1");
  if (k < 1) throw std::invalid_argument("functional: k must be >= 1");
}

bool EnergyValue::is_finite() const { return std::isfinite(total); }

nlohmann::json EnergyValue::to_json() const {
  nlohmann::json j;
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return "inf";
  };
  j["total"] = num(total);
  j["penalty_term"] = penalty_term;
  j["per_phase_perimeter"] = per_phase_perimeter;
  j["per_phase_volume"] = per_phase_volume;
  j["per_phase_ratio"] = nlohmann::json::array();
  for (double r : per_phase_ratio) j["per_phase_ratio"].push_back(num(r));
  return j;
}

EnergyValue evaluate_stacked(const GridSpec& g, const DomainMask& mask,
                             std::span<const double> u, const EnergyParams& params) {
  params.validate(g.dim);
  const std::size_t n = g.node_count();
  if (u.size() != n * std::size_t(params.k))
    throw std::invalid_argument("functional: stacked field size mismatch");
  EnergyValue ev;
  ev.per_phase_perimeter.resize(params.k);
  ev.per_phase_volume.resize(params.k);
  ev.per_phase_ratio.resize(params.k);
  const double vol_floor = 1e-12 * g.volume();
  double total = 0;
  for (int i = 0; i < params.k; ++i) {
    PhaseTerms t = phase_terms(g, mask, u.data() + std::size_t(i) * n);
    double mm = params.eps * t.dirichlet + (9.0 / params.eps) * t.well;
    ev.per_phase_perimeter[i] = mm;
    ev.per_phase_volume[i] = t.volq;
    if (t.volq < vol_floor) {
      ev.per_phase_ratio[i] = kInf;
      total = kInf;
    } else {
      double ratio = mm / std::pow(t.volq, params.alpha);
      ev.per_phase_ratio[i] = ratio;
      total += std::pow(ratio, params.p);
    }
  }
  double pen = 0;
  if (params.k > 1) {
    for (int i = 0; i < params.k; ++i)
      for (int j = i + 1; j < params.k; ++j) {
        const double* ui = u.data() + std::size_t(i) * n;
        const double* uj = u.data() + std::size_t(j) * n;
        double s = 0;
        for (std::size_t a = 0; a < n; ++a)
          if (mask.is_inside(a)) s += ui[a] * ui[a] * uj[a] * uj[a];
        pen += s;
      }
    pen *= g.node_weight() * params.penalty();
  }
  ev.penalty_term = pen;
  ev.total = total + pen;
  return ev;
}

void gradient_stacked(const GridSpec& g, const DomainMask& mask, std::span<const double> u,
                      const EnergyParams& params, std::span<double> grad_out) {
  EnergyValue ev = evaluate_and_gradient_stacked(g, mask, u, params, grad_out);
  if (!ev.is_finite())
    throw std::domain_error("functional: gradient undefined at infinite energy");
}

EnergyValue evaluate_and_gradient_stacked(const GridSpec& g, const DomainMask& mask,
                                          std::span<const double> u, const EnergyParams& params,
                                          std::span<double> grad_out) {
  const std::size_t n = g.node_count();
  if (grad_out.size() != u.size())
    throw std::invalid_argument("functional: gradient buffer size mismatch");
  EnergyValue ev = evaluate_stacked(g, mask, u, params);
  std::fill(grad_out.begin(), grad_out.end(), 0.0);
  if (!ev.is_finite()) return ev;
  for (int i = 0; i < params.k; ++i) {
    const double* ui = u.data() + std::size_t(i) * n;
    double* gi = grad_out.data() + std::size_t(i) * n;
    double mm = ev.per_phase_perimeter[i];
    double vq = ev.per_phase_volume[i];
    double va = std::pow(vq, params.alpha);
    double ratio = ev.per_phase_ratio[i];
    // d(ratio^p)/du = p ratio^{p-1} [dMM - alpha (MM/V) dV] / V^alpha
    double outer = params.p * std::pow(ratio, params.p - 1) / va;
    double c_dir = outer * params.eps;
    double c_well = outer * 9.0 / params.eps;
    double c_q = -outer * params.alpha * mm / vq;
    phase_terms_grad(g, mask, ui, c_dir, c_well, c_q, gi);
    if (params.k > 1) {
      double cpen = 2.0 * g.node_weight() * params.penalty();
      for (int j = 0; j < params.k; ++j) {
        if (j == i) continue;
        const double* uj = u.data() + std::size_t(j) * n;
        for (std::size_t a = 0; a < n; ++a) gi[a] += cpen * ui[a] * uj[a] * uj[a];
      }
    }
    zero_masked(g, mask, gi);
  }
  return ev;
}

EnergyValue evaluate(const PhaseSystem& sys, const EnergyParams& params) {
  EnergyParams pk = params;
  pk.k = sys.k();
  std::vector<double> stacked;
  stacked.reserve(sys.grid.node_count() * sys.phases.size());
  for (const auto& ph : sys.phases) stacked.insert(stacked.end(), ph.begin(), ph.end());
  return evaluate_stacked(sys.grid, sys.mask, stacked, pk);
}

std::vector<double> gradient(const PhaseSystem& sys, const EnergyParams& params) {
  EnergyParams pk = params;
  pk.k = sys.k();
  std::vector<double> stacked;
  stacked.reserve(sys.grid.node_count() * sys.phases.size());
  for (const auto& ph : sys.phases) stacked.insert(stacked.end(), ph.begin(), ph.end());
  std::vector<double> grad(stacked.size());
  gradient_stacked(sys.grid, sys.mask, stacked, pk, grad);
  return grad;
}

double evaluate_log_perimeter_stacked(const GridSpec& g, const DomainMask& mask,
                                      std::span<const double> u,
                                      const LogPerimeterParams& params,
                                      std::span<double> grad_out) {
  const std::size_t n = g.node_count();
  const int k = int(u.size() / n);
  if (u.size() != n * std::size_t(k))
    throw std::invalid_argument("functional: stacked field size mismatch");
  bool want_grad = !grad_out.empty();
  if (want_grad && grad_out.size() != u.size())
    throw std::invalid_argument("functional: gradient buffer size mismatch");
  double w = g.node_weight();

  double value = 0;
  std::vector<double> mms(k), areas(k);
  for (int i = 0; i < k; ++i) {
    const double* ui = u.data() + std::size_t(i) * n;
    PhaseTerms t = phase_terms(g, mask, ui);
    double mm = params.eps * t.dirichlet + (9.0 / params.eps) * t.well;
    mms[i] = mm;
    if (!(mm > 0)) return kInf;
    double area = 0;
    for (std::size_t a = 0; a < n; ++a)
      if (mask.is_inside(a)) area += ui[a];
    area *= w;
    areas[i] = area;
    value += std::log(mm) + params.area_w() * (area - params.area_target) * (area - params.area_target);
  }
  double pen = 0;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      const double* ui = u.data() + std::size_t(i) * n;
      const double* uj = u.data() + std::size_t(j) * n;
      double s = 0;
      for (std::size_t a = 0; a < n; ++a)
        if (mask.is_inside(a)) s += ui[a] * ui[a] * uj[a] * uj[a];
      pen += s;
    }
  pen *= w * params.penalty();
  value += pen;

  if (want_grad) {
    std::fill(grad_out.begin(), grad_out.end(), 0.0);
    for (int i = 0; i < k; ++i) {
      const double* ui = u.data() + std::size_t(i) * n;
      double* gi = grad_out.data() + std::size_t(i) * n;
      double inv_mm = 1.0 / mms[i];
      phase_terms_grad(g, mask, ui, inv_mm * params.eps, inv_mm * 9.0 / params.eps, 0.0, gi);
      double ca = 2.0 * params.area_w() * (areas[i] - params.area_target) * w;
      double cpen = 2.0 * w * params.penalty();
      for (std::size_t a = 0; a < n; ++a) gi[a] += ca;
      for (int j = 0; j < k; ++j) {
        if (j == i) continue;
        const double* uj = u.data() + std::size_t(j) * n;
        for (std::size_t a = 0; a < n; ++a) gi[a] += cpen * ui[a] * uj[a] * uj[a];
      }
      zero_masked(g, mask, gi);
    }
  }
  return value;
}

double evaluate_log_perimeter(const PhaseSystem& sys, const LogPerimeterParams& params) {
  std::vector<double> stacked;
  stacked.reserve(sys.grid.node_count() * sys.phases.size());
  for (const auto& ph : sys.phases) stacked.insert(stacked.end(), ph.begin(), ph.end());
  return evaluate_log_perimeter_stacked(sys.grid, sys.mask, stacked, params, {});
}

}  // namespace cheegerpack
