#include "shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_gamma.h>

#include "error.hpp"
#include "numerics.hpp"
#include "pohozaev.hpp"

namespace selfsim {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::A: return "A";
    case Verdict::C: return "C";
    case Verdict::Unresolved: return "Unresolved";
  }
  return "?";
}

namespace {

// log(1 + exp(x)) without overflow
double log1p_exp(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

void fill_diagnostics(const Params& params, const Trajectory& traj, Classification& c) {
  const auto& s = traj.samples.back();
  c.r_end = s.r;
  c.h_end = s.g != 0.0 ? s.f / s.g : std::numeric_limits<double>::quiet_NaN();
  c.g_over_f = s.f != 0.0 ? s.g / s.f : std::numeric_limits<double>::quiet_NaN();
  if (s.g > 0.0 && s.r > 0.0) {
    const double b = J_bracket(params, s.r, s.g, s.dg);
    c.J_sign = (b > 0) - (b < 0);
  }
}

}  // namespace

Classification classify(const Params& params, double a, const IntegratorOptions& opts,
                        Trajectory* keep) {
  Classification c;
  c.a = a;
  const double r_G = find_r_G(params).r_G;
  const double log_thr = std::log(opts.j_neg_threshold);
  // J is tracked through log|J| so that long horizons cannot overflow it
  double log_jmax = -std::numeric_limits<double>::infinity();

  StepObserver watch_J = [&](Trajectory& traj, const Sample& s) {
    if (!(s.g > 0.0)) return true;
    const double b = J_bracket(params, s.r, s.g, s.dg);
    const double L = params.e_weight * log_rho(params, s.r) + 2.0 * std::log(s.g);
    if (b > 0.0) {
      log_jmax = std::max(log_jmax, L + std::log(b));
    } else if (b < 0.0 && s.r > r_G && s.f > 0.0) {
      if (L + std::log(-b) > log_thr + log1p_exp(log_jmax)) {
        traj.events.push_back({EventKind::JNegative, s.r, s.f, s.g, s.fprime});
        return false;
      }
    }
    return true;
  };

  Trajectory traj;
  try {
    traj = integrate(params, a, opts, watch_J);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::StepSizeUnderflow) throw;
    c.verdict = Verdict::Unresolved;
    c.note = e.what();
    return c;
  }

  if (const auto* ev = traj.find_event(EventKind::FZero); ev && ev->fprime < 0.0) {
    c.verdict = Verdict::A;
    c.R = ev->r;
    c.slope = ev->fprime;
  } else if (const auto* ev = traj.find_event(EventKind::JNegative)) {
    c.verdict = Verdict::C;
    c.r_bar = ev->r;
  } else {
    c.verdict = Verdict::Unresolved;
    if (traj.has_event(EventKind::GZero)) c.note = "g vanished before f";
  }
  fill_diagnostics(params, traj, c);
  if (keep) *keep = std::move(traj);
  return c;
}

Bracket bracket_search(const Params& params, const IntegratorOptions& opts) {
  Bracket b;
  double a = 1.0;
  auto first = classify(params, a, opts);
  b.steps = 1;
  double a_hi = 0.0, a_lo = 0.0;
  if (first.verdict == Verdict::A) a_hi = a;
  if (first.verdict == Verdict::C) a_lo = a;

  a = 1.0;
  for (int i = 0; a_hi == 0.0; ++i) {
    if (i == 60) throw Error(ErrorCode::BracketFailure, "bracket_search: no A verdict after 60 doublings");
    a *= 2.0;
    ++b.steps;
    const auto c = classify(params, a, opts);
    if (c.verdict == Verdict::A) a_hi = a;
    if (c.verdict == Verdict::C) a_lo = a;  // keep the largest C seen
  }
  a = 1.0;
  for (int i = 0; a_lo == 0.0; ++i) {
    if (i == 60) throw Error(ErrorCode::BracketFailure, "bracket_search: no C verdict after 60 halvings");
    a *= 0.5;
    ++b.steps;
    const auto c = classify(params, a, opts);
    if (c.verdict == Verdict::C) a_lo = a;
    if (c.verdict == Verdict::A) a_hi = std::min(a_hi, a);
  }
  if (!(a_lo < a_hi)) {
    throw Error(ErrorCode::BracketFailure, "bracket_search: C and A verdicts out of order");
  }
  b.a_lo = a_lo;
  b.a_hi = a_hi;
  return b;
}

Plateau estimate_l(const Params& params, const Trajectory& traj, const PlateauOptions& po) {
  std::vector<double> r, w;
  for (const auto& s : traj.samples) {
    if (s.r <= 0.0) continue;
    r.push_back(s.r);
    w.push_back(weight_rho(params, s.r) * s.g);
  }
  const std::size_t n = r.size();
  Plateau best;
  double best_len = -1.0;
  std::size_t j = 0;
  // two pointers: for each start i the window [i, j] is the longest that
  // satisfies the variation bound; the bound is monotone in the window
  for (std::size_t i = 0; i < n; ++i) {
    if (!(w[i] > 0.0)) continue;
    if (j < i) j = i;
    double lo = w[i], hi = w[i];
    for (std::size_t k = i; k <= j; ++k) {
      lo = std::min(lo, w[k]);
      hi = std::max(hi, w[k]);
    }
    while (j + 1 < n && w[j + 1] > 0.0) {
      const double nlo = std::min(lo, w[j + 1]), nhi = std::max(hi, w[j + 1]);
      if (nhi - nlo > po.max_variation * 0.5 * (nhi + nlo)) break;
      lo = nlo;
      hi = nhi;
      ++j;
    }
    const double len = r[j] - r[i];
    if (len > best_len) {
      best_len = len;
      best.r1 = r[i];
      best.r2 = r[j];
      best.variation = (hi - lo) / (0.5 * (hi + lo));
      double acc = 0.0;
      for (std::size_t k = i; k < j; ++k) acc += 0.5 * (w[k] + w[k + 1]) * (r[k + 1] - r[k]);
      best.l = len > 0.0 ? acc / len : w[i];
    }
  }
  if (best_len < po.min_length) {
    throw Error(ErrorCode::NoPlateau, "estimate_l: no plateau of rho g of length >= " +
                                          std::to_string(po.min_length));
  }
  return best;
}

Trajectory full_trajectory(const Params& params, double a, const IntegratorOptions& opts) {
  IntegratorOptions o = opts;
  o.continue_past_fzero = true;
  return integrate(params, a, o);
}

double trust_radius(const Trajectory& lo, const Trajectory& hi) {
  const double r0 = std::max(lo.samples.front().r, hi.samples.front().r);
  const double r1 = std::min(lo.r_end(), hi.r_end());
  double trust = r0;
  for (const auto& s : lo.samples) {
    if (s.r < r0) continue;
    if (s.r > r1) break;
    const double fh = hi.f_at(s.r);
    if (!(s.f > 0.0) || std::abs(fh - s.f) > 0.01 * std::abs(s.f)) break;
    trust = s.r;
  }
  return trust;
}

GroundStateResult bisect_a_star(const Params& params, const Bracket& bracket, double tol_a,
                                const IntegratorOptions& opts, const PlateauOptions& po) {
  if (!(bracket.a_lo < bracket.a_hi) || !(tol_a > 0.0)) {
    throw Error(ErrorCode::BracketFailure, "bisect_a_star: need a_lo < a_hi and tol_a > 0");
  }
  GroundStateResult res;
  double lo = bracket.a_lo, hi = bracket.a_hi;
  // a bracket narrower than the integration error in a is meaningless; the
  // error in a* tracks roughly 10 * rel_tol * a
  IntegratorOptions base = opts;
  base.rel_tol = std::max(1e-13, std::min(opts.rel_tol, tol_a / (10.0 * hi)));
  res.rel_tol_used = base.rel_tol;

  auto resolve = [&](double a) {
    auto c = classify(params, a, base);
    for (double factor : {2.5, 5.0, 10.0}) {
      if (c.verdict != Verdict::Unresolved) break;
      IntegratorOptions o = base;
      o.r_max = base.r_max * factor;
      c = classify(params, a, o);
    }
    return c;
  };

  if (resolve(lo).verdict != Verdict::C || resolve(hi).verdict != Verdict::A) {
    throw Error(ErrorCode::BracketFailure, "bisect_a_star: endpoints are not a (C, A) pair");
  }

  while (hi - lo > tol_a) {
    if (++res.iterations > 200) {
      throw Error(ErrorCode::BisectionStall, "bisect_a_star: more than 200 iterations");
    }
    double mid = 0.5 * (lo + hi);
    auto c = resolve(mid);
    for (int nudge = 0; c.verdict == Verdict::Unresolved && nudge < 4; ++nudge) {
      ++res.unresolved;
      // h near 0 looks like the fast decayer from above (A side), J < 0
      // like the C side
      const bool looks_c = c.J_sign < 0 || std::abs(c.h_end - 1.0) < std::abs(c.h_end);
      mid = looks_c ? mid - 0.25 * (mid - lo) : mid + 0.25 * (hi - mid);
      c = resolve(mid);
    }
    if (c.verdict == Verdict::A) {
      hi = mid;
    } else if (c.verdict == Verdict::C) {
      lo = mid;
    } else {
      throw Error(ErrorCode::BisectionStall,
                  "bisect_a_star: midpoint stays unresolved after horizon extension");
    }
  }
  res.a_lo = lo;
  res.a_hi = hi;
  res.a_star = 0.5 * (lo + hi);

  const auto t_lo = full_trajectory(params, lo, base);
  const auto t_hi = full_trajectory(params, hi, base);
  const auto t_mid = full_trajectory(params, res.a_star, base);
  res.trust_radius = trust_radius(t_lo, t_hi);
  const auto pl = estimate_l(params, t_mid, po);
  res.l_star = pl.l;
  res.plateau_r1 = pl.r1;
  res.plateau_r2 = pl.r2;
  res.plateau_variation = pl.variation;
  res.c_star = (params.p - 1.0) * std::pow(res.l_star, params.e_g);
  return res;
}

TailSlopes tail_slopes(const Params& params, const Trajectory& traj, TailWindow exp_window,
                       TailWindow alg_window) {
  TailSlopes out;
  const double power = (params.N - 1.0) / (params.p - 1.0);
  auto collect = [&](TailWindow w, std::vector<double>& x, std::vector<double>& y,
                     std::vector<double>& y2, double& gf, bool log_x) {
    double gf_sum = 0.0;
    for (const auto& s : traj.samples) {
      if (s.r < w.lo || s.r > w.hi || !(s.f > 0.0)) continue;
      x.push_back(log_x ? std::log(s.r) : s.r);
      y.push_back(std::log(s.f));
      y2.push_back(std::log(s.f) + power * std::log(s.r));
      gf_sum += s.g / s.f;
    }
    if (x.size() < 8) {
      throw Error(ErrorCode::WindowTooShort, "tail_slopes: fewer than 8 samples with f > 0 in window");
    }
    gf = gf_sum / static_cast<double>(x.size());
  };
  if (exp_window.active()) {
    std::vector<double> x, y, y2;
    collect(exp_window, x, y, y2, out.g_over_f_exp, false);
    out.slope_exp_raw = num::fit_line(x, y).slope;
    out.slope_exp = num::fit_line(x, y2).slope;
  }
  if (alg_window.active()) {
    std::vector<double> x, y, y2;
    collect(alg_window, x, y, y2, out.g_over_f_alg, true);
    out.slope_alg = num::fit_line(x, y).slope;
    // prefactor at the last sample inside the window
    const Sample* last = nullptr;
    for (const auto& s : traj.samples) {
      if (s.r <= alg_window.hi && s.f > 0.0) last = &s;
    }
    const double p = params.p;
    out.prefactor = last->f * std::pow((2.0 - p) * last->r / (p - 1.0), params.e_slow);
  }
  return out;
}

TailIntegral tail_integral_check(const Params& params, const std::vector<double>& r_grid) {
  using boost::math::quadrature::gauss_kronrod;
  gsl_set_error_handler_off();
  const double k = params.e_g;
  const double n1 = params.N - 1.0;
  TailIntegral out;
  for (double r : r_grid) {
    if (!(r > 0.0)) throw Error(ErrorCode::Domain, "tail_integral_check: r must be positive");
    // s = r + t: rho(r)^k int_r^inf rho(s)^{-k} ds = int_0^inf (1 + t/r)^{-(N-1)k} e^{-k t} dt
    auto integrand = [&](double t) { return std::pow(1.0 + t / r, -n1 * k) * std::exp(-k * t); };
    const double cut = 9.0 * r;  // integrate to s = 10 r
    double err = 0.0;
    double I = gauss_kronrod<double, 31>::integrate(integrand, 0.0, cut, 20, 1e-14, &err);
    // beyond the cut (1 + t/r)^{-(N-1)k} <= 10^{-(N-1)k}: exponential bound
    I += std::pow(10.0, -n1 * k) * std::exp(-k * cut) / k;
    const double ratio = I / (params.p - 1.0);

    // int_r^inf s^{-(N-1)k} e^{-ks} ds = k^{(N-1)k - 1} Gamma((p-N)/(p-1), k r)
    gsl_sf_result G;
    const int status = gsl_sf_gamma_inc_e((params.p - params.N) / (params.p - 1.0), k * r, &G);
    if (status != GSL_SUCCESS) {
      throw Error(ErrorCode::Internal, std::string("incomplete gamma: ") + gsl_strerror(status));
    }
    const double log_pref = k * log_rho(params, r) + (n1 * k - 1.0) * std::log(k);
    const double ratio_gamma = std::exp(log_pref + std::log(G.val)) / (params.p - 1.0);

    out.r.push_back(r);
    out.ratio.push_back(ratio);
    out.ratio_gamma.push_back(ratio_gamma);
    out.max_deviation = std::max(out.max_deviation, std::abs(ratio - 1.0));
    out.max_route_gap = std::max(out.max_route_gap, std::abs(ratio - ratio_gamma));
  }
  return out;
}

double large_a_distance(const Params& params, double a, const Trajectory& psi,
                        const IntegratorOptions& opts) {
  const double scale = std::pow(a, -(2.0 - params.p) / params.p);
  const double s0 = psi.r_end();
  IntegratorOptions o = opts;
  o.continue_past_fzero = true;
  o.r_max = scale * s0 * (1.0 + 1e-9);
  const auto traj = integrate(params, a, o);
  const double s_lo = std::max(psi.samples.front().r, traj.samples.front().r / scale);
  const double s_hi = std::min(s0, traj.r_end() / scale);
  constexpr int n = 2000;
  double sup = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = s_lo + (s_hi - s_lo) * i / n;
    sup = std::max(sup, std::abs(traj.f_at(scale * s) / a - psi.f_at(s)));
  }
  return sup;
}

double small_a_distance(const Params& params, double a, double r_hi,
                        const IntegratorOptions& opts) {
  IntegratorOptions o = opts;
  o.continue_past_fzero = true;
  o.r_max = r_hi;
  const auto traj = integrate(params, a, o);
  const double r_lo = traj.samples.front().r;
  const double r_top = std::min(r_hi, traj.r_end());
  constexpr int n = 1000;
  std::vector<double> grid;
  for (int i = 0; i <= n; ++i) grid.push_back(r_lo + (r_top - r_lo) * i / n);
  const auto z = small_a_limit_z0(params, grid);
  double sup = 0.0;
  for (int i = 0; i <= n; ++i) sup = std::max(sup, std::abs(traj.g_at(grid[i]) / a - z[i].z0));
  return sup;
}

}  // namespace selfsim
