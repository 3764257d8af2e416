#include "pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "error.hpp"
#include "numerics.hpp"

namespace selfsim {

RadialGrid RadialGrid::make(double R_inf, int M) {
  if (!(R_inf > 0.0) || M < 2) {
    throw Error(ErrorCode::InvalidArgument, "radial grid needs R_inf > 0 and M >= 2");
  }
  RadialGrid g;
  g.R_inf = R_inf;
  g.M = M;
  g.dr = R_inf / M;
  g.r.resize(M);
  for (int i = 0; i < M; ++i) g.r[i] = (i + 0.5) * g.dr;
  return g;
}

ProfileTable::ProfileTable(const Params& params, const Trajectory& traj, double r_match)
    : traj_(traj), a_(traj.a), r_match_(std::min(r_match, traj.r_end())) {
  const double f_m = traj_.f_at(r_match_);
  if (!(f_m > 0.0)) {
    throw Error(ErrorCode::Domain, "ProfileTable: f must be positive at the matching radius");
  }
  power_ = (params.N - 1.0) / (params.p - 1.0);
  rate_ = params.e_g;
  log_amp_ = std::log(f_m) + power_ * std::log(r_match_) + rate_ * r_match_;
}

double ProfileTable::operator()(double r) const {
  if (r <= traj_.samples.front().r) return traj_.samples.front().f;
  if (r <= r_match_) return traj_.f_at(r);
  return std::exp(log_amp_ - power_ * std::log(r) - rate_ * r);
}

Field make_initial(const PdeConfig& config, const RadialGrid& grid, const ProfileTable* profile,
                   const std::vector<std::pair<double, double>>* custom) {
  const auto& P = config.params;
  Field out;
  out.u.resize(grid.M);
  switch (config.init) {
    case InitKind::ExpTail:
      for (int i = 0; i < grid.M; ++i) out.u[i] = config.kappa0 * std::exp(-grid.r[i] * P.e_g);
      break;
    case InitKind::Separable: {
      if (!profile) throw Error(ErrorCode::InvalidArgument, "separable data needs a profile table");
      const double amp = std::pow((2.0 - P.p) * config.T0, P.e_time);
      for (int i = 0; i < grid.M; ++i) out.u[i] = amp * (*profile)(grid.r[i]);
      break;
    }
    case InitKind::Custom: {
      if (!custom || custom->size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "custom data needs a table of at least two rows");
      }
      std::vector<double> x, y;
      for (const auto& [r, u] : *custom) {
        if (!x.empty() && !(r > x.back())) {
          throw Error(ErrorCode::InvalidArgument, "custom table radii must be increasing");
        }
        if (!y.empty() && u > y.back()) {
          throw Error(ErrorCode::NonMonotoneInitialData,
                      "NonMonotoneInitialData: custom profile increases at r = " + std::to_string(r));
        }
        if (u < 0.0) throw Error(ErrorCode::InvalidArgument, "custom data must be nonnegative");
        x.push_back(r);
        y.push_back(u);
      }
      const num::MonotoneCubic interp(x, y);
      for (int i = 0; i < grid.M; ++i) {
        out.u[i] = grid.r[i] > x.back() ? 0.0 : interp(grid.r[i]);
      }
      break;
    }
  }
  return out;
}

namespace {

double sup_norm(const std::vector<double>& u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

// Face gradients D_{i-1/2} for i = 0..M: symmetric at r = 0, zero ghost
// outside R_inf.
void face_gradients(const RadialGrid& g, const std::vector<double>& u, std::vector<double>& D) {
  D.assign(g.M + 1, 0.0);
  for (int i = 1; i < g.M; ++i) D[i] = (u[i] - u[i - 1]) / g.dr;
  D[g.M] = -u[g.M - 1] / g.dr;
}

struct Geometry {
  std::vector<double> face_w;  // r_{i-1/2}^{N-1}
  std::vector<double> cell_w;  // r_i^{N-1}
  std::vector<double> face_e;  // r_{i-1/2}^{N-1} e^{r_{i-1/2}}
  std::vector<double> cell_e;  // r_i^{N-1} e^{r_i}
};

Geometry geometry(const Params& P, const RadialGrid& g) {
  Geometry geo;
  geo.face_w.resize(g.M + 1);
  geo.cell_w.resize(g.M);
  geo.face_e.resize(g.M + 1);
  geo.cell_e.resize(g.M);
  for (int i = 0; i <= g.M; ++i) {
    geo.face_w[i] = P.N == 1 ? 1.0 : std::pow(g.face(i), P.N - 1);
    geo.face_e[i] = geo.face_w[i] * std::exp(g.face(i));
  }
  for (int i = 0; i < g.M; ++i) {
    geo.cell_w[i] = P.N == 1 ? 1.0 : std::pow(g.r[i], P.N - 1);
    geo.cell_e[i] = geo.cell_w[i] * std::exp(g.r[i]);
  }
  return geo;
}

StepInfo implicit_step(const PdeConfig& config, const RadialGrid& grid, const Geometry& geo,
                       Field& field, double dt, const std::vector<double>* u_old,
                       double dt_old);

Functionals functionals(const Params& params, const RadialGrid& grid, const Geometry& geo,
                        const std::vector<double>& u, const std::vector<double>* u_prev,
                        double dt);

}  // namespace

StepInfo step_explicit(const PdeConfig& config, const RadialGrid& grid, Field& field) {
  const auto& P = config.params;
  auto& u = field.u;
  StepInfo info;
  const double umax = sup_norm(u);
  if (umax == 0.0) return info;
  const double eps = config.eps_reg * umax;
  const double eps2 = eps * eps;
  const auto geo = geometry(P, grid);

  std::vector<double> D;
  face_gradients(grid, u, D);
  std::vector<double> flux(grid.M + 1);
  double max_dphi = 0.0;
  for (int i = 0; i <= grid.M; ++i) {
    const double s2 = D[i] * D[i] + eps2;
    flux[i] = geo.face_w[i] * std::pow(s2, 0.5 * (P.p - 2.0)) * D[i];
    const double dphi = std::pow(s2, 0.5 * (P.p - 4.0)) * (eps2 + (P.p - 1.0) * D[i] * D[i]);
    max_dphi = std::max(max_dphi, dphi);
  }
  std::vector<double> absorb(grid.M);
  double max_abs = 0.0;
  for (int i = 0; i < grid.M; ++i) {
    const double up = i + 1 < grid.M ? u[i + 1] : 0.0;
    const double um = i > 0 ? u[i - 1] : u[0];
    const double Dbar = std::abs(up - um) / (2.0 * grid.dr);
    absorb[i] = std::pow(Dbar, P.p - 1.0);
    max_abs = std::max(max_abs, absorb[i]);
  }
  const double dt = config.cfl_safety * std::min(grid.dr * grid.dr / (2.0 * max_dphi),
                                                 grid.dr / std::max(1.0, max_abs));
  if (dt < 1e-16) throw Error(ErrorCode::TimestepUnderflow, "TimestepUnderflow: explicit dt < 1e-16");
  for (int i = 0; i < grid.M; ++i) {
    const double div = (flux[i + 1] - flux[i]) / (geo.cell_w[i] * grid.dr);
    u[i] += dt * (div - absorb[i]);
    if (u[i] < 0.0) {
      u[i] = 0.0;
      ++info.clamps;
    }
  }
  field.t += dt;
  info.dt = dt;
  return info;
}

StepInfo step_implicit(const PdeConfig& config, const RadialGrid& grid, Field& field, double dt) {
  if (field.u.size() != static_cast<std::size_t>(grid.M)) {
    throw Error(ErrorCode::GridMismatch, "step_implicit: field size does not match grid");
  }
  return implicit_step(config, grid, geometry(config.params, grid), field, dt, nullptr, 0.0);
}

namespace {

// Tridiagonal operator L(w) u with diffusivity and absorption coefficients
// frozen at the state w:
//   L u = [w_{i+1/2} K_+ D_+ - w_{i-1/2} K_- D_-] / (w_i dr) - (K_+ S_+ D_+ + K_- S_- D_-) / 2
// as lo * u_{i-1} + di * u_i + up * u_{i+1}. Returns max |L(w) w|.
double build_operator(const Params& P, const RadialGrid& grid, const Geometry& geo,
                      const std::vector<double>& w, double eps2, std::vector<double>& lo,
                      std::vector<double>& di, std::vector<double>& up) {
  const int M = grid.M;
  const double dr = grid.dr;
  std::vector<double> D, K(M + 1), S(M + 1);
  face_gradients(grid, w, D);
  for (int i = 0; i <= M; ++i) {
    K[i] = std::pow(D[i] * D[i] + eps2, 0.5 * (P.p - 2.0));
    S[i] = (D[i] > 0.0) - (D[i] < 0.0);
  }
  lo.assign(M, 0.0);
  di.assign(M, 0.0);
  up.assign(M, 0.0);
  double max_rate = 0.0;
  for (int i = 0; i < M; ++i) {
    const double am = geo.face_w[i] * K[i] / (geo.cell_w[i] * dr * dr);
    const double ap = geo.face_w[i + 1] * K[i + 1] / (geo.cell_w[i] * dr * dr);
    const double bm = i > 0 ? 0.5 * K[i] * S[i] / dr : 0.0;  // inner face carries D = 0
    const double bp = 0.5 * K[i + 1] * S[i + 1] / dr;
    lo[i] = am + bm;
    up[i] = ap - bp;
    di[i] = -(am + ap) - bm + bp;
    if (i == 0) {
      // symmetry: u_{-1} = u_0 and the inner face weight vanishes
      di[i] += lo[i];
      lo[i] = 0.0;
    }
    const double Lw = di[i] * w[i] + (i > 0 ? lo[i] * w[i - 1] : 0.0) +
                      (i + 1 < M ? up[i] * w[i + 1] : 0.0);
    max_rate = std::max(max_rate, std::abs(Lw));
  }
  return max_rate;
}

// One step of linearly implicit Euler, or of variable-step BDF2 when the
// previous level is supplied. For BDF2 the coefficients are frozen at the
// linear extrapolation to the new level.
StepInfo implicit_step(const PdeConfig& config, const RadialGrid& grid, const Geometry& geo,
                       Field& field, double dt, const std::vector<double>* u_old,
                       double dt_old) {
  const auto& P = config.params;
  auto& u = field.u;
  StepInfo info;
  const double umax = sup_norm(u);
  if (umax == 0.0) return info;
  const double eps = config.eps_reg * umax;
  const double eps2 = eps * eps;
  const int M = grid.M;
  const bool bdf2 = u_old && dt_old > 0.0;

  std::vector<double> lo, di, up;
  if (bdf2) {
    if (dt <= 0.0) {
      double rate = 0.0;
      for (int i = 0; i < M; ++i) rate = std::max(rate, std::abs(u[i] - (*u_old)[i]) / dt_old);
      if (rate == 0.0) return info;
      dt = std::min(config.dt_theta * umax / rate, 1.5 * dt_old);
    }
    const double om = dt / dt_old;
    std::vector<double> ext(M);
    for (int i = 0; i < M; ++i) ext[i] = u[i] + om * (u[i] - (*u_old)[i]);
    build_operator(P, grid, geo, ext, eps2, lo, di, up);
  } else {
    const double max_rate = build_operator(P, grid, geo, u, eps2, lo, di, up);
    if (dt <= 0.0) {
      if (max_rate == 0.0) return info;
      dt = config.dt_theta * umax / max_rate;
    }
  }
  if (dt < 1e-300) throw Error(ErrorCode::TimestepUnderflow, "TimestepUnderflow: implicit dt");

  double c0 = 1.0;
  std::vector<double> a(M), b(M), c(M), rhs(u);
  if (bdf2) {
    const double om = dt / dt_old;
    c0 = (1.0 + 2.0 * om) / (1.0 + om);
    const double c1 = 1.0 + om, c2 = om * om / (1.0 + om);
    for (int i = 0; i < M; ++i) rhs[i] = c1 * u[i] - c2 * (*u_old)[i];
  }
  for (int i = 0; i < M; ++i) {
    a[i] = -dt * lo[i];
    b[i] = c0 - dt * di[i];
    c[i] = -dt * up[i];
  }
  num::solve_tridiagonal(a, b, c, rhs);
  for (int i = 0; i < M; ++i) {
    if (rhs[i] < 0.0) {
      rhs[i] = 0.0;
      ++info.clamps;
    }
  }
  u.swap(rhs);
  field.t += dt;
  info.dt = dt;
  return info;
}

Functionals functionals(const Params& params, const RadialGrid& grid, const Geometry& geo,
                        const std::vector<double>& u, const std::vector<double>* u_prev,
                        double dt) {
  const double omega = 2.0 * std::pow(std::numbers::pi, 0.5 * params.N) / std::tgamma(0.5 * params.N);
  Functionals F;
  for (int i = 0; i < grid.M; ++i) {
    F.I += geo.cell_e[i] * u[i] * u[i];
    if (u_prev && dt > 0.0) {
      const double ut = (u[i] - (*u_prev)[i]) / dt;
      F.D += geo.cell_e[i] * ut * ut;
    }
  }
  // faces 1..M; the face at r = 0 carries zero gradient
  for (int i = 1; i <= grid.M; ++i) {
    const double D = i < grid.M ? (u[i] - u[i - 1]) / grid.dr : -u[grid.M - 1] / grid.dr;
    F.J += geo.face_e[i] * std::pow(std::abs(D), params.p);
  }
  F.I *= 0.5 * omega * grid.dr;
  F.J *= omega * grid.dr / params.p;
  F.D *= omega * grid.dr;
  F.E = F.J - F.I;
  return F;
}

}  // namespace

Functionals weighted_functionals(const Params& params, const RadialGrid& grid,
                                 const std::vector<double>& u, const std::vector<double>* u_prev,
                                 double dt) {
  if (u.size() != static_cast<std::size_t>(grid.M) ||
      (u_prev && u_prev->size() != u.size())) {
    throw Error(ErrorCode::GridMismatch, "weighted_functionals: field size does not match grid");
  }
  return functionals(params, grid, geometry(params, grid), u, u_prev, dt);
}

ExtinctionFit fit_extinction(const std::vector<FrameRecord>& records, double p) {
  if (records.empty()) throw Error(ErrorCode::InsufficientDecay, "InsufficientDecay: no records");
  const double u_last = records.back().umax;
  const double u_first = records.front().umax;
  std::vector<double> t, y;
  if (u_last > 0.0 && u_last * 10.0 <= u_first) {
    for (const auto& rec : records) {
      if (rec.umax <= 10.0 * u_last) {
        t.push_back(rec.t);
        y.push_back(std::pow(rec.umax, 2.0 - p));
      }
    }
  }
  if (t.size() < 20) {
    throw Error(ErrorCode::InsufficientDecay,
                "InsufficientDecay: fewer than 20 records in the final decade of the sup norm");
  }
  const auto fit = num::fit_line(t, y);
  if (!(fit.slope < 0.0)) {
    throw Error(ErrorCode::InsufficientDecay, "InsufficientDecay: sup norm is not decreasing");
  }
  ExtinctionFit out;
  out.T_e = -fit.intercept / fit.slope;
  out.rate_r2 = fit.r2;
  out.points = t.size();
  return out;
}

double fit_rate_exponent(const std::vector<FrameRecord>& records, double T_e) {
  std::vector<double> x, y;
  const double u0 = records.front().umax;
  for (const auto& rec : records) {
    if (rec.umax <= 1e-2 * u0 && rec.umax > 0.0 && rec.t < T_e) {
      x.push_back(std::log(T_e - rec.t));
      y.push_back(std::log(rec.umax));
    }
  }
  if (x.size() < 2) throw Error(ErrorCode::InsufficientDecay, "rate exponent: too few records");
  return num::fit_line(x, y).slope;
}

PdeRun run_to_extinction(const PdeConfig& config, const RadialGrid& grid, Field field) {
  const auto& P = config.params;
  if (field.u.size() != static_cast<std::size_t>(grid.M)) {
    throw Error(ErrorCode::GridMismatch, "run_to_extinction: field size does not match grid");
  }
  PdeRun run;
  run.grid = grid;
  const double u0 = sup_norm(field.u);
  if (!(u0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "run_to_extinction: zero initial data");
  const double stop = config.ext_tol * u0;
  const bool watch_super = config.init == InitKind::ExpTail;
  const auto geo = geometry(P, grid);
  std::vector<double> bound(grid.M);
  for (int i = 0; i < grid.M; ++i) bound[i] = config.kappa0 * std::exp(-grid.r[i] * P.e_g);

  auto monitor = [&](const std::vector<double>& u) {
    const double umax = sup_norm(u);
    for (int i = 0; i + 1 < grid.M; ++i) {
      if (u[i + 1] > u[i] + 1e-14 * umax) ++run.monotonicity_violations;
    }
    if (watch_super) {
      for (int i = 0; i < grid.M; ++i) {
        run.supersolution_excess = std::max(run.supersolution_excess, u[i] - bound[i]);
      }
    }
  };

  auto F = functionals(P, grid, geo, field.u, nullptr, 0.0);
  run.records.push_back({field.t, u0, F.I, F.J, 0.0, F.E, 0.0});
  run.snapshots.push_back({field.t, field.u});
  monitor(field.u);
  double next_level = u0 * std::pow(10.0, -1.0 / config.snapshots_per_decade);

  std::vector<double> prev, prev2;
  double dt_prev = 0.0;
  while (run.records.back().umax >= stop) {
    if (++run.steps > config.max_steps) {
      throw Error(ErrorCode::MaxStepsExceeded, "MaxStepsExceeded: extinction not reached");
    }
    prev2.swap(prev);
    prev = field.u;
    const bool bdf2 = config.time_order == 2 && dt_prev > 0.0;
    const auto info = config.scheme == TimeScheme::Explicit
                          ? step_explicit(config, grid, field)
                          : implicit_step(config, grid, geo, field, 0.0, bdf2 ? &prev2 : nullptr,
                                          dt_prev);
    if (info.dt == 0.0) break;  // u vanished identically
    dt_prev = info.dt;
    run.clamps += info.clamps;
    const double um = sup_norm(field.u);
    F = functionals(P, grid, geo, field.u, &prev, info.dt);
    const auto& last = run.records.back();
    const double Javg = 0.5 * (F.J + last.J);
    const double balance =
        Javg > 0.0 ? std::abs((F.I - last.I) / info.dt + P.p * Javg) / (P.p * Javg) : 0.0;
    run.records.push_back({field.t, um, F.I, F.J, F.D, F.E, balance});
    monitor(field.u);
    if (um <= next_level && um >= stop) {
      run.snapshots.push_back({field.t, field.u});
      while (next_level >= um) next_level *= std::pow(10.0, -1.0 / config.snapshots_per_decade);
    }
  }
  run.fit = fit_extinction(run.records, P.p);
  run.rate_exponent = fit_rate_exponent(run.records, run.fit.T_e);
  return run;
}

std::vector<RescaledFrame> rescale_frames(const Params& params,
                                          const std::vector<Snapshot>& snapshots, double T_e) {
  std::vector<RescaledFrame> out;
  out.reserve(snapshots.size());
  for (const auto& snap : snapshots) {
    if (!(snap.t < T_e)) {
      throw Error(ErrorCode::BadExtinctionTime,
                  "BadExtinctionTime: snapshot at t = " + std::to_string(snap.t) +
                      " is not before T_e = " + std::to_string(T_e));
    }
    RescaledFrame fr;
    fr.t = snap.t;
    fr.s = -std::log((T_e - snap.t) / T_e) / (2.0 - params.p);
    const double scale = std::pow((2.0 - params.p) * (T_e - snap.t), params.e_time);
    fr.v.resize(snap.u.size());
    for (std::size_t i = 0; i < snap.u.size(); ++i) fr.v[i] = snap.u[i] / scale;
    out.push_back(std::move(fr));
  }
  return out;
}

double compare_to_profile(const RadialGrid& grid, const std::vector<double>& v,
                          const ProfileTable& profile) {
  if (v.size() != static_cast<std::size_t>(grid.M)) {
    throw Error(ErrorCode::GridMismatch, "compare_to_profile: frame size does not match grid");
  }
  double sup = 0.0;
  for (int i = 0; i < grid.M; ++i) sup = std::max(sup, std::abs(v[i] - profile(grid.r[i])));
  return sup;
}

ProfileTable ground_state_profile(const Params& params, const GroundStateResult& gs,
                                  const IntegratorOptions& opts) {
  IntegratorOptions o = opts;
  if (gs.rel_tol_used > 0.0) o.rel_tol = gs.rel_tol_used;
  o.r_max = std::max(o.r_max, gs.trust_radius * 1.5);
  return ProfileTable(params, full_trajectory(params, gs.a_star, o), gs.trust_radius);
}

std::vector<FrameComparison> compare_frames(const Params& params, const PdeRun& run,
                                            const ProfileTable& profile) {
  std::vector<FrameComparison> out;
  for (const auto& fr : rescale_frames(params, run.snapshots, run.fit.T_e)) {
    FrameComparison c;
    c.t = fr.t;
    c.s = fr.s;
    c.vmax = *std::max_element(fr.v.begin(), fr.v.end());
    c.sup_error = compare_to_profile(run.grid, fr.v, profile);
    c.energy = weighted_functionals(params, run.grid, fr.v).E;
    out.push_back(c);
  }
  return out;
}

}  // namespace selfsim
