#pragma once

#include <string>
#include <utility>
#include <vector>

#include "params.hpp"
#include "profile_ode.hpp"

namespace selfsim {

enum class Verdict { A, C, Unresolved };

const char* verdict_name(Verdict v);

struct Classification {
  double a = 0.0;
  Verdict verdict = Verdict::Unresolved;
  // A: first zero of f and the crossing slope
  double R = 0.0;
  double slope = 0.0;
  // C: first radius where J < -threshold
  double r_bar = 0.0;
  // always filled from the last sample
  double r_end = 0.0;
  double h_end = 0.0;     ///< f/g
  double g_over_f = 0.0;
  int J_sign = 0;
  std::string note;       ///< e.g. the StepSizeUnderflow message
};

/// J threshold is j_neg_threshold * (1 + max J seen so far); J is watched only
/// for r > r_G.
Classification classify(const Params& params, double a, const IntegratorOptions& opts,
                        Trajectory* keep = nullptr);

struct Bracket {
  double a_lo = 0.0;  ///< verdict C
  double a_hi = 0.0;  ///< verdict A
  int steps = 0;
};

/// From a = 1, doubles until A and halves until C. Throws BracketFailure
/// after 60 doublings or 60 halvings.
Bracket bracket_search(const Params& params, const IntegratorOptions& opts);

struct PlateauOptions {
  double max_variation = 0.005;
  double min_length = 1.0;
};

struct Plateau {
  double l = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double variation = 0.0;  ///< (max - min) / mean of rho g on the window
};

/// Longest window where rho g varies by less than max_variation. Throws
/// NoPlateau if no such window of length >= min_length exists.
Plateau estimate_l(const Params& params, const Trajectory& traj, const PlateauOptions& po = {});

struct GroundStateResult {
  double a_lo = 0.0;
  double a_hi = 0.0;
  double a_star = 0.0;
  double l_star = 0.0;
  double c_star = 0.0;
  double trust_radius = 0.0;
  double plateau_r1 = 0.0;
  double plateau_r2 = 0.0;
  double plateau_variation = 0.0;
  int iterations = 0;
  int unresolved = 0;  ///< midpoints that needed an extended horizon or a shrink
  double rel_tol_used = 0.0;
};

/// Bisection keeping a_lo in C and a_hi in A until a_hi - a_lo <= tol_a.
/// rel_tol is tightened to min(opts.rel_tol, tol_a / (10 a_hi)), floor 1e-13.
/// Unresolved midpoints are retried with r_max x2.5, x5, x10; if still
/// unresolved the midpoint is nudged toward the endpoint it resembles. Throws
/// BisectionStall after 200 iterations and BracketFailure if the input is not
/// a (C, A) pair.
GroundStateResult bisect_a_star(const Params& params, const Bracket& bracket, double tol_a,
                                const IntegratorOptions& opts, const PlateauOptions& po = {});

/// Profile integrated at `a` to `r_max` without J or f-zero stopping
/// (continues past a zero of f, stops at a zero of g).
Trajectory full_trajectory(const Params& params, double a, const IntegratorOptions& opts);

/// Largest radius up to which f(.; a_lo) and f(.; a_hi) agree to 1%.
double trust_radius(const Trajectory& lo, const Trajectory& hi);

struct TailWindow {
  double lo = 0.0;
  double hi = 0.0;
  bool active() const { return hi > lo; }
};

struct TailSlopes {
  /// slope of log(r^{(N-1)/(p-1)} f) vs r; target -1/(p-1)
  double slope_exp = 0.0;
  /// slope of log f vs r without the power prefactor removed
  double slope_exp_raw = 0.0;
  /// slope of log f vs log r; target -(p-1)/(2-p)
  double slope_alg = 0.0;
  double g_over_f_exp = 0.0;  ///< mean g/f on the exponential window
  double g_over_f_alg = 0.0;  ///< mean g/f on the algebraic window
  /// f(r) ((2-p) r/(p-1))^{(p-1)/(2-p)} at the end of the algebraic window
  double prefactor = 0.0;
};

/// Least-squares tail fits. Inactive windows leave their fields at 0. Throws
/// WindowTooShort if an active window holds fewer than 8 samples with f > 0.
TailSlopes tail_slopes(const Params& params, const Trajectory& traj, TailWindow exp_window,
                       TailWindow alg_window);

struct TailIntegral {
  std::vector<double> r;
  std::vector<double> ratio;        ///< quadrature / asymptotic form
  std::vector<double> ratio_gamma;  ///< same via the incomplete gamma function
  double max_deviation = 0.0;       ///< max |ratio - 1|
  double max_route_gap = 0.0;       ///< max |ratio - ratio_gamma|
};

/// rho(r) int_r^inf rho^{-1/(p-1)} ds against (p-1) rho(r)^{-(2-p)/(p-1)}.
TailIntegral tail_integral_check(const Params& params, const std::vector<double>& r_grid);

/// sup over [0, s0] of |f(a^{-(2-p)/p} s; a)/a - psi(s)|.
double large_a_distance(const Params& params, double a, const Trajectory& psi,
                        const IntegratorOptions& opts);

/// sup over (0, r_hi] of |g(r; a)/a - z0(r)|.
double small_a_distance(const Params& params, double a, double r_hi,
                        const IntegratorOptions& opts);

}  // namespace selfsim
