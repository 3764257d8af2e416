#pragma once

#include <cstddef>
#include <vector>

#include "params.hpp"
#include "profile_ode.hpp"
#include "shooting.hpp"

namespace selfsim {

struct RadialGrid {
  double R_inf = 15.0;
  int M = 2000;
  double dr = 0.0;
  std::vector<double> r;  ///< cell centres (i + 1/2) dr

  static RadialGrid make(double R_inf, int M);
  double face(int i) const { return i * dr; }  ///< r_{i-1/2}
};

struct Field {
  std::vector<double> u;
  double t = 0.0;
};

/// f(.; a) from a shooting trajectory up to `r_match`, continued beyond it by
/// the fast-decay form A r^{-(N-1)/(p-1)} e^{-r/(p-1)} with A chosen so the
/// two pieces agree at r_match.
class ProfileTable {
 public:
  ProfileTable() = default;
  ProfileTable(const Params& params, const Trajectory& traj, double r_match);
  double operator()(double r) const;
  double a() const { return a_; }
  double r_match() const { return r_match_; }

 private:
  Trajectory traj_;
  double a_ = 0.0;
  double r_match_ = 0.0;
  double log_amp_ = 0.0;
  double power_ = 0.0;
  double rate_ = 0.0;
};

/// f(.; a*) integrated at the tolerance the bisection used, matched to the
/// fast-decay form at the trust radius.
ProfileTable ground_state_profile(const Params& params, const GroundStateResult& gs,
                                  const IntegratorOptions& opts);

enum class InitKind { ExpTail, Separable, Custom };
enum class TimeScheme { Explicit, LinearlyImplicit };

struct PdeConfig {
  Params params;
  double kappa0 = 1.0;
  InitKind init = InitKind::ExpTail;
  double T0 = 1.0;            ///< separable data only
  double eps_reg = 1e-12;     ///< relative to the current sup norm
  double cfl_safety = 0.4;    ///< explicit scheme
  double ext_tol = 1e-10;     ///< relative to the initial sup norm
  double R_inf = 15.0;
  int M = 2000;
  TimeScheme scheme = TimeScheme::LinearlyImplicit;
  double dt_theta = 1e-3;     ///< implicit: dt max|u_t| = theta ||u||
  int time_order = 2;         ///< implicit: 1 = linearly implicit Euler, 2 = BDF2
  long max_steps = 20'000'000;
  int snapshots_per_decade = 4;
};

/// exp_tail: kappa0 e^{-r/(p-1)}; separable: ((2-p)T0)^{1/(2-p)} f(r; a*);
/// custom: interpolated (r, u) table. Throws NonMonotoneInitialData for an
/// increasing custom table and InvalidArgument when a needed table is missing.
Field make_initial(const PdeConfig& config, const RadialGrid& grid,
                   const ProfileTable* profile = nullptr,
                   const std::vector<std::pair<double, double>>* custom = nullptr);

struct StepInfo {
  double dt = 0.0;
  long clamps = 0;
};

/// Explicit forward Euler step of the regularized conservative scheme with
/// the stability-limited dt. Throws TimestepUnderflow if dt < 1e-16.
StepInfo step_explicit(const PdeConfig& config, const RadialGrid& grid, Field& field);

/// Linearly implicit step: diffusivity and absorption coefficients frozen at
/// the old level, one tridiagonal solve. dt <= 0 selects the theta rule.
StepInfo step_implicit(const PdeConfig& config, const RadialGrid& grid, Field& field,
                       double dt = 0.0);

struct Functionals {
  double I = 0.0;
  double J = 0.0;
  double D = 0.0;
  double E = 0.0;  ///< J - I
};

Functionals weighted_functionals(const Params& params, const RadialGrid& grid,
                                 const std::vector<double>& u,
                                 const std::vector<double>* u_prev = nullptr, double dt = 0.0);

struct FrameRecord {
  double t = 0.0;
  double umax = 0.0;
  double I = 0.0;
  double J = 0.0;
  double D = 0.0;
  double E = 0.0;
  double balance = 0.0;  ///< |dI/dt + p J| / (p J), J averaged over the step
};

struct Snapshot {
  double t = 0.0;
  std::vector<double> u;
};

struct ExtinctionFit {
  double T_e = 0.0;
  double rate_r2 = 0.0;
  std::size_t points = 0;
};

struct PdeRun {
  RadialGrid grid;
  std::vector<FrameRecord> records;
  std::vector<Snapshot> snapshots;
  ExtinctionFit fit;
  double rate_exponent = 0.0;
  long steps = 0;
  long clamps = 0;
  long monotonicity_violations = 0;
  double supersolution_excess = 0.0;  ///< max of u - kappa0 e^{-r/(p-1)}, exp_tail only
};

/// Steps until ||u|| < ext_tol ||u0||, recording functionals every step and
/// snapshots at log-spaced sup-norm levels. Throws MaxStepsExceeded.
PdeRun run_to_extinction(const PdeConfig& config, const RadialGrid& grid, Field field);

/// Least squares of ||u||^{2-p} against t over the last decade of ||u||.
/// Throws InsufficientDecay with fewer than 20 records there.
ExtinctionFit fit_extinction(const std::vector<FrameRecord>& records, double p);

/// Slope of log ||u|| against log(T_e - t) over records with
/// ||u|| <= 1e-2 ||u0||.
double fit_rate_exponent(const std::vector<FrameRecord>& records, double T_e);

struct RescaledFrame {
  double t = 0.0;
  double s = 0.0;
  std::vector<double> v;
};

/// v = u / ((2-p)(T_e - t))^{1/(2-p)}, s = -log((T_e - t)/T_e)/(2-p).
/// Throws BadExtinctionTime if a snapshot has t >= T_e.
std::vector<RescaledFrame> rescale_frames(const Params& params,
                                          const std::vector<Snapshot>& snapshots, double T_e);

/// sup_i |v_i - f(r_i; a*)|.
double compare_to_profile(const RadialGrid& grid, const std::vector<double>& v,
                          const ProfileTable& profile);

struct FrameComparison {
  double t = 0.0;
  double s = 0.0;
  double vmax = 0.0;
  double sup_error = 0.0;
  double energy = 0.0;  ///< weighted energy of v
};

/// Rescales every snapshot with the fitted extinction time and compares it
/// with the profile.
std::vector<FrameComparison> compare_frames(const Params& params, const PdeRun& run,
                                            const ProfileTable& profile);

}  // namespace selfsim
