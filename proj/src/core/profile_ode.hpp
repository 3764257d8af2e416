#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "params.hpp"

namespace selfsim {

/// Point on the first-order reduction of the profile equation:
/// g = -|f'|^{p-2} f', so f' = -|g|^{(2-p)/(p-1)} g.
struct ProfileState {
  double r = 0.0;
  double f = 0.0;
  double g = 0.0;
};

struct ProfileDerivs {
  double df = 0.0;
  double dg = 0.0;
};

/// Which right-hand side to integrate. `Profile` carries the gradient
/// absorption term |g|; `AbsorptionFree` is the large-a limit problem for psi.
enum class OdeSystem { Profile, AbsorptionFree };

ProfileDerivs rhs(const Params& params, const ProfileState& state,
                  OdeSystem system = OdeSystem::Profile);

/// Series start radius rule max(1e-8, 1e-6 / max(1, a)).
double default_eps_start(double a);

/// Truncated power series of the solution with f(0) = a, g(0) = 0 evaluated
/// at r = eps.
ProfileState series_start(const Params& params, double a, double eps,
                          OdeSystem system = OdeSystem::Profile);

/// E = (p-1)/p |f'|^p + f^2/2, nonincreasing along profile solutions.
double energy(const Params& params, const ProfileState& state);

struct IntegratorOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double r_max = 50.0;
  double eps_start = 0.0;  ///< 0 selects default_eps_start(a)
  double j_neg_threshold = 1e-8;
  double h_max_near = 0.05;  ///< step cap for r < near_radius
  double near_radius = 20.0;
  double h_max_far = 1.0;
  bool continue_past_fzero = false;
  long max_steps = 5'000'000;
};

enum class EventKind { FZero, GZero, JNegative, Truncated };

const char* event_name(EventKind kind);

struct Event {
  EventKind kind = EventKind::Truncated;
  double r = 0.0;
  double f = 0.0;
  double g = 0.0;
  double fprime = 0.0;
};

struct Sample {
  double r = 0.0;
  double f = 0.0;
  double g = 0.0;
  double fprime = 0.0;
  double dg = 0.0;  ///< g'(r) from the right-hand side
  double E = 0.0;
  double w = 0.0;   ///< rho * g
  double h = 0.0;   ///< w'/w = f/g
};

struct Trajectory {
  Params params;
  double a = 0.0;
  OdeSystem system = OdeSystem::Profile;
  std::vector<Sample> samples;
  std::vector<Event> events;

  const Event* find_event(EventKind kind) const;
  bool has_event(EventKind kind) const { return find_event(kind) != nullptr; }
  double r_end() const { return samples.back().r; }

  std::vector<double> column(double Sample::*member) const;
  /// Samples with r in [lo, hi].
  std::vector<Sample> window(double lo, double hi) const;

  /// Cubic Hermite interpolation from stored values and exact slopes.
  double f_at(double r) const;
  double g_at(double r) const;
  ProfileState state_at(double r) const;
};

/// Called after every accepted step with the new sample. Returning false stops
/// the integration; the observer may append events to the trajectory first.
using StepObserver = std::function<bool(Trajectory&, const Sample&)>;

/// Adaptive Dormand-Prince 5(4) integration from the series start with
/// sign-change events for f and g resolved on the continuous extension.
/// Throws Error(StepSizeUnderflow) when the step size collapses.
Trajectory integrate(const Params& params, double a, const IntegratorOptions& opts,
                     const StepObserver& observer = {},
                     OdeSystem system = OdeSystem::Profile);

/// Fills w and h on every sample of the trajectory (integrate() already does
/// this; exposed for trajectories assembled elsewhere). Samples with g <= 0
/// get h = NaN and are counted in the return value.
std::size_t annotate_w_h(Trajectory& traj);

/// psi'' problem without absorption, psi(0)=1, psi'(0)=0, integrated to its
/// first zero s0. Throws Error(NoZeroWithinHorizon) if psi stays positive up
/// to opts.r_max.
Trajectory psi_integrate(const Params& params, const IntegratorOptions& opts);

}  // namespace selfsim
