#pragma once

#include <vector>

#include "params.hpp"
#include "profile_ode.hpp"

namespace selfsim {

struct Coeffs {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
};

/// alpha = delta = rho^{2p/(3p-2)}, beta and gamma as in the Pohozaev
/// functional. Throws Domain for r <= 0.
Coeffs coeff_functions(const Params& params, double r);

/// Same coefficients divided by alpha; finite for every r > 0.
Coeffs coeff_ratios(const Params& params, double r);

struct CubicCoeffs {
  double M0 = 0.0;
  double M1 = 0.0;
  double M2 = 0.0;
  double M3 = 0.0;
};

CubicCoeffs cubic_coeffs(const Params& params);
/// Raw form for any (N, p); no range check, so p = p_c can be probed.
CubicCoeffs cubic_coeffs(int N, double p);

/// P(z) = (N-1)(M3 z^3 + M2 z^2 + M1 z) + M0, so that
/// (3p-2)^3 G(r) / (p alpha(r)) = P(1/r).
double cubic_P(const Params& params, const CubicCoeffs& m, double z);

struct RootG {
  double r_G = 0.0;
  double z = 0.0;           ///< 1 / r_G, or 0 when degenerate
  bool degenerate = false;  ///< N = 1: P is the negative constant M0
};

/// Unique positive root of P, bracketed on (0, 1e3] and polished by Newton.
/// Throws RootBracketFailure if no sign change is found.
RootG find_r_G(const Params& params);

/// G from the cubic form (production path).
double G_cubic(const Params& params, double r);

/// G = (N-1) beta / r^2 + gamma'/2 with gamma' by central differences,
/// step 1e-5 r. Independent of the cubic.
double G_direct(const Params& params, double r);

/// J = alpha g^2 [ (g'/g)^2/2 + (beta/alpha)(g'/g) + gamma/(2 alpha)
///                 + (p-1)/p g^{(2-p)/(p-1)} ]
/// evaluated in log space for the alpha g^2 factor. Falls back to the plain
/// quadratic form when g == 0.
double J_value(const Params& params, double r, double g, double dg);

/// Sign-carrying bracket of J (J / (alpha g^2)); finite where J overflows.
double J_bracket(const Params& params, double r, double g, double dg);

struct JSample {
  double r = 0.0;
  double J = 0.0;
  double G = 0.0;
  double gsq = 0.0;
};

std::vector<JSample> J_along(const Params& params, const Trajectory& traj);

/// max over samples in [lo, hi] of |dJ/dr - G g^2| / (alpha (g^2 + g'^2)),
/// with dJ/dr from a 7-point stencil on the sample grid. Samples without a
/// full stencil are skipped.
double J_identity_residual(const Params& params, const Trajectory& traj, double lo, double hi);

struct WronskianResult {
  double max_residual = 0.0;  ///< max |W - Q| / max |W| over the window
  double max_W = 0.0;
  double W0 = 0.0;            ///< W at the first common grid point
  std::size_t points = 0;
};

/// W = g1' g2 - g1 g2' against (1/rho(r)) int_0^r rho (g2^k - g1^k) g1 g2 ds
/// with k = (2-p)/(p-1), on a uniform grid of spacing `h` over
/// [max(start radii), r_hi]. The integral starts from the series-start region,
/// where its contribution is O(eps^{N+2}). Both trajectories are resampled by
/// cubic Hermite interpolation. Throws GridMismatch if the window is empty or
/// g leaves (0, inf) inside it.
WronskianResult wronskian_check(const Params& params, const Trajectory& t1, const Trajectory& t2,
                                double r_hi, double h = 1e-3);

struct XSample {
  double r = 0.0;
  double q = 0.0;  ///< g2 / g1
  double X = 0.0;  ///< q^2 J1 - J2
};

/// Samples q and X on the union of both sample grids up to r_hi. Points
/// with g1 <= 0 are skipped; the count is returned through `flagged`.
std::vector<XSample> comparison_X(const Params& params, const Trajectory& t1,
                                  const Trajectory& t2, double r_hi,
                                  std::size_t* flagged = nullptr);

struct Z0Sample {
  double r = 0.0;
  double z0 = 0.0;
  double Z0 = 0.0;
};

/// z0(r) = (1/rho(r)) int_0^r rho(s) ds by Gauss-Kronrod quadrature, and its
/// quadratic Pohozaev functional Z0.
std::vector<Z0Sample> small_a_limit_z0(const Params& params, const std::vector<double>& r_grid);

}  // namespace selfsim
