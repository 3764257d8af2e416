#pragma once

namespace selfsim {

/// Dimension and diffusion exponent together with every exponent derived from
/// them. Built only through make_params(), immutable afterwards.
struct Params {
  int N = 2;
  double p = 1.5;
  double p_c = 4.0 / 3.0;   ///< 2N/(N+1)
  double e_flux = 1.0;      ///< (2-p)/(p-1), f' = -|g|^{e_flux} g
  double e_g = 2.0;         ///< 1/(p-1)
  double e_slow = 1.0;      ///< (p-1)/(2-p), algebraic decay exponent
  double e_time = 2.0;      ///< 1/(2-p), extinction rate exponent
  double e_weight = 1.2;    ///< 2p/(3p-2), Pohozaev weight exponent
  double e_energy = 3.0;    ///< p/(p-1), |f'|^p = |g|^{e_energy}
};

/// Throws Error(OutOfRange) unless N >= 1 and 2N/(N+1) < p < 2.
Params make_params(int N, double p);

/// rho(r) = r^{N-1} e^r.
double weight_rho(const Params& params, double r);

/// log rho(r); finite for every r > 0, unlike weight_rho which overflows
/// past r ~ 700.
double log_rho(const Params& params, double r);

/// rho'(r)/rho(r) = 1 + (N-1)/r.
inline double rho_log_derivative(const Params& params, double r) {
  return 1.0 + (params.N - 1) / r;
}

}  // namespace selfsim
