#pragma once

#include <vector>

#include "jgl/real.hpp"
#include "jgl/weight.hpp"

namespace jgl {

/// Per-degree data of the monic orthogonal polynomials P_n for one weight.
///
/// Index ranges: h, p and logD run to n_max + 1; alpha and beta to n_max.
/// beta[0] = 0, p[0] = 0, logD[0] = ln D_0 = 0.
struct OrthoSystem {
  WeightParams params;
  int n_max = 0;
  long bits = 0;
  std::vector<Real> h;
  std::vector<Real> alpha;
  std::vector<Real> beta;
  std::vector<Real> p;
  std::vector<Real> logD;
};

/// Residues of the ladder coefficients A_n(z), B_n(z) at the jumps, with the
/// polynomial values they are built from.
struct AuxQuantities {
  int n = 0;
  Real s1, s2;
  Real R1, R2;
  Real r1, r2;
  Real Pn_at_s1, Pn_at_s2;
  Real Pnm1_at_s1, Pnm1_at_s2;
};

struct LadderCoeffs {
  Real z;
  Real An_at_z;
  Real Bn_at_z;
};

struct BuildOptions {
  /// Recompute at twice the precision and require agreement to agree_tol.
  bool verify_precision = true;
};

/// 64 + 12 n_max bits.
long default_bits(int n_max);

/// LDL^T factorization of the moment matrix (m_{i+j})_{i,j=0}^{n_max+1}.
/// Throws NotPositiveDefinite or PrecisionExhausted.
OrthoSystem build_ortho_system(const WeightParams& params, int n_max, const PrecisionContext& ctx,
                               const BuildOptions& options = {});

/// Starts at default_bits(n_max) (or ctx.bits() if larger) and doubles until
/// two consecutive precisions agree.
OrthoSystem build_ortho_system_auto(const WeightParams& params, int n_max, const PrecisionContext& ctx,
                                    long max_bits = 1L << 16);

/// Discretized Stieltjes procedure on Gauss-Legendre panels; an independent
/// route to the same data. Throws QuadratureNotConverged.
OrthoSystem stieltjes_oracle(const WeightParams& params, int n_max, const PrecisionContext& ctx);

/// P_n(x) by the three-term recurrence.
Real eval_monic(int n, const Real& x, const OrthoSystem& sys);

struct MonicPair {
  Real Pn;
  Real Pnm1;
};
/// (P_n(x), P_{n-1}(x)), with P_{-1} = 0.
MonicPair eval_monic_pair(int n, const Real& x, const OrthoSystem& sys);

AuxQuantities aux_quantities(int n, const OrthoSystem& sys, const PrecisionContext& ctx);

/// Throws PoleHit when z is a jump location.
LadderCoeffs ladder_eval(int n, const Real& z, const AuxQuantities& aux);

enum class SigmaRoute { sum_R, two_p, closed_form };

/// sigma_n = (d/ds1 + d/ds2) ln D_n. sigma_0 = 0.
Real sigma_n(const OrthoSystem& sys, int n, SigmaRoute route, const PrecisionContext& ctx);

/// True when |R_{n,i}| is negligible against |r_{n,i}| so that r^2/R is not
/// computable; exact zeros from B_i = 0 are not degenerate.
bool residue_degenerate(const Real& R, const Real& r, const Real& B, long bits);

}  // namespace jgl
