#pragma once

// Observed-data likelihood of the heteroscedastic factor model
//   y_i = F z_i + e_i,  z_i ~ N(0, I_k),  e_i ~ N(0, v_{g_i} I_d)
// and the E-step quantities shared by the batch and streaming solvers.
//
// All likelihood and minorizer values drop the additive constants that do not
// depend on (F, v); only differences between parameter values are meaningful.

#include "shasta/types.hpp"

#include <span>

namespace shasta {

/// Result of one E-step over a single sample at anchor (F, v_g).
struct SampleEStep {
  Matrix gram;            // F_o' F_o
  Matrix m;               // (F_o' F_o + v_g I)^{-1}
  Vector zbar;            // m F_o' y_o
  double residual_sq;     // ||y_o - F_o zbar||^2
  double y_dot_residual;  // y_o' (y_o - F_o zbar)
  double logdet_a;        // log det(F_o' F_o + v_g I)
  double variance;        // the (floored) v_g used
  Index observed;         // |omega|

  /// ||y_o - F_o zbar||^2 + v_g tr(F_o' F_o m): the per-sample variance
  /// statistic that drives every v update.
  double rho() const;

  /// ln det(F_o F_o' + v I)^{-1} - y_o'(F_o F_o' + v I)^{-1} y_o via Woodbury.
  double log_likelihood() const;
};

/// E-step at (f, v_g) for sample s. Cost O(|omega| k^2 + k^3).
SampleEStep e_step(const FactorMatrix& f, double v_g, const ObservedSample& s);

/// Posterior moments (M, zbar) of z given y_o at (f, v).
PosteriorStats posterior_stats(const FactorMatrix& f, const NoiseVariances& v,
                               const ObservedSample& s);

/// Per-sample log-likelihood term L_i (no 1/2, constants dropped).
double sample_log_likelihood(const FactorMatrix& f, const NoiseVariances& v,
                             const ObservedSample& s);

/// 1/2 sum_i L_i over a dataset.
double dataset_log_likelihood(const FactorMatrix& f, const NoiseVariances& v,
                              std::span<const ObservedSample> data);

/// EM minorizer Psi_i(F, v; anchor_f, anchor_v) of L_i / 2, constants dropped.
double minorizer_value(const FactorMatrix& f, const NoiseVariances& v,
                       const FactorMatrix& anchor_f, const NoiseVariances& anchor_v,
                       const ObservedSample& s);

}  // namespace shasta
