#pragma once

// Code-length primitives (all lengths in bits, all logs base 2).
//
//   log_star(k)       universal integer code: log2 k + log2 log2 k + ...,
//                     summing only the terms that stay strictly positive.
//   c_h(h)            normalizer making the truncated universal code over
//                     {1..h} a proper distribution:
//                     c_h = log2( sum_{k=1..h} 2^(-log_star k) ).
//   l_h_subset(k, h)  bits to describe a k-of-h task subset:
//                     log_star k + c_h + log2 C(h, k).
//   mic_model_cost    per-feature model bits under the three multi-response
//                     coding schemes.

namespace mdlsel::codes {

enum class MicScheme { partial, full, ric };

const char* mic_scheme_name(MicScheme s);

struct MicCostParams {
  int m = 1;             // number of candidate features
  int h = 1;             // number of responses
  double l_theta = 2.0;  // bits per nonzero coefficient
};

double log_star(int k);
double c_h(int h);
double log2_binomial(int n, int k);
double l_h_subset(int k, int h);

// Model bits charged for one feature included for k of the h responses.
// partial: log2 m + l_h_subset(k, h) + k * l_theta      (1 <= k <= h)
// full:    log2 m + h * l_theta                          (k in [0, h])
// ric:     k * (log2 m + l_theta)                        (1 <= k <= h)
double mic_model_cost(MicScheme scheme, int k, const MicCostParams& p);

}  // namespace mdlsel::codes

namespace mdlsel {

// Decomposition of the model bits charged for one acceptance.
struct CodeCosts {
  double l_i = 0.0;            // feature index bits
  double l_h = 0.0;            // task-subset or class bits
  double l_theta_total = 0.0;  // coefficient bits
  double total() const { return l_i + l_h + l_theta_total; }
};

}  // namespace mdlsel
