#include "mdlsel/codes.hpp"

#include <cmath>
#include <mutex>
#include <string>
#include <vector>

#include "mdlsel/errors.hpp"

namespace mdlsel::codes {

const char* mic_scheme_name(MicScheme s) {
  switch (s) {
    case MicScheme::partial: return "partial";
    case MicScheme::full: return "full";
    case MicScheme::ric: return "ric";
  }
  return "?";
}

double log_star(int k) {
  if (k < 1) throw DomainError("log_star needs k >= 1, got " + std::to_string(k));
  double sum = 0.0;
  double x = std::log2(static_cast<double>(k));
  while (x > 0.0) {
    sum += x;
    x = std::log2(x);
  }
  return sum;
}

double c_h(int h) {
  if (h < 1) throw DomainError("c_h needs h >= 1, got " + std::to_string(h));
  // Cache of prefix sums S[h] = sum_{k=1..h} 2^(-log_star k); extended lazily.
  static std::mutex mu;
  static std::vector<double> prefix;  // prefix[i] = S[i+1]
  std::lock_guard<std::mutex> lock(mu);
  while (static_cast<int>(prefix.size()) < h) {
    int k = static_cast<int>(prefix.size()) + 1;
    double prev = prefix.empty() ? 0.0 : prefix.back();
    prefix.push_back(prev + std::exp2(-log_star(k)));
  }
  return std::log2(prefix[static_cast<std::size_t>(h - 1)]);
}

double log2_binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) throw DomainError("binomial needs 0 <= k <= n");
  int kk = (k > n - k) ? (n - k) : k;
  double sum = 0.0;
  for (int i = 1; i <= kk; ++i) {
    sum += std::log2(static_cast<double>(n - kk + i)) - std::log2(static_cast<double>(i));
  }
  return sum;
}

double l_h_subset(int k, int h) {
  if (h < 1 || k < 1 || k > h) {
    throw DomainError("l_h_subset needs 1 <= k <= h, got k=" + std::to_string(k) +
                      " h=" + std::to_string(h));
  }
  return log_star(k) + c_h(h) + log2_binomial(h, k);
}

double mic_model_cost(MicScheme scheme, int k, const MicCostParams& p) {
  if (p.m < 1 || p.h < 1) throw DomainError("mic_model_cost needs m >= 1 and h >= 1");
  if (p.l_theta < 0.0) throw DomainError("mic_model_cost needs l_theta >= 0");
  const double li = std::log2(static_cast<double>(p.m));
  switch (scheme) {
    case MicScheme::partial:
      if (k < 1 || k > p.h) {
        throw DomainError("partial cost needs 1 <= k <= h, got k=" + std::to_string(k));
      }
      return li + l_h_subset(k, p.h) + k * p.l_theta;
    case MicScheme::full:
      if (k < 0 || k > p.h) {
        throw DomainError("full cost needs 0 <= k <= h, got k=" + std::to_string(k));
      }
      // The inclusion always pays for coefficients in every response.
      return li + p.h * p.l_theta;
    case MicScheme::ric:
      if (k < 1 || k > p.h) {
        throw DomainError("ric cost needs 1 <= k <= h, got k=" + std::to_string(k));
      }
      return k * (li + p.l_theta);
  }
  throw DomainError("unknown coding scheme");
}

}  // namespace mdlsel::codes
