// Multipoint Laplace-transform query: locations 0 = X_0 < X_1 < ... < X_d <=
// X_{d+1} = 1, variables c_1..c_d >= 0, and the derived decreasing times
// s_k = c_k + ... + c_d, s_{d+1} = 0.

#pragma once

#include <stdexcept>
#include <vector>

namespace openkpz {

struct LaplaceQuery {
  std::vector<double> X;  // X_1 .. X_d, strictly increasing, in (0, 1]
  std::vector<double> c;  // c_1 .. c_d, nonnegative

  int d() const { return static_cast<int>(X.size()); }

  void validate() const {
    if (X.size() != c.size() || X.empty())
      throw std::invalid_argument("LaplaceQuery: X and c must be nonempty and equally sized");
    double prev = 0.0;
    for (double x : X) {
      if (!(x > prev) || !(x <= 1.0))
        throw std::invalid_argument("LaplaceQuery: need 0 < X_1 < ... < X_d <= 1");
      prev = x;
    }
    for (double ck : c)
      if (!(ck >= 0.0)) throw std::invalid_argument("LaplaceQuery: need c_k >= 0");
  }

  // s_1 .. s_{d+1} with s_k = c_k + ... + c_d and s_{d+1} = 0.
  std::vector<double> s() const {
    std::vector<double> out(c.size() + 1, 0.0);
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) out[k] = out[k + 1] + c[k];
    return out;
  }

  // X_0 .. X_{d+1} including the endpoints 0 and 1.
  std::vector<double> x_full() const {
    std::vector<double> out;
    out.push_back(0.0);
    out.insert(out.end(), X.begin(), X.end());
    out.push_back(1.0);
    return out;
  }
};

}  // namespace openkpz
