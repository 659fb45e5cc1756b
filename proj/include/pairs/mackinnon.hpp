#pragma once

#include <array>
#include <cmath>
#include <limits>

namespace pairs::mackinnon {

// Response-surface approximations to the asymptotic distribution of the
// Dickey-Fuller tau statistic (MacKinnon 1994, Table 3 and 4). Row N-1 is for
// a test on N variables: N = 1 is the plain ADF test, N >= 2 the residual
// test of an N-variable cointegrating regression. The p-value is
// Phi(c0 + c1*tau + c2*tau^2 [+ c3*tau^3]), with the small-p polynomial below
// tau_star and the large-p polynomial above it.

inline constexpr int kMaxVariables = 6;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Surface {
    std::array<double, kMaxVariables> tau_star;
    std::array<double, kMaxVariables> tau_min;
    std::array<double, kMaxVariables> tau_max;
    std::array<std::array<double, 3>, kMaxVariables> small_p;
    std::array<std::array<double, 4>, kMaxVariables> large_p;
};

// No deterministic term.
inline constexpr Surface kNoConstant{
    {-1.04, -1.53, -2.68, -3.09, -3.07, -3.77},
    {-19.04, -19.62, -21.21, -23.25, -21.63, -25.74},
    {kInf, 1.51, 0.86, 0.88, 1.05, 1.24},
    {{{0.6344, 1.2378, 3.2496e-2},
      {1.9129, 1.3857, 3.5322e-2},
      {2.7648, 1.4502, 3.4186e-2},
      {3.4336, 1.4835, 3.19e-2},
      {4.0999, 1.5533, 3.59e-2},
      {4.5388, 1.5344, 2.9807e-2}}},
    {{{0.4797, 9.3557e-1, -0.6999e-1, 3.3066e-2},
      {1.5578, 8.558e-1, -2.083e-1, -3.3549e-2},
      {2.2268, 6.8093e-1, -3.2362e-1, -5.4448e-2},
      {2.7654, 6.4502e-1, -3.0811e-1, -4.4946e-2},
      {3.2684, 6.8051e-1, -2.6778e-1, -3.4972e-2},
      {3.7268, 7.167e-1, -2.3648e-1, -2.8288e-2}}},
};

// Constant term.
inline constexpr Surface kConstant{
    {-1.61, -2.62, -3.13, -3.47, -3.78, -3.93},
    {-18.83, -18.86, -23.48, -28.07, -25.96, -23.27},
    {2.74, 0.92, 0.55, 0.61, 0.79, 1.0},
    {{{2.1659, 1.4412, 3.8269e-2},
      {2.92, 1.5012, 3.9796e-2},
      {3.4699, 1.4856, 3.164e-2},
      {3.9673, 1.4777, 2.6315e-2},
      {4.5509, 1.5338, 2.9545e-2},
      {5.1399, 1.6036, 3.4445e-2}}},
    {{{1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2},
      {2.1945, 6.4695e-1, -2.9198e-1, -4.2377e-2},
      {2.5893, 4.5168e-1, -3.6529e-1, -5.0074e-2},
      {3.0387, 4.5452e-1, -3.3666e-1, -4.1921e-2},
      {3.5049, 5.2098e-1, -2.9158e-1, -3.3468e-2},
      {3.9489, 5.8933e-1, -2.5359e-1, -2.721e-2}}},
};

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Left-tail p-value of tau for an N-variable test.
inline double p_value(double tau, const Surface& surface, int variables) {
    const auto k = static_cast<std::size_t>(variables - 1);
    if (tau > surface.tau_max[k]) return 1.0;
    if (tau < surface.tau_min[k]) return 0.0;
    double z = 0.0;
    if (tau <= surface.tau_star[k]) {
        const auto& c = surface.small_p[k];
        z = c[0] + tau * (c[1] + tau * c[2]);
    } else {
        const auto& c = surface.large_p[k];
        z = c[0] + tau * (c[1] + tau * (c[2] + tau * c[3]));
    }
    return normal_cdf(z);
}

}  // namespace pairs::mackinnon
