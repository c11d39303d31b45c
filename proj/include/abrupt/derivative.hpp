#pragma once

// Order-l discrete derivative of a counting function with discretization delta:
//
//   D_delta^(l) N(t) = sum_{j=0..l} (-1)^(l-j) C(l, j) N(t + (j - l + 1) delta)
//
// The stencil reads N on [t - (l-1) delta, t + delta]: exactly one sample lies
// strictly after t, so a rate jump at t0 first shows up at t = t0 - delta and
// the second derivative peaks at t0 itself. Because N counts events <= t, the
// value at an exact event time includes that event.

#include "abrupt/process.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace abrupt {

inline constexpr int kMaxDerivativeOrder = 20;

class DerivativeStencil {
public:
    // Throws std::invalid_argument unless 1 <= order <= kMaxDerivativeOrder and delta > 0.
    DerivativeStencil(int order, double delta);

    int order() const { return order_; }
    double delta() const { return delta_; }
    // coefficients()[j] = (-1)^(order-j) * C(order, j)
    std::span<const std::int64_t> coefficients() const;

    // Time of the j-th sample relative to t.
    double offset(int j) const { return static_cast<double>(j - order_ + 1) * delta_; }
    // Smallest t for which the stencil stays at or after time zero.
    double earliest() const { return static_cast<double>(order_ - 1) * delta_; }

    // Applies the stencil to any callable f(double) -> arithmetic.
    template <class F>
    auto apply(const F& f, double t) const {
        using R = decltype(f(t));
        R sum{};
        const auto c = coefficients();
        for (int j = 0; j <= order_; ++j) {
            sum += static_cast<R>(c[static_cast<std::size_t>(j)]) * f(t + offset(j));
        }
        return sum;
    }

private:
    int order_;
    double delta_;
};

// Throws WindowError when [t - (order-1) delta, t + delta] is not inside [0, horizon].
Count discrete_derivative(const CountingFunction& n, int order, double delta, double t);

struct ProfilePoint {
    double time;
    Count value;
};

struct DerivativeProfile {
    int order = 1;
    double delta = 0.0;
    double grid_step = 0.0;
    // Clipped evaluation window actually used.
    double window_lo = 0.0;
    double window_hi = 0.0;
    // Set when the clipped window holds no grid point.
    bool empty_window = false;
    std::vector<ProfilePoint> points;
};

// Default evaluation grid spacing relative to delta.
inline constexpr double kDefaultGridFraction = 0.1;

// Evaluates the derivative at t_lo', t_lo' + grid_step, ... where
// [t_lo', t_hi'] is [t_lo, t_hi] clipped to [(order-1) delta, horizon - delta].
DerivativeProfile derivative_profile(const CountingFunction& n, int order, double delta,
                                     double grid_step, double t_lo, double t_hi);

// Whole valid window.
DerivativeProfile derivative_profile(const CountingFunction& n, int order, double delta,
                                     double grid_step);

// Applies the order-(degree_bound + 1) stencil to the polynomial
// sum_i coeffs[i] x^i at t. For a polynomial of degree <= degree_bound the
// result vanishes up to floating cancellation.
double annihilation_check(int degree_bound, double delta, std::span<const double> coeffs,
                          double t);

// max_j |C(l+1, j) f(t + (j - l) delta)|, the scale against which the
// annihilation residual is judged.
double annihilation_scale(int degree_bound, double delta, std::span<const double> coeffs,
                          double t);

double eval_polynomial(std::span<const double> coeffs, double x);

// CSV `t,value`.
std::string format_profile_csv(const DerivativeProfile& profile);

}  // namespace abrupt
