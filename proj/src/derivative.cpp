#include "abrupt/derivative.hpp"

#include "abrupt/error.hpp"
#include "abrupt/text_io.hpp"

#include <cmath>
#include <stdexcept>

namespace abrupt {

namespace {

using Row = std::array<std::int64_t, kMaxDerivativeOrder + 1>;

// Signed binomial rows for every order, built once.
const std::array<Row, kMaxDerivativeOrder + 1>& signed_binomials() {
    static const auto table = [] {
        std::array<Row, kMaxDerivativeOrder + 1> rows{};
        std::array<std::int64_t, kMaxDerivativeOrder + 1> pascal{};
        pascal[0] = 1;
        for (int l = 0; l <= kMaxDerivativeOrder; ++l) {
            if (l > 0) {
                for (int j = l; j > 0; --j) pascal[j] += pascal[j - 1];
            }
            for (int j = 0; j <= l; ++j) {
                rows[l][j] = ((l - j) % 2 == 0) ? pascal[j] : -pascal[j];
            }
        }
        return rows;
    }();
    return table;
}

double window_slack(double horizon) { return 1e-9 * std::max(1.0, std::abs(horizon)); }

}  // namespace

DerivativeStencil::DerivativeStencil(int order, double delta) : order_(order), delta_(delta) {
    if (order < 1 || order > kMaxDerivativeOrder) {
        throw std::invalid_argument("derivative order must be in [1, " +
                                    std::to_string(kMaxDerivativeOrder) + "]");
    }
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw std::invalid_argument("delta must be positive");
    }
}

std::span<const std::int64_t> DerivativeStencil::coefficients() const {
    const auto& row = signed_binomials()[static_cast<std::size_t>(order_)];
    return {row.data(), static_cast<std::size_t>(order_) + 1};
}

Count discrete_derivative(const CountingFunction& n, int order, double delta, double t) {
    const DerivativeStencil stencil(order, delta);
    const double horizon = n.horizon();
    const double slack = window_slack(horizon);
    if (t - stencil.earliest() < -slack) {
        throw WindowError("stencil start " + text::format_double(t - stencil.earliest()) +
                          " is before time 0 (need t >= (order-1)*delta)");
    }
    if (t + delta > horizon + slack) {
        throw WindowError("stencil end " + text::format_double(t + delta) +
                          " is after the horizon " + text::format_double(horizon));
    }
    return stencil.apply(n, t);
}

DerivativeProfile derivative_profile(const CountingFunction& n, int order, double delta,
                                     double grid_step, double t_lo, double t_hi) {
    const DerivativeStencil stencil(order, delta);
    if (!(grid_step > 0.0) || !std::isfinite(grid_step)) {
        throw std::invalid_argument("grid step must be positive");
    }
    DerivativeProfile profile;
    profile.order = order;
    profile.delta = delta;
    profile.grid_step = grid_step;
    const double horizon = n.horizon();
    const double slack = window_slack(horizon);
    profile.window_lo = std::max(t_lo, stencil.earliest());
    profile.window_hi = std::min(t_hi, horizon - delta);
    if (profile.window_hi < profile.window_lo - slack) {
        profile.empty_window = true;
        return profile;
    }
    const double span = std::max(0.0, profile.window_hi - profile.window_lo);
    const auto steps = static_cast<std::size_t>(std::floor(span / grid_step + 1e-9));
    profile.points.reserve(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        const double t = profile.window_lo + static_cast<double>(i) * grid_step;
        profile.points.push_back({t, stencil.apply(n, t)});
    }
    return profile;
}

DerivativeProfile derivative_profile(const CountingFunction& n, int order, double delta,
                                     double grid_step) {
    return derivative_profile(n, order, delta, grid_step, 0.0, n.horizon());
}

double eval_polynomial(std::span<const double> coeffs, double x) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

double annihilation_check(int degree_bound, double delta, std::span<const double> coeffs,
                          double t) {
    const DerivativeStencil stencil(degree_bound + 1, delta);
    return stencil.apply([&](double x) { return eval_polynomial(coeffs, x); }, t);
}

double annihilation_scale(int degree_bound, double delta, std::span<const double> coeffs,
                          double t) {
    const DerivativeStencil stencil(degree_bound + 1, delta);
    const auto c = stencil.coefficients();
    double scale = 0.0;
    for (int j = 0; j <= stencil.order(); ++j) {
        const double term = static_cast<double>(c[static_cast<std::size_t>(j)]) *
                            eval_polynomial(coeffs, t + stencil.offset(j));
        scale = std::max(scale, std::abs(term));
    }
    return scale;
}

std::string format_profile_csv(const DerivativeProfile& profile) {
    std::string out = "t,value\n";
    for (const auto& p : profile.points) {
        out += text::format_double(p.time);
        out += ',';
        out += std::to_string(p.value);
        out += '\n';
    }
    return out;
}

}  // namespace abrupt
