#pragma once

// Inhomogeneous Poisson processes with deterministic smooth + jump rates
//
//   rate(t) = sum_i A_i x_i(t - t_i) 1(t >= t_i),
//
// simulated exactly by thinning against a per-unit-window envelope.

#include "abrupt/process.hpp"
#include "abrupt/rng.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace abrupt {

enum class ShapeKind { Constant, Sinusoid, ExpDecay, Polynomial };

// x(s) for s >= 0, measured from the component's onset.
class SmoothShape {
public:
    static SmoothShape constant();
    // offset + sin(omega s + phase)
    static SmoothShape sinusoid(double offset, double omega, double phase);
    // exp(-rate s)
    static SmoothShape exp_decay(double rate);
    // sum_i coeffs[i] s^i
    static SmoothShape polynomial(std::vector<double> coeffs);
    // From the rate-spec file vocabulary: constant, sinusoid, exp-decay, polynomial.
    static SmoothShape from_name(std::string_view name, std::vector<double> params);

    ShapeKind kind() const { return kind_; }
    std::string_view name() const;
    const std::vector<double>& params() const { return params_; }

    double operator()(double s) const;
    // Upper bound of x on [s_lo, s_hi] (0 <= s_lo <= s_hi).
    double upper_bound(double s_lo, double s_hi) const;

private:
    SmoothShape(ShapeKind kind, std::vector<double> params);

    ShapeKind kind_ = ShapeKind::Constant;
    std::vector<double> params_;
};

struct JumpComponent {
    double amplitude;
    double onset;
    SmoothShape shape;
};

class RateSpec {
public:
    RateSpec() = default;
    // Checks amplitudes > 0, onsets >= 0, and x_i(0) > 0 for every component
    // starting after time zero (positive jumps).
    explicit RateSpec(std::vector<JumpComponent> components);

    const std::vector<JumpComponent>& components() const { return components_; }

    // Dense-sampling check that the rate is non-negative on [0, horizon].
    void validate_on(double horizon) const;

    // Onsets of components starting after time zero: the jump locations.
    std::vector<double> jump_times() const;

private:
    std::vector<JumpComponent> components_;
};

// Right-continuous: a component counts from its onset onward.
double eval_rate(const RateSpec& spec, double t);

// M >= sup of the rate on [a, b] from per-shape analytic bounds.
double rate_upper_bound(const RateSpec& spec, double a, double b);

// Events on [0, horizon], sorted and duplicate-free. Identical (spec, horizon, seed)
// give identical output.
EventTimes simulate(const RateSpec& spec, double horizon, const SimSeed& seed);

// Same random path as simulate(), streamed straight into bins of `bin_width`
// so memory is O(horizon / bin_width) instead of O(events).
BinnedSeries simulate_binned(const RateSpec& spec, double horizon, const SimSeed& seed,
                             double bin_width);

// B (1 + sin t) + A exp(-(t - t0)) 1(t >= t0); the synthetic benchmark.
RateSpec sin_plus_exp_rate(double baseline, double jump, double onset);
// B + A exp(-(t - t0)) 1(t >= t0).
RateSpec const_plus_exp_rate(double baseline, double jump, double onset);
// Named presets: "paper-sin-exp" (B = 1e6, A = 4e4, t0 = 9) and "const-plus-exp"
// (B = 1e4, A = 8e3, t0 = 1).
RateSpec rate_preset(std::string_view name);

// One component per line: `A=<real> t0=<real> shape=<name> params=<comma list>`.
RateSpec parse_rate_spec(std::string_view text, const std::string& source);
RateSpec read_rate_spec(const std::filesystem::path& path);
std::string format_rate_spec(const RateSpec& spec);

}  // namespace abrupt
