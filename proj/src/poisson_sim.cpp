#include "abrupt/poisson_sim.hpp"

#include "abrupt/error.hpp"
#include "abrupt/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace abrupt {

SmoothShape::SmoothShape(ShapeKind kind, std::vector<double> params)
    : kind_(kind), params_(std::move(params)) {
    for (double p : params_) {
        if (!std::isfinite(p)) throw std::invalid_argument("shape parameter is not finite");
    }
}

SmoothShape SmoothShape::constant() { return SmoothShape(ShapeKind::Constant, {}); }

SmoothShape SmoothShape::sinusoid(double offset, double omega, double phase) {
    return SmoothShape(ShapeKind::Sinusoid, {offset, omega, phase});
}

SmoothShape SmoothShape::exp_decay(double rate) {
    return SmoothShape(ShapeKind::ExpDecay, {rate});
}

SmoothShape SmoothShape::polynomial(std::vector<double> coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("polynomial shape needs coefficients");
    return SmoothShape(ShapeKind::Polynomial, std::move(coeffs));
}

SmoothShape SmoothShape::from_name(std::string_view name, std::vector<double> params) {
    auto expect = [&](std::size_t n) {
        if (params.size() != n) {
            throw std::invalid_argument("shape '" + std::string(name) + "' takes " +
                                        std::to_string(n) + " parameter(s), got " +
                                        std::to_string(params.size()));
        }
    };
    if (name == "constant") {
        expect(0);
        return constant();
    }
    if (name == "sinusoid") {
        expect(3);
        return sinusoid(params[0], params[1], params[2]);
    }
    if (name == "exp-decay") {
        expect(1);
        return exp_decay(params[0]);
    }
    if (name == "polynomial") return polynomial(std::move(params));
    throw std::invalid_argument("unknown shape '" + std::string(name) + "'");
}

std::string_view SmoothShape::name() const {
    switch (kind_) {
        case ShapeKind::Constant: return "constant";
        case ShapeKind::Sinusoid: return "sinusoid";
        case ShapeKind::ExpDecay: return "exp-decay";
        case ShapeKind::Polynomial: return "polynomial";
    }
    return "?";
}

double SmoothShape::operator()(double s) const {
    switch (kind_) {
        case ShapeKind::Constant: return 1.0;
        case ShapeKind::Sinusoid: return params_[0] + std::sin(params_[1] * s + params_[2]);
        case ShapeKind::ExpDecay: return std::exp(-params_[0] * s);
        case ShapeKind::Polynomial: {
            double acc = 0.0;
            for (auto it = params_.rbegin(); it != params_.rend(); ++it) acc = acc * s + *it;
            return acc;
        }
    }
    return 0.0;
}

double SmoothShape::upper_bound(double s_lo, double s_hi) const {
    switch (kind_) {
        case ShapeKind::Constant: return 1.0;
        case ShapeKind::Sinusoid: return std::abs(params_[0]) + 1.0;
        case ShapeKind::ExpDecay:
            return params_[0] >= 0.0 ? std::exp(-params_[0] * s_lo) : std::exp(-params_[0] * s_hi);
        case ShapeKind::Polynomial: {
            const double s = std::max(std::abs(s_lo), std::abs(s_hi));
            double acc = 0.0;
            for (auto it = params_.rbegin(); it != params_.rend(); ++it) acc = acc * s + std::abs(*it);
            return acc;
        }
    }
    return 0.0;
}

RateSpec::RateSpec(std::vector<JumpComponent> components) : components_(std::move(components)) {
    for (const auto& c : components_) {
        if (!(c.amplitude > 0.0) || !std::isfinite(c.amplitude)) {
            throw std::invalid_argument("component amplitude must be positive");
        }
        if (!(c.onset >= 0.0) || !std::isfinite(c.onset)) {
            throw std::invalid_argument("component onset must be finite and non-negative");
        }
        if (c.onset > 0.0 && !(c.shape(0.0) > 0.0)) {
            throw std::invalid_argument("component starting at " + text::format_double(c.onset) +
                                        " must have x(0) > 0 (positive jump)");
        }
    }
}

void RateSpec::validate_on(double horizon) const {
    constexpr int kSamples = 20000;
    for (int i = 0; i <= kSamples; ++i) {
        const double t = horizon * static_cast<double>(i) / kSamples;
        const double r = eval_rate(*this, t);
        if (r < 0.0 || !std::isfinite(r)) {
            throw std::invalid_argument("rate is negative or not finite at t = " +
                                        text::format_double(t));
        }
    }
    for (const auto& c : components_) {
        if (c.onset <= horizon && eval_rate(*this, c.onset) < 0.0) {
            throw std::invalid_argument("rate is negative at onset " + text::format_double(c.onset));
        }
    }
}

std::vector<double> RateSpec::jump_times() const {
    std::vector<double> out;
    for (const auto& c : components_) {
        if (c.onset > 0.0) out.push_back(c.onset);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double eval_rate(const RateSpec& spec, double t) {
    double r = 0.0;
    for (const auto& c : spec.components()) {
        if (t >= c.onset) r += c.amplitude * c.shape(t - c.onset);
    }
    return r;
}

double rate_upper_bound(const RateSpec& spec, double a, double b) {
    if (!(a < b)) throw std::invalid_argument("rate bound needs a < b");
    double m = 0.0;
    for (const auto& c : spec.components()) {
        if (c.onset > b) continue;
        const double s_lo = std::max(a, c.onset) - c.onset;
        const double s_hi = b - c.onset;
        m += c.amplitude * c.shape.upper_bound(s_lo, s_hi);
    }
    return std::max(m, 0.0);
}

namespace {

// Thinning over unit windows; `emit` receives each accepted event time in order.
template <class Emit>
void thin(const RateSpec& spec, double horizon, const SimSeed& seed, Emit&& emit) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("simulation horizon must be positive");
    }
    spec.validate_on(horizon);
    Engine engine = make_engine(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto windows = static_cast<std::int64_t>(std::ceil(horizon));
    double last = -1.0;
    for (std::int64_t w = 0; w < windows; ++w) {
        const double a = static_cast<double>(w);
        const double b = std::min(a + 1.0, horizon);
        if (!(a < b)) break;
        const double envelope = rate_upper_bound(spec, a, b);
        if (envelope <= 0.0) continue;
        std::exponential_distribution<double> gap(envelope);
        double t = a;
        while (true) {
            t += gap(engine);
            if (t >= b) break;
            const double rate = eval_rate(spec, t);
            if (rate > envelope * (1.0 + 1e-9)) {
                throw ConsistencyError("thinning envelope " + text::format_double(envelope) +
                                       " below rate " + text::format_double(rate) + " at t = " +
                                       text::format_double(t));
            }
            if (unit(engine) * envelope < rate && t > last) {
                emit(t);
                last = t;
            }
        }
    }
}

}  // namespace

EventTimes simulate(const RateSpec& spec, double horizon, const SimSeed& seed) {
    std::vector<double> times;
    thin(spec, horizon, seed, [&](double t) { times.push_back(t); });
    return EventTimes(std::move(times), horizon);
}

BinnedSeries simulate_binned(const RateSpec& spec, double horizon, const SimSeed& seed,
                             double bin_width) {
    if (!(bin_width > 0.0)) throw std::invalid_argument("bin width must be positive");
    const auto bins = static_cast<std::size_t>(std::ceil(horizon / bin_width - 1e-9));
    BinnedSeries out{bin_width, std::vector<Count>(bins, 0), 0.0};
    thin(spec, horizon, seed, [&](double t) {
        auto i = static_cast<std::size_t>(std::floor(t / bin_width));
        if (i >= bins) i = bins - 1;
        ++out.counts[i];
    });
    return out;
}

RateSpec sin_plus_exp_rate(double baseline, double jump, double onset) {
    return RateSpec({{baseline, 0.0, SmoothShape::sinusoid(1.0, 1.0, 0.0)},
                     {jump, onset, SmoothShape::exp_decay(1.0)}});
}

RateSpec const_plus_exp_rate(double baseline, double jump, double onset) {
    return RateSpec({{baseline, 0.0, SmoothShape::constant()},
                     {jump, onset, SmoothShape::exp_decay(1.0)}});
}

RateSpec rate_preset(std::string_view name) {
    if (name == "paper-sin-exp") return sin_plus_exp_rate(1e6, 4e4, 9.0);
    if (name == "const-plus-exp") return const_plus_exp_rate(1e4, 8e3, 1.0);
    throw std::invalid_argument("unknown rate preset '" + std::string(name) +
                                "' (known: paper-sin-exp, const-plus-exp)");
}

RateSpec parse_rate_spec(std::string_view contents, const std::string& source) {
    std::vector<JumpComponent> components;
    std::size_t lineno = 0;
    for (auto line : text::split(contents, '\n')) {
        ++lineno;
        line = text::trim(line);
        if (line.empty() || line.front() == '#') continue;
        try {
            std::optional<double> amplitude, onset;
            std::string shape;
            std::vector<double> params;
            for (auto token : text::split(line, ' ')) {
                token = text::trim(token);
                if (token.empty()) continue;
                const auto eq = token.find('=');
                if (eq == std::string_view::npos) {
                    throw std::invalid_argument("expected key=value, got '" + std::string(token) + "'");
                }
                const auto key = token.substr(0, eq);
                const auto value = token.substr(eq + 1);
                if (key == "A") {
                    amplitude = text::parse_double(value, "A");
                } else if (key == "t0") {
                    onset = text::parse_double(value, "t0");
                } else if (key == "shape") {
                    shape = std::string(value);
                } else if (key == "params") {
                    if (!text::trim(value).empty()) {
                        for (auto p : text::split(value, ',')) params.push_back(text::parse_double(p, "param"));
                    }
                } else {
                    throw std::invalid_argument("unknown key '" + std::string(key) + "'");
                }
            }
            if (!amplitude || !onset || shape.empty()) {
                throw std::invalid_argument("component needs A, t0 and shape");
            }
            components.push_back({*amplitude, *onset, SmoothShape::from_name(shape, std::move(params))});
        } catch (const std::invalid_argument& e) {
            throw ParseError(source, lineno, e.what());
        }
    }
    try {
        return RateSpec(std::move(components));
    } catch (const std::invalid_argument& e) {
        throw ParseError(source, lineno, e.what());
    }
}

RateSpec read_rate_spec(const std::filesystem::path& path) {
    return parse_rate_spec(text::read_file(path), path.string());
}

std::string format_rate_spec(const RateSpec& spec) {
    std::string out;
    for (const auto& c : spec.components()) {
        out += "A=" + text::format_double(c.amplitude) + " t0=" + text::format_double(c.onset) +
               " shape=" + std::string(c.shape.name()) + " params=";
        const auto& p = c.shape.params();
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (i) out += ',';
            out += text::format_double(p[i]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace abrupt
