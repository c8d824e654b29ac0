#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace cliquescale {

namespace detail {

// expm1(x) / x, continuous at 0.
inline double phi1(double x) noexcept {
    if (std::abs(x) < 1e-8) return 1.0 + 0.5 * x;
    return std::expm1(x) / x;
}

// integral_0^1 t e^{x t} dt, continuous at 0.
inline double phi2(double x) noexcept {
    if (std::abs(x) < 0.1) {
        double term = 1.0, sum = 0.0;
        for (int j = 0; j < 25; ++j) {
            sum += term / (j + 2);
            term *= x / (j + 1);
        }
        return sum;
    }
    return (std::exp(x) * (x - 1.0) + 1.0) / (x * x);
}

// integral_{u0}^{u1} u^j e^{g u} du for j in {0, 1}; u1 may be +inf when g < 0.
inline double exp_moment(int j, double g, double u0, double u1) noexcept {
    if (std::isinf(u1)) {
        const double e = std::exp(g * u0);
        return j == 0 ? -e / g : e * (u0 / -g + 1.0 / (g * g));
    }
    const double len = u1 - u0;
    if (len <= 0.0) return 0.0;
    const double e = std::exp(g * u0);
    const double x = g * len;
    if (j == 0) return e * len * phi1(x);
    return e * (u0 * len * phi1(x) + len * len * phi2(x));
}

}  // namespace detail

/// Catalogue of slowly varying functions l(h) usable in the tail h^{1-alpha} l(h).
///
///   one / const   l(h) = c, 0 <= c <= 1 (c = 0 is the point mass at h = 1)
///   log           l(h) = log(e h)
///   logpow        l(h) = log(e h)^p, p > 0
///   log_formal    l(h) = log h; not a tail near h = 1, only usable in formal mode
class SlowlyVarying {
public:
    enum class Kind { Constant, LogShifted, LogShiftedPow, LogFormal };

    static SlowlyVarying constant(double c = 1.0) {
        if (!(c >= 0.0 && c <= 1.0))
            throw InvalidParameter("constant l requires 0 <= c <= 1, got " + std::to_string(c));
        return SlowlyVarying(Kind::Constant, c);
    }
    static SlowlyVarying log_shifted() { return SlowlyVarying(Kind::LogShifted, 1.0); }
    static SlowlyVarying log_shifted_pow(double p) {
        if (!(p > 0.0)) throw InvalidParameter("logpow requires p > 0");
        if (p == 1.0) return log_shifted();
        return SlowlyVarying(Kind::LogShiftedPow, p);
    }
    static SlowlyVarying log_formal() { return SlowlyVarying(Kind::LogFormal, 1.0); }

    /// Build from a CLI / file name and its parameter list.
    static SlowlyVarying from_name(std::string_view name, const std::vector<double>& params = {}) {
        auto param = [&](double fallback) { return params.empty() ? fallback : params.front(); };
        if (name == "one") return constant(1.0);
        if (name == "const" || name == "constant") return constant(param(1.0));
        if (name == "atom") return constant(0.0);
        if (name == "log") return log_shifted();
        if (name == "logpow") return log_shifted_pow(param(1.0));
        if (name == "log_formal") return log_formal();
        throw InvalidParameter("unknown slowly varying function '" + std::string(name) +
                               "' (expected one, const, atom, log, logpow, log_formal)");
    }

    Kind kind() const noexcept { return kind_; }
    double parameter() const noexcept { return param_; }

    std::string name() const {
        switch (kind_) {
            case Kind::Constant: return param_ == 1.0 ? "one" : (param_ == 0.0 ? "atom" : "const");
            case Kind::LogShifted: return "log";
            case Kind::LogShiftedPow: return "logpow";
            case Kind::LogFormal: return "log_formal";
        }
        return "?";
    }

    std::vector<double> params() const {
        if (kind_ == Kind::LogShiftedPow) return {param_};
        if (kind_ == Kind::Constant && param_ != 1.0 && param_ != 0.0) return {param_};
        return {};
    }

    bool is_constant() const noexcept { return kind_ == Kind::Constant; }
    /// l(h) = log h up to a shift; the integer-alpha log examples apply.
    bool is_log() const noexcept { return kind_ == Kind::LogShifted || kind_ == Kind::LogFormal; }

    double operator()(double h) const noexcept {
        switch (kind_) {
            case Kind::Constant: return param_;
            case Kind::LogShifted: return 1.0 + std::log(h);
            case Kind::LogShiftedPow: return std::pow(1.0 + std::log(h), param_);
            case Kind::LogFormal: return std::log(h);
        }
        return 0.0;
    }

    double derivative(double h) const noexcept {
        switch (kind_) {
            case Kind::Constant: return 0.0;
            case Kind::LogShifted:
            case Kind::LogFormal: return 1.0 / h;
            case Kind::LogShiftedPow: return param_ * std::pow(1.0 + std::log(h), param_ - 1.0) / h;
        }
        return 0.0;
    }

    bool has_closed_form_moments() const noexcept { return kind_ != Kind::LogShiftedPow; }

    /// integral over (a, b] of h^beta dF(h) for F = 1 - h^{1-alpha} l(h), excluding
    /// any atom at 1. b may be +inf (caller checks convergence).
    std::optional<double> closed_form_moment(double alpha, double beta, double a, double b) const {
        if (!has_closed_form_moments()) return std::nullopt;
        if (!(b > a)) return 0.0;
        const double g = beta - alpha + 1.0;
        const double u0 = std::log(a);
        const double u1 = std::isinf(b) ? b : std::log(b);
        switch (kind_) {
            case Kind::Constant:
                if (param_ == 0.0) return 0.0;
                return param_ * (alpha - 1.0) * detail::exp_moment(0, g, u0, u1);
            case Kind::LogShifted:
                return (alpha - 2.0) * detail::exp_moment(0, g, u0, u1) +
                       (alpha - 1.0) * detail::exp_moment(1, g, u0, u1);
            case Kind::LogFormal:
                return (alpha - 1.0) * detail::exp_moment(1, g, u0, u1) -
                       detail::exp_moment(0, g, u0, u1);
            default: return std::nullopt;
        }
    }

    friend bool operator==(const SlowlyVarying&, const SlowlyVarying&) = default;

private:
    SlowlyVarying(Kind kind, double param) : kind_(kind), param_(param) {}

    Kind kind_ = Kind::Constant;
    double param_ = 1.0;
};

}  // namespace cliquescale
