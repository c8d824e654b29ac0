#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "kv.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "slowly_varying.hpp"

namespace cliquescale {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class MomentMethod { Auto, Numeric };

namespace detail {

inline double raw_tail(double alpha, const SlowlyVarying& l, double h) {
    return std::pow(h, 1.0 - alpha) * l(h);
}

// integral over (a, b] of h^beta dF(h) by parts:
//   Fbar(a) a^beta - Fbar(b) b^beta + beta * integral_a^b h^{beta-1} Fbar(h) dh,
// evaluated in u = log h. An infinite upper limit is integrated in growing
// chunks until the analytic remainder Fbar(U) U^beta |beta| / (alpha-1-beta)
// drops below 1e-13 of the running value; the remainder is then added.
inline quad::Result numeric_moment(double alpha, const SlowlyVarying& l, double beta, double a,
                                   double b, const quad::Options& opt) {
    quad::Result out;
    const double upper = std::isinf(b) ? 0.0 : raw_tail(alpha, l, b) * std::pow(b, beta);
    out.value = raw_tail(alpha, l, a) * std::pow(a, beta) - upper;
    if (beta == 0.0 || !(b > a)) return out;

    auto integrand = [&](double u) {
        const double h = std::exp(u);
        return beta * std::exp(beta * u) * raw_tail(alpha, l, h);
    };
    const double u0 = std::log(a);
    if (!std::isinf(b)) {
        const double u1 = std::log(b);
        out += quad::integrate(integrand, u0, u1, opt, quad::panel_count(u0, u1, 2.0));
        return out;
    }
    const double decay = alpha - 1.0 - beta;  // > 0
    double lo = u0;
    double width = std::max(4.0, 10.0 / decay);
    quad::Result body;
    for (int chunk = 0; chunk < 64; ++chunk) {
        const double hi = lo + width;
        body += quad::integrate(integrand, lo, hi, opt, quad::panel_count(lo, hi, 2.0));
        const double remainder = integrand(hi) / decay;
        if (std::abs(remainder) <= 1e-13 * std::abs(body.value) + opt.abs_tol || chunk == 63) {
            body.value += remainder;
            body.error += std::abs(remainder);
            if (chunk == 63) body.converged = false;
            break;
        }
        lo = hi;
        width *= 2.0;
    }
    out += body;
    return out;
}

inline quad::Result continuous_moment(double alpha, const SlowlyVarying& l, double beta, double a,
                                      double b, MomentMethod method, const quad::Options& opt) {
    if (method == MomentMethod::Auto) {
        if (auto closed = l.closed_form_moment(alpha, beta, a, b)) return {*closed, 0.0, true, 0};
    }
    return numeric_moment(alpha, l, beta, a, b, opt);
}

inline double mean_from(double alpha, const SlowlyVarying& l, double atom) {
    // E[H] = atom * 1 + integral over (1, inf) of h dF(h).
    quad::Options opt;
    opt.rel_tol = 1e-12;
    return atom + continuous_moment(alpha, l, 1.0, 1.0, kInf, MomentMethod::Auto, opt).value;
}

}  // namespace detail

/// Weight law with tail P(H > h) = h^{1-alpha} l(h), h >= 1, plus an atom at 1
/// of mass 1 - Fbar(1) when l(1) < 1. Immutable after construction.
class TailDistribution {
public:
    enum class Mode {
        Strict,  ///< tail validity is enforced
        Formal,  ///< literal h^{1-alpha} l(h) is integrated even if not a tail near 1
    };

    TailDistribution(double alpha, SlowlyVarying l, Mode mode = Mode::Strict,
                     std::optional<double> mu_override = std::nullopt)
        : alpha_(alpha), l_(l), mode_(mode) {
        if (!(alpha > 2.0) || !std::isfinite(alpha))
            throw InvalidParameter("alpha must satisfy alpha > 2 (got " + format(alpha) + ")");
        valid_tail_ = check_tail();
        if (!valid_tail_ && mode_ == Mode::Strict)
            throw InvalidParameter("h^{1-alpha} l(h) with l = " + l_.name() +
                                   " is not a nonincreasing tail with Fbar(1) <= 1 for alpha = " +
                                   format(alpha) + "; use formal mode for Q evaluation only");
        atom_ = valid_tail_ ? 1.0 - std::min(1.0, detail::raw_tail(alpha_, l_, 1.0)) : 0.0;
        derived_mu_ = detail::mean_from(alpha_, l_, atom_);
        if (mu_override) {
            if (!(*mu_override > 0.0) || !std::isfinite(*mu_override))
                throw InvalidParameter("mu override must be positive");
            mu_ = *mu_override;
        } else {
            mu_ = derived_mu_;
        }
    }

    double alpha() const noexcept { return alpha_; }
    const SlowlyVarying& l() const noexcept { return l_; }
    Mode mode() const noexcept { return mode_; }
    bool formal() const noexcept { return mode_ == Mode::Formal; }
    bool valid_tail() const noexcept { return valid_tail_; }
    /// Parameter used in the edge probability; E[H] unless overridden.
    double mu() const noexcept { return mu_; }
    double mean() const noexcept { return derived_mu_; }
    bool mu_overridden() const noexcept { return mu_ != derived_mu_; }
    double atom_at_one() const noexcept { return atom_; }
    bool integer_alpha() const noexcept { return std::abs(alpha_ - std::round(alpha_)) < 1e-9; }

    /// Unclamped h^{1-alpha} l(h).
    double raw_tail(double h) const { return detail::raw_tail(alpha_, l_, h); }

    /// Density of the continuous part: -d/dh [h^{1-alpha} l(h)].
    double density(double h) const {
        return std::pow(h, -alpha_) * ((alpha_ - 1.0) * l_(h) - h * l_.derivative(h));
    }

private:
    static std::string format(double x) {
        std::ostringstream os;
        os.precision(17);
        os << x;
        return os.str();
    }

    bool check_tail() const {
        if (detail::raw_tail(alpha_, l_, 1.0) > 1.0 + 1e-15) return false;
        constexpr int kGrid = 1000;
        constexpr double kMaxLog = 12.0 * 2.302585092994046;  // h up to 1e12
        double prev = detail::raw_tail(alpha_, l_, 1.0);
        if (prev < 0.0) return false;
        for (int i = 1; i <= kGrid; ++i) {
            const double h = std::exp(kMaxLog * i / kGrid);
            const double cur = detail::raw_tail(alpha_, l_, h);
            if (cur < 0.0 || cur > prev * (1.0 + 1e-12) + 1e-300) return false;
            prev = cur;
        }
        return prev < 1e-6;
    }

    double alpha_;
    SlowlyVarying l_;
    Mode mode_;
    bool valid_tail_ = true;
    double atom_ = 0.0;
    double derived_mu_ = 1.0;
    double mu_ = 1.0;
};

/// P(H > h), clamped to [0, 1].
inline double tail(const TailDistribution& dist, double h) {
    if (!(h >= 1.0)) throw DomainError("tail requires h >= 1");
    if (std::isinf(h)) return 0.0;
    return std::clamp(dist.raw_tail(h), 0.0, 1.0);
}

/// E[H] = 1 + integral_1^inf Fbar(h) dh.
inline double mean_weight(double alpha, const SlowlyVarying& l) {
    if (!(alpha > 2.0)) throw InvalidParameter("mean weight requires alpha > 2 (mean may diverge)");
    return TailDistribution(alpha, l, TailDistribution::Mode::Formal).mean();
}

/// integral over [a, b] of h^beta dF(h), with its error estimate. The atom at 1
/// is included when a == 1.
inline quad::Result moment_integral_result(const TailDistribution& dist, double beta, double a,
                                           double b, MomentMethod method = MomentMethod::Auto,
                                           const quad::Options& opt = {}) {
    if (!(a >= 1.0) || !(b >= a)) throw DomainError("moment integral requires 1 <= a <= b");
    if (std::isinf(a)) return {};
    if (std::isinf(b) && beta >= dist.alpha() - 1.0)
        throw DivergenceError("integral of h^beta dF to infinity diverges for beta >= alpha - 1");
    auto r = detail::continuous_moment(dist.alpha(), dist.l(), beta, a, b, method, opt);
    if (a == 1.0) r.value += dist.atom_at_one();
    return r;
}

inline double moment_integral(const TailDistribution& dist, double beta, double a, double b,
                              MomentMethod method = MomentMethod::Auto) {
    return moment_integral_result(dist, beta, a, b, method).value;
}

/// Q(x) = integral over (1, x] of h^{alpha-1} dF(h). The atom at 1 is excluded so Q(1) = 0.
inline double q_function(const TailDistribution& dist, double x,
                         MomentMethod method = MomentMethod::Auto) {
    if (!dist.integer_alpha() || dist.alpha() < 3.0 - 1e-9)
        throw DomainError("Q is defined for integer alpha >= 3");
    if (!(x >= 1.0) || std::isinf(x)) throw DomainError("Q requires finite x >= 1");
    quad::Options opt;
    opt.rel_tol = 1e-12;
    return detail::continuous_moment(dist.alpha(), dist.l(), dist.alpha() - 1.0, 1.0, x, method, opt)
        .value;
}

inline double q_function(int alpha, const SlowlyVarying& l, double x, bool formal = false) {
    if (alpha < 3) throw DomainError("Q is defined for integer alpha >= 3");
    TailDistribution dist(alpha, l, formal ? TailDistribution::Mode::Formal : TailDistribution::Mode::Strict);
    return q_function(dist, x);
}

/// Q tabulated on a set of points.
struct QFunctional {
    int alpha = 3;
    std::map<double, double> values;
};

inline QFunctional q_table(const TailDistribution& dist, const std::vector<double>& xs) {
    QFunctional q;
    q.alpha = static_cast<int>(std::lround(dist.alpha()));
    for (double x : xs) q.values[x] = q_function(dist, x);
    return q;
}

/// Inverse tail: the h >= 1 with Fbar(h) = u; 1 when u falls in the atom.
inline double sample_weight(const TailDistribution& dist, double u) {
    if (!dist.valid_tail())
        throw UnsupportedSampling("cannot sample from an invalid (formal) tail");
    if (!(u > 0.0 && u <= 1.0)) throw DomainError("sample_weight requires u in (0, 1]");
    const double top = dist.raw_tail(1.0);
    if (u >= top) return 1.0;
    const double alpha = dist.alpha();
    if (dist.l().is_constant()) return std::pow(u / dist.l().parameter(), 1.0 / (1.0 - alpha));

    // Bisection on log h.
    double lo = 0.0, hi = 1.0;
    while (dist.raw_tail(std::exp(hi)) > u) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e4) return std::exp(hi);
    }
    while (hi - lo > 1e-13 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (dist.raw_tail(std::exp(mid)) > u) lo = mid;
        else hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

/// n i.i.d. weights; weight i uses its own substream so the vector does not
/// depend on generation order.
inline std::vector<double> sample_weights(const TailDistribution& dist, std::size_t n,
                                          std::uint64_t seed) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        Stream s(seed, StreamRole::NodeWeight, i);
        w[i] = sample_weight(dist, s.uniform_open_closed());
    }
    return w;
}

// -- key-value document: alpha, l_name, l_params (mu is always recomputed) --

inline std::string to_kv(const TailDistribution& dist) {
    std::ostringstream os;
    os.precision(17);
    os << "alpha = " << dist.alpha() << "\n";
    os << "l_name = " << dist.l().name() << "\n";
    os << "l_params =";
    const auto params = dist.l().params();
    for (std::size_t i = 0; i < params.size(); ++i) os << (i ? "," : " ") << params[i];
    os << "\n";
    if (dist.formal()) os << "mode = formal\n";
    return os.str();
}

inline TailDistribution distribution_from_kv(const KeyValues& kv) {
    auto alpha_it = kv.find("alpha");
    if (alpha_it == kv.end()) throw ParseError("distribution document lacks 'alpha'");
    const double alpha = parse_double(alpha_it->second, "alpha");
    auto name_it = kv.find("l_name");
    const std::string name = name_it == kv.end() ? "one" : name_it->second;
    std::vector<double> params;
    if (auto p = kv.find("l_params"); p != kv.end()) params = parse_double_list(p->second, "l_params");
    auto mode = TailDistribution::Mode::Strict;
    if (auto m = kv.find("mode"); m != kv.end() && m->second == "formal") mode = TailDistribution::Mode::Formal;
    return TailDistribution(alpha, SlowlyVarying::from_name(name, params), mode);
}

inline TailDistribution distribution_from_kv(const std::string& text) {
    return distribution_from_kv(parse_key_values(text));
}

}  // namespace cliquescale
