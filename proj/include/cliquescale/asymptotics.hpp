#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "clique_census.hpp"
#include "errors.hpp"
#include "exact_evaluator.hpp"
#include "graph_sampler.hpp"
#include "weight_model.hpp"

namespace cliquescale {

enum class Regime { KBelowAlpha, KEqualAlphaInteger, KAboveAlpha };

inline const char* to_string(Regime r) noexcept {
    switch (r) {
        case Regime::KBelowAlpha: return "k_below_alpha";
        case Regime::KEqualAlphaInteger: return "k_equal_alpha_integer";
        case Regime::KAboveAlpha: return "k_above_alpha";
    }
    return "?";
}

/// Shape of the slowly varying correction multiplying n^{p_exponent}.
enum class SvKind {
    None,          ///< 1
    LPowK,         ///< l(sqrt n)^k
    LogSqrtPow,    ///< log(sqrt n)^power
    QEqualBound,   ///< Q(sqrt n)^{k-1} Q(n)
    QAboveBound,   ///< l(sqrt n)^{alpha-1} Q(n)^{k-alpha+1}
};

struct AsymptoticPrediction {
    int k = 2;
    double alpha = 3.0;
    bool integer_alpha = false;
    Regime regime = Regime::KBelowAlpha;
    double p_exponent = 0.0;  ///< power of n in P(K_k)
    double a_exponent = 0.0;  ///< power of n in A_k(n) = C(n,k) P(K_k)
    SvKind sv_kind = SvKind::None;
    double sv_power = 0.0;    ///< exponent for LogSqrtPow
    std::string sv_factor;    ///< human-readable correction
    bool sharp = true;        ///< asymptotic equivalence (true) or upper bound (false)
};

/// Growth law of P(K_k) for the given (k, alpha, l). Integer alpha is detected
/// with tolerance 1e-9; the l = 1 and l = log cases at integer alpha use the
/// explicit forms, other l fall back to the Q-based upper bounds.
inline AsymptoticPrediction predict(int k, double alpha, const std::string& l_name) {
    if (!(alpha > 2.0)) throw DomainError("predictions require alpha > 2");
    if (k < 2) throw DomainError("predictions require k >= 2");
    AsymptoticPrediction p;
    p.k = k;
    p.alpha = alpha;
    p.integer_alpha = std::abs(alpha - std::round(alpha)) < 1e-9;
    const bool constant_l = l_name == "one" || l_name == "const" || l_name == "atom";
    const bool log_l = l_name == "log" || l_name == "log_formal";
    const double below = 0.5 * k * (1.0 - k);
    const double above = 0.5 * k * (1.0 - alpha);
    const int a_int = static_cast<int>(std::lround(alpha));

    if (p.integer_alpha && k == a_int) {
        p.regime = Regime::KEqualAlphaInteger;
        p.p_exponent = below;
        if (constant_l) {
            p.sv_kind = SvKind::LogSqrtPow;
            p.sv_power = k;
            p.sv_factor = "log(sqrt n)^" + std::to_string(k);
        } else if (log_l) {
            p.sv_kind = SvKind::LogSqrtPow;
            p.sv_power = 2.0 * k;
            p.sv_factor = "log(sqrt n)^" + std::to_string(2 * k);
        } else {
            p.sv_kind = SvKind::QEqualBound;
            p.sv_factor = "Q(sqrt n)^" + std::to_string(k - 1) + " Q(n)";
            p.sharp = false;
        }
    } else if (k < alpha) {
        p.regime = Regime::KBelowAlpha;
        p.p_exponent = below;
        p.sv_kind = SvKind::None;
        p.sv_factor = "1";
    } else {
        p.regime = Regime::KAboveAlpha;
        p.p_exponent = above;
        if (!p.integer_alpha) {
            p.sv_kind = SvKind::LPowK;
            p.sv_factor = "l(sqrt n)^" + std::to_string(k);
        } else if (constant_l) {
            p.sv_kind = SvKind::None;
            p.sv_factor = "1";
        } else if (log_l) {
            p.sv_kind = SvKind::LogSqrtPow;
            p.sv_power = 2.0 * k - alpha - 1.0;
            p.sv_factor = "log(sqrt n)^" + std::to_string(2 * k - a_int - 1);
            p.sharp = false;
        } else {
            p.sv_kind = SvKind::QAboveBound;
            p.sv_factor = "l(sqrt n)^" + std::to_string(a_int - 1) + " Q(n)^" + std::to_string(k - a_int + 1);
            p.sharp = false;
        }
    }
    p.a_exponent = p.p_exponent + k;
    return p;
}

/// Evaluates the correction factor of `pred` at n for the distribution's l.
inline double slowly_varying_factor(const AsymptoticPrediction& pred, const TailDistribution& dist,
                                    double n) {
    const double root = std::sqrt(n);
    switch (pred.sv_kind) {
        case SvKind::None: return 1.0;
        case SvKind::LPowK: return std::pow(dist.l()(root), pred.k);
        case SvKind::LogSqrtPow: return std::pow(std::log(root), pred.sv_power);
        case SvKind::QEqualBound:
            return std::pow(q_function(dist, root), pred.k - 1) * q_function(dist, n);
        case SvKind::QAboveBound:
            return std::pow(dist.l()(root), pred.alpha - 1.0) *
                   std::pow(q_function(dist, n), pred.k - pred.alpha + 1.0);
    }
    return 1.0;
}

enum class Verdict { Pass, Fail, Inconclusive };

inline const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct ScalingFit {
    std::vector<std::pair<double, double>> points;  // (n, value)
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r_squared = 1.0;
    std::optional<double> theory_exponent;
    Verdict verdict = Verdict::Inconclusive;
};

inline constexpr double kDefaultSlopeTolerance = 0.15;

/// Ordinary least squares of log(value) on log(n). With a theory exponent the
/// verdict is pass iff |slope - theory| <= max(2 stderr, tolerance); with
/// `upper_bound_only` only slope <= theory + max(2 stderr, tolerance) is required.
inline ScalingFit fit_exponent(std::vector<std::pair<double, double>> points,
                               std::optional<double> theory = std::nullopt,
                               double tolerance = kDefaultSlopeTolerance, bool upper_bound_only = false) {
    if (points.size() < 4) throw InvalidParameter("exponent fit needs at least 4 points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].first > 0.0)) throw DomainError("exponent fit needs n > 0");
        if (!(points[i].second > 0.0)) throw DomainError("exponent fit needs positive values");
        if (i > 0 && !(points[i].first > points[i - 1].first))
            throw InvalidParameter("exponent fit needs strictly increasing n");
    }
    const double count = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [n, v] : points) {
        mx += std::log(n);
        my += std::log(v);
    }
    mx /= count;
    my /= count;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [n, v] : points) {
        const double dx = std::log(n) - mx, dy = std::log(v) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    ScalingFit fit;
    fit.points = std::move(points);
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (const auto& [n, v] : fit.points) {
        const double e = std::log(v) - fit.intercept - fit.slope * std::log(n);
        sse += e * e;
    }
    fit.slope_stderr = std::sqrt(sse / (count - 2.0) / sxx);
    fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    fit.theory_exponent = theory;
    if (theory) {
        const double allowance = std::max(2.0 * fit.slope_stderr, tolerance);
        const bool ok = upper_bound_only ? fit.slope <= *theory + allowance
                                         : std::abs(fit.slope - *theory) <= allowance;
        fit.verdict = ok ? Verdict::Pass : Verdict::Fail;
    }
    return fit;
}

enum class StudyMethod { Quadrature, MonteCarlo, Graphs };

inline StudyMethod study_method_from_name(const std::string& s) {
    if (s == "quadrature" || s == "quad") return StudyMethod::Quadrature;
    if (s == "mc") return StudyMethod::MonteCarlo;
    if (s == "graphs") return StudyMethod::Graphs;
    throw InvalidParameter("unknown study method '" + s + "' (expected quadrature, mc, graphs)");
}

struct StudyOptions {
    StudyMethod method = StudyMethod::Quadrature;
    std::uint64_t seed = 1;
    std::size_t mc_samples = 1'000'000;
    std::size_t graph_replicas = 100;
    double tolerance = kDefaultSlopeTolerance;
    unsigned threads = 1;
    EvaluatorOptions evaluator{};
};

struct StudyRow {
    double n = 0.0;
    double value = 0.0;
    double predicted_factor = 0.0;  ///< n^theory * slowly varying factor
    double residual = 0.0;          ///< value / predicted_factor
    double error = 0.0;
    bool converged = true;
};

struct ScalingStudy {
    AsymptoticPrediction prediction;
    StudyMethod method = StudyMethod::Quadrature;
    std::vector<StudyRow> rows;
    ScalingFit fit;
    std::vector<std::string> diagnostics;
};

inline bool is_geometric_grid(const std::vector<double>& grid) {
    if (grid.size() < 2) return false;
    const double ratio = grid[1] / grid[0];
    if (!(ratio > 1.0)) return false;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (std::abs(grid[i] / grid[i - 1] / ratio - 1.0) > 1e-6) return false;
    return true;
}

/// Evaluates P(K_k) (or A_k(n) for graph sampling) across a geometric grid,
/// divides out the predicted slowly varying factor and fits the residual
/// power of n against the predicted exponent.
inline ScalingStudy scaling_study(const TailDistribution& dist, int k, const std::vector<double>& n_grid,
                                  const StudyOptions& options = {}) {
    if (n_grid.size() < 4) throw InvalidParameter("scaling study needs at least 4 grid points");
    if (!is_geometric_grid(n_grid)) throw InvalidParameter("scaling study needs a strictly increasing geometric n grid");
    ScalingStudy study;
    study.method = options.method;
    study.prediction = predict(k, dist.alpha(), dist.l().name());
    const bool counts = options.method == StudyMethod::Graphs;
    const double theory = counts ? study.prediction.a_exponent : study.prediction.p_exponent;

    bool all_ok = true;
    std::vector<std::pair<double, double>> points;
    for (std::size_t idx = 0; idx < n_grid.size(); ++idx) {
        const double n = n_grid[idx];
        StudyRow row;
        row.n = n;
        switch (options.method) {
            case StudyMethod::Quadrature: {
                auto ev = options.evaluator;
                ev.threads = options.threads;
                const auto rep = clique_prob_quadrature(dist, k, n, ev);
                row.value = rep.total;
                row.error = rep.max_term_error;
                row.converged = rep.converged;
                for (const auto& w : rep.warnings) study.diagnostics.push_back("n=" + format_exact(n) + ": " + w);
                break;
            }
            case StudyMethod::MonteCarlo: {
                const auto mc = clique_prob_mc(dist, k, n, options.mc_samples,
                                               derive_key(options.seed, StreamRole::Replica, idx), options.threads);
                row.value = mc.mean;
                row.error = mc.std_error;
                break;
            }
            case StudyMethod::Graphs: {
                detail::Moments mom;
                for (std::size_t r = 0; r < options.graph_replicas; ++r) {
                    SamplerConfig cfg;
                    cfg.n = static_cast<std::size_t>(std::llround(n));
                    cfg.seed = derive_key(options.seed, StreamRole::Replica, idx * 1'000'003ull + r);
                    cfg.threads = options.threads;
                    const auto g = sample_graph(dist, cfg);
                    mom.add(static_cast<double>(count_cliques(g, k, options.threads).count));
                }
                row.value = mom.mean;
                row.error = mom.std_error();
                break;
            }
        }
        const double sv = slowly_varying_factor(study.prediction, dist, n);
        row.predicted_factor = std::pow(n, theory) * sv;
        row.residual = row.value / row.predicted_factor;
        if (!row.converged) all_ok = false;
        if (!(row.value > 0.0) || !(sv > 0.0)) {
            all_ok = false;
            study.diagnostics.push_back("n=" + format_exact(n) + ": nonpositive value or correction");
        } else {
            points.emplace_back(n, row.value / sv);
        }
        study.rows.push_back(row);
    }
    if (points.size() >= 4) {
        study.fit = fit_exponent(points, theory, options.tolerance, !study.prediction.sharp);
    } else {
        study.fit.theory_exponent = theory;
    }
    if (!all_ok) study.fit.verdict = Verdict::Inconclusive;
    return study;
}

inline std::string study_csv(const ScalingStudy& s) {
    std::ostringstream os;
    os.precision(17);
    os << "n,value,predicted_factor,residual,error\n";
    for (const auto& r : s.rows)
        os << r.n << "," << r.value << "," << r.predicted_factor << "," << r.residual << "," << r.error << "\n";
    os << "# summary: slope,stderr,theory_exponent,verdict\n";
    os << "summary," << s.fit.slope << "," << s.fit.slope_stderr << ","
       << (s.fit.theory_exponent ? *s.fit.theory_exponent : std::nan("")) << "," << to_string(s.fit.verdict) << "\n";
    return os.str();
}

}  // namespace cliquescale
