#pragma once

// P(K_k), the probability that k given nodes form a clique, computed two ways:
//
//  * clique_prob_quadrature: condition on how many of the k weights lie at or
//    below the cutoff c = sqrt(mu n). With D = mu n,
//
//      P(K_k) = E_low + sum_{m=1}^{k-1} C(k, m) I_m + E_high
//
//    where all pairs below c use p = h_i h_j / D, all pairs above c are
//    connected surely, and the mixed pairs are integrated out exactly through
//    the breakpoints D / h_s of the min.
//
//  * clique_prob_mc: Monte Carlo over k i.i.d. weights, by default with an
//    importance-sampled proposal on u = Fbar(H) (see detail::TiltedProposal).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "clique_census.hpp"
#include "errors.hpp"
#include "graph_sampler.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "weight_model.hpp"

namespace cliquescale {

struct EvaluatorOptions {
    /// Relative tolerance of the outermost integral; each nested level is 10x tighter.
    double rel_tol = 1e-8;
    /// Nested quadrature is used for m <= this depth, stratified MC beyond.
    int max_quadrature_depth = 4;
    std::size_t simplex_samples = 1u << 18;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

/// One evaluated term with its error estimate. `log_value` stays finite when
/// `value` underflows.
struct TermEstimate {
    double value = 0.0;
    double log_value = -std::numeric_limits<double>::infinity();
    double error = 0.0;
    bool converged = true;
    bool monte_carlo = false;
};

/// Weights h_1 >= ... >= h_m of the nodes at or below the cutoff.
struct InnerIntegrandContext {
    std::vector<double> weights;
    double n = 1.0;
    double mu = 1.0;

    double scale() const noexcept { return mu * n; }
    double cutoff() const noexcept { return std::sqrt(mu * n); }

    /// sqrt(mu n) >= h_1 >= ... >= h_m >= 1.
    bool ordered() const noexcept {
        double prev = cutoff() * (1.0 + 1e-12);
        for (double h : weights) {
            if (!(h >= 1.0 && h <= prev)) return false;
            prev = h;
        }
        return true;
    }
};

struct DecompositionReport {
    int k = 0;
    double n = 0.0;
    double alpha = 0.0;
    std::string l_name;
    double mu = 0.0;

    double extreme_low = 0.0;
    std::vector<double> intermediate;       // I_1 .. I_{k-1}
    std::vector<double> binomial_weights;   // C(k, m)
    double extreme_high = 0.0;
    double total = 0.0;

    double log_extreme_low = -std::numeric_limits<double>::infinity();
    std::vector<double> log_intermediate;
    double log_extreme_high = -std::numeric_limits<double>::infinity();
    double log_total = -std::numeric_limits<double>::infinity();

    std::vector<double> term_errors;  // absolute, per weighted term: low, I_1.., high
    double max_term_error = 0.0;
    bool converged = true;
    std::vector<std::string> warnings;
    /// Terms containing an interval moment with beta = alpha - 1 (integer alpha).
    std::vector<std::string> resonant_terms;

    /// extreme_low + sum C(k,m) I_m + extreme_high recomputed from the fields.
    double term_sum() const {
        double s = extreme_low + extreme_high;
        for (std::size_t i = 0; i < intermediate.size(); ++i) s += binomial_weights[i] * intermediate[i];
        return s;
    }
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(samples)
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline double log_factorial(int m) { return std::lgamma(m + 1.0); }

inline TermEstimate make_term(double log_prefactor, double integral, double integral_error,
                              bool converged) {
    TermEstimate t;
    t.converged = converged;
    if (integral > 0.0) {
        t.log_value = log_prefactor + std::log(integral);
        t.value = std::exp(t.log_value);
        t.error = std::exp(log_prefactor) * integral_error;
    } else {
        t.value = 0.0;
        t.error = std::exp(log_prefactor) * integral_error;
    }
    return t;
}

// integral over (a, b] of h^beta dF without atom; empty intervals give 0.
inline double interval_moment(const TailDistribution& dist, double beta, double a, double b) {
    if (!(b > a)) return 0.0;
    quad::Options opt;
    opt.rel_tol = 1e-12;
    return continuous_moment(dist.alpha(), dist.l(), beta, a, b, MomentMethod::Auto, opt).value;
}

// Running (count, mean, M2) with Chan's pairwise combination.
struct Moments {
    double count = 0.0, mean = 0.0, m2 = 0.0;

    void add(double x) noexcept {
        count += 1.0;
        const double delta = x - mean;
        mean += delta / count;
        m2 += delta * (x - mean);
    }
    void merge(const Moments& o) noexcept {
        if (o.count == 0.0) return;
        if (count == 0.0) {
            *this = o;
            return;
        }
        const double total = count + o.count;
        const double delta = o.mean - mean;
        mean += delta * o.count / total;
        m2 += o.m2 + delta * delta * count * o.count / total;
        count = total;
    }
    double std_error() const noexcept {
        return count > 1.0 ? std::sqrt(m2 / (count - 1.0) / count) : 0.0;
    }
};

inline constexpr std::size_t kMcBlock = 1u << 16;

}  // namespace detail

/// E_high = P(all k weights > sqrt(mu n)) = Fbar(sqrt(mu n))^k.
inline TermEstimate extreme_high_term(const TailDistribution& dist, int k, double n) {
    if (k < 2) throw DomainError("extreme_high_term requires k >= 2");
    const double c = std::max(1.0, std::sqrt(dist.mu() * n));
    const double t = tail(dist, c);
    TermEstimate e;
    if (t > 0.0) {
        e.log_value = k * std::log(t);
        e.value = std::exp(e.log_value);
    }
    return e;
}

/// E_low = (mu n)^{-k(k-1)/2} (integral_{[1, sqrt(mu n)]} h^{k-1} dF)^k. The
/// k-fold integral of prod_{i<j} h_i h_j factorises because each h_i appears
/// in exactly k - 1 pairs.
inline TermEstimate extreme_low_term(const TailDistribution& dist, int k, double n) {
    if (k < 2) throw DomainError("extreme_low_term requires k >= 2");
    const double scale = dist.mu() * n;
    const double c = std::max(1.0, std::sqrt(scale));
    quad::Options opt;
    opt.rel_tol = 1e-12;
    const auto moment = moment_integral_result(dist, k - 1.0, 1.0, c, MomentMethod::Auto, opt);
    TermEstimate e;
    e.converged = moment.converged;
    if (moment.value > 0.0) {
        const double log_pref = -0.5 * k * (k - 1.0) * std::log(scale);
        e.log_value = log_pref + k * std::log(moment.value);
        e.value = std::exp(e.log_value);
        e.error = e.value * k * moment.error / moment.value;
    }
    return e;
}

/// integral over h_j > sqrt(mu n) of prod_i min{h_i h_j / (mu n), 1} dF(h_j),
/// split at the breakpoints mu n / h_s where successive factors saturate:
///
///   sum_{s=1}^m (mu n)^{-(m-s+1)} (prod_{i>=s} h_i) integral_{D/h_{s-1}}^{D/h_s} h^{m-s+1} dF
///     + Fbar(D / h_m),   with h_0 = sqrt(mu n), D = mu n.
inline double inner_integral(const InnerIntegrandContext& ctx, const TailDistribution& dist) {
    const std::size_t m = ctx.weights.size();
    const double scale = ctx.scale();
    const double c = ctx.cutoff();
    if (m == 0) return tail(dist, std::max(1.0, c));
    double sum = 0.0;
    // suffix product prod_{i=s}^m h_i / D, built from the back.
    std::vector<double> suffix(m + 1, 1.0);
    for (std::size_t i = m; i-- > 0;) suffix[i] = suffix[i + 1] * ctx.weights[i] / scale;
    double lower = c;  // D / h_0
    for (std::size_t s = 1; s <= m; ++s) {
        const double upper = scale / ctx.weights[s - 1];
        if (upper > lower) {
            const double beta = static_cast<double>(m - s + 1);
            sum += suffix[s - 1] * detail::interval_moment(dist, beta, lower, upper);
        }
        lower = std::max(lower, upper);
    }
    return sum + tail(dist, std::max(1.0, std::max(c, scale / ctx.weights[m - 1])));
}

/// Integrand of the ordered integral: a function of (h_1, ..., h_i).
using JIntegrand = std::function<double(std::span<const double>)>;

/// J_{i,m}(g)(h_1..h_{i-1}) = integral_{[1, h_{i-1}]} h^{m-1} g(h_1..h_{i-1}, h) dF(h),
/// with h_0 = sqrt(mu n). The atom at 1, if any, is included.
inline quad::Result eval_J(const TailDistribution& dist, int i, int m, const JIntegrand& g,
                           std::span<const double> prefix, double n, const quad::Options& opt = {}) {
    if (i < 1 || i > m) throw DomainError("eval_J requires 1 <= i <= m");
    if (prefix.size() != static_cast<std::size_t>(i - 1)) throw DomainError("eval_J prefix must hold i - 1 weights");
    const double c = std::max(1.0, std::sqrt(dist.mu() * n));
    const double upper = prefix.empty() ? c : prefix.back();
    if (!(upper >= 1.0)) throw DomainError("eval_J prefix must lie in [1, sqrt(mu n)]");

    std::vector<double> args(prefix.begin(), prefix.end());
    args.push_back(1.0);
    quad::Result r;
    if (dist.atom_at_one() > 0.0) {
        args.back() = 1.0;
        r.value = dist.atom_at_one() * g(args);
    }
    const double top = std::log(upper);
    if (top > 0.0) {
        auto integrand = [&](double u) {
            const double h = std::exp(u);
            args.back() = h;
            const double w = std::pow(h, m) * dist.density(h);  // h^{m-1} f(h) dh/du
            return w == 0.0 ? 0.0 : w * g(args);
        };
        r += quad::integrate(integrand, 0.0, top, opt, quad::panel_count(0.0, top, 1.0));
    }
    return r;
}

namespace detail {

// J_{1,m} o ... o J_{m,m} applied to g, by recursion on the level.
inline quad::Result nested_J(const TailDistribution& dist, int level, int m, const JIntegrand& g,
                             std::vector<double>& prefix, double n, double rel_tol, bool& converged) {
    quad::Options opt;
    opt.rel_tol = std::max(rel_tol, 1e-13);
    opt.abs_tol = 1e-300;
    if (level == m) {
        auto r = eval_J(dist, level, m, g, prefix, n, opt);
        converged = converged && r.converged;
        return r;
    }
    JIntegrand inner = [&](std::span<const double> h) {
        prefix.assign(h.begin(), h.end());
        auto r = nested_J(dist, level + 1, m, g, prefix, n, rel_tol * 0.1, converged);
        return r.value;
    };
    std::vector<double> outer_prefix(prefix.begin(), prefix.end());
    auto r = eval_J(dist, level, m, inner, outer_prefix, n, opt);
    converged = converged && r.converged;
    return r;
}

}  // namespace detail

/// Composition J_{1,m}(J_{2,m}(... J_{m,m}(g))) evaluated by nested adaptive quadrature.
inline quad::Result eval_J_composed(const TailDistribution& dist, int m, const JIntegrand& g,
                                    double n, double rel_tol = 1e-8) {
    std::vector<double> prefix;
    bool converged = true;
    auto r = detail::nested_J(dist, 1, m, g, prefix, n, rel_tol, converged);
    r.converged = r.converged && converged;
    return r;
}

namespace detail {

// I_m by stratified sampling on the ordered simplex: each coordinate is drawn
// by Latin hypercube from F restricted to [1, c] via h = Fbar^{-1}(u); the
// standard error comes from independent batches.
inline TermEstimate intermediate_term_mc(const TailDistribution& dist, int k, int m, double n,
                                         const EvaluatorOptions& options) {
    const double scale = dist.mu() * n;
    const double c = std::max(1.0, std::sqrt(scale));
    const double top = tail(dist, c);
    const int v = k - m;
    constexpr std::size_t kBatches = 32;
    const std::size_t per_batch = std::max<std::size_t>(64, options.simplex_samples / kBatches);
    std::vector<double> batch_means(kBatches, 0.0);
    parallel_for(kBatches, options.threads, [&](std::size_t b) {
        Stream rng(options.seed, StreamRole::SimplexBlock, b);
        std::vector<std::vector<double>> strata(static_cast<std::size_t>(m), std::vector<double>(per_batch));
        for (auto& column : strata) {
            for (std::size_t s = 0; s < per_batch; ++s)
                column[s] = (static_cast<double>(s) + rng.uniform_open_closed()) / static_cast<double>(per_batch);
            std::shuffle(column.begin(), column.end(), rng);
        }
        InnerIntegrandContext ctx;
        ctx.n = n;
        ctx.mu = dist.mu();
        ctx.weights.resize(static_cast<std::size_t>(m));
        double sum = 0.0;
        for (std::size_t s = 0; s < per_batch; ++s) {
            for (int i = 0; i < m; ++i) {
                const double u = top + (1.0 - top) * strata[static_cast<std::size_t>(i)][s];
                ctx.weights[static_cast<std::size_t>(i)] = std::min(c, sample_weight(dist, std::min(1.0, u)));
            }
            std::sort(ctx.weights.begin(), ctx.weights.end(), std::greater<>());
            double prod = 1.0;
            for (double h : ctx.weights) prod *= std::pow(h, m - 1);
            sum += prod * std::pow(inner_integral(ctx, dist), v);
        }
        batch_means[b] = sum / static_cast<double>(per_batch);
    });
    Moments mom;
    for (double x : batch_means) mom.add(x);
    // Unordered integral = m! * ordered, so the m! of I_m cancels here.
    const double log_pref = -0.5 * m * (m - 1.0) * std::log(scale) + m * std::log1p(-top);
    auto t = make_term(log_pref, mom.mean, mom.std_error(), true);
    t.monte_carlo = true;
    return t;
}

}  // namespace detail

/// I_m = m! (mu n)^{-m(m-1)/2} J_{1,m}...J_{m,m}( inner_integral(h_1..h_m)^{k-m} ).
inline TermEstimate intermediate_term(const TailDistribution& dist, int k, int m, double n,
                                      const EvaluatorOptions& options = {}) {
    if (m < 1 || m > k - 1) throw DomainError("intermediate_term requires 1 <= m <= k - 1");
    const double scale = dist.mu() * n;
    const double c = std::max(1.0, std::sqrt(scale));
    if (tail(dist, c) == 0.0) return {};
    if (m > options.max_quadrature_depth) return detail::intermediate_term_mc(dist, k, m, n, options);

    const int v = k - m;
    InnerIntegrandContext ctx;
    ctx.n = n;
    ctx.mu = dist.mu();
    JIntegrand g = [&](std::span<const double> h) {
        ctx.weights.assign(h.begin(), h.end());
        return std::pow(inner_integral(ctx, dist), v);
    };
    const auto r = eval_J_composed(dist, m, g, n, options.rel_tol);
    const double log_pref = detail::log_factorial(m) - 0.5 * m * (m - 1.0) * std::log(scale);
    return detail::make_term(log_pref, r.value, r.error, r.converged);
}

namespace detail {

inline std::vector<std::string> resonant_terms(const TailDistribution& dist, int k) {
    std::vector<std::string> out;
    if (!dist.integer_alpha()) return out;
    const long a = std::lround(dist.alpha());
    if (k - 1 == a - 1) out.push_back("extreme_low");
    for (int m = 1; m < k; ++m)
        for (int s = 1; s <= m; ++s)
            if (m - s + 1 == a - 1) out.push_back("I_" + std::to_string(m) + "[s=" + std::to_string(s) + "]");
    return out;
}

inline double log_sum_exp(const std::vector<double>& logs) {
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : logs) hi = std::max(hi, x);
    if (std::isinf(hi)) return hi;
    double s = 0.0;
    for (double x : logs) s += std::exp(x - hi);
    return hi + std::log(s);
}

}  // namespace detail

/// Full conditioning decomposition of P(K_k). P(K_0) = P(K_1) = 1.
inline DecompositionReport clique_prob_quadrature(const TailDistribution& dist, int k, double n,
                                                  const EvaluatorOptions& options = {}) {
    if (k < 0) throw DomainError("clique size k must be >= 0");
    if (k > kMaxCliqueSize) throw InvalidParameter("clique size k is capped at 12");
    if (!(n >= 1.0)) throw DomainError("graph size n must be >= 1");
    DecompositionReport rep;
    rep.k = k;
    rep.n = n;
    rep.alpha = dist.alpha();
    rep.l_name = dist.l().name();
    rep.mu = dist.mu();
    if (k <= 1) {
        rep.total = 1.0;
        rep.log_total = 0.0;
        return rep;
    }

    std::vector<TermEstimate> mids(static_cast<std::size_t>(k - 1));
    parallel_for(mids.size(), options.threads, [&](std::size_t i) {
        EvaluatorOptions inner = options;
        inner.threads = 1;
        mids[i] = intermediate_term(dist, k, static_cast<int>(i) + 1, n, inner);
    });
    const auto low = extreme_low_term(dist, k, n);
    const auto high = extreme_high_term(dist, k, n);

    rep.extreme_low = low.value;
    rep.log_extreme_low = low.log_value;
    rep.extreme_high = high.value;
    rep.log_extreme_high = high.log_value;
    rep.term_errors.push_back(low.error);
    std::vector<double> logs{low.log_value, high.log_value};
    for (int m = 1; m < k; ++m) {
        const auto& t = mids[static_cast<std::size_t>(m - 1)];
        const double w = binomial(k, m);
        rep.intermediate.push_back(t.value);
        rep.log_intermediate.push_back(t.log_value);
        rep.binomial_weights.push_back(w);
        rep.term_errors.push_back(w * t.error);
        logs.push_back(std::log(w) + t.log_value);
        if (!t.converged) {
            rep.converged = false;
            std::ostringstream os;
            os << "I_" << m << " did not reach tolerance (error bound " << t.error << ")";
            rep.warnings.push_back(os.str());
        }
        if (t.monte_carlo) rep.warnings.push_back("I_" + std::to_string(m) + " estimated by Monte Carlo");
    }
    if (!low.converged) {
        rep.converged = false;
        rep.warnings.push_back("extreme_low moment did not reach tolerance");
    }
    rep.term_errors.push_back(high.error);
    rep.max_term_error = *std::max_element(rep.term_errors.begin(), rep.term_errors.end());
    rep.total = rep.term_sum();
    rep.log_total = rep.total > 0.0 ? std::log(rep.total) : detail::log_sum_exp(logs);
    rep.resonant_terms = detail::resonant_terms(dist, k);
    return rep;
}

namespace detail {

template <class PerSample>
McEstimate mc_blocks(std::size_t samples, std::uint64_t seed, unsigned threads, PerSample&& per_sample) {
    const std::size_t blocks = (samples + kMcBlock - 1) / kMcBlock;
    std::vector<Moments> partial(blocks);
    parallel_for(blocks, threads, [&](std::size_t b) {
        Stream rng(seed, StreamRole::MonteCarloBlock, b);
        const std::size_t count = std::min(kMcBlock, samples - b * kMcBlock);
        Moments& mom = partial[b];
        for (std::size_t s = 0; s < count; ++s) mom.add(per_sample(rng));
    });
    Moments all;
    for (const auto& p : partial) all.merge(p);
    return {all.mean, all.std_error(), samples, seed};
}

/// Proposal on u = Fbar(h) in (0, 1] for importance sampling. Mixture of
///  * a power tilt r(u) ~ max(u, u_cap)^-theta with theta = (k-1)/(alpha-1),
///    which makes h^{k-1} w roughly constant below the cap, and
///  * a log-uniform component on [Fbar(D), 1] with weight eps, so pairs with
///    h_i h_j > D are hit often enough for the variance estimate to see them.
/// The cap is Fbar(D) for k < alpha and Fbar(sqrt(D)) otherwise.
struct TiltedProposal {
    double theta = 0.0, u_cap = 1.0, u_low = 1.0, eps = 0.0;
    double a = 1.0, Z = 1.0, log_span = 0.0;
    bool unit = false;  // theta == 1

    TiltedProposal(const TailDistribution& dist, int k, double scale, double mix = 0.2) {
        theta = (k - 1) / (dist.alpha() - 1.0);
        unit = std::abs(theta - 1.0) < 1e-12;
        u_cap = tail(dist, theta < 1.0 ? scale : std::sqrt(scale));
        u_low = std::max(tail(dist, scale), std::numeric_limits<double>::min());
        log_span = -std::log(u_low);
        eps = log_span > 0.0 ? mix : 0.0;
        if (unit) {
            Z = 1.0 - std::log(u_cap);
        } else {
            a = std::pow(u_cap, 1.0 - theta);
            Z = a + (1.0 - a) / (1.0 - theta);
        }
    }

    double draw(Stream& rng) const {
        if (eps > 0.0 && rng.uniform() < eps) return std::exp(-log_span * rng.uniform());
        const double flat = (unit ? 1.0 : a) / Z;
        if (rng.uniform() < flat) return u_cap * rng.uniform_open_closed();
        const double v = rng.uniform();
        return unit ? std::exp(std::log(u_cap) * (1.0 - v)) : std::pow(a + v * (1.0 - a), 1.0 / (1.0 - theta));
    }

    double density(double u) const {
        double r = (1.0 - eps) * std::pow(std::max(u, u_cap), -theta) / Z;
        if (eps > 0.0 && u >= u_low) r += eps / (u * log_span);
        return r;
    }
};

}  // namespace detail

enum class McScheme { Tilted, Plain };

/// Monte Carlo: mean of prod_{i<j} min{H_i H_j / (mu n), 1} over k i.i.d. weights.
/// Tilted (default) samples u = Fbar(H) from detail::TiltedProposal and
/// reweights; Plain draws H from F directly. Tilted falls back to Plain when
/// no mass lies above sqrt(mu n). Blocks of 65536 samples use derived
/// substreams; the result does not depend on the thread count.
inline McEstimate clique_prob_mc(const TailDistribution& dist, int k, double n, std::size_t samples,
                                 std::uint64_t seed, unsigned threads = 1,
                                 McScheme scheme = McScheme::Tilted) {
    if (samples < 1000) throw InvalidParameter("Monte Carlo needs at least 1000 samples");
    if (k < 0) throw DomainError("clique size k must be >= 0");
    if (k <= 1) return {1.0, 0.0, samples, seed};
    const double scale = dist.mu() * n;
    auto clique_prob = [&](const double* h) {
        double prod = 1.0;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) prod *= std::min(h[i] * h[j] / scale, 1.0);
        return prod;
    };
    if (scheme == McScheme::Plain || tail(dist, std::sqrt(scale)) <= 0.0) {
        return detail::mc_blocks(samples, seed, threads, [&](Stream& rng) {
            double h[kMaxCliqueSize];
            for (int i = 0; i < k; ++i) h[i] = sample_weight(dist, rng.uniform_open_closed());
            return clique_prob(h);
        });
    }
    const detail::TiltedProposal proposal(dist, k, scale);
    return detail::mc_blocks(samples, seed, threads, [&](Stream& rng) {
        double h[kMaxCliqueSize];
        double w = 1.0;
        for (int i = 0; i < k; ++i) {
            const double u = proposal.draw(rng);
            h[i] = sample_weight(dist, u);
            w /= proposal.density(u);
        }
        return w * clique_prob(h);
    });
}

/// Indicator-restricted Monte Carlo for each decomposition term, in report
/// order: extreme_low, I_1 .. I_{k-1} (nodes 1..m low, the rest high), extreme_high.
inline std::vector<McEstimate> clique_prob_mc_terms(const TailDistribution& dist, int k, double n,
                                                    std::size_t samples, std::uint64_t seed,
                                                    unsigned threads = 1) {
    if (k < 2) throw DomainError("term-wise Monte Carlo requires k >= 2");
    if (samples < 1000) throw InvalidParameter("Monte Carlo needs at least 1000 samples");
    const double scale = dist.mu() * n;
    const double c = std::sqrt(scale);
    std::vector<McEstimate> out;
    // term index t: 0 = all low, m in 1..k-1 = first m low, k = all high.
    for (int t = 0; t <= k; ++t) {
        const int low_count = t == 0 ? k : (t == k ? 0 : t);
        out.push_back(detail::mc_blocks(samples, seed, threads, [&](Stream& rng) {
            double h[kMaxCliqueSize];
            for (int i = 0; i < k; ++i) h[i] = sample_weight(dist, rng.uniform_open_closed());
            for (int i = 0; i < k; ++i)
                if ((i < low_count) != (h[i] <= c)) return 0.0;
            double prod = 1.0;
            for (int i = 0; i < k; ++i)
                for (int j = i + 1; j < k; ++j) prod *= std::min(h[i] * h[j] / scale, 1.0);
            return prod;
        }));
    }
    return out;
}

// -- CSV: k, n, alpha, l_name, extreme_low, I_1..I_8, extreme_high, total, max_term_error --

inline constexpr int kCsvIntermediateColumns = 8;

inline std::string decomposition_csv_header() {
    std::string h = "k,n,alpha,l_name,extreme_low";
    for (int m = 1; m <= kCsvIntermediateColumns; ++m) h += ",I_" + std::to_string(m);
    return h + ",extreme_high,total,max_term_error";
}

inline std::string decomposition_csv_row(const DecompositionReport& r) {
    if (r.intermediate.size() > static_cast<std::size_t>(kCsvIntermediateColumns))
        throw InvalidParameter("decomposition CSV holds at most 8 intermediate terms (k <= 9)");
    std::ostringstream os;
    os.precision(17);
    os << r.k << "," << r.n << "," << r.alpha << "," << r.l_name << "," << r.extreme_low;
    for (int m = 0; m < kCsvIntermediateColumns; ++m) {
        os << ",";
        if (static_cast<std::size_t>(m) < r.intermediate.size()) os << r.intermediate[static_cast<std::size_t>(m)];
    }
    os << "," << r.extreme_high << "," << r.total << "," << r.max_term_error;
    return os.str();
}

}  // namespace cliquescale
