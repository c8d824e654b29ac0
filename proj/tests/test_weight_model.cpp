#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <cliquescale/weight_model.hpp>

#include "oracles.hpp"

using namespace cliquescale;

namespace {

const double e = std::numbers::e;

TailDistribution pareto(double alpha) { return TailDistribution(alpha, SlowlyVarying::constant()); }

// Density of the continuous part for l(h) = 1 + ln h.
double log_shifted_density(double alpha, double h) {
    return std::pow(h, -alpha) * ((alpha - 1.0) * (1.0 + std::log(h)) - 1.0);
}

}  // namespace

// ---- tail ----

TEST(Tail, Examples) {
    EXPECT_DOUBLE_EQ(tail(pareto(3), 2.0), 0.25);
    EXPECT_DOUBLE_EQ(tail(pareto(3), 1.0), 1.0);
    EXPECT_NEAR(tail(pareto(2.5), 100.0), 1e-3, 1e-18);
}

TEST(Tail, BelowSupportIsDomainError) { EXPECT_THROW(tail(pareto(3), 0.5), DomainError); }

TEST(Tail, AtOneIsMinOfOneAndL) {
    EXPECT_DOUBLE_EQ(tail(TailDistribution(3, SlowlyVarying::constant(0.4)), 1.0), 0.4);
    EXPECT_DOUBLE_EQ(tail(TailDistribution(3, SlowlyVarying::log_shifted()), 1.0), 1.0);
}

TEST(TailDistribution, InvariantsOverCatalogue) {
    for (double alpha : {2.2, 2.5, 3.0, 4.5}) {
        for (const auto& l : {SlowlyVarying::constant(), SlowlyVarying::constant(0.3), SlowlyVarying::log_shifted(),
                              SlowlyVarying::log_shifted_pow(2.0)}) {
            if (l.name() == "logpow" && alpha - 1.0 < l.parameter()) continue;  // not a tail near 1
            const TailDistribution d(alpha, l);
            EXPECT_TRUE(d.valid_tail());
            EXPECT_LE(tail(d, 1.0), 1.0);
            double prev = 1.0;
            for (double h = 1.0; h < 1e12; h *= 1.7) {
                const double t = tail(d, h);
                EXPECT_LE(t, prev * (1 + 1e-14));
                prev = t;
            }
            EXPECT_LT(tail(d, 1e12), 1e-6);
            EXPECT_GE(d.mu(), 1.0);
            EXPECT_NEAR(d.atom_at_one(), 1.0 - tail(d, 1.0), 1e-15);
        }
    }
}

TEST(TailDistribution, RejectsAlphaAtMostTwo) {
    EXPECT_THROW(pareto(2.0), InvalidParameter);
    EXPECT_THROW(pareto(1.5), InvalidParameter);
    EXPECT_THROW(pareto(NAN), InvalidParameter);
}

TEST(TailDistribution, LiteralLogIsRejectedUnlessFormal) {
    EXPECT_THROW(TailDistribution(3, SlowlyVarying::log_formal()), InvalidParameter);
    const TailDistribution f(3, SlowlyVarying::log_formal(), TailDistribution::Mode::Formal);
    EXPECT_FALSE(f.valid_tail());
    EXPECT_THROW(sample_weight(f, 0.5), UnsupportedSampling);
}

TEST(TailDistribution, MuOverride) {
    const TailDistribution d(3, SlowlyVarying::constant(), TailDistribution::Mode::Strict, 7.5);
    EXPECT_DOUBLE_EQ(d.mu(), 7.5);
    EXPECT_DOUBLE_EQ(d.mean(), 2.0);
    EXPECT_TRUE(d.mu_overridden());
    EXPECT_THROW(TailDistribution(3, SlowlyVarying::constant(), TailDistribution::Mode::Strict, -1.0),
                 InvalidParameter);
}

// ---- mean ----

TEST(MeanWeight, ParetoExamples) {
    EXPECT_NEAR(mean_weight(3, SlowlyVarying::constant()), 2.0, 2e-10);
    EXPECT_NEAR(mean_weight(4, SlowlyVarying::constant()), 1.5, 1.5e-10);
    EXPECT_NEAR(mean_weight(2.5, SlowlyVarying::constant()), 3.0, 3e-10);
    EXPECT_THROW(mean_weight(2.0, SlowlyVarying::constant()), InvalidParameter);
}

TEST(MeanWeight, ParetoWithin1e10Relative) {
    for (double alpha : {2.05, 2.3, 3.7, 6.0}) {
        const double want = (alpha - 1) / (alpha - 2);
        EXPECT_NEAR(pareto(alpha).mu() / want, 1.0, 1e-10) << alpha;
    }
}

TEST(MeanWeight, LogCatalogueClosedForms) {
    for (double alpha : {2.2, 2.5, 3.0, 4.0}) {
        const double s = alpha - 2.0;
        // 1 + int_1^inf h^{1-alpha} (1 + ln h) dh
        EXPECT_NEAR(mean_weight(alpha, SlowlyVarying::log_shifted()) / (1 + 1 / s + 1 / (s * s)), 1.0, 1e-8);
        // atom: 1 + c / s
        EXPECT_NEAR(mean_weight(alpha, SlowlyVarying::constant(0.5)), 1 + 0.5 / s, 1e-8);
    }
    for (double alpha : {3.0, 4.0, 5.5}) {
        const double s = alpha - 2.0;
        // (1 + ln h)^2: 1 + 1/s + 2/s^2 + 2/s^3
        EXPECT_NEAR(mean_weight(alpha, SlowlyVarying::log_shifted_pow(2.0)) / (1 + 1 / s + 2 / (s * s) + 2 / (s * s * s)),
                    1.0, 1e-8);
    }
}

// ---- moment integrals ----

TEST(MomentIntegral, Examples) {
    const auto d = pareto(3);
    EXPECT_NEAR(moment_integral(d, 0, 1, kInf), 1.0, 1e-12);
    EXPECT_NEAR(moment_integral(d, 1, 1, 10), 1.8, 1e-12);
    EXPECT_NEAR(moment_integral(d, 2, 1, e), 2.0, 1e-12);
}

TEST(MomentIntegral, Errors) {
    const auto d = pareto(3);
    EXPECT_THROW(moment_integral(d, 2, 1, kInf), DivergenceError);
    EXPECT_THROW(moment_integral(d, 3, 2, kInf), DivergenceError);
    EXPECT_THROW(moment_integral(d, 1, 0.5, 2), DomainError);
    EXPECT_THROW(moment_integral(d, 1, 3, 2), DomainError);
}

TEST(MomentIntegral, RandomParetoCasesMatchClosedForm) {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double alpha = 2.1 + 3.0 * U(gen);
        double beta = -1.0 + (alpha + 1.0) * U(gen);
        if (trial % 5 == 0) beta = alpha - 1.0;  // resonance
        const double a = std::exp(std::log(100.0) * U(gen));
        double b = a * std::exp(std::log(1e4) * U(gen));
        if (trial % 4 == 1 && beta < alpha - 1.0) b = kInf;
        const auto d = pareto(alpha);
        const double want = oracle::pareto_moment(alpha, beta, a, b);
        for (auto method : {MomentMethod::Auto, MomentMethod::Numeric}) {
            const double got = moment_integral(d, beta, a, b, method);
            EXPECT_NEAR(got / want, 1.0, 1e-8) << "alpha=" << alpha << " beta=" << beta << " a=" << a << " b=" << b
                                               << " numeric=" << (method == MomentMethod::Numeric);
        }
    }
}

TEST(MomentIntegral, IncludesAtomOnlyAtOne) {
    const TailDistribution d(3, SlowlyVarying::constant(0.5));
    EXPECT_NEAR(moment_integral(d, 1, 1, 10), 0.5 + 0.5 * 1.8, 1e-12);
    EXPECT_NEAR(moment_integral(d, 1, 1.5, 10), 0.5 * oracle::pareto_moment(3, 1, 1.5, 10), 1e-12);
    EXPECT_NEAR(moment_integral(d, 0, 1, kInf), 1.0, 1e-12);
}

TEST(MomentIntegral, LogShiftedAgainstGaussLegendre) {
    for (double alpha : {2.5, 3.0, 4.5}) {
        const TailDistribution d(alpha, SlowlyVarying::log_shifted());
        for (double beta : {0.0, 1.0, 2.0, 3.5}) {
            for (auto [a, b] : {std::pair{1.0, 30.0}, std::pair{2.0, 1e5}, std::pair{10.0, 1e8}}) {
                const double want = oracle::integrate_log(
                    [&](double h) { return std::pow(h, beta) * log_shifted_density(alpha, h); }, a, b, 400);
                for (auto method : {MomentMethod::Auto, MomentMethod::Numeric})
                    EXPECT_NEAR(moment_integral(d, beta, a, b, method) / want, 1.0, 1e-8)
                        << alpha << " " << beta << " " << a << " " << b;
            }
        }
    }
}

TEST(MomentIntegral, LogPowAgainstGaussLegendre) {
    const double alpha = 3.5, p = 1.7;
    const TailDistribution d(alpha, SlowlyVarying::log_shifted_pow(p));
    auto density = [&](double h) {
        const double t = 1.0 + std::log(h);
        return std::pow(h, -alpha) * std::pow(t, p - 1.0) * ((alpha - 1.0) * t - p);
    };
    for (double beta : {0.5, 2.5}) {
        const double want = oracle::integrate_log([&](double h) { return std::pow(h, beta) * density(h); }, 1.0, 1e6, 400);
        EXPECT_NEAR(moment_integral(d, beta, 1.0, 1e6) / want, 1.0, 1e-8);
    }
}

TEST(MomentIntegral, FiniteSizeAsymptotics) {
    for (double alpha : {2.5, 3.0, 4.5}) {
        const auto d = pareto(alpha);
        const double beta_hi = alpha - 0.5;  // beta > alpha - 1
        const double ratio = moment_integral(d, beta_hi, 1, 1e6) / std::pow(1e6, beta_hi - alpha + 1);
        EXPECT_NEAR(ratio / ((alpha - 1) / (beta_hi - alpha + 1)), 1.0, 0.01);
        const double beta_lo = alpha - 1.7;  // beta < alpha - 1
        const double at6 = moment_integral(d, beta_lo, 1, 1e6), at9 = moment_integral(d, beta_lo, 1, 1e9);
        EXPECT_LT(std::abs(at9 / at6 - 1.0), 1e-3);
    }
}

// ---- Q ----

TEST(QFunction, Examples) {
    EXPECT_NEAR(q_function(3, SlowlyVarying::constant(), e), 2.0, 1e-12);
    EXPECT_NEAR(q_function(3, SlowlyVarying::log_formal(), e * e, true), 2.0, 1e-12);
    for (int alpha : {3, 4, 5}) {
        EXPECT_EQ(q_function(alpha, SlowlyVarying::constant(), 1.0), 0.0);
        EXPECT_EQ(q_function(alpha, SlowlyVarying::log_formal(), 1.0, true), 0.0);
    }
}

TEST(QFunction, ClosedFormsOnGrid) {
    for (int alpha : {3, 4, 5}) {
        for (double x : {e, 10.0, 1e3, 1e8}) {
            const double lx = std::log(x);
            EXPECT_NEAR(q_function(alpha, SlowlyVarying::constant(), x) / ((alpha - 1) * lx), 1.0, 1e-8);
            const double want = (alpha - 1) / 2.0 * lx * lx - lx;  // 0 at x = e for alpha = 3
            EXPECT_NEAR(q_function(alpha, SlowlyVarying::log_formal(), x, true), want, 1e-8 * std::max(1.0, want));
        }
    }
}

TEST(QFunction, NumericRouteMatchesClosedForm) {
    for (int alpha : {3, 4}) {
        const TailDistribution d(alpha, SlowlyVarying::log_shifted());
        for (double x : {3.0, 1e4}) {
            EXPECT_NEAR(q_function(d, x, MomentMethod::Numeric) / q_function(d, x), 1.0, 1e-8);
        }
    }
}

TEST(QFunction, DomainErrors) {
    EXPECT_THROW(q_function(2, SlowlyVarying::constant(), 2.0), DomainError);
    EXPECT_THROW(q_function(pareto(3.5), 2.0), DomainError);
    EXPECT_THROW(q_function(3, SlowlyVarying::constant(), 0.5), DomainError);
}

TEST(QFunction, NondecreasingSlowlyVaryingAndDominatesL) {
    const std::vector<double> grid = {e, 10, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9};
    for (int alpha : {3, 4}) {
        for (const auto& l : {SlowlyVarying::constant(), SlowlyVarying::log_shifted(), SlowlyVarying::log_shifted_pow(2.0)}) {
            const TailDistribution d(alpha, l);
            const auto table = q_table(d, grid);
            double prev = 0.0, prev_ratio = INFINITY;
            const double c = l(e) / table.values.at(e);
            for (double x : grid) {
                const double q = table.values.at(x);
                EXPECT_GE(q, prev);
                prev = q;
                const double ratio = q_function(d, 2 * x) / q;
                EXPECT_GE(ratio, 1.0);
                EXPECT_LE(ratio, prev_ratio * (1 + 1e-12));
                prev_ratio = ratio;
                EXPECT_LE(l(x), c * q * (1 + 1e-9)) << l.name() << " x=" << x;
            }
            EXPECT_LT(prev_ratio, 1.2);
        }
    }
}

// ---- slowly varying catalogue ----

TEST(SlowlyVarying, PositiveAndNames) {
    for (const auto& l : {SlowlyVarying::constant(0.7), SlowlyVarying::log_shifted(), SlowlyVarying::log_shifted_pow(0.5),
                          SlowlyVarying::log_formal()})
        for (double h = 1.01; h < 1e9; h *= 3) EXPECT_GT(l(h), 0.0);
    EXPECT_EQ(SlowlyVarying::from_name("one").name(), "one");
    EXPECT_EQ(SlowlyVarying::from_name("log").name(), SlowlyVarying::log_shifted().name());
    EXPECT_DOUBLE_EQ(SlowlyVarying::from_name("logpow", {2.0})(e), 4.0);
    EXPECT_THROW(SlowlyVarying::from_name("nope"), InvalidParameter);
    EXPECT_THROW(SlowlyVarying::constant(1.5), InvalidParameter);
}

// The catalogue's logarithms satisfy l(lx)/l(x) -> 1 only at rate 1/ln x, so
// the ratio is checked to decrease toward 1 across the grid rather than to be
// within 1% at x = 1e9 (log(10e)/log(e) - 1 is still ~10% there).
TEST(SlowlyVarying, RatioTendsToOne) {
    for (const auto& l : {SlowlyVarying::constant(), SlowlyVarying::constant(0.2)})
        for (double lambda : {2.0, 10.0})
            for (double x : {1e3, 1e6, 1e9}) EXPECT_DOUBLE_EQ(l(lambda * x) / l(x), 1.0);
    for (const auto& l : {SlowlyVarying::log_shifted(), SlowlyVarying::log_shifted_pow(2.0), SlowlyVarying::log_formal()}) {
        for (double lambda : {2.0, 10.0}) {
            double prev = INFINITY;
            for (double x : {1e3, 1e6, 1e9, 1e30, 1e300}) {
                const double r = l(lambda * x) / l(x);
                EXPECT_GT(r, 1.0);
                EXPECT_LT(r, prev);
                prev = r;
            }
            EXPECT_LT(prev - 1.0, 0.01);
        }
    }
}

TEST(SlowlyVarying, DerivativeMatchesFiniteDifference) {
    for (const auto& l : {SlowlyVarying::log_shifted(), SlowlyVarying::log_shifted_pow(1.5), SlowlyVarying::log_formal()})
        for (double h : {1.5, 10.0, 1e4}) {
            const double dh = h * 1e-6;
            EXPECT_NEAR(l.derivative(h), (l(h + dh) - l(h - dh)) / (2 * dh), 1e-6 * std::abs(l.derivative(h)) + 1e-12);
        }
}

// ---- sampling ----

TEST(SampleWeight, Examples) {
    EXPECT_NEAR(sample_weight(pareto(3), 0.25), 2.0, 1e-15);
    EXPECT_EQ(sample_weight(pareto(3), 1.0), 1.0);
    EXPECT_NEAR(sample_weight(pareto(2.5), 1e-3), 100.0, 1e-12);
    EXPECT_THROW(sample_weight(pareto(3), 0.0), DomainError);
}

TEST(SampleWeight, AtomReturnsOne) {
    const TailDistribution d(3, SlowlyVarying::constant(0.4));
    EXPECT_EQ(sample_weight(d, 0.4), 1.0);
    EXPECT_EQ(sample_weight(d, 0.9), 1.0);
    EXPECT_GT(sample_weight(d, 0.39), 1.0);
}

TEST(SampleWeight, BisectionInvertsLogTails) {
    for (const auto& l : {SlowlyVarying::log_shifted(), SlowlyVarying::log_shifted_pow(2.5)}) {
        const TailDistribution d(4.0, l);
        for (double u : {0.9, 0.3, 1e-3, 1e-9, 1e-15}) {
            const double h = sample_weight(d, u);
            EXPECT_NEAR(tail(d, h) / u, 1.0, 1e-10) << l.name() << " u=" << u;
        }
    }
}

TEST(SampleWeight, EmpiricalTailWithinFourBinomialSigma) {
    const std::size_t count = 1'000'000;
    for (const auto& l : {SlowlyVarying::constant(), SlowlyVarying::constant(0.6), SlowlyVarying::log_shifted()}) {
        const TailDistribution d(2.5, l);
        const auto w = sample_weights(d, count, 11);
        const double cut = std::sqrt(d.mu() * 1e4);
        for (double h : {1.0, 2.0, 5.0, 10.0, 50.0, cut}) {
            const double p = tail(d, h);
            double above = 0;
            for (double x : w) above += x > h;
            const double sigma = std::sqrt(p * (1 - p) / count);
            EXPECT_LE(std::abs(above / count - p), 4 * sigma + 1e-12) << l.name() << " h=" << h;
        }
    }
}

TEST(SampleWeights, DeterministicPerSeed) {
    const auto d = TailDistribution(3.2, SlowlyVarying::log_shifted());
    EXPECT_EQ(sample_weights(d, 100, 5), sample_weights(d, 100, 5));
    EXPECT_NE(sample_weights(d, 100, 5), sample_weights(d, 100, 6));
}

// ---- serialization ----

TEST(Serialization, RoundTripRecomputesMu) {
    for (const auto& l : {SlowlyVarying::constant(0.25), SlowlyVarying::log_shifted(), SlowlyVarying::log_shifted_pow(1.5)}) {
        const TailDistribution d(3.3, l);
        const auto back = distribution_from_kv(to_kv(d));
        EXPECT_EQ(back.alpha(), d.alpha());
        EXPECT_EQ(back.l().name(), d.l().name());
        EXPECT_EQ(back.l().params(), d.l().params());
        EXPECT_EQ(back.mu(), d.mu());
    }
    // A stored mu is never trusted.
    const auto d = distribution_from_kv("alpha = 3\nl_name = one\nmu = 99\n");
    EXPECT_NEAR(d.mu(), 2.0, 1e-10);
    EXPECT_THROW(distribution_from_kv("l_name = one\n"), ParseError);
    EXPECT_THROW(distribution_from_kv("alpha = 2\n"), InvalidParameter);
}

TEST(Serialization, FormalModeSurvives) {
    const TailDistribution f(4, SlowlyVarying::log_formal(), TailDistribution::Mode::Formal);
    const auto back = distribution_from_kv(to_kv(f));
    EXPECT_TRUE(back.formal());
    EXPECT_NEAR(q_function(back, 10.0), q_function(f, 10.0), 0.0);
}
