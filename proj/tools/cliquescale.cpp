// cliquescale: sample Chung-Lu graphs, count cliques, evaluate P(K_k) and run
// scaling studies.
//
// Exit codes: 0 success, 1 runtime failure (I/O, resources), 2 invalid
// configuration, 3 check failed (scaling verdict, MC cross-check, verify),
// 4 inconclusive scaling verdict.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <cliquescale/acceptance.hpp>
#include <cliquescale/asymptotics.hpp>
#include <cliquescale/clique_census.hpp>
#include <cliquescale/exact_evaluator.hpp>
#include <cliquescale/graph.hpp>
#include <cliquescale/graph_sampler.hpp>
#include <cliquescale/weight_model.hpp>

#ifndef CLIQUESCALE_VERSION
#define CLIQUESCALE_VERSION "dev"
#endif

namespace cs = cliquescale;

namespace {

enum Exit { kOk = 0, kRuntime = 1, kInvalid = 2, kFailed = 3, kInconclusive = 4 };

struct RunConfig {
    double alpha = 2.5;
    std::string l = "one";
    std::vector<double> lp;
    int k = 3;
    double n = 1000;
    std::vector<double> n_grid;
    std::size_t samples = 1'000'000;
    std::uint64_t seed = 1;
    std::string method = "auto";
    unsigned threads = 1;
    std::string output;
    std::optional<double> mu;
    double tolerance = cs::kDefaultSlopeTolerance;
    double rel_tol = 1e-8;
    std::size_t replicas = 100;
};

std::string join(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + cs::format_exact(xs[i]);
    return s;
}

cs::TailDistribution make_distribution(const RunConfig& c) {
    return cs::TailDistribution(c.alpha, cs::SlowlyVarying::from_name(c.l, c.lp), cs::TailDistribution::Mode::Strict,
                                c.mu);
}

std::vector<std::string> header(const std::string& command, const RunConfig& c, const cs::TailDistribution& dist) {
    std::ostringstream cfg;
    cfg << "alpha=" << cs::format_exact(c.alpha) << " l=" << c.l << " lp=" << join(c.lp) << " k=" << c.k
        << " n=" << cs::format_exact(c.n) << " n_grid=" << join(c.n_grid) << " samples=" << c.samples
        << " method=" << c.method << " threads=" << c.threads << " tolerance=" << cs::format_exact(c.tolerance)
        << " rel_tol=" << cs::format_exact(c.rel_tol) << " replicas=" << c.replicas;
    std::vector<std::string> lines = {
        "cliquescale " CLIQUESCALE_VERSION,
        "command: " + command,
        "config: " + cfg.str(),
        "seed: " + std::to_string(c.seed),
        "mu: " + cs::format_exact(dist.mu()) + (dist.mu_overridden() ? " (override; E[H] = " +
                                                                           cs::format_exact(dist.mean()) + ")"
                                                                     : ""),
    };
    return lines;
}

// Output stream: the -o file if given, stdout otherwise.
struct Sink {
    std::ofstream file;
    std::ostream* os = &std::cout;
    explicit Sink(const std::string& path) {
        if (path.empty()) return;
        file.open(path);
        if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
        os = &file;
    }
    std::ostream& operator*() { return *os; }
};

std::size_t to_count(double v, const char* name) {
    if (!(v >= 0.0) || v != std::floor(v) || v > 9e15)
        throw cs::InvalidParameter(std::string(name) + " must be a nonnegative integer");
    return static_cast<std::size_t>(v);
}

void write_comments(std::ostream& os, const std::vector<std::string>& lines) {
    for (const auto& l : lines) os << "# " << l << "\n";
}

int cmd_sample(const RunConfig& c) {
    const auto dist = make_distribution(c);
    if (!(c.n >= 1.0) || c.n != std::floor(c.n)) throw cs::InvalidParameter("n must be a positive integer");
    cs::SamplerConfig sc;
    sc.n = static_cast<std::size_t>(c.n);
    sc.seed = c.seed;
    sc.threads = c.threads;
    if (c.method == "naive") sc.method = cs::SamplerMethod::Naive;
    else if (c.method == "skip") sc.method = cs::SamplerMethod::Skip;
    else if (c.method != "auto") throw cs::InvalidParameter("sample --method must be auto, naive or skip");
    const auto g = cs::sample_graph(dist, sc);
    Sink out(c.output);
    cs::write_edge_list(*out, g, header("sample", c, dist));
    std::cerr << "sampled n=" << g.node_count() << " edges=" << g.edge_count() << "\n";
    return kOk;
}

int cmd_count(const RunConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file '" + path + "'");
    const auto g = cs::read_edge_list(in);
    const auto census = cs::count_cliques(g, c.k, c.threads);
    Sink out(c.output);
    *out << census.count << "\n";
    std::cerr << "k=" << c.k << " count=" << census.count << " runtime=" << census.runtime_seconds << " s\n";
    return kOk;
}

int cmd_prob(const RunConfig& c, bool with_mc) {
    const auto dist = make_distribution(c);
    cs::EvaluatorOptions ev;
    ev.rel_tol = c.rel_tol;
    ev.seed = c.seed;
    ev.threads = c.threads;
    const auto rep = cs::clique_prob_quadrature(dist, c.k, c.n, ev);
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    if (!rep.resonant_terms.empty()) {
        std::cerr << "resonant terms:";
        for (const auto& t : rep.resonant_terms) std::cerr << " " << t;
        std::cerr << "\n";
    }
    Sink out(c.output);
    write_comments(*out, header("prob", c, dist));
    auto& os = *out;
    os << cs::decomposition_csv_header();
    if (with_mc) os << ",mc_mean,mc_stderr,mc_samples,z";
    os << "\n" << cs::decomposition_csv_row(rep);
    int code = kOk;
    if (with_mc) {
        const auto mc = cs::clique_prob_mc(dist, c.k, c.n, c.samples, c.seed, c.threads);
        const double diff = std::abs(rep.total - mc.mean);
        const double z = mc.std_error > 0.0 ? diff / mc.std_error : (diff == 0.0 ? 0.0 : INFINITY);
        os.precision(17);
        os << "," << mc.mean << "," << mc.std_error << "," << mc.samples << "," << z;
        if (!(z <= 3.0)) {
            std::cerr << "MC cross-check outside 3 stderr (z = " << z << ")\n";
            code = kFailed;
        }
    }
    os << "\n";
    return code;
}

int cmd_scaling(const RunConfig& c) {
    const auto dist = make_distribution(c);
    if (c.n_grid.empty()) throw cs::InvalidParameter("scaling needs --n-grid");
    cs::StudyOptions so;
    so.method = cs::study_method_from_name(c.method == "auto" ? "quadrature" : c.method);
    so.seed = c.seed;
    so.mc_samples = c.samples;
    so.graph_replicas = c.replicas;
    so.tolerance = c.tolerance;
    so.threads = c.threads;
    so.evaluator.rel_tol = c.rel_tol;
    const auto study = cs::scaling_study(dist, c.k, c.n_grid, so);
    for (const auto& d : study.diagnostics) std::cerr << "diagnostic: " << d << "\n";
    Sink out(c.output);
    auto lines = header("scaling", c, dist);
    lines.push_back("prediction: regime=" + std::string(cs::to_string(study.prediction.regime)) +
                    " p_exponent=" + cs::format_exact(study.prediction.p_exponent) +
                    " a_exponent=" + cs::format_exact(study.prediction.a_exponent) + " sv=" +
                    study.prediction.sv_factor + (study.prediction.sharp ? " (sharp)" : " (upper bound)"));
    write_comments(*out, lines);
    *out << cs::study_csv(study);
    std::cerr << "slope=" << study.fit.slope << " stderr=" << study.fit.slope_stderr
              << " verdict=" << cs::to_string(study.fit.verdict) << "\n";
    switch (study.fit.verdict) {
        case cs::Verdict::Pass: return kOk;
        case cs::Verdict::Fail: return kFailed;
        case cs::Verdict::Inconclusive: return kInconclusive;
    }
    return kInconclusive;
}

int cmd_verify(const RunConfig& c, const std::vector<int>& only) {
    namespace acc = cs::acceptance;
    acc::Options opt;
    opt.threads = c.threads;
    Sink out(c.output);
    int failed = 0;
    const auto results = acc::run(opt, only, [&](const acc::CriterionResult& r) {
        *out << acc::format_line(r) << std::endl;
        if (!r.passed) ++failed;
    });
    *out << "summary: " << results.size() - static_cast<std::size_t>(failed) << " passed, " << failed
         << " failed\n";
    return failed == 0 ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chung-Lu clique scaling: sampling, counting, exact P(K_k), scaling studies"};
    app.set_version_flag("--version", CLIQUESCALE_VERSION);
    app.set_config("--config", "", "key = value configuration file; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig c;
    double mu = 0.0;
    // counts accept scientific notation (1e6)
    double samples = static_cast<double>(c.samples), replicas = static_cast<double>(c.replicas);
    app.add_option("--alpha", c.alpha, "power-law exponent (alpha > 2)")->capture_default_str();
    app.add_option("--l", c.l, "slowly varying function: one, const, atom, log, logpow, log_formal")
        ->capture_default_str();
    app.add_option("--lp", c.lp, "parameters of l (comma list)")->delimiter(',');
    app.add_option("--k", c.k, "clique size")->capture_default_str();
    app.add_option("--n", c.n, "graph size")->capture_default_str();
    app.add_option("--n-grid", c.n_grid, "geometric grid of n (comma list)")->delimiter(',');
    app.add_option("--samples", samples, "Monte Carlo samples")->capture_default_str();
    app.add_option("--seed", c.seed, "seed (default from CLIQUESCALE_SEED, else 1)")
        ->envname("CLIQUESCALE_SEED")
        ->capture_default_str();
    app.add_option("--method", c.method,
                   "sample: auto|naive|skip; scaling: quadrature|mc|graphs")
        ->capture_default_str();
    app.add_option("--threads", c.threads, "worker threads (0 = hardware)")->capture_default_str();
    app.add_option("-o,--output", c.output, "output file (default stdout)");
    app.add_option("--mu", mu, "override the edge-probability parameter mu (default E[H])");
    app.add_option("--tolerance", c.tolerance, "slope tolerance for scaling verdicts")->capture_default_str();
    app.add_option("--rel-tol", c.rel_tol, "quadrature relative tolerance")->capture_default_str();
    app.add_option("--replicas", replicas, "graph replicas per n for --method graphs")->capture_default_str();

    auto* sample = app.add_subcommand("sample", "sample a graph and write its edge list");
    auto* count = app.add_subcommand("count", "count k-cliques in an edge-list file");
    std::string graph_path;
    count->add_option("graph", graph_path, "edge-list file")->required();
    auto* prob = app.add_subcommand("prob", "decomposition of P(K_k) as CSV");
    bool with_mc = false;
    prob->add_flag("--mc", with_mc, "append a Monte Carlo cross-check");
    auto* scaling = app.add_subcommand("scaling", "scaling study over --n-grid");
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    std::vector<int> only;
    verify->add_option("--only", only, "criterion ids to run (comma list)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }
    if (app.count("--mu") > 0) c.mu = mu;

    try {
        c.samples = to_count(samples, "--samples");
        c.replicas = to_count(replicas, "--replicas");
        if (*sample) return cmd_sample(c);
        if (*count) return cmd_count(c, graph_path);
        if (*prob) return cmd_prob(c, with_mc);
        if (*scaling) return cmd_scaling(c);
        if (*verify) return cmd_verify(c, only);
    } catch (const std::logic_error& e) {  // InvalidParameter, DomainError, UnsupportedSampling
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kInvalid;
    } catch (const cs::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kInvalid;
}
