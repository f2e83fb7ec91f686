// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Each criterion also has a wall-clock budget that counts toward its verdict.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "acnet/acnet.hpp"
#include "acnet/io.hpp"
#include "cli_support.hpp"
#include "support.hpp"

using namespace acnet;
namespace ts = testing_support;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    double budget_seconds;
    std::function<Outcome()> run;
};

constexpr std::uint64_t kBaseSeed = 1;
constexpr std::size_t kMonth = 30 * 144;

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

unsigned jobs() { return std::max(1U, std::thread::hardware_concurrency()); }

Outcome g2_oracle() {
    Rng rng(derive_seed(kBaseSeed, {1}));
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto t = ts::random_counts(rng, 2, 2, 8, 50);
        worst = std::max(worst, std::fabs(g2_statistic(ts::to_table(t)) - ts::oracle_g2(t)));
    }
    return {worst <= 1e-10, "max |diff| = " + fmt("%.3e", worst) + " over 1000 tables"};
}

Outcome chi2_oracle() {
    double worst = 0.0;
    for (int k = 1; k <= 20; ++k)
        for (int i = 0; i <= 200; ++i) {
            const double x = 0.25 * i;
            worst = std::max(worst, std::fabs(special::chi2_survival(x, k) - ts::oracle_chi2_tail(x, k)));
        }
    const double spot = special::chi2_survival(3.841, 1);
    return {worst <= 1e-8 && std::fabs(spot - 0.05) <= 1e-3,
            "max |diff| = " + fmt("%.3e", worst) + ", Q(3.841, 1) = " + fmt("%.6f", spot)};
}

Outcome hand_g2() {
    ContingencyTable3D t(2, 2, 1);
    t.add(0, 0, 0, 5);
    t.add(1, 1, 0, 5);
    const double g2 = g2_statistic(t);
    return {std::fabs(g2 - 20.0 * std::log(2.0)) <= 1e-9, "G2 = " + fmt("%.12f", g2)};
}

Outcome deterministic_chains() {
    int fwd = 0, bwd = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        Rng rng(derive_seed(kBaseSeed, {4, s}));
        const auto c = ts::random_bits(rng, kMonth, 24.0 / 144.0);
        std::vector<std::uint8_t> m(c.size(), 0);
        for (std::size_t t = 1; t < c.size(); ++t) m[t] = c[t - 1];
        fwd += learn_direction({"C", SequenceKind::Situation, c}, {"M", SequenceKind::Emotion, m}, {}).verdict ==
               DirectionVerdict::Forward;
        bwd += learn_direction({"C", SequenceKind::Situation, m}, {"M", SequenceKind::Emotion, c}, {}).verdict ==
               DirectionVerdict::Backward;
    }
    return {fwd == 20 && bwd == 20, "forward " + std::to_string(fwd) + "/20, swapped backward " + std::to_string(bwd) + "/20"};
}

Outcome confounder() {
    int latent = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        GenConfig cfg;
        cfg.n_situations = cfg.n_emotions = 1;
        cfg.d_g = 0.0;
        cfg.n_c = 1;
        cfg.seed = derive_seed(kBaseSeed, {5, s});
        const auto [bundle, truth] = gen_dataset(cfg);
        const auto g = learn_graph(bundle);
        latent += g.edges().size() == 1 && g.edges()[0].kind == EdgeKind::LatentConfounded;
    }
    return {latent >= 16, "latent " + std::to_string(latent) + "/20"};
}

SweepSpec benchmark_scale() {
    SweepSpec s;
    s.base.n_situations = 10;
    s.base.n_emotions = 10;
    s.base.d_g = 1.0;
    s.base.days = 30;
    s.base.seed = kBaseSeed;
    s.trials = 20;
    return s;
}

Outcome sparsity() {
    auto s = benchmark_scale();
    s.epsilons = {8.0, 24.0, 72.0};
    const auto r = run_sweep(s, jobs());
    std::string detail;
    for (double e : s.epsilons) {
        detail += "eps=" + fmt("%g", e) + ":";
        for (auto m : s.methods) detail += std::string(" ") + to_string(m) + "=" + fmt("%.3f", r.mean(e, 1.0, 0, m, "f1"));
        detail += "; ";
    }
    const double a = r.mean(8.0, 1.0, 0, Method::Acnet, "f1");
    const bool ok = a >= 0.6 && a > r.mean(8.0, 1.0, 0, Method::Te, "f1") && a > r.mean(8.0, 1.0, 0, Method::Gc, "f1");
    return {ok, "F1 " + detail};
}

Outcome lag_stability() {
    auto s = benchmark_scale();
    s.etas = {1, 2, 3, 4, 5, 6};
    s.methods = {Method::Acnet, Method::Gc};
    const auto r = run_sweep(s, jobs());
    double lo = 1.0, hi = 0.0;
    std::string acnet = "ACNet precision", gc = "GC precision";
    for (double h : s.etas) {
        const double p = r.mean(24.0, h, 0, Method::Acnet, "precision");
        lo = std::min(lo, p);
        hi = std::max(hi, p);
        acnet += " " + fmt("%.3f", p);
        gc += " " + fmt("%.3f", r.mean(24.0, h, 0, Method::Gc, "precision"));
    }
    const double g1 = r.mean(24.0, 1.0, 0, Method::Gc, "precision"), g6 = r.mean(24.0, 6.0, 0, Method::Gc, "precision");
    const bool ok = hi - lo <= 0.25 && lo >= 0.55 && g6 < g1;
    return {ok, acnet + " (range " + fmt("%.3f", hi - lo) + "); " + gc};
}

Outcome calibration() {
    std::size_t edges = 0, pairs = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        GenConfig cfg;
        cfg.d_g = 0.0;
        cfg.seed = derive_seed(kBaseSeed, {8, s});
        const auto [bundle, truth] = gen_dataset(cfg);
        edges += learn_graph(bundle).edges().size();
        pairs += static_cast<std::size_t>(cfg.n_situations * cfg.n_emotions);
    }
    const double rate = static_cast<double>(edges) / static_cast<double>(pairs);
    return {pairs == 500 && rate <= 0.10, std::to_string(edges) + " edges over " + std::to_string(pairs) +
                                              " pair-trials, rate " + fmt("%.3f", rate)};
}

Outcome kernels_ok() {
    const auto report = kernels::run_kernel_checks(kBaseSeed, 100);
    std::string detail;
    for (const auto& c : report.checks)
        if (!c.passed) detail += c.name + " failed (" + c.detail + "); ";
    return {report.passed(), detail.empty() ? std::to_string(report.checks.size()) + " checks passed" : detail};
}

Outcome te_case() {
    Rng rng(derive_seed(kBaseSeed, {10}));
    const auto x = ts::random_bits(rng, 50000, 0.5);
    std::vector<std::uint8_t> y(x.size(), 0);
    for (std::size_t t = 1; t < x.size(); ++t) y[t] = x[t - 1];
    const double fwd = transfer_entropy(x, y), bwd = transfer_entropy(y, x);
    return {std::fabs(fwd - std::log(2.0)) <= 0.02 && bwd <= 0.02,
            "TE(x->y) = " + fmt("%.5f", fwd) + ", TE(y->x) = " + fmt("%.5f", bwd)};
}

Outcome determinism() {
    using namespace cli_support;
    ScratchDir d("accept");
    std::ofstream(d / "spec.json") << R"({"base":{"n_situations":3,"n_emotions":3},"epsilon":[8,24],"trials":2,)"
                                      R"("methods":["acnet","te","gc"],"te":{"permutations":100}})";
    const std::vector<std::string> outputs = {"bundle.json", "truth.json", "truth.dot",   "graph.json",
                                              "graph.dot",   "results.csv", "results.json"};
    const std::vector<std::string> manifests = {"manifest-generate.json", "manifest-discover.json",
                                                "manifest-sweep.json"};
    auto once = [&](std::map<std::string, std::string>& files) {
        const auto dir = quote(d.path());
        if (run_cli("generate --out " + dir + " --seed 11 --nc 1", d).code != 0) return false;
        if (run_cli("discover " + quote(d / "bundle.json") + " --out " + dir, d).code != 0) return false;
        if (run_cli("sweep " + quote(d / "spec.json") + " --out " + dir + " --jobs 2", d).code != 0) return false;
        for (const auto& f : outputs) files[f] = slurp(d / f);
        for (const auto& f : manifests) {
            auto j = io::json::parse(slurp(d / f));
            j.erase("duration_seconds");
            files[f] = j.dump();
        }
        return true;
    };
    std::map<std::string, std::string> a, b;
    if (!once(a) || !once(b)) return {false, "a CLI run exited non-zero"};
    std::string diff;
    for (const auto& [name, content] : a)
        if (content.empty() || b[name] != content) diff += name + " ";
    return {diff.empty(), diff.empty() ? std::to_string(a.size()) + " files identical across reruns" : "differs: " + diff};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "G2 matches the loop-literal oracle", 5, g2_oracle},
        {2, "chi-square tail matches quadrature", 10, chi2_oracle},
        {3, "G2 of the (5,0;0,5) table is 20 ln 2", 1, hand_g2},
        {4, "deterministic lag-1 chains give Forward and Backward", 60, deterministic_chains},
        {5, "shared latent root gives Latent", 60, confounder},
        {6, "sparsity sweep: ACNet F1 at eps=8", 900, sparsity},
        {7, "influence-lag sweep: ACNet precision stable, GC degrades", 900, lag_stability},
        {8, "null false-edge rate at alpha 0.05", 300, calibration},
        {9, "affect kernels: hand cases and gradients", 10, kernels_ok},
        {10, "transfer entropy of a one-step copy", 10, te_case},
        {11, "CLI reruns are byte-identical", 120, determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.budget_seconds;
        const bool pass = o.passed && in_time;
        failed += !pass;
        std::printf("%s criterion %d: %s | %s | %.2f s (budget %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(),
                    o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", exceeded");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
