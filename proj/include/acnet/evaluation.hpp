#pragma once

// Scoring learned graphs against planted structure, and grid sweeps over the
// generator parameters comparing the direction learner with the baselines.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "acnet/baselines.hpp"
#include "acnet/causal_graph.hpp"
#include "acnet/direction_learner.hpp"
#include "acnet/generator.hpp"
#include "acnet/random.hpp"

namespace acnet {

struct MatchCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    // Conventions: no predictions -> precision 0, no truth -> recall 0, and
    // both empty counts as a perfect match.
    double precision() const {
        if (tp + fp == 0) return fn == 0 ? 1.0 : 0.0;
        return static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    double recall() const {
        if (tp + fn == 0) return fp == 0 ? 1.0 : 0.0;
        return static_cast<double>(tp) / static_cast<double>(tp + fn);
    }
    double f1() const {
        const double p = precision(), r = recall();
        return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    }
};

struct EdgeScore {
    MatchCounts pooled;
    std::array<MatchCounts, 3> per_kind{};  // indexed by EdgeKind

    const MatchCounts& kind(EdgeKind k) const { return per_kind[static_cast<std::size_t>(k)]; }
    double precision() const { return pooled.precision(); }
    double recall() const { return pooled.recall(); }
    double f1() const { return pooled.f1(); }
};

namespace detail {

// Directed edges match on (from, to, kind); latent edges on the unordered pair.
inline std::tuple<std::string, std::string, EdgeKind> match_key(const GraphEdge& e) {
    if (e.kind == EdgeKind::LatentConfounded) return {std::min(e.from, e.to), std::max(e.from, e.to), e.kind};
    return {e.from, e.to, e.kind};
}

}  // namespace detail

inline EdgeScore score_graph(const CausalGraph& learned, const GroundTruthGraph& truth) {
    auto names = [](const CausalGraph& g) {
        std::set<std::pair<std::string, SequenceKind>> s;
        for (const auto& n : g.nodes()) s.emplace(n.name, n.kind);
        return s;
    };
    if (names(learned) != names(truth.graph)) throw std::invalid_argument("score_graph: node sets differ");

    std::set<std::tuple<std::string, std::string, EdgeKind>> want, got;
    for (const auto& e : truth.graph.edges()) want.insert(detail::match_key(e));
    for (const auto& e : learned.edges()) got.insert(detail::match_key(e));

    EdgeScore score;
    for (const auto& k : got) {
        auto& bucket = score.per_kind[static_cast<std::size_t>(std::get<2>(k))];
        if (want.count(k)) {
            ++bucket.tp;
            ++score.pooled.tp;
        } else {
            ++bucket.fp;
            ++score.pooled.fp;
        }
    }
    for (const auto& k : want) {
        if (got.count(k)) continue;
        ++score.per_kind[static_cast<std::size_t>(std::get<2>(k))].fn;
        ++score.pooled.fn;
    }
    return score;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class Method { Acnet, Te, Gc };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::Acnet: return "acnet";
        case Method::Te: return "te";
        case Method::Gc: return "gc";
    }
    return "?";
}

inline Method method_from_string(const std::string& s) {
    if (s == "acnet") return Method::Acnet;
    if (s == "te") return Method::Te;
    if (s == "gc") return Method::Gc;
    throw std::invalid_argument("unknown method '" + s + "'");
}

struct SweepSpec {
    GenConfig base;
    std::vector<double> epsilons{24.0};
    std::vector<double> etas{1.0};
    std::vector<int> n_cs{0};
    int trials = 1;
    std::vector<Method> methods{Method::Acnet, Method::Te, Method::Gc};
    LearnerOptions learner;
    TeOptions te;
    std::optional<int> gc_lag;  // default: the generating eta, rounded and clamped to [1, 8]
    double gc_alpha = 0.05;

    void validate() const {
        if (trials < 1) throw ConfigError("trials", "must be at least 1");
        if (epsilons.empty()) throw ConfigError("epsilon", "grid must not be empty");
        if (etas.empty()) throw ConfigError("eta", "grid must not be empty");
        if (n_cs.empty()) throw ConfigError("n_c", "grid must not be empty");
        if (methods.empty()) throw ConfigError("methods", "at least one method required");
        check_alpha(learner.alpha);
        if (learner.eta_max < 1 || learner.eta_max > kMaxEtaMax) throw ConfigError("eta_max", "must lie in [1, 8]");
        if (gc_lag && (*gc_lag < 1 || *gc_lag > kMaxGrangerLag)) throw ConfigError("gc_lag", "must lie in [1, 8]");
        for (double e : epsilons)
            for (double h : etas)
                for (int c : n_cs) {
                    GenConfig cfg = base;
                    cfg.epsilon = e;
                    cfg.eta = h;
                    cfg.n_c = c;
                    cfg.validate();
                }
    }

    std::size_t cells() const { return epsilons.size() * etas.size() * n_cs.size(); }
};

struct SweepCell {
    double epsilon = 0.0;
    double eta = 0.0;
    int n_c = 0;
};

/// Generator config and seed of one trial in one grid cell.
inline GenConfig trial_config(const SweepSpec& spec, std::size_t cell, int trial) {
    const std::size_t n_eta = spec.etas.size(), n_nc = spec.n_cs.size();
    GenConfig cfg = spec.base;
    cfg.epsilon = spec.epsilons[cell / (n_eta * n_nc)];
    cfg.eta = spec.etas[(cell / n_nc) % n_eta];
    cfg.n_c = spec.n_cs[cell % n_nc];
    cfg.seed = derive_seed(spec.base.seed, {static_cast<std::uint64_t>(cell), static_cast<std::uint64_t>(trial)});
    return cfg;
}

inline int default_gc_lag(double eta) { return std::clamp(static_cast<int>(std::lround(eta)), 1, kMaxGrangerLag); }

/// Learns a graph with one method on a generated bundle.
inline CausalGraph run_method(Method method, const SequenceBundle& bundle, const GenConfig& cfg, const SweepSpec& spec) {
    switch (method) {
        case Method::Acnet: return learn_graph(bundle, spec.learner);
        case Method::Te: return te_graph(bundle, spec.te, derive_seed(cfg.seed, {0x7e}));
        case Method::Gc: return gc_graph(bundle, spec.gc_lag.value_or(default_gc_lag(cfg.eta)), spec.gc_alpha);
    }
    throw std::logic_error("unreachable");
}

inline const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names = {
        "precision",          "recall",          "f1",
        "forward_precision",  "forward_recall",  "forward_f1",
        "backward_precision", "backward_recall", "backward_f1",
        "latent_precision",   "latent_recall",   "latent_f1"};
    return names;
}

inline std::vector<double> metric_values(const EdgeScore& s) {
    std::vector<double> v{s.precision(), s.recall(), s.f1()};
    for (auto k : {EdgeKind::Forward, EdgeKind::Backward, EdgeKind::LatentConfounded}) {
        v.push_back(s.kind(k).precision());
        v.push_back(s.kind(k).recall());
        v.push_back(s.kind(k).f1());
    }
    return v;
}

struct TrialOutcome {
    std::size_t cell = 0;
    int trial = 0;
    Method method = Method::Acnet;
    std::optional<EdgeScore> score;
    std::string error;
};

struct MetricSummary {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation; 0 for a single trial
};

struct CellSummary {
    SweepCell cell;
    Method method = Method::Acnet;
    std::size_t n_trials = 0;  // successful trials
    std::size_t n_failed = 0;
    std::vector<MetricSummary> metrics;  // aligned with metric_names()
};

struct SweepResult {
    std::vector<CellSummary> cells;
    std::vector<TrialOutcome> trials;

    const CellSummary* find(double epsilon, double eta, int n_c, Method m) const {
        for (const auto& c : cells)
            if (c.cell.epsilon == epsilon && c.cell.eta == eta && c.cell.n_c == n_c && c.method == m) return &c;
        return nullptr;
    }

    double mean(double epsilon, double eta, int n_c, Method m, const std::string& metric) const {
        const auto* c = find(epsilon, eta, n_c, m);
        if (!c) throw std::out_of_range("no such sweep cell");
        const auto& names = metric_names();
        const auto it = std::find(names.begin(), names.end(), metric);
        if (it == names.end()) throw std::out_of_range("unknown metric " + metric);
        return c->metrics[static_cast<std::size_t>(it - names.begin())].mean;
    }
};

/// Runs every method on every trial of every cell. Per-trial metrics are
/// macro-averaged within a cell. Output order follows the grid
/// (epsilon, eta, n_c) and then the method list, independent of `jobs`.
inline SweepResult run_sweep(const SweepSpec& spec, unsigned jobs = 1) {
    spec.validate();
    const std::size_t n_cells = spec.cells();
    const auto n_trials = static_cast<std::size_t>(spec.trials);
    const std::size_t n_methods = spec.methods.size();

    std::vector<TrialOutcome> outcomes(n_cells * n_trials * n_methods);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t job = next++; job < n_cells * n_trials; job = next++) {
            const std::size_t cell = job / n_trials;
            const int trial = static_cast<int>(job % n_trials);
            const GenConfig cfg = trial_config(spec, cell, trial);
            std::optional<std::pair<SequenceBundle, GroundTruthGraph>> data;
            std::string gen_error;
            try {
                data = gen_dataset(cfg);
            } catch (const std::exception& e) {
                gen_error = e.what();
            }
            for (std::size_t m = 0; m < n_methods; ++m) {
                auto& out = outcomes[job * n_methods + m];
                out.cell = cell;
                out.trial = trial;
                out.method = spec.methods[m];
                if (!data) {
                    out.error = gen_error;
                    continue;
                }
                try {
                    out.score = score_graph(run_method(spec.methods[m], data->first, cfg, spec), data->second);
                } catch (const std::exception& e) {
                    out.error = e.what();
                }
            }
        }
    };
    const unsigned threads = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(n_cells * n_trials)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    SweepResult result;
    const std::size_t n_metrics = metric_names().size();
    for (std::size_t cell = 0; cell < n_cells; ++cell) {
        const GenConfig cfg = trial_config(spec, cell, 0);
        for (std::size_t m = 0; m < n_methods; ++m) {
            CellSummary summary;
            summary.cell = {cfg.epsilon, cfg.eta, cfg.n_c};
            summary.method = spec.methods[m];
            std::vector<std::vector<double>> values(n_metrics);
            for (std::size_t trial = 0; trial < n_trials; ++trial) {
                const auto& out = outcomes[(cell * n_trials + trial) * n_methods + m];
                if (!out.score) {
                    ++summary.n_failed;
                    continue;
                }
                ++summary.n_trials;
                const auto v = metric_values(*out.score);
                for (std::size_t k = 0; k < n_metrics; ++k) values[k].push_back(v[k]);
            }
            for (const auto& vs : values) {
                MetricSummary ms;
                if (!vs.empty()) {
                    for (double x : vs) ms.mean += x;
                    ms.mean /= static_cast<double>(vs.size());
                    if (vs.size() > 1) {
                        double ss = 0.0;
                        for (double x : vs) ss += (x - ms.mean) * (x - ms.mean);
                        ms.std = std::sqrt(ss / static_cast<double>(vs.size() - 1));
                    }
                }
                summary.metrics.push_back(ms);
            }
            result.cells.push_back(std::move(summary));
        }
    }
    result.trials = std::move(outcomes);
    return result;
}

}  // namespace acnet
