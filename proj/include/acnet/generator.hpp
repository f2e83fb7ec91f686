#pragma once

// Planted-structure benchmark generator.
//
// Root sequences are discretized Poisson processes (Bernoulli per grid step).
// An effect fires at t with the influence probability of the time elapsed since
// each parent's most recent occurrence, OR-ed with its own background rate.
// Latent factors are hidden root sequences driving one situation and one
// emotion by the same mechanism.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "acnet/causal_graph.hpp"
#include "acnet/event_sequence.hpp"
#include "acnet/random.hpp"

namespace acnet {

class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// How the influence lag parameter shapes the firing kernel.
enum class LagModel {
    Rate,     // p = min(1, eta * exp(-dt * eta))
    MeanLag,  // p = (1 / eta) * exp(-dt / eta); eta is the mean delay in steps
};

/// How a latent factor reaches the two sequences it confounds.
enum class LatentMode {
    Persistent,   // influence kernel with memory of the latent's last occurrence
    Instantaneous // member fires at t only when the latent fired at t-1
};

struct GenConfig {
    int n_situations = 5;
    int n_emotions = 5;
    double epsilon = 24.0;  // occurrences per day of a root sequence
    double eta = 1.0;       // influence lag
    double d_g = 1.0;       // average in-degree of the emotion nodes
    int n_c = 0;            // confounded situation/emotion pairs
    int days = 30;
    int step_minutes = 10;
    std::uint64_t seed = 1;
    bool effect_background = true;
    LagModel lag_model = LagModel::MeanLag;
    LatentMode latent_mode = LatentMode::Persistent;

    TimeGrid grid() const {
        return TimeGrid{step_minutes, static_cast<std::size_t>(days) * static_cast<std::size_t>(1440 / step_minutes)};
    }

    /// Per-step occurrence probability of a root sequence.
    double root_rate() const { return epsilon * step_minutes / 1440.0; }

    std::size_t planted_edge_count() const {
        return static_cast<std::size_t>(std::llround(d_g * static_cast<double>(n_emotions)));
    }

    void validate() const {
        if (n_situations < 0) throw ConfigError("n_situations", "must be non-negative");
        if (n_emotions < 0) throw ConfigError("n_emotions", "must be non-negative");
        if (step_minutes <= 0 || 1440 % step_minutes != 0)
            throw ConfigError("step_minutes", "must be a positive divisor of 1440");
        if (days <= 0) throw ConfigError("days", "must be positive");
        if (grid().horizon < 2) throw ConfigError("days", "grid must have at least two timestamps");
        if (!(epsilon > 0.0)) throw ConfigError("epsilon", "must be positive");
        if (root_rate() >= 1.0)
            throw ConfigError("epsilon", "rate " + std::to_string(epsilon) + "/day is at least one event per step");
        if (!(eta >= 1.0)) throw ConfigError("eta", "must be at least 1");
        if (d_g < 0.0) throw ConfigError("d_g", "must be non-negative");
        if (planted_edge_count() > static_cast<std::size_t>(n_situations) * static_cast<std::size_t>(n_emotions))
            throw ConfigError("d_g", "requires more edges than situation/emotion pairs");
        if (n_c < 0) throw ConfigError("n_c", "must be non-negative");
        if (n_c > std::min(n_situations, n_emotions))
            throw ConfigError("n_c", "more confounded pairs than node-disjoint situation/emotion pairs");
        const auto pairs = static_cast<std::size_t>(n_situations) * static_cast<std::size_t>(n_emotions);
        if (planted_edge_count() + static_cast<std::size_t>(n_c) > pairs)
            throw ConfigError("n_c", "not enough free situation/emotion pairs for the confounders");
    }
};

/// Firing probability dt steps after the most recent causal occurrence.
inline double influence_probability(double delta_t, double eta, LagModel model = LagModel::Rate) {
    if (delta_t < 0.0) throw std::domain_error("influence_probability: delta_t must be non-negative");
    if (!(eta > 0.0)) throw std::domain_error("influence_probability: eta must be positive");
    if (std::isinf(delta_t)) return 0.0;
    if (model == LagModel::Rate) return std::min(1.0, eta * std::exp(-delta_t * eta));
    return std::min(1.0, std::exp(-delta_t / eta) / eta);
}

inline std::string situation_name(int i) { return "C" + std::to_string(i + 1); }
inline std::string emotion_name(int j) { return "M" + std::to_string(j + 1); }

inline GroundTruthGraph gen_structure(const GenConfig& config, Rng& rng) {
    config.validate();
    GroundTruthGraph truth;
    for (int i = 0; i < config.n_situations; ++i) truth.graph.add_node(situation_name(i), SequenceKind::Situation);
    for (int j = 0; j < config.n_emotions; ++j) truth.graph.add_node(emotion_name(j), SequenceKind::Emotion);

    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < config.n_situations; ++i)
        for (int j = 0; j < config.n_emotions; ++j) pairs.emplace_back(i, j);
    rng.shuffle(pairs);

    const std::size_t n_edges = config.planted_edge_count();
    for (std::size_t k = 0; k < n_edges; ++k)
        truth.graph.add_edge({situation_name(pairs[k].first), emotion_name(pairs[k].second), EdgeKind::Forward});

    // Confounded pairs: node-disjoint from each other, never on a planted edge.
    std::vector<bool> used_s(static_cast<std::size_t>(config.n_situations), false);
    std::vector<bool> used_e(static_cast<std::size_t>(config.n_emotions), false);
    int placed = 0;
    for (std::size_t k = n_edges; k < pairs.size() && placed < config.n_c; ++k) {
        const auto [i, j] = pairs[k];
        if (used_s[static_cast<std::size_t>(i)] || used_e[static_cast<std::size_t>(j)]) continue;
        used_s[static_cast<std::size_t>(i)] = used_e[static_cast<std::size_t>(j)] = true;
        const std::string id = "H" + std::to_string(++placed);
        truth.graph.add_edge({situation_name(i), emotion_name(j), EdgeKind::LatentConfounded, id});
        truth.latents.push_back({id, situation_name(i), emotion_name(j)});
    }
    if (placed < config.n_c)
        throw ConfigError("n_c", "could not place " + std::to_string(config.n_c) + " node-disjoint confounded pairs");
    truth.graph.canonicalize();
    return truth;
}

inline BinaryEventSequence gen_root_sequence(double epsilon, const TimeGrid& grid, Rng& rng) {
    const double rate = epsilon * grid.step_minutes / 1440.0;
    if (epsilon < 0.0) throw ConfigError("epsilon", "must be non-negative");
    if (rate >= 1.0) throw ConfigError("epsilon", "rate is at least one event per step");
    BinaryEventSequence seq;
    seq.values.resize(grid.horizon);
    for (auto& v : seq.values) v = rng.bernoulli(rate) ? 1 : 0;
    return seq;
}

namespace detail {

// OR-combines background events with influence from each parent.
inline void apply_influence(std::vector<std::uint8_t>& out, const std::vector<const std::vector<std::uint8_t>*>& parents,
                            const GenConfig& config, Rng& rng) {
    const std::size_t T = out.size();
    for (const auto* parent : parents) {
        std::optional<std::size_t> last;  // most recent occurrence strictly before t
        for (std::size_t t = 0; t < T; ++t) {
            if (last) {
                const double dt = static_cast<double>(t - *last);
                if (rng.bernoulli(influence_probability(dt, config.eta, config.lag_model))) out[t] = 1;
            }
            if ((*parent)[t]) last = t;
        }
    }
}

}  // namespace detail

inline std::pair<SequenceBundle, GroundTruthGraph> gen_dataset(const GenConfig& config) {
    config.validate();
    Rng structure_rng(derive_seed(config.seed, {0}));
    GroundTruthGraph truth = gen_structure(config, structure_rng);

    SequenceBundle bundle;
    bundle.grid = config.grid();
    const std::size_t T = bundle.grid.horizon;
    const auto ns = static_cast<std::size_t>(config.n_situations);
    const auto ne = static_cast<std::size_t>(config.n_emotions);

    // Independent stream per sequence so adding nodes never perturbs others.
    auto stream = [&](std::uint64_t kind, std::size_t idx) { return Rng(derive_seed(config.seed, {kind, idx})); };

    std::vector<std::vector<std::uint8_t>> latent(truth.latents.size());
    for (std::size_t k = 0; k < latent.size(); ++k) {
        auto rng = stream(1, k);
        latent[k] = gen_root_sequence(config.epsilon, bundle.grid, rng).values;
    }

    auto latent_index = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t k = 0; k < truth.latents.size(); ++k)
            if (truth.latents[k].situation == name || truth.latents[k].emotion == name) return k;
        return std::nullopt;
    };

    auto drive_by_latent = [&](std::vector<std::uint8_t>& out, std::size_t k, Rng& rng) {
        const auto& h = latent[k];
        if (config.latent_mode == LatentMode::Instantaneous) {
            const double p = influence_probability(1.0, config.eta, config.lag_model);
            for (std::size_t t = 1; t < T; ++t)
                if (h[t - 1] && rng.bernoulli(p)) out[t] = 1;
        } else {
            detail::apply_influence(out, {&h}, config, rng);
        }
    };

    auto background = [&](bool has_parent, Rng& rng) {
        std::vector<std::uint8_t> v(T, 0);
        if (!has_parent || config.effect_background) v = gen_root_sequence(config.epsilon, bundle.grid, rng).values;
        return v;
    };

    for (std::size_t i = 0; i < ns; ++i) {
        const auto name = situation_name(static_cast<int>(i));
        auto rng = stream(2, i);
        const auto k = latent_index(name);
        auto values = background(k.has_value(), rng);
        if (k) drive_by_latent(values, *k, rng);
        bundle.situations.push_back({name, SequenceKind::Situation, std::move(values)});
    }

    for (std::size_t j = 0; j < ne; ++j) {
        const auto name = emotion_name(static_cast<int>(j));
        auto rng = stream(3, j);
        std::vector<const std::vector<std::uint8_t>*> parents;
        for (const auto& e : truth.graph.edges())
            if (e.kind == EdgeKind::Forward && e.to == name)
                for (const auto& s : bundle.situations)
                    if (s.name == e.from) parents.push_back(&s.values);
        const auto k = latent_index(name);
        auto values = background(!parents.empty() || k.has_value(), rng);
        detail::apply_influence(values, parents, config, rng);
        if (k) drive_by_latent(values, *k, rng);
        bundle.emotions.push_back({name, SequenceKind::Emotion, std::move(values)});
    }
    return {std::move(bundle), std::move(truth)};
}

}  // namespace acnet
