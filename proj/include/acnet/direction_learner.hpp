#pragma once

// Asymmetric direction learning between situation and emotion sequences.
//
// For a pair (C, M) two statements are tested:
//   S1: there is a window depth eta_c with  C(t) _||_ M(t-1) | C(t-1..t-eta_c)
//   S2: there is a window depth eta_m with  M(t) _||_ C(t-1) | M(t-1..t-eta_m)
// S1 and not S2 means C -> M, the mirror image means M -> C, and the two
// remaining patterns mean a latent factor drives both.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "acnet/causal_graph.hpp"
#include "acnet/ci_test.hpp"
#include "acnet/event_sequence.hpp"

namespace acnet {

inline constexpr int kMaxEtaMax = 8;

struct LearnerOptions {
    double alpha = 0.05;
    int eta_max = 4;
    /// An eta is only tested when there are at least this many triplets per
    /// conditioning state (2^eta states).
    int min_samples_per_state = 8;
};

struct EtaAudit {
    int eta = 0;
    bool skipped = false;
    std::string note;
    CiVerdict verdict;
};

struct AsymmetryTest {
    bool holds = false;             // some tested eta gave an independent verdict
    std::optional<int> witness;     // smallest such eta
    bool testable = false;          // at least one eta had enough samples to run
    std::vector<EtaAudit> audit;
};

enum class DirectionVerdict { Forward, Backward, Latent };

inline const char* to_string(DirectionVerdict v) {
    switch (v) {
        case DirectionVerdict::Forward: return "forward";
        case DirectionVerdict::Backward: return "backward";
        case DirectionVerdict::Latent: return "latent";
    }
    return "?";
}

/// The verdict table: depends on (S1, S2) only.
constexpr DirectionVerdict decide_direction(bool s1, bool s2) noexcept {
    if (s1 && !s2) return DirectionVerdict::Forward;
    if (!s1 && s2) return DirectionVerdict::Backward;
    return DirectionVerdict::Latent;
}

struct DirectionResult {
    std::string situation;
    std::string emotion;
    AsymmetryTest s1;
    AsymmetryTest s2;
    DirectionVerdict verdict = DirectionVerdict::Latent;
    /// False when either statement was skipped at every eta for lack of
    /// samples; such pairs produce no edge.
    bool testable = false;
};

namespace detail {

inline void check_pair(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b, int eta_max) {
    if (eta_max < 1 || eta_max > kMaxEtaMax) throw std::invalid_argument("eta_max must lie in [1, 8]");
    if (a.size() != b.size()) throw std::invalid_argument("sequences have different lengths");
    if (a.size() <= static_cast<std::size_t>(eta_max) + 1)
        throw std::invalid_argument("sequence length " + std::to_string(a.size()) + " too short for eta_max " +
                                    std::to_string(eta_max));
}

}  // namespace detail

/// Tests  target(t) _||_ source(t-1) | target(t-1..t-eta)  for eta = 1..eta_max.
inline AsymmetryTest asymmetry_test(std::span<const std::uint8_t> target, std::span<const std::uint8_t> source,
                                    const LearnerOptions& opt) {
    detail::check_pair(target, source, opt.eta_max);
    check_alpha(opt.alpha);
    AsymmetryTest result;
    const std::size_t T = target.size();
    for (int eta = 1; eta <= opt.eta_max; ++eta) {
        EtaAudit a;
        a.eta = eta;
        const std::size_t states = std::size_t{1} << eta;
        const std::size_t samples = T - static_cast<std::size_t>(eta);
        const std::size_t needed = static_cast<std::size_t>(opt.min_samples_per_state) * states;
        if (samples < needed) {
            a.skipped = true;
            a.note = "insufficient samples: " + std::to_string(samples) + " < " + std::to_string(needed);
            result.audit.push_back(std::move(a));
            continue;
        }
        ContingencyTable3D table(2, 2, states);
        // Rolling window state: bit k-1 holds target(t-k).
        std::uint32_t window = encode_window(target, eta, static_cast<std::size_t>(eta));
        const std::uint32_t mask = static_cast<std::uint32_t>(states - 1);
        for (std::size_t t = static_cast<std::size_t>(eta); t < T; ++t) {
            table.add(target[t], source[t - 1], window);
            window = ((window << 1) | target[t]) & mask;
        }
        // df 0 means source or target is fixed within every window state: the
        // independence holds exactly in the sample and counts as a witness.
        a.verdict = ci_test(table, opt.alpha);
        if (a.verdict.df == 0) a.note = "exact independence (df 0)";
        result.testable = true;
        if (a.verdict.independent && !result.witness) {
            result.witness = eta;
            result.holds = true;
        }
        result.audit.push_back(std::move(a));
    }
    return result;
}

/// S1 on (C, M): C(t) _||_ M(t-1) | C^eta.
inline AsymmetryTest test_s1(const BinaryEventSequence& c, const BinaryEventSequence& m, const LearnerOptions& opt) {
    return asymmetry_test(c.view(), m.view(), opt);
}

/// S2 on (M, C): M(t) _||_ C(t-1) | M^eta.
inline AsymmetryTest test_s2(const BinaryEventSequence& m, const BinaryEventSequence& c, const LearnerOptions& opt) {
    return asymmetry_test(m.view(), c.view(), opt);
}

inline DirectionResult learn_direction(const BinaryEventSequence& c, const BinaryEventSequence& m,
                                       const LearnerOptions& opt) {
    DirectionResult r;
    r.situation = c.name;
    r.emotion = m.name;
    r.s1 = test_s1(c, m, opt);
    r.s2 = test_s2(m, c, opt);
    r.verdict = decide_direction(r.s1.holds, r.s2.holds);
    r.testable = r.s1.testable && r.s2.testable;
    return r;
}

// ---------------------------------------------------------------------------
// Dependent-pair screening

/// Time alignments under which a pair is checked for dependence:
/// (C(t), M(t)), (C(t-1), M(t)) and (M(t-1), C(t)).
inline constexpr int kAlignments = 3;

struct ScreenAudit {
    std::size_t situation = 0;  // index into bundle.situations
    std::size_t emotion = 0;    // index into bundle.emotions
    std::array<CiVerdict, kAlignments> marginal{};
    bool marginally_dependent = false;
    std::optional<std::string> separator;  // third sequence that renders the pair independent
    bool kept = false;
};

namespace detail {

// Builds the 2 x 2 x levels table for one alignment; `state(t)` yields the
// conditioning state for samples anchored at t (t = 1..T-1).
template <typename StateFn>
ContingencyTable3D alignment_table(std::span<const std::uint8_t> c, std::span<const std::uint8_t> m, int alignment,
                                   std::size_t levels, StateFn&& state) {
    ContingencyTable3D table(2, 2, levels);
    const std::size_t T = c.size();
    for (std::size_t t = 1; t < T; ++t) {
        const std::uint32_t q = state(t);
        switch (alignment) {
            case 0: table.add(c[t], m[t], q); break;
            case 1: table.add(c[t - 1], m[t], q); break;
            default: table.add(m[t - 1], c[t], q); break;
        }
    }
    return table;
}

}  // namespace detail

/// Pair-level significance is split evenly across the alignments.
inline double screening_alpha(double alpha) { return alpha / kAlignments; }

inline ScreenAudit screen_pair(const SequenceBundle& bundle, std::size_t i, std::size_t j, double alpha) {
    ScreenAudit audit;
    audit.situation = i;
    audit.emotion = j;
    const auto c = bundle.situations[i].view();
    const auto m = bundle.emotions[j].view();
    const double a = screening_alpha(alpha);

    std::vector<int> dependent;
    for (int k = 0; k < kAlignments; ++k) {
        audit.marginal[static_cast<std::size_t>(k)] =
            ci_test(detail::alignment_table(c, m, k, 1, [](std::size_t) { return 0U; }), a);
        if (!audit.marginal[static_cast<std::size_t>(k)].independent) dependent.push_back(k);
    }
    audit.marginally_dependent = !dependent.empty();
    if (!audit.marginally_dependent) return audit;

    for (const auto* other : bundle.all()) {
        if (other == &bundle.situations[i] || other == &bundle.emotions[j]) continue;
        const auto f = other->view();
        // Conditioning state of the third sequence: (F(t), F(t-1)).
        auto state = [&](std::size_t t) { return static_cast<std::uint32_t>(f[t] | (f[t - 1] << 1)); };
        const bool separates = std::all_of(dependent.begin(), dependent.end(), [&](int k) {
            return ci_test(detail::alignment_table(c, m, k, 4, state), a).independent;
        });
        if (separates) {
            audit.separator = other->name;
            return audit;
        }
    }
    audit.kept = true;
    return audit;
}

/// Pairs (situation index, emotion index) that are dependent under some time
/// alignment and are not separated by any single third sequence.
inline std::vector<std::pair<std::size_t, std::size_t>> screen_dependent_pairs(const SequenceBundle& bundle,
                                                                              double alpha) {
    require_valid(bundle);
    check_alpha(alpha);
    std::vector<std::pair<std::size_t, std::size_t>> kept;
    for (std::size_t i = 0; i < bundle.situations.size(); ++i)
        for (std::size_t j = 0; j < bundle.emotions.size(); ++j)
            if (screen_pair(bundle, i, j, alpha).kept) kept.emplace_back(i, j);
    return kept;
}

// ---------------------------------------------------------------------------
// Graph assembly

struct LearnReport {
    CausalGraph graph;
    std::vector<ScreenAudit> screening;
    std::vector<DirectionResult> directions;  // one per screened pair
    std::vector<std::string> notes;
};

inline LearnReport learn_graph_report(const SequenceBundle& bundle, const LearnerOptions& opt) {
    require_valid(bundle);
    check_alpha(opt.alpha);
    if (opt.eta_max < 1 || opt.eta_max > kMaxEtaMax) throw std::invalid_argument("eta_max must lie in [1, 8]");

    LearnReport report;
    report.graph = graph_skeleton(bundle);
    std::vector<GraphEdge> pending;
    for (std::size_t i = 0; i < bundle.situations.size(); ++i) {
        for (std::size_t j = 0; j < bundle.emotions.size(); ++j) {
            auto screen = screen_pair(bundle, i, j, opt.alpha);
            const bool kept = screen.kept;
            report.screening.push_back(std::move(screen));
            if (!kept) continue;

            const auto& c = bundle.situations[i];
            const auto& m = bundle.emotions[j];
            auto dir = learn_direction(c, m, opt);
            if (!dir.testable) {
                report.notes.push_back("pair (" + c.name + ", " + m.name + ") untestable at every eta; no edge");
                report.directions.push_back(std::move(dir));
                continue;
            }
            GraphEdge e;
            e.from = c.name;
            e.to = m.name;
            if (dir.verdict == DirectionVerdict::Backward) std::swap(e.from, e.to);
            e.kind = dir.verdict == DirectionVerdict::Forward    ? EdgeKind::Forward
                     : dir.verdict == DirectionVerdict::Backward ? EdgeKind::Backward
                                                                 : EdgeKind::LatentConfounded;
            e.s1 = dir.s1.holds;
            e.s2 = dir.s2.holds;
            e.eta_c = dir.s1.witness;
            e.eta_m = dir.s2.witness;
            report.directions.push_back(std::move(dir));
            pending.push_back(std::move(e));
        }
    }

    // Latent ids follow canonical edge order so the graph does not depend on
    // the order of sequences in the bundle.
    std::sort(pending.begin(), pending.end(),
              [](const GraphEdge& a, const GraphEdge& b) { return std::tie(a.from, a.to) < std::tie(b.from, b.to); });
    int next_latent = 1;
    for (auto& e : pending) {
        if (e.kind == EdgeKind::LatentConfounded) e.latent_id = "H" + std::to_string(next_latent++);
        report.graph.add_edge(std::move(e));
    }
    return report;
}

inline CausalGraph learn_graph(const SequenceBundle& bundle, const LearnerOptions& opt = {}) {
    return learn_graph_report(bundle, opt).graph;
}

}  // namespace acnet
