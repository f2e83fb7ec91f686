#pragma once

// Transfer-entropy and Granger-causality direction detectors used as
// comparison methods for the direction learner.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "acnet/causal_graph.hpp"
#include "acnet/event_sequence.hpp"
#include "acnet/random.hpp"
#include "acnet/special_functions.hpp"

namespace acnet {

enum class BaselineDirection { Forward, Backward, None };

inline const char* to_string(BaselineDirection d) {
    switch (d) {
        case BaselineDirection::Forward: return "forward";
        case BaselineDirection::Backward: return "backward";
        case BaselineDirection::None: return "none";
    }
    return "?";
}

/// Forward means x -> y. `statistic`/`p_value` describe x -> y and the
/// `reverse_*` fields y -> x.
struct BaselineVerdict {
    double statistic = 0.0;
    double p_value = 1.0;
    double reverse_statistic = 0.0;
    double reverse_p_value = 1.0;
    BaselineDirection direction = BaselineDirection::None;
    bool degenerate = false;
};

// ---------------------------------------------------------------------------
// Transfer entropy

inline constexpr int kMaxTeHistory = 4;

inline std::size_t te_required_length(int k, int l) { return 10 * (std::size_t{1} << (k + l + 1)) + 1; }

namespace detail {

// Plug-in TE(X -> Y) in nats with x read circularly shifted by `shift`.
inline double transfer_entropy_shifted(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y, int k, int l,
                                       std::size_t shift) {
    const std::size_t T = y.size();
    const std::size_t ky = std::size_t{1} << k;
    const std::size_t lx = std::size_t{1} << l;
    // joint[next][yhist][xhist]
    std::vector<std::uint32_t> joint(2 * ky * lx, 0);
    auto xv = [&](std::size_t t) -> std::uint32_t { return x[(t + shift) % T]; };

    const std::size_t start = static_cast<std::size_t>(std::max(k, l)) - 1;
    std::uint32_t yh = 0, xh = 0;
    for (int d = k - 1; d >= 0; --d) yh = (yh << 1) | y[start - static_cast<std::size_t>(d)];
    for (int d = l - 1; d >= 0; --d) xh = (xh << 1) | xv(start - static_cast<std::size_t>(d));
    const auto ymask = static_cast<std::uint32_t>(ky - 1);
    const auto xmask = static_cast<std::uint32_t>(lx - 1);
    std::size_t n = 0;
    for (std::size_t t = start; t + 1 < T; ++t) {
        const std::uint32_t next = y[t + 1];
        ++joint[(next * ky + yh) * lx + xh];
        ++n;
        yh = ((yh << 1) | next) & ymask;
        xh = ((xh << 1) | xv(t + 1)) & xmask;
    }

    double te = 0.0;
    for (std::size_t h = 0; h < ky; ++h) {
        std::uint64_t n_h = 0, n_next_h[2] = {0, 0};
        for (std::size_t nx = 0; nx < 2; ++nx)
            for (std::size_t g = 0; g < lx; ++g) n_next_h[nx] += joint[(nx * ky + h) * lx + g];
        n_h = n_next_h[0] + n_next_h[1];
        if (n_h == 0) continue;
        for (std::size_t g = 0; g < lx; ++g) {
            const std::uint64_t n_hg = joint[(0 * ky + h) * lx + g] + joint[(1 * ky + h) * lx + g];
            for (std::size_t nx = 0; nx < 2; ++nx) {
                const std::uint64_t c = joint[(nx * ky + h) * lx + g];
                if (c == 0) continue;
                te += static_cast<double>(c) *
                      std::log(static_cast<double>(c) * static_cast<double>(n_h) /
                               (static_cast<double>(n_hg) * static_cast<double>(n_next_h[nx])));
            }
        }
    }
    return std::max(0.0, te / static_cast<double>(n));
}

inline void check_te_args(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y, int k, int l) {
    if (k < 1 || k > kMaxTeHistory || l < 1 || l > kMaxTeHistory)
        throw std::invalid_argument("transfer_entropy: history lengths must lie in [1, 4]");
    if (x.size() != y.size()) throw std::invalid_argument("transfer_entropy: sequences have different lengths");
    if (y.size() < te_required_length(k, l))
        throw std::invalid_argument("transfer_entropy: insufficient samples, need at least " +
                                    std::to_string(te_required_length(k, l)) + " timestamps, got " +
                                    std::to_string(y.size()));
}

}  // namespace detail

/// TE(X -> Y) = sum p(y+, y^k, x^l) ln[p(y+ | y^k, x^l) / p(y+ | y^k)], in nats.
inline double transfer_entropy(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y, int k = 1, int l = 1) {
    detail::check_te_args(x, y, k, l);
    return detail::transfer_entropy_shifted(x, y, k, l, 0);
}

struct TeOptions {
    int k = 1;
    int l = 1;
    int permutations = 200;
    double alpha = 0.05;
};

namespace detail {

// Returns the permutation p-value of `observed` against circular shifts of the source.
inline double te_permutation_p(std::span<const std::uint8_t> src, std::span<const std::uint8_t> dst, double observed,
                               const TeOptions& opt, Rng& rng, double& critical) {
    const std::size_t T = dst.size();
    const std::size_t margin = std::max<std::size_t>(1, T / 10);
    std::vector<double> null;
    null.reserve(static_cast<std::size_t>(opt.permutations));
    for (int r = 0; r < opt.permutations; ++r) {
        const std::size_t shift = margin + rng.below(T - 2 * margin + 1);
        null.push_back(transfer_entropy_shifted(src, dst, opt.k, opt.l, shift));
    }
    std::sort(null.begin(), null.end());
    const auto q = static_cast<std::size_t>(std::ceil((1.0 - opt.alpha) * static_cast<double>(null.size())));
    critical = null[std::min(null.size() - 1, q == 0 ? 0 : q - 1)];
    const auto exceed = static_cast<double>(null.end() - std::lower_bound(null.begin(), null.end(), observed));
    return (1.0 + exceed) / (1.0 + static_cast<double>(null.size()));
}

}  // namespace detail

/// Forward when TE(x->y) beats the (1 - alpha) quantile of its circular-shift
/// null and exceeds TE(y->x); Backward symmetrically; otherwise None.
inline BaselineVerdict te_direction(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y,
                                    const TeOptions& opt, Rng& rng) {
    if (opt.permutations < 100) throw std::invalid_argument("te_direction: at least 100 permutations required");
    if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) throw std::invalid_argument("te_direction: alpha must lie in (0, 1)");
    BaselineVerdict v;
    v.statistic = transfer_entropy(x, y, opt.k, opt.l);
    v.reverse_statistic = transfer_entropy(y, x, opt.k, opt.l);
    double crit_fwd = 0.0, crit_bwd = 0.0;
    v.p_value = detail::te_permutation_p(x, y, v.statistic, opt, rng, crit_fwd);
    v.reverse_p_value = detail::te_permutation_p(y, x, v.reverse_statistic, opt, rng, crit_bwd);
    const bool fwd = v.statistic > crit_fwd && v.statistic > v.reverse_statistic;
    const bool bwd = v.reverse_statistic > crit_bwd && v.reverse_statistic > v.statistic;
    v.direction = fwd ? BaselineDirection::Forward : bwd ? BaselineDirection::Backward : BaselineDirection::None;
    return v;
}

// ---------------------------------------------------------------------------
// Granger causality

inline constexpr int kMaxGrangerLag = 8;

struct GrangerTest {
    double f = 0.0;
    double p_value = 1.0;
    int df1 = 0;
    int df2 = 0;
    bool degenerate = false;
};

namespace detail {

struct LeastSquaresFit {
    double rss = 0.0;
    bool full_rank = true;
};

inline LeastSquaresFit least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& target) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    LeastSquaresFit fit;
    fit.full_rank = qr.rank() == design.cols();
    const Eigen::VectorXd beta = qr.solve(target);
    fit.rss = (target - design * beta).squaredNorm();
    return fit;
}

}  // namespace detail

/// F test of whether x(t-1..t-p) improves a least-squares autoregression of
/// y(t) on an intercept and y(t-1..t-p).
template <typename Value = std::uint8_t>
GrangerTest granger_test(std::span<const Value> x, std::span<const Value> y, int p) {
    if (p < 1 || p > kMaxGrangerLag) throw std::invalid_argument("granger: lag order must lie in [1, 8]");
    if (x.size() != y.size()) throw std::invalid_argument("granger: sequences have different lengths");
    if (y.size() <= static_cast<std::size_t>(20 * p))
        throw std::invalid_argument("granger: need more than " + std::to_string(20 * p) + " timestamps");
    const auto T = static_cast<Eigen::Index>(y.size());
    const Eigen::Index n = T - p;
    Eigen::MatrixXd full(n, 2 * p + 1);
    Eigen::VectorXd target(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const Eigen::Index t = r + p;
        target(r) = static_cast<double>(y[static_cast<std::size_t>(t)]);
        full(r, 0) = 1.0;
        for (int d = 1; d <= p; ++d) {
            full(r, d) = static_cast<double>(y[static_cast<std::size_t>(t - d)]);
            full(r, p + d) = static_cast<double>(x[static_cast<std::size_t>(t - d)]);
        }
    }
    GrangerTest g;
    g.df1 = p;
    g.df2 = static_cast<int>(n) - 2 * p - 1;
    const auto restricted = detail::least_squares(full.leftCols(p + 1), target);
    const auto unrestricted = detail::least_squares(full, target);
    const double scale = std::max(1.0, target.squaredNorm());
    if (!unrestricted.full_rank || restricted.rss <= 1e-12 * scale) {
        g.degenerate = true;
        return g;
    }
    const double gain = std::max(0.0, restricted.rss - unrestricted.rss);
    if (unrestricted.rss <= 1e-12 * restricted.rss) {
        g.f = std::numeric_limits<double>::infinity();
        g.p_value = 0.0;
        return g;
    }
    g.f = (gain / p) / (unrestricted.rss / g.df2);
    g.p_value = special::f_survival(g.f, g.df1, g.df2);
    return g;
}

/// Runs the F test both ways; the direction with the smaller p-value wins when
/// it is below alpha.
template <typename Value = std::uint8_t>
BaselineVerdict granger(std::span<const Value> x, std::span<const Value> y, int p, double alpha = 0.05) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("granger: alpha must lie in (0, 1)");
    const auto fwd = granger_test(x, y, p);
    const auto bwd = granger_test(y, x, p);
    BaselineVerdict v;
    v.statistic = fwd.f;
    v.p_value = fwd.p_value;
    v.reverse_statistic = bwd.f;
    v.reverse_p_value = bwd.p_value;
    v.degenerate = fwd.degenerate && bwd.degenerate;
    const bool fwd_sig = !fwd.degenerate && fwd.p_value < alpha;
    const bool bwd_sig = !bwd.degenerate && bwd.p_value < alpha;
    if (fwd_sig && (!bwd_sig || fwd.p_value < bwd.p_value)) v.direction = BaselineDirection::Forward;
    else if (bwd_sig && (!fwd_sig || bwd.p_value < fwd.p_value)) v.direction = BaselineDirection::Backward;
    return v;
}

// ---------------------------------------------------------------------------
// Graph-level baselines

/// Runs a pairwise detector over every situation/emotion pair; Forward verdicts
/// become situation -> emotion edges and Backward verdicts the reverse.
template <typename Detector>
CausalGraph baseline_graph(const SequenceBundle& bundle, Detector&& detect) {
    require_valid(bundle);
    CausalGraph g = graph_skeleton(bundle);
    std::vector<GraphEdge> edges;
    for (const auto& c : bundle.situations)
        for (const auto& m : bundle.emotions) {
            const BaselineVerdict v = detect(c, m);
            if (v.direction == BaselineDirection::Forward) edges.push_back({c.name, m.name, EdgeKind::Forward});
            if (v.direction == BaselineDirection::Backward) edges.push_back({m.name, c.name, EdgeKind::Backward});
        }
    std::sort(edges.begin(), edges.end(),
              [](const GraphEdge& a, const GraphEdge& b) { return std::tie(a.from, a.to) < std::tie(b.from, b.to); });
    for (auto& e : edges) g.add_edge(std::move(e));
    return g;
}

inline CausalGraph te_graph(const SequenceBundle& bundle, const TeOptions& opt, std::uint64_t seed) {
    std::size_t pair = 0;
    return baseline_graph(bundle, [&](const BinaryEventSequence& c, const BinaryEventSequence& m) {
        Rng rng(derive_seed(seed, {pair++}));
        return te_direction(c.view(), m.view(), opt, rng);
    });
}

inline CausalGraph gc_graph(const SequenceBundle& bundle, int lag, double alpha) {
    return baseline_graph(bundle, [&](const BinaryEventSequence& c, const BinaryEventSequence& m) {
        return granger(c.view(), m.view(), lag, alpha);
    });
}

}  // namespace acnet
