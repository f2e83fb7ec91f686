#pragma once

// Numerical kernels from the emotion-recognition side of the system: the
// brain-lateralization feature, heart-rate peak candidates, the temporal
// margin loss and the label-cleaning loss, with analytic gradients.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "acnet/baselines.hpp"

namespace acnet::kernels {

using Matrix = Eigen::ArrayXXd;

inline constexpr double kDenominatorGuard = 1e-9;
inline constexpr double kProbabilityFloor = 1e-12;

/// Band power of the left and right hemispheres (spectral bins x time steps)
/// and the causal asymmetry weights between the two channels.
struct SpectralFrame {
    Matrix zeta_l;
    Matrix zeta_r;
    Matrix xi;
};

/// B = xi o (zeta_l - zeta_r) / (zeta_l + zeta_r), elementwise.
inline Matrix lateralization_feature(const SpectralFrame& frame, double eps_guard = kDenominatorGuard) {
    if (!(eps_guard > 0.0)) throw std::invalid_argument("lateralization_feature: eps_guard must be positive");
    const auto same = [](const Matrix& a, const Matrix& b) { return a.rows() == b.rows() && a.cols() == b.cols(); };
    if (!same(frame.zeta_l, frame.zeta_r) || !same(frame.zeta_l, frame.xi))
        throw std::invalid_argument("lateralization_feature: zeta_l, zeta_r and xi must share a shape");
    if ((frame.zeta_l < 0.0).any() || (frame.zeta_r < 0.0).any())
        throw std::invalid_argument("lateralization_feature: band power must be non-negative");
    const Matrix denom = (frame.zeta_l + frame.zeta_r).max(eps_guard);
    // Ratio first: |ratio| <= 1 holds in floating point, so |B| <= |xi| does too.
    return frame.xi * ((frame.zeta_l - frame.zeta_r) / denom);
}

/// Reference causal asymmetry weights: for each spectral bin, both band-power
/// series are binarized at their median and xi = TE(l -> r) - TE(r -> l).
/// Constant across the time axis. Needs enough time steps for a k = l = 1
/// transfer-entropy estimate.
inline Matrix causal_asymmetry_weights(const Matrix& zeta_l, const Matrix& zeta_r) {
    if (zeta_l.rows() != zeta_r.rows() || zeta_l.cols() != zeta_r.cols())
        throw std::invalid_argument("causal_asymmetry_weights: shape mismatch");
    const auto n = static_cast<std::size_t>(zeta_l.cols());
    auto binarize = [n](const Eigen::ArrayXd& row) {
        std::vector<double> sorted(row.data(), row.data() + n);
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted.end());
        const double median = sorted[n / 2];
        std::vector<std::uint8_t> out(n);
        for (std::size_t t = 0; t < n; ++t) out[t] = row(static_cast<Eigen::Index>(t)) > median ? 1 : 0;
        return out;
    };
    Matrix xi(zeta_l.rows(), zeta_l.cols());
    for (Eigen::Index m = 0; m < zeta_l.rows(); ++m) {
        const auto l = binarize(zeta_l.row(m).transpose());
        const auto r = binarize(zeta_r.row(m).transpose());
        xi.row(m).setConstant(transfer_entropy(l, r) - transfer_entropy(r, l));
    }
    return xi;
}

/// Local maxima of a power spectrum (strictly above both neighbours), strongest
/// first, at most `max_peaks` of them.
inline std::vector<std::size_t> hr_candidates(std::span<const double> psd, std::size_t max_peaks) {
    if (psd.size() < 3) throw std::invalid_argument("hr_candidates: spectrum needs at least 3 bins");
    std::vector<std::size_t> peaks;
    for (std::size_t m = 1; m + 1 < psd.size(); ++m)
        if (psd[m] > psd[m - 1] && psd[m] > psd[m + 1]) peaks.push_back(m);
    std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return psd[a] > psd[b]; });
    if (peaks.size() > max_peaks) peaks.resize(max_peaks);
    return peaks;
}

/// One column of the heart-rate plane: 1 at candidate bins, 0 elsewhere.
inline Eigen::ArrayXd hr_candidate_mask(std::span<const double> psd, std::size_t max_peaks) {
    Eigen::ArrayXd mask = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(psd.size()));
    for (auto m : hr_candidates(psd, max_peaks)) mask(static_cast<Eigen::Index>(m)) = 1.0;
    return mask;
}

/// M x N x 2 feature tensor: plane 0 is the lateralization feature, plane 1 the
/// heart-rate candidate mask.
struct FeatureTensor {
    std::array<Matrix, 2> planes;

    Eigen::Index rows() const { return planes[0].rows(); }
    Eigen::Index cols() const { return planes[0].cols(); }
    double operator()(Eigen::Index m, Eigen::Index n, std::size_t p) const { return planes[p](m, n); }
};

/// Builds the tensor from the lateralization plane and one PSD per time column.
inline FeatureTensor make_feature_tensor(Matrix lateralization, const std::vector<std::vector<double>>& psd_columns,
                                         std::size_t max_peaks) {
    if (static_cast<Eigen::Index>(psd_columns.size()) != lateralization.cols())
        throw std::invalid_argument("make_feature_tensor: one PSD per time column required");
    Matrix hr(lateralization.rows(), lateralization.cols());
    for (Eigen::Index n = 0; n < hr.cols(); ++n) {
        const auto& col = psd_columns[static_cast<std::size_t>(n)];
        if (static_cast<Eigen::Index>(col.size()) != hr.rows())
            throw std::invalid_argument("make_feature_tensor: PSD length must equal the number of spectral bins");
        hr.col(n) = hr_candidate_mask(col, max_peaks);
    }
    if (!lateralization.allFinite()) throw std::invalid_argument("make_feature_tensor: non-finite entries");
    return FeatureTensor{{std::move(lateralization), std::move(hr)}};
}

// ---------------------------------------------------------------------------
// Temporal margin loss

/// Per-time class distributions s_t(.) over one emotion episode starting at t0.
struct ScoreTrajectory {
    std::vector<std::vector<double>> scores;  // scores[t][class]
    std::size_t label = 0;                    // ground-truth class y
    std::size_t t0 = 0;

    std::size_t classes() const { return scores.empty() ? 0 : scores.front().size(); }

    void validate() const {
        if (scores.empty()) throw std::invalid_argument("ScoreTrajectory: no time steps");
        const std::size_t k = classes();
        if (k < 2) throw std::invalid_argument("ScoreTrajectory: at least two classes required");
        if (label >= k) throw std::invalid_argument("ScoreTrajectory: label outside class range");
        if (t0 >= scores.size()) throw std::invalid_argument("ScoreTrajectory: t0 outside trajectory");
        for (std::size_t t = 0; t < scores.size(); ++t) {
            const auto& s = scores[t];
            if (s.size() != k) throw std::invalid_argument("ScoreTrajectory: ragged score vectors");
            double sum = 0.0;
            for (double v : s) {
                if (!(v >= 0.0 && v <= 1.0))
                    throw std::invalid_argument("ScoreTrajectory: score outside [0, 1] at t=" + std::to_string(t));
                sum += v;
            }
            if (std::fabs(sum - 1.0) > 1e-9)
                throw std::invalid_argument("ScoreTrajectory: scores at t=" + std::to_string(t) + " do not sum to 1");
        }
    }
};

namespace detail {

// Index of the strongest competitor of `label`; lowest index on ties.
inline std::size_t runner_up(std::span<const double> s, std::size_t label) {
    std::size_t best = label == 0 ? 1 : 0;
    for (std::size_t c = 0; c < s.size(); ++c)
        if (c != label && s[c] > s[best]) best = c;
    return best;
}

inline double margin_of(std::span<const double> s, std::size_t label) {
    if (s.size() < 2) throw std::invalid_argument("margin: at least two classes required");
    if (label >= s.size()) throw std::invalid_argument("margin: label outside class range");
    return s[label] - s[runner_up(s, label)];
}

inline void check_tm_args(const ScoreTrajectory& traj, int lambda, std::size_t t) {
    if (lambda < 1) throw std::invalid_argument("tm_loss: lambda must be a positive integer");
    if (t <= traj.t0 || t >= traj.scores.size())
        throw std::out_of_range("tm_loss: t must satisfy t0 < t < trajectory length");
}

// max over t' in [t0, t-1] of m_t'(y) minus m_t(y).
inline double hinge_argument(const ScoreTrajectory& traj, std::size_t t) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t u = traj.t0; u < t; ++u) best = std::max(best, margin_of(traj.scores[u], traj.label));
    return best - margin_of(traj.scores[t], traj.label);
}

}  // namespace detail

/// m_t(y) = s_t(y) - max_{y' != y} s_t(y').
inline double margin(const ScoreTrajectory& traj, std::size_t t) {
    if (t >= traj.scores.size()) throw std::out_of_range("margin: t outside trajectory");
    return detail::margin_of(traj.scores[t], traj.label);
}

/// L_t = -ln s_t(y) + lambda * max(0, max_{t' in [t0, t-1]} m_t'(y) - m_t(y)).
inline double tm_loss(const ScoreTrajectory& traj, int lambda, std::size_t t) {
    detail::check_tm_args(traj, lambda, t);
    const double s = traj.scores[t][traj.label];
    if (!(s > 0.0)) throw std::domain_error("tm_loss: s_t(y) = 0 gives an infinite loss");
    return -std::log(s) + lambda * std::max(0.0, detail::hinge_argument(traj, t));
}

/// Partial derivatives of L_t with respect to the entries of s_t. The hinge
/// contributes only when strictly active.
inline std::vector<double> tm_loss_gradient(const ScoreTrajectory& traj, int lambda, std::size_t t) {
    detail::check_tm_args(traj, lambda, t);
    const auto& s = traj.scores[t];
    const double sy = s[traj.label];
    if (!(sy > 0.0)) throw std::domain_error("tm_loss_gradient: s_t(y) = 0");
    std::vector<double> grad(s.size(), 0.0);
    grad[traj.label] = -1.0 / sy;
    if (detail::hinge_argument(traj, t) > 0.0) {
        grad[traj.label] -= lambda;
        grad[detail::runner_up(s, traj.label)] += lambda;
    }
    return grad;
}

// ---------------------------------------------------------------------------
// Label-cleaning loss

/// u_j = y_j when a verified rating exists, otherwise the cleaned label.
inline std::vector<double> supervision_target(const std::optional<std::vector<double>>& verified,
                                              const std::vector<double>& cleaned) {
    if (!verified) return cleaned;
    if (verified->size() != cleaned.size()) throw std::invalid_argument("supervision_target: dimension mismatch");
    return *verified;
}

namespace detail {

inline void check_labels(std::span<const double> v, const char* what, std::size_t d) {
    if (v.size() != d) throw std::invalid_argument(std::string("lc_loss: ") + what + " has the wrong dimension");
    for (double x : v)
        if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument(std::string("lc_loss: ") + what + " outside [0, 1]");
}

// Predictions pinned at 0 or 1 are clamped only when the target agrees.
inline double clamp_prediction(double yhat, double u) {
    if ((yhat == 0.0 && u > 0.0) || (yhat == 1.0 && u < 1.0))
        throw std::domain_error("lc_loss: prediction " + std::to_string(yhat) + " against target " + std::to_string(u) +
                                " gives an infinite loss");
    return std::clamp(yhat, kProbabilityFloor, 1.0 - kProbabilityFloor);
}

}  // namespace detail

/// L_c = sum |cleaned - truth| - sum [u ln yhat + (1 - u) ln(1 - yhat)].
inline double lc_loss(std::span<const double> cleaned, std::span<const double> truth, std::span<const double> predicted,
                      std::span<const double> target) {
    const std::size_t d = cleaned.size();
    detail::check_labels(cleaned, "cleaned labels", d);
    detail::check_labels(truth, "verified labels", d);
    detail::check_labels(predicted, "predictions", d);
    detail::check_labels(target, "targets", d);
    double l1 = 0.0, ce = 0.0;
    for (std::size_t i = 0; i < d; ++i) l1 += std::fabs(cleaned[i] - truth[i]);
    for (std::size_t j = 0; j < d; ++j) {
        const double p = detail::clamp_prediction(predicted[j], target[j]);
        ce -= target[j] * std::log(p) + (1.0 - target[j]) * std::log1p(-p);
    }
    return l1 + ce;
}

/// The cross-entropy term reaches only the predictions and the L1 term only the
/// cleaned labels; the target is held constant.
struct LcGradient {
    std::vector<double> d_cleaned;
    std::vector<double> d_predicted;
};

inline LcGradient lc_loss_gradient(std::span<const double> cleaned, std::span<const double> truth,
                                   std::span<const double> predicted, std::span<const double> target) {
    const std::size_t d = cleaned.size();
    detail::check_labels(truth, "verified labels", d);
    detail::check_labels(predicted, "predictions", d);
    detail::check_labels(target, "targets", d);
    LcGradient g{std::vector<double>(d), std::vector<double>(d)};
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = cleaned[i] - truth[i];
        g.d_cleaned[i] = diff > 0.0 ? 1.0 : diff < 0.0 ? -1.0 : 0.0;
        const double p = detail::clamp_prediction(predicted[i], target[i]);
        g.d_predicted[i] = -target[i] / p + (1.0 - target[i]) / (1.0 - p);
    }
    return g;
}

}  // namespace acnet::kernels
