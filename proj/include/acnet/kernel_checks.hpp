#pragma once

// Self-check suite for the affect kernels: hand cases, invariants and analytic
// gradients against central finite differences.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "acnet/affect_kernels.hpp"
#include "acnet/random.hpp"

namespace acnet::kernels {

struct CheckResult {
    std::string name;
    bool passed = false;
    double max_error = 0.0;
    std::string detail;
};

struct CheckReport {
    std::vector<CheckResult> checks;
    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
    }
};

inline constexpr double kFiniteDifferenceStep = 1e-6;
inline constexpr double kGradientTolerance = 1e-5;

/// ||a - b||_inf / max(||a||_inf, ||b||_inf); 0 when both vanish.
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff = std::max(diff, std::fabs(a[i] - b[i]));
        scale = std::max({scale, std::fabs(a[i]), std::fabs(b[i])});
    }
    return scale == 0.0 ? 0.0 : diff / scale;
}

/// Central differences of f around x, one coordinate at a time.
inline std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                              std::vector<double> x, double h = kFiniteDifferenceStep) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double x0 = x[i];
        x[i] = x0 + h;
        const double up = f(x);
        x[i] = x0 - h;
        const double down = f(x);
        x[i] = x0;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

namespace detail {

inline std::vector<double> random_distribution(Rng& rng, std::size_t k, double floor) {
    std::vector<double> v(k);
    double sum = 0.0;
    for (auto& x : v) sum += (x = floor + rng.uniform());
    for (auto& x : v) x /= sum;
    return v;
}

// Smallest gap between distinct-role entries; finite differences need it well
// above the step so no max or hinge switches branch.
inline double branch_clearance(const ScoreTrajectory& traj, std::size_t t) {
    const auto& s = traj.scores[t];
    std::vector<double> others;
    for (std::size_t c = 0; c < s.size(); ++c)
        if (c != traj.label) others.push_back(s[c]);
    std::sort(others.rbegin(), others.rend());
    double gap = std::fabs(kernels::detail::hinge_argument(traj, t));
    if (others.size() > 1) gap = std::min(gap, others[0] - others[1]);
    gap = std::min(gap, std::fabs(s[traj.label] - others[0]));
    return gap;
}

}  // namespace detail

inline CheckReport run_kernel_checks(std::uint64_t seed = 1, int samples = 100) {
    CheckReport report;
    Rng rng(derive_seed(seed, {0x6b65726eULL}));

    {
        CheckResult c{"lateralization_hand_case"};
        SpectralFrame f{Matrix::Constant(1, 1, 3.0), Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 1.0)};
        const double b = lateralization_feature(f)(0, 0);
        c.max_error = std::fabs(b - 0.5);
        c.passed = c.max_error <= 1e-12;
        c.detail = "B(3, 1; xi = 1) = " + std::to_string(b);
        report.checks.push_back(c);
    }
    {
        CheckResult c{"lateralization_antisymmetry"};
        bool exact = true, bounded = true;
        for (int s = 0; s < samples; ++s) {
            const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng.below(6));
            const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(6));
            Matrix zl(m, n), zr(m, n), xi(m, n);
            for (Eigen::Index i = 0; i < m; ++i)
                for (Eigen::Index j = 0; j < n; ++j) {
                    zl(i, j) = rng.bernoulli(0.1) ? 0.0 : 10.0 * rng.uniform();
                    zr(i, j) = rng.bernoulli(0.1) ? 0.0 : 10.0 * rng.uniform();
                    xi(i, j) = 4.0 * rng.uniform() - 2.0;
                }
            const Matrix b = lateralization_feature({zl, zr, xi});
            const Matrix swapped = lateralization_feature({zr, zl, xi});
            exact = exact && (b == -swapped).all();
            bounded = bounded && (b.abs() <= xi.abs()).all();
        }
        c.passed = exact && bounded;
        c.detail = std::string(exact ? "swap negates exactly" : "swap does not negate") + "; " +
                   (bounded ? "|B| <= |xi|" : "|B| exceeds |xi|");
        report.checks.push_back(c);
    }
    {
        CheckResult c{"tm_loss_hand_case"};
        // margins 0.5, 0.6, 0.4 with s_t(y) = 0.6
        const ScoreTrajectory traj{{{0.7, 0.2, 0.1}, {0.75, 0.15, 0.1}, {0.6, 0.2, 0.2}}, 0, 0};
        const double loss = tm_loss(traj, 1, 2);
        const double expected = -std::log(0.6) + 0.2;
        c.max_error = std::fabs(loss - expected);
        c.passed = c.max_error <= 1e-9;
        c.detail = "L = " + std::to_string(loss);
        report.checks.push_back(c);
    }
    {
        CheckResult c{"lc_loss_hand_case"};
        const std::vector<double> cl{0.3}, y{1.0}, yh{0.5}, u{1.0};
        const double loss = lc_loss(cl, y, yh, u);
        c.max_error = std::fabs(loss - (0.7 + std::log(2.0)));
        c.passed = c.max_error <= 1e-9;
        c.detail = "L_c = " + std::to_string(loss);
        report.checks.push_back(c);
    }
    {
        CheckResult c{"tm_loss_gradient_fd"};
        int done = 0, attempts = 0;
        bool ok = true;
        while (done < samples && attempts < 100 * samples) {
            ++attempts;
            const std::size_t k = 2 + rng.below(4), len = 2 + rng.below(5);
            ScoreTrajectory traj;
            traj.label = rng.below(k);
            for (std::size_t t = 0; t < len; ++t) traj.scores.push_back(detail::random_distribution(rng, k, 0.2));
            const std::size_t t = len - 1;
            if (detail::branch_clearance(traj, t) < 1e-3) continue;
            const int lambda = 1 + static_cast<int>(rng.below(3));
            const auto analytic = tm_loss_gradient(traj, lambda, t);
            auto f = [&](const std::vector<double>& s) {
                ScoreTrajectory copy = traj;
                copy.scores[t] = s;
                return tm_loss(copy, lambda, t);
            };
            const auto numeric = central_difference(f, traj.scores[t]);
            const double err = relative_error(analytic, numeric);
            c.max_error = std::max(c.max_error, err);
            ok = ok && err <= kGradientTolerance;
            ++done;
        }
        c.passed = ok && done == samples;
        c.detail = std::to_string(done) + " random trajectories";
        report.checks.push_back(c);
    }
    {
        CheckResult c{"lc_loss_gradient_fd"};
        int done = 0, attempts = 0;
        bool ok = true;
        while (done < samples && attempts < 100 * samples) {
            ++attempts;
            const std::size_t d = 1 + rng.below(6);
            std::vector<double> cl(d), y(d), yh(d), u(d);
            bool clear = true;
            for (std::size_t i = 0; i < d; ++i) {
                cl[i] = rng.uniform();
                y[i] = rng.bernoulli(0.5) ? rng.uniform() : static_cast<double>(rng.below(2));
                yh[i] = 0.05 + 0.9 * rng.uniform();
                u[i] = rng.bernoulli(0.5) ? static_cast<double>(rng.below(2)) : rng.uniform();
                clear = clear && std::fabs(cl[i] - y[i]) > 1e-3;
            }
            if (!clear) continue;
            const auto g = lc_loss_gradient(cl, y, yh, u);
            const auto num_pred = central_difference([&](const std::vector<double>& p) { return lc_loss(cl, y, p, u); }, yh);
            const auto num_clean = central_difference([&](const std::vector<double>& q) { return lc_loss(q, y, yh, u); }, cl);
            const double err = std::max(relative_error(g.d_predicted, num_pred), relative_error(g.d_cleaned, num_clean));
            c.max_error = std::max(c.max_error, err);
            ok = ok && err <= kGradientTolerance;
            ++done;
        }
        c.passed = ok && done == samples;
        c.detail = std::to_string(done) + " random label vectors";
        report.checks.push_back(c);
    }
    {
        CheckResult c{"tm_loss_hinge_monotone"};
        bool ok = true;
        for (int s = 0; s < samples; ++s) {
            // Raising s_t(y) at the expense of the runner-up never raises the hinge.
            ScoreTrajectory traj;
            traj.label = 0;
            for (int t = 0; t < 3; ++t) traj.scores.push_back(detail::random_distribution(rng, 3, 0.1));
            const double before = std::max(0.0, kernels::detail::hinge_argument(traj, 2));
            auto& st = traj.scores[2];
            const std::size_t r = kernels::detail::runner_up(st, 0);
            const double shift = 0.5 * st[r] * rng.uniform();
            st[0] += shift;
            st[r] -= shift;
            const double after = std::max(0.0, kernels::detail::hinge_argument(traj, 2));
            ok = ok && after <= before + 1e-15 && tm_loss(traj, 1, 2) >= 0.0;
        }
        c.passed = ok;
        c.detail = "hinge non-increasing in m_t(y); loss non-negative";
        report.checks.push_back(c);
    }
    {
        CheckResult c{"lc_loss_decomposition"};
        bool ok = true;
        for (int s = 0; s < samples; ++s) {
            const std::size_t d = 1 + rng.below(5);
            std::vector<double> cl(d), y(d), yh(d), u(d);
            for (std::size_t i = 0; i < d; ++i) {
                cl[i] = rng.uniform();
                y[i] = rng.uniform();
                yh[i] = 0.05 + 0.9 * rng.uniform();
                u[i] = static_cast<double>(rng.below(2));
            }
            double l1 = 0.0, ce = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                l1 += std::fabs(cl[i] - y[i]);
                ce -= u[i] * std::log(yh[i]) + (1.0 - u[i]) * std::log(1.0 - yh[i]);
            }
            ok = ok && std::fabs(lc_loss(y, y, yh, u) - ce) <= 1e-12 && std::fabs(lc_loss(cl, y, u, u) - l1) <= 1e-9;
        }
        c.passed = ok;
        c.detail = "cleaning and prediction blocks isolate";
        report.checks.push_back(c);
    }
    return report;
}

}  // namespace acnet::kernels
