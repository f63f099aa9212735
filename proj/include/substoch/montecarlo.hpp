#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "substoch/random.hpp"
#include "substoch/substochastic.hpp"

namespace substoch {

inline constexpr std::uint64_t kWalkStepCap = 1'000'000;
/// Two-sided 95% normal quantile.
inline constexpr double kZ95 = 1.959963984540054;

struct WalkStatistics {
    Index start_state = 1;
    std::uint64_t trials = 0;
    std::vector<double> mean_visits;
    std::vector<double> ci_halfwidth;
    std::uint64_t seed = 0;
    /// Walks cut off at kWalkStepCap steps.
    std::uint64_t cap_exceeded = 0;
};

namespace detail {

// Cumulative transition table; a walk at i with u ~ U[0,1) moves to the first
// j with u < cum(i, j) and is absorbed if there is none. Rows summing exactly
// to one never absorb.
template <Scalar T>
Matrix<double> cumulative_table(const Matrix<T>& p)
{
    const Index n = p.rows();
    Matrix<double> cum(n, n);
    for (Index i = 0; i < n; ++i) {
        T exact_sum = ScalarTraits<T>::zero();
        double acc = 0.0;
        Index last_positive = n;
        for (Index j = 0; j < n; ++j) {
            exact_sum += p.raw(i, j);
            acc += ScalarTraits<T>::to_double(p.raw(i, j));
            cum.raw(i, j) = acc;
            if (ScalarTraits<T>::sign(p.raw(i, j)) > 0) {
                last_positive = j;
            }
        }
        if (last_positive < n && !(exact_sum < ScalarTraits<T>::one())) {
            for (Index j = last_positive; j < n; ++j) {
                cum.raw(i, j) = 1.0;
            }
        }
    }
    return cum;
}

inline WalkStatistics run_walks(const Matrix<double>& cum, Index start, std::uint64_t trials, std::uint64_t seed)
{
    const Index n = cum.rows();
    WalkStatistics stats;
    stats.start_state = start;
    stats.trials = trials;
    stats.seed = seed;
    std::vector<double> sum(n, 0.0);
    std::vector<double> sum_sq(n, 0.0);
    std::vector<std::uint64_t> visits(n);
    const std::uint64_t start_seed = SplitMix64::derive(seed, start);

    for (std::uint64_t t = 0; t < trials; ++t) {
        SplitMix64 rng(SplitMix64::derive(start_seed, t));
        std::fill(visits.begin(), visits.end(), 0);
        Index state = start - 1;
        std::uint64_t steps = 0;
        for (;;) {
            ++visits[state];
            if (++steps > kWalkStepCap) {
                ++stats.cap_exceeded;
                break;
            }
            const double u = rng.uniform01();
            Index next = n;
            for (Index j = 0; j < n; ++j) {
                if (u < cum.raw(state, j)) {
                    next = j;
                    break;
                }
            }
            if (next == n) {
                break;
            }
            state = next;
        }
        for (Index j = 0; j < n; ++j) {
            const double v = static_cast<double>(visits[j]);
            sum[j] += v;
            sum_sq[j] += v * v;
        }
    }

    const double count = static_cast<double>(trials);
    stats.mean_visits.resize(n);
    stats.ci_halfwidth.resize(n);
    for (Index j = 0; j < n; ++j) {
        const double mean = sum[j] / count;
        double var = 0.0;
        if (trials > 1) {
            var = std::max(0.0, (sum_sq[j] - count * mean * mean) / (count - 1.0));
        }
        stats.mean_visits[j] = mean;
        stats.ci_halfwidth[j] = kZ95 * std::sqrt(var / count);
    }
    return stats;
}

} // namespace detail

/// Simulates `trials` walks of the absorbing chain from `start` (1-based):
/// at state i the walk moves to j with probability p_ij and is absorbed with
/// probability 1 - sum_j p_ij. Mean visit counts estimate row `start` of
/// (I - P)^{-1}. Walk t uses the stream derive(derive(seed, start), t), so the
/// result depends only on (P, start, trials, seed).
template <Scalar T>
WalkStatistics simulate_visits(const SubstochasticMatrix<T>& p, Index start, std::uint64_t trials, std::uint64_t seed)
{
    const Index n = p.dim();
    if (start < 1 || start > n) {
        throw Error(Errc::IndexOutOfRange, "start state " + std::to_string(start) + " outside 1.." + std::to_string(n),
                    start);
    }
    if (trials < 1) {
        throw Error(Errc::PreconditionViolated, "trials must be >= 1");
    }
    return detail::run_walks(detail::cumulative_table(p.matrix()), start, trials, seed);
}

struct CrosscheckFlag {
    Index start;
    Index state;
    double estimate;
    double exact;
    double halfwidth;
};

struct FundamentalCrosscheck {
    std::vector<WalkStatistics> rows;
    Matrix<double> exact;
    double sigma = 4.0;
    /// |estimate - exact| > sigma * halfwidth.
    std::vector<CrosscheckFlag> flags;
    /// (l, m) with estimated visits to m from l exceeding those from m by more
    /// than sigma combined half-widths.
    std::vector<std::pair<Index, Index>> dominance_violations;

    bool passed() const noexcept { return flags.empty(); }
};

/// Simulates from every start state and compares against the exact
/// (I - P)^{-1} rendered to float. Also checks the empirical column-diagonal
/// dominance of the visit matrix with the same sigma slack.
template <Scalar T>
FundamentalCrosscheck crosscheck_fundamental(const SubstochasticMatrix<T>& p, std::uint64_t trials, std::uint64_t seed,
                                             double sigma = 4.0)
{
    const Index n = p.dim();
    FundamentalCrosscheck out;
    out.sigma = sigma;
    out.exact = convert<double>(fundamental_matrix(p, false));
    for (Index s = 1; s <= n; ++s) {
        out.rows.push_back(simulate_visits(p, s, trials, seed));
    }
    for (Index s = 1; s <= n; ++s) {
        const WalkStatistics& w = out.rows[s - 1];
        for (Index j = 1; j <= n; ++j) {
            const double est = w.mean_visits[j - 1];
            const double exact = out.exact(s, j);
            const double hw = w.ci_halfwidth[j - 1];
            if (std::fabs(est - exact) > sigma * hw) {
                out.flags.push_back({s, j, est, exact, hw});
            }
        }
    }
    for (Index m = 1; m <= n; ++m) {
        const WalkStatistics& own = out.rows[m - 1];
        for (Index l = 1; l <= n; ++l) {
            if (l == m) {
                continue;
            }
            const WalkStatistics& other = out.rows[l - 1];
            const double slack = sigma * std::hypot(own.ci_halfwidth[m - 1], other.ci_halfwidth[m - 1]);
            if (other.mean_visits[m - 1] > own.mean_visits[m - 1] + slack) {
                out.dominance_violations.emplace_back(l, m);
            }
        }
    }
    return out;
}

} // namespace substoch
