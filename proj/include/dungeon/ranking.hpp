#pragma once

#include "dungeon/error.hpp"
#include "dungeon/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace dungeon {

/// Metric vectors of every liked or kept map; never empty once a session
/// has started.
struct TargetSet {
    std::vector<MetricVector> exemplars;

    bool empty() const noexcept { return exemplars.empty(); }
    std::size_t size() const noexcept { return exemplars.size(); }
};

/// Goal-programming distances to the closest exemplar, per metric. Feasible
/// maps carry M1..M31 (31 values); infeasible maps carry M2..M31 (30 values).
class FitnessVector {
public:
    FitnessVector() = default;
    FitnessVector(std::vector<double> values, bool feasible)
        : values_(std::move(values))
        , feasible_(feasible)
    {
    }

    bool feasible() const noexcept { return feasible_; }
    std::size_t size() const noexcept { return values_.size(); }
    const std::vector<double>& values() const noexcept { return values_; }
    double operator[](std::size_t k) const noexcept { return values_[k]; }

    /// First metric number covered by position 0.
    int first_metric() const noexcept { return feasible_ ? 1 : 2; }

    /// Value for metric number i, or NaN if i is outside the index set.
    double metric(int i) const noexcept
    {
        const int k = i - first_metric();
        if (k < 0 || static_cast<std::size_t>(k) >= values_.size()) {
            return std::nan("");
        }
        return values_[static_cast<std::size_t>(k)];
    }

    double sum() const noexcept { return std::accumulate(values_.begin(), values_.end(), 0.0); }

    friend bool operator==(const FitnessVector&, const FitnessVector&) = default;

private:
    std::vector<double> values_;
    bool feasible_ = true;
};

enum class Preference { Better, Worse, Tie };

inline FitnessVector fitness(const MetricVector& m, const TargetSet& targets, bool feasible)
{
    if (targets.empty()) {
        throw Error(Errc::EmptyTargetSet, "fitness needs at least one exemplar");
    }
    const int first = feasible ? 1 : 2;
    std::vector<double> f;
    f.reserve(static_cast<std::size_t>(kMetricCount - first + 1));
    for (int i = first; i <= kMetricCount; ++i) {
        double best = std::abs(m(i) - targets.exemplars.front()(i));
        for (std::size_t t = 1; t < targets.size(); ++t) {
            best = std::min(best, std::abs(m(i) - targets.exemplars[t](i)));
        }
        f.push_back(best);
    }
    return {std::move(f), feasible};
}

namespace detail {

inline void require_same_index_set(const FitnessVector& a, const FitnessVector& b)
{
    if (a.feasible() != b.feasible() || a.size() != b.size()) {
        throw Error(Errc::IndexSetMismatch,
            "cannot compare fitness vectors of lengths " + std::to_string(a.size()) + " and "
                + std::to_string(b.size()));
    }
}

} // namespace detail

/// Pareto dominance under minimisation.
inline bool dominates(const FitnessVector& a, const FitnessVector& b)
{
    detail::require_same_index_set(a, b);
    bool strictly = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] > b[k]) {
            return false;
        }
        strictly = strictly || a[k] < b[k];
    }
    return strictly;
}

/// Majority vote: `a` is preferred when it is strictly better on more
/// objectives than it is strictly worse on. Equal objectives abstain.
inline Preference majority_prefers(const FitnessVector& a, const FitnessVector& b)
{
    detail::require_same_index_set(a, b);
    int less = 0;
    int greater = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        less += a[k] < b[k] ? 1 : 0;
        greater += a[k] > b[k] ? 1 : 0;
    }
    if (less > greater) {
        return Preference::Better;
    }
    if (greater > less) {
        return Preference::Worse;
    }
    return Preference::Tie;
}

/// Copeland scores (wins - losses over all pairwise majority votes).
inline std::vector<int> copeland_scores(std::span<const FitnessVector> pop)
{
    std::vector<int> score(pop.size(), 0);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        for (std::size_t j = i + 1; j < pop.size(); ++j) {
            switch (majority_prefers(pop[i], pop[j])) {
            case Preference::Better:
                ++score[i];
                --score[j];
                break;
            case Preference::Worse:
                --score[i];
                ++score[j];
                break;
            case Preference::Tie: break;
            }
        }
    }
    return score;
}

/// Indices best-first: Copeland score descending, then fitness sum ascending,
/// then input position.
inline std::vector<std::size_t> copeland_rank(std::span<const FitnessVector> pop)
{
    const auto score = copeland_scores(pop);
    std::vector<double> sums(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
        sums[i] = pop[i].sum();
    }
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (score[a] != score[b]) {
            return score[a] > score[b];
        }
        if (sums[a] != sums[b]) {
            return sums[a] < sums[b];
        }
        return a < b;
    });
    return order;
}

} // namespace dungeon
