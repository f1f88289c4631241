#pragma once

#include "dungeon/error.hpp"

#include <cmath>
#include <span>
#include <string>

namespace dungeon {

struct WelchResult {
    double t = 0.0;
    /// Welch–Satterthwaite degrees of freedom.
    double dof = 0.0;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double sd_a = 0.0;
    double sd_b = 0.0;
};

namespace detail {

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

// Two-pass sample mean and variance (n - 1 denominator).
inline Moments sample_moments(std::span<const double> xs)
{
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    const double mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    return {mean, ss / static_cast<double>(xs.size() - 1)};
}

} // namespace detail

/// Unequal-variance two-sample t statistic. No p-value; compare `t` against
/// a table at `dof`.
inline WelchResult welch_t(std::span<const double> a, std::span<const double> b)
{
    if (a.size() < 2 || b.size() < 2) {
        throw Error(Errc::TooFewSamples,
            "each group needs at least 2 values (got " + std::to_string(a.size()) + " and "
                + std::to_string(b.size()) + ")");
    }
    const auto ma = detail::sample_moments(a);
    const auto mb = detail::sample_moments(b);
    if (ma.var == 0.0 && mb.var == 0.0) {
        throw Error(Errc::ZeroVariance, "both groups have zero variance");
    }
    const double qa = ma.var / static_cast<double>(a.size());
    const double qb = mb.var / static_cast<double>(b.size());
    WelchResult r;
    r.mean_a = ma.mean;
    r.mean_b = mb.mean;
    r.sd_a = std::sqrt(ma.var);
    r.sd_b = std::sqrt(mb.var);
    r.t = (ma.mean - mb.mean) / std::sqrt(qa + qb);
    r.dof = (qa + qb) * (qa + qb)
        / (qa * qa / static_cast<double>(a.size() - 1) + qb * qb / static_cast<double>(b.size() - 1));
    return r;
}

} // namespace dungeon
