#pragma once

// Monte Carlo oracle. Work is split into a fixed number of shards whose seeds
// depend only on (seed, shard); histograms are merged by integer addition, so
// results do not depend on the thread count.

#include "core_model.hpp"
#include "errors.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <thread>
#include <vector>

namespace resetwalks {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of shard i for a run seeded with `seed`.
inline std::uint64_t shard_seed(std::uint64_t seed, std::uint64_t shard) {
    return splitmix64(seed ^ splitmix64(shard + 1));
}

inline constexpr unsigned kShards = 64;

/// Uniform double in [0,1) from the top 53 bits; avoids implementation-defined std distributions.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Inverse-CDF sampler over a finite list of outcomes.
class DiscreteSampler {
public:
    explicit DiscreteSampler(const std::vector<double>& weights) {
        double s = 0;
        for (double w : weights) cumulative_.push_back(s += w);
        for (double& c : cumulative_) c /= s;
        cumulative_.back() = 1.0;
    }
    std::size_t operator()(std::mt19937_64& rng) const {
        const double u = uniform01(rng);
        return static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin());
    }

private:
    std::vector<double> cumulative_;
};

struct WalkTrace {
    std::vector<long long> altitudes; // Y_0..Y_n
    std::vector<long long> resets;    // times t with Y_t produced by a reset

    long long final_altitude() const { return altitudes.back(); }
    long long height() const { return *std::max_element(altitudes.begin(), altitudes.end()); }
};

namespace detail {

template <class T>
struct WalkSampler {
    DiscreteSampler pick;
    std::vector<int> jumps; // index 0 is the reset

    explicit WalkSampler(const StepModel<T>& model) : pick(weights(model)) {
        jumps.push_back(0);
        for (const auto& [k, p] : model.steps()) jumps.push_back(k);
    }
    static std::vector<double> weights(const StepModel<T>& model) {
        std::vector<double> w{to_double(model.q())};
        for (const auto& [k, p] : model.steps()) w.push_back(to_double(p));
        return w;
    }
};

} // namespace detail

template <class T>
WalkTrace sample_trace(const StepModel<T>& model, long long n, std::uint64_t seed) {
    detail::WalkSampler<T> s(model);
    std::mt19937_64 rng(shard_seed(seed, 0));
    WalkTrace tr;
    tr.altitudes.push_back(0);
    for (long long t = 1; t <= n; ++t) {
        const auto e = s.pick(rng);
        if (e == 0) {
            tr.altitudes.push_back(0);
            tr.resets.push_back(t);
        } else {
            tr.altitudes.push_back(tr.altitudes.back() + s.jumps[e]);
        }
    }
    return tr;
}

struct SimulationResult {
    std::uint64_t reps = 0;
    std::map<long long, std::uint64_t> altitude; // Y_n histogram
    std::map<long long, std::uint64_t> height;   // H_n histogram
    std::uint64_t resets = 0;                    // total resets over all runs

    void merge(const SimulationResult& o) {
        reps += o.reps;
        resets += o.resets;
        for (const auto& [k, c] : o.altitude) altitude[k] += c;
        for (const auto& [k, c] : o.height) height[k] += c;
    }
};

template <class T>
SimulationResult simulate(const StepModel<T>& model, long long n, std::uint64_t reps, std::uint64_t seed,
                          unsigned threads = 1) {
    RESETWALKS_REQUIRE(reps >= 1, ErrorCode::InvalidArgument, "reps must be positive");
    const detail::WalkSampler<T> sampler(model);
    std::vector<SimulationResult> shards(kShards);
    const auto run_shard = [&](unsigned s) {
        std::mt19937_64 rng(shard_seed(seed, s));
        auto& out = shards[s];
        out.reps = reps / kShards + (s < reps % kShards ? 1 : 0);
        for (std::uint64_t r = 0; r < out.reps; ++r) {
            long long y = 0, h = 0;
            for (long long t = 0; t < n; ++t) {
                const auto e = sampler.pick(rng);
                if (e == 0) {
                    y = 0;
                    ++out.resets;
                } else {
                    y += sampler.jumps[e];
                    h = std::max(h, y);
                }
            }
            ++out.altitude[y];
            ++out.height[h];
        }
    };
    threads = std::max(1u, std::min(threads, kShards));
    if (threads == 1) {
        for (unsigned s = 0; s < kShards; ++s) run_shard(s);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                for (unsigned s = w; s < kShards; s += threads) run_shard(s);
            });
        for (auto& th : pool) th.join();
    }
    SimulationResult total;
    for (const auto& s : shards) total.merge(s);
    return total;
}

struct ChiSquare {
    double statistic = 0;
    int dof = 0;
    double p_value = 1;
};

/// Pearson goodness of fit; cells with expected count below 5 are pooled.
inline ChiSquare chi_square_gof(const std::map<long long, std::uint64_t>& observed,
                                const std::map<long long, double>& expected_prob, std::uint64_t reps) {
    std::map<long long, double> all = expected_prob;
    for (const auto& [k, c] : observed) all.emplace(k, 0.0);
    std::vector<std::pair<double, double>> cells; // (observed, expected)
    double pool_o = 0, pool_e = 0;
    for (const auto& [k, p] : all) {
        const double e = p * static_cast<double>(reps);
        auto it = observed.find(k);
        const double o = it == observed.end() ? 0.0 : static_cast<double>(it->second);
        if (e < 5.0) {
            pool_o += o;
            pool_e += e;
        } else {
            cells.emplace_back(o, e);
        }
    }
    if (pool_e > 0 || pool_o > 0) {
        if (pool_e >= 5.0 || cells.empty()) {
            cells.emplace_back(pool_o, pool_e);
        } else {
            cells.back().first += pool_o;
            cells.back().second += pool_e;
        }
    }
    ChiSquare r;
    for (const auto& [o, e] : cells) {
        if (e > 0) r.statistic += (o - e) * (o - e) / e;
        else if (o > 0) r.statistic = std::numeric_limits<double>::infinity();
    }
    r.dof = static_cast<int>(cells.size()) - 1;
    if (r.dof >= 1 && std::isfinite(r.statistic)) {
        boost::math::chi_squared dist(r.dof);
        r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
    } else {
        r.p_value = std::isfinite(r.statistic) ? 1.0 : 0.0;
    }
    return r;
}

} // namespace resetwalks
