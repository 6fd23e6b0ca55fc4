#pragma once

// Moran model with m individuals, its generalization with subset deaths p_I,
// and the soliton wave model.

#include "core_model.hpp"
#include "errors.hpp"
#include "numeric.hpp"
#include "simulate.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <thread>
#include <vector>

namespace resetwalks {

using Subset = unsigned; // bit i-1 set when individual i belongs to the subset

inline constexpr int kMaxExactIndividuals = 6;
inline constexpr int kMaxSimIndividuals = 12;

template <class T>
class MoranMDModel {
public:
    int m() const { return m_; }
    const std::map<Subset, T>& pI() const { return pI_; }
    const std::vector<int>& f0() const { return f0_; }
    T prob(Subset I) const {
        auto it = pI_.find(I);
        return it == pI_.end() ? T(0) : it->second;
    }
    Subset full() const { return (Subset{1} << m_) - 1; }

    template <class U>
    friend MoranMDModel<U> make_md_model(int m, std::map<Subset, U> pI, std::vector<int> f0);

private:
    int m_ = 1;
    std::map<Subset, T> pI_;
    std::vector<int> f0_;
};

/// Validated model; f0 empty means all ages 0.
template <class T>
MoranMDModel<T> make_md_model(int m, std::map<Subset, T> pI, std::vector<int> f0 = {}) {
    RESETWALKS_REQUIRE(m >= 1 && m <= kMaxSimIndividuals, ErrorCode::InvalidArgument, "m out of range");
    if (f0.empty()) f0.assign(static_cast<std::size_t>(m), 0);
    RESETWALKS_REQUIRE(static_cast<int>(f0.size()) == m, ErrorCode::InvalidArgument, "f0 needs one age per individual");
    for (int a : f0) RESETWALKS_REQUIRE(a >= 0, ErrorCode::InvalidArgument, "ages must be nonnegative");
    T total(0);
    for (auto it = pI.begin(); it != pI.end();) {
        RESETWALKS_REQUIRE(it->first < (Subset{1} << m), ErrorCode::InvalidArgument, "subset outside {1..m}");
        RESETWALKS_REQUIRE(it->second >= T(0), ErrorCode::NonStochastic, "negative subset probability");
        total += it->second;
        if (it->second == T(0)) it = pI.erase(it);
        else ++it;
    }
    RESETWALKS_REQUIRE(abs_value(total - T(1)) <= stochastic_tolerance<T>(), ErrorCode::NonStochastic,
                       "subset probabilities must sum to 1");
    if constexpr (!is_exact_v<T>)
        for (auto& [I, p] : pI) p /= total;
    MoranMDModel<T> md;
    md.m_ = m;
    md.pI_ = std::move(pI);
    md.f0_ = std::move(f0);
    return md;
}

/// p for no death, p_i for individual i alone, p0 for everyone.
template <class T>
MoranMDModel<T> classical_md_model(int m, const T& p, const std::vector<T>& pi, const T& p0) {
    RESETWALKS_REQUIRE(static_cast<int>(pi.size()) == m, ErrorCode::InvalidArgument, "need m individual probabilities");
    std::map<Subset, T> pI;
    pI[0] += p;
    for (int i = 0; i < m; ++i) pI[Subset{1} << i] += pi[static_cast<std::size_t>(i)];
    pI[(Subset{1} << m) - 1] += p0;
    return make_md_model<T>(m, pI);
}

/// Each individual dies independently with probability q: p_I = q^|I| (1-q)^(m-|I|).
template <class T>
MoranMDModel<T> independent_deaths_model(int m, const T& q) {
    std::map<Subset, T> pI;
    for (Subset I = 0; I < (Subset{1} << m); ++I) {
        const int k = std::popcount(I);
        pI[I] = ipow(q, k) * ipow(T(1) - q, m - k);
    }
    return make_md_model<T>(m, pI);
}

/// Soliton parameters: p_{i} = 1/m, f0 = x_1 x_2^2 ... x_m^m, or x_2 x_3^2 ... x_m^{m-1} when `zero_based`.
/// A selected particle restarts at exponent 0 while it sits at position 1, so only the zero-based
/// start keeps exponent = position - 1 for every particle at every time.
template <class T>
MoranMDModel<T> soliton_md_model(int m, bool zero_based = false) {
    std::map<Subset, T> pI;
    for (int i = 0; i < m; ++i) pI[Subset{1} << i] = T(1) / T(m);
    std::vector<int> f0;
    for (int i = 1; i <= m; ++i) f0.push_back(zero_based ? i - 1 : i);
    return make_md_model<T>(m, pI, f0);
}

using AgeTuple = std::vector<int>;

template <class T>
struct AgeMeasure {
    long long n = 0;
    std::map<AgeTuple, T> masses;

    T total() const {
        T s(0);
        for (const auto& [a, w] : masses) s += w;
        return s;
    }
    /// Law of the age of individual i (0-based).
    DistVector<T> marginal(int i) const {
        std::map<int, T> acc;
        for (const auto& [a, w] : masses) acc[a[static_cast<std::size_t>(i)]] += w;
        return from_map(acc);
    }
    /// f_n(x) = sum of masses times prod x_i^{k_i}.
    template <class U>
    U evaluate(const std::vector<U>& x) const {
        U s(0);
        for (const auto& [a, w] : masses) {
            U term = numeric_cast<U>(w);
            for (std::size_t i = 0; i < a.size(); ++i) term *= ipow(x[i], a[i]);
            s += term;
        }
        return s;
    }

    static DistVector<T> from_map(const std::map<int, T>& acc) {
        DistVector<T> d;
        if (acc.empty()) return d;
        d.offset = acc.begin()->first;
        d.masses.assign(static_cast<std::size_t>(acc.rbegin()->first - d.offset + 1), T(0));
        for (const auto& [k, w] : acc) d.masses[static_cast<std::size_t>(k - d.offset)] = w;
        return d;
    }
};

namespace detail {

inline AgeTuple apply_event(const AgeTuple& a, Subset I) {
    AgeTuple b(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) b[i] = (I >> i) & 1u ? 0 : a[i] + 1;
    return b;
}

} // namespace detail

/// One-step pushforward: ages in I reset to 0, the others grow by 1.
template <class T>
AgeMeasure<T> step_measure(const MoranMDModel<T>& model, const AgeMeasure<T>& mu, std::size_t max_support = 1u << 22) {
    AgeMeasure<T> next;
    next.n = mu.n + 1;
    for (const auto& [a, w] : mu.masses)
        for (const auto& [I, p] : model.pI()) {
            next.masses[detail::apply_event(a, I)] += w * p;
            RESETWALKS_REQUIRE(next.masses.size() <= max_support, ErrorCode::ResourceLimit, "age measure support too large");
        }
    return next;
}

template <class T>
std::vector<AgeMeasure<T>> evolve_measures(const MoranMDModel<T>& model, long long n, std::size_t max_support = 1u << 22) {
    RESETWALKS_REQUIRE(n >= 0, ErrorCode::InvalidArgument, "n must be nonnegative");
    RESETWALKS_REQUIRE(model.m() <= kMaxExactIndividuals, ErrorCode::ResourceLimit, "too many individuals for exact measures");
    std::vector<AgeMeasure<T>> out;
    AgeMeasure<T> mu;
    mu.masses[model.f0()] = T(1);
    out.push_back(mu);
    for (long long t = 0; t < n; ++t) out.push_back(step_measure(model, out.back(), max_support));
    return out;
}

template <class T>
AgeMeasure<T> evolve_measure(const MoranMDModel<T>& model, long long n, std::size_t max_support = 1u << 22) {
    RESETWALKS_REQUIRE(n >= 0, ErrorCode::InvalidArgument, "n must be nonnegative");
    RESETWALKS_REQUIRE(model.m() <= kMaxExactIndividuals, ErrorCode::ResourceLimit, "too many individuals for exact measures");
    AgeMeasure<T> mu;
    mu.masses[model.f0()] = T(1);
    for (long long t = 0; t < n; ++t) mu = step_measure(model, mu, max_support);
    return mu;
}

/// Brute force over all |support|^n event sequences.
template <class T>
AgeMeasure<T> enumerate_md(const MoranMDModel<T>& model, long long n, double max_sequences = 1e7) {
    const auto& pI = model.pI();
    std::vector<std::pair<Subset, T>> ev(pI.begin(), pI.end());
    RESETWALKS_REQUIRE(std::pow(static_cast<double>(ev.size()), static_cast<double>(n)) <= max_sequences,
                       ErrorCode::ResourceLimit, "too many event sequences");
    AgeMeasure<T> out;
    out.n = n;
    const auto rec = [&](auto&& self, const AgeTuple& a, const T& w, long long left) -> void {
        if (left == 0) {
            out.masses[a] += w;
            return;
        }
        for (const auto& [I, p] : ev) self(self, detail::apply_event(a, I), w * p, left - 1);
    };
    rec(rec, model.f0(), T(1), n);
    return out;
}

/// Diagonal factor of the triangular system for the unknown F(X_J).
template <class T>
struct DeltaFactor {
    Subset J = 0;
    T rate;         // sum_{I subset of J} p_I
    T classical_rate; // p_empty + p_full [J = full] + sum_{i in J} p_{i}
};

template <class T>
struct DenominatorDelta {
    int m = 1;
    std::vector<DeltaFactor<T>> factors; // 2^m of them

    /// Coefficients in t of prod_J (1 - t rate_J prod_{i not in J} x_i).
    template <class U>
    std::vector<U> t_coefficients(const std::vector<U>& x, bool classical = false) const {
        std::vector<U> c{U(1)};
        for (const auto& f : factors) {
            U lin = numeric_cast<U>(classical ? f.classical_rate : f.rate);
            for (int i = 0; i < m; ++i)
                if (!((f.J >> i) & 1u)) lin *= x[static_cast<std::size_t>(i)];
            c.push_back(U(0));
            for (std::size_t k = c.size() - 1; k >= 1; --k) c[k] -= lin * c[k - 1];
        }
        return c;
    }
    int degree() const { return static_cast<int>(factors.size()); }
};

template <class T>
DenominatorDelta<T> delta_denominator(const MoranMDModel<T>& model) {
    DenominatorDelta<T> d;
    d.m = model.m();
    const Subset full = model.full();
    for (Subset J = 0; J <= full; ++J) {
        DeltaFactor<T> f;
        f.J = J;
        f.rate = T(0);
        for (const auto& [I, p] : model.pI())
            if ((I & ~J) == 0) f.rate += p;
        f.classical_rate = model.prob(0) + (J == full && full != 0 ? model.prob(full) : T(0));
        for (int i = 0; i < d.m; ++i)
            if ((J >> i) & 1u && (Subset{1} << i) != full) f.classical_rate += model.prob(Subset{1} << i);
        d.factors.push_back(f);
    }
    return d;
}

/// True when every p_I sits on the empty set, a singleton or the full set.
template <class T>
bool has_classical_support(const MoranMDModel<T>& model) {
    for (const auto& [I, p] : model.pI())
        if (!(I == 0 || I == model.full() || std::popcount(I) == 1)) return false;
    return true;
}

template <class U>
struct RationalityResult {
    U residual;           // max |[t^k] Delta S| over 2^m <= k <= N
    std::vector<U> series; // f_n(x), n = 0..N
};

/// Multiplies the series sum f_n(x) t^n by Delta(t, x); coefficients from t^{2^m} on must vanish.
template <class T, class U>
RationalityResult<U> rationality_check(const MoranMDModel<T>& model, const std::vector<U>& x, long long N,
                                       bool classical_delta = false) {
    RESETWALKS_REQUIRE(static_cast<int>(x.size()) == model.m(), ErrorCode::InvalidArgument, "x needs m entries");
    const long long deg = 1LL << model.m();
    RESETWALKS_REQUIRE(N >= deg + 2, ErrorCode::InvalidArgument, "order too small to certify the numerator degree");
    const auto mus = evolve_measures(model, N);
    RationalityResult<U> r;
    for (const auto& mu : mus) r.series.push_back(mu.template evaluate<U>(x));
    const auto d = delta_denominator(model).template t_coefficients<U>(x, classical_delta);
    r.residual = U(0);
    for (long long k = deg; k <= N; ++k) {
        U c(0);
        for (long long j = 0; j <= std::min<long long>(k, deg); ++j)
            c += d[static_cast<std::size_t>(j)] * r.series[static_cast<std::size_t>(k - j)];
        const U a = abs_value(c);
        if (a > r.residual) r.residual = a;
    }
    return r;
}

/// Expected number of individuals of age k at time n.
template <class T>
T age_count_statistics(const AgeMeasure<T>& mu, int k) {
    T s(0);
    for (const auto& [a, w] : mu.masses)
        s += w * T(static_cast<long long>(std::count(a.begin(), a.end(), k)));
    return s;
}

template <class T>
T age_count_statistics(const MoranMDModel<T>& model, long long n, int k) {
    return age_count_statistics(evolve_measure(model, n), k);
}

struct MDSimulation {
    std::uint64_t reps = 0;
    std::map<AgeTuple, std::uint64_t> counts;

    /// Empirical expected count of individuals of age k.
    double age_count(int k) const {
        double s = 0;
        for (const auto& [a, c] : counts) s += static_cast<double>(c) * static_cast<double>(std::count(a.begin(), a.end(), k));
        return s / static_cast<double>(reps);
    }
    std::map<int, std::uint64_t> marginal(int i) const {
        std::map<int, std::uint64_t> h;
        for (const auto& [a, c] : counts) h[a[static_cast<std::size_t>(i)]] += c;
        return h;
    }
};

template <class T>
MDSimulation simulate_md(const MoranMDModel<T>& model, long long n, std::uint64_t reps, std::uint64_t seed,
                         unsigned threads = 1) {
    RESETWALKS_REQUIRE(reps >= 1, ErrorCode::InvalidArgument, "reps must be positive");
    std::vector<Subset> events;
    std::vector<double> w;
    for (const auto& [I, p] : model.pI()) {
        events.push_back(I);
        w.push_back(to_double(p));
    }
    const DiscreteSampler pick(w);
    std::vector<MDSimulation> shards(kShards);
    const auto run_shard = [&](unsigned s) {
        std::mt19937_64 rng(shard_seed(seed, s));
        auto& out = shards[s];
        out.reps = reps / kShards + (s < reps % kShards ? 1 : 0);
        for (std::uint64_t r = 0; r < out.reps; ++r) {
            AgeTuple a = model.f0();
            for (long long t = 0; t < n; ++t) {
                const Subset I = events[pick(rng)];
                for (std::size_t i = 0; i < a.size(); ++i) a[i] = (I >> i) & 1u ? 0 : a[i] + 1;
            }
            ++out.counts[a];
        }
    };
    threads = std::max(1u, std::min(threads, kShards));
    if (threads == 1) {
        for (unsigned s = 0; s < kShards; ++s) run_shard(s);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (unsigned s = t; s < kShards; s += threads) run_shard(s);
            });
        for (auto& th : pool) th.join();
    }
    MDSimulation total;
    for (const auto& s : shards) {
        total.reps += s.reps;
        for (const auto& [a, c] : s.counts) total.counts[a] += c;
    }
    return total;
}

// Soliton wave

struct SolitonState {
    std::vector<long long> particles; // sorted, front at 1
    std::vector<long long> urns;      // U_1..U_{m-1}

    int m() const { return static_cast<int>(particles.size()); }
    long long length_from_particles() const { return particles.back(); }
    long long length_from_urns() const {
        long long s = m();
        for (auto u : urns) s += u;
        return s;
    }
};

inline SolitonState soliton_initial(int m) {
    RESETWALKS_REQUIRE(m >= 1, ErrorCode::InvalidArgument, "m must be positive");
    SolitonState s;
    for (int i = 1; i <= m; ++i) s.particles.push_back(i);
    s.urns.assign(static_cast<std::size_t>(m - 1), 0);
    return s;
}

/// Particle of rank `chosen` (1 = front) jumps just before the front; both representations are updated.
inline SolitonState soliton_step(const SolitonState& s, int chosen) {
    const int m = s.m();
    RESETWALKS_REQUIRE(chosen >= 1 && chosen <= m, ErrorCode::InvalidArgument, "chosen particle out of range");
    SolitonState t;
    // particles: new front at position 0, then shift so it sits at 1
    t.particles.push_back(0);
    for (int i = 0; i < m; ++i)
        if (i != chosen - 1) t.particles.push_back(s.particles[static_cast<std::size_t>(i)]);
    for (auto& x : t.particles) ++x;
    // urns
    t.urns = s.urns;
    auto& U = t.urns;
    const auto& V = s.urns;
    if (m >= 2) {
        if (chosen == 1) {
            U[0] = V[0] + 1;
        } else {
            U[0] = 0;
            for (int j = 2; j <= std::min(chosen - 1, m - 1); ++j) U[static_cast<std::size_t>(j - 1)] = V[static_cast<std::size_t>(j - 2)];
            if (chosen <= m - 1)
                U[static_cast<std::size_t>(chosen - 1)] = V[static_cast<std::size_t>(chosen - 2)] + V[static_cast<std::size_t>(chosen - 1)] + 1;
        }
    }
    return t;
}

/// Lengths L_0..L_n along a choice sequence; throws if the two representations disagree.
inline std::vector<long long> soliton_lengths(int m, const std::vector<int>& choices) {
    auto s = soliton_initial(m);
    std::vector<long long> L{s.length_from_particles()};
    for (int c : choices) {
        s = soliton_step(s, c);
        RESETWALKS_REQUIRE(s.length_from_particles() == s.length_from_urns(), ErrorCode::ResidualTooLarge,
                           "urn and particle lengths disagree");
        L.push_back(s.length_from_particles());
    }
    return L;
}

/// All choice sequences whose length column equals `lengths` (lengths[0] must be m).
inline std::vector<std::vector<int>> reconstruct_choices(int m, const std::vector<long long>& lengths) {
    std::vector<std::vector<int>> found;
    if (lengths.empty() || lengths[0] != m) return found;
    std::vector<int> path;
    const auto rec = [&](auto&& self, const SolitonState& s, std::size_t t) -> void {
        if (t == lengths.size()) {
            found.push_back(path);
            return;
        }
        for (int c = 1; c <= m; ++c) {
            const auto next = soliton_step(s, c);
            if (next.length_from_particles() != lengths[t]) continue;
            path.push_back(c);
            self(self, next, t + 1);
            path.pop_back();
        }
    };
    rec(rec, soliton_initial(m), 1);
    return found;
}

/// Soliton length from zero-based exponents: largest exponent plus one.
inline long long soliton_length_of_ages(const AgeTuple& a) { return *std::max_element(a.begin(), a.end()) + 1; }

template <class T>
std::map<long long, T> soliton_length_distribution(int m, long long n) {
    const auto mu = evolve_measure(soliton_md_model<T>(m, true), n);
    std::map<long long, T> d;
    for (const auto& [a, w] : mu.masses) d[soliton_length_of_ages(a)] += w;
    return d;
}

struct SolitonRun {
    std::vector<long long> lengths;  // L_0..L_steps from the urns
    bool representations_agree = true;
};

/// Uniform choices; both representations are stepped and compared at every time.
inline SolitonRun simulate_soliton(int m, long long steps, std::uint64_t seed) {
    RESETWALKS_REQUIRE(m >= 1 && m <= 4096, ErrorCode::InvalidArgument, "m out of range");
    std::mt19937_64 rng(shard_seed(seed, 0));
    SolitonRun run;
    auto s = soliton_initial(m);
    run.lengths.push_back(s.length_from_urns());
    for (long long t = 0; t < steps; ++t) {
        const int c = 1 + static_cast<int>(uniform01(rng) * m);
        s = soliton_step(s, c);
        run.representations_agree &= s.length_from_particles() == s.length_from_urns();
        run.lengths.push_back(s.length_from_urns());
    }
    return run;
}

/// Length histogram at time n over independent runs.
inline std::map<long long, std::uint64_t> simulate_soliton_lengths(int m, long long n, std::uint64_t reps, std::uint64_t seed) {
    std::map<long long, std::uint64_t> h;
    for (unsigned sh = 0; sh < kShards; ++sh) {
        std::mt19937_64 rng(shard_seed(seed, sh));
        const std::uint64_t r = reps / kShards + (sh < reps % kShards ? 1 : 0);
        for (std::uint64_t k = 0; k < r; ++k) {
            auto s = soliton_initial(m);
            for (long long t = 0; t < n; ++t) s = soliton_step(s, 1 + static_cast<int>(uniform01(rng) * m));
            ++h[s.length_from_urns()];
        }
    }
    return h;
}

/// Rationality residual for the soliton parameters with the corrected simplified denominator
/// prod_I (1 - t (|I|/m) prod_{i not in I} x_i), which equals the general diagonal here.
template <class U>
U soliton_gf_check(int m, const std::vector<U>& x, long long N) {
    RESETWALKS_REQUIRE(m >= 1 && m <= 4, ErrorCode::ResourceLimit, "soliton series limited to m <= 4");
    const auto model = soliton_md_model<U>(m);
    return rationality_check(model, x, N).residual;
}

/// Residual when the simplified denominator is read literally: prod_I (1 - t|I|/m) times prod_I prod_{i not in I} x_i.
template <class U>
U soliton_gf_check_literal(int m, const std::vector<U>& x, long long N) {
    const auto model = soliton_md_model<U>(m);
    const auto mus = evolve_measures(model, N);
    std::vector<U> d{U(1)};
    U xs(1);
    for (Subset I = 0; I < (Subset{1} << m); ++I) {
        const U rate = U(std::popcount(I)) / U(m);
        d.push_back(U(0));
        for (std::size_t k = d.size() - 1; k >= 1; --k) d[k] -= rate * d[k - 1];
        for (int i = 0; i < m; ++i)
            if (!((I >> i) & 1u)) xs *= x[static_cast<std::size_t>(i)];
    }
    for (auto& c : d) c *= xs;
    const long long deg = 1LL << m;
    U res(0);
    for (long long k = deg; k <= N; ++k) {
        U c(0);
        for (long long j = 0; j <= std::min<long long>(k, deg); ++j)
            c += d[static_cast<std::size_t>(j)] * mus[static_cast<std::size_t>(k - j)].template evaluate<U>(x);
        res = std::max(res, abs_value(c));
    }
    return res;
}

} // namespace resetwalks
