#pragma once

#include <resetwalks/core_model.hpp>
#include <resetwalks/height_asymptotics.hpp>
#include <resetwalks/kernel_gf.hpp>
#include <resetwalks/mellin.hpp>
#include <resetwalks/moran_md.hpp>
#include <resetwalks/oracle.hpp>
#include <resetwalks/special_functions.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace resetwalks {

/// Random model with |S| <= max_steps, jumps in [lo, hi], probabilities with denominator `den`.
inline StepModel<Rational> random_rational_model(std::mt19937_64& rng, int max_steps = 3, int lo = -3, int hi = 3,
                                                 int den = 12) {
    std::uniform_int_distribution<int> count(1, max_steps), jump(lo, hi);
    for (;;) {
        const int s = count(rng);
        std::set<int> support;
        while (static_cast<int>(support.size()) < s) support.insert(jump(rng));
        // den units split over s steps plus the reset, each part at least 1
        std::uniform_int_distribution<int> cut(1, den - 1);
        std::set<int> cs;
        while (static_cast<int>(cs.size()) < s) cs.insert(cut(rng));
        int prev = 0;
        std::map<int, Rational> steps;
        auto it = support.begin();
        for (int c : cs) {
            steps[*it++] = Rational(c - prev, den);
            prev = c;
        }
        Rational q(den - prev, den);
        if (q <= 0 || q >= 1) continue;
        return validate_model<Rational>(std::move(steps), q);
    }
}

struct CheckResult {
    std::string name;
    bool passed = true;
    double residual = 0; // worst discrepancy seen, 0 for exact identities
    double seconds = 0;
    std::string detail;
};

struct CheckSpec {
    std::string name;
    std::string summary;
    bool in_default_suite = true;
    std::function<CheckResult()> run;
};

namespace checks {

class Recorder {
public:
    explicit Recorder(std::string name) : t0_(std::chrono::steady_clock::now()) { r_.name = std::move(name); }

    void expect(bool ok, const std::string& what) {
        if (!ok) {
            r_.passed = false;
            if (fails_++ < 4) note(what);
        }
    }
    void residual(double v) { r_.residual = std::max(r_.residual, std::isnan(v) ? INFINITY : v); }
    void note(const std::string& s) {
        if (!r_.detail.empty()) r_.detail += "; ";
        r_.detail += s;
    }
    CheckResult finish() {
        r_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
        return r_;
    }
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    CheckResult r_;
    int fails_ = 0;
    std::chrono::steady_clock::time_point t0_;
};

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

inline CheckResult altitude_trinity() {
    Recorder rec("altitude-trinity");
    std::mt19937_64 rng(2024);
    const int N = 12;
    for (int model = 0; model < 50; ++model) {
        const auto m = random_rational_model(rng);
        const auto en = enumerate_walks(m, N);
        for (int n = 0; n <= N; ++n) {
            const auto& e = en.altitude[static_cast<std::size_t>(n)];
            const auto dp = altitude_dist_dp(m, n);
            const auto fo = altitude_dist_formula_all(m, n);
            const auto mv = altitude_mean_var(m, n);
            const long long lo = std::min({e.lo(), dp.lo(), fo.lo()}), hi = std::max({e.hi(), dp.hi(), fo.hi()});
            bool same = true;
            for (long long k = lo; k <= hi; ++k) same &= e.at(k) == dp.at(k) && dp.at(k) == fo.at(k);
            rec.expect(same, "model " + std::to_string(model) + " n=" + std::to_string(n) + " laws differ");
            rec.expect(mv.mean == dp.mean() && mv.variance == dp.variance(),
                       "model " + std::to_string(model) + " n=" + std::to_string(n) + " moments differ");
        }
    }
    const double s = rec.elapsed();
    rec.expect(s < 60.0, "took " + fmt(s) + " s");
    return rec.finish();
}

inline CheckResult kernel_worked_example() {
    Recorder rec("kernel-worked-example");
    using R = Rational;
    const auto m = validate_model<R>({{1, R(1, 3)}, {2, R(1, 2)}}, R(1, 6));
    const auto t = bounded_gf_series(m, 3, 8);
    rec.expect(t.W[0] == LaurentPoly<R>::constant(R(1)), "z^0");
    rec.expect(t.W[1] == LaurentPoly<R>(1, {R(1, 3), R(1, 2)}), "z^1");
    rec.expect(t.W[2] == LaurentPoly<R>(2, {R(1, 9), R(1, 3)}), "z^2");
    rec.expect(t.W[3] == LaurentPoly<R>(3, {R(1, 27)}), "z^3");
    for (std::size_t n = 4; n < t.W.size(); ++n) rec.expect(t.W[n].is_zero(), "W is not a polynomial in z");
    return rec.finish();
}

inline CheckResult kernel_closed_form() {
    Recorder rec("kernel-closed-form");
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> rz(0.02, 0.1), ru(0.7, 1.3), ang(0, 2 * std::numbers::pi);
    std::uniform_int_distribution<int> hd(0, 6);
    int points = 0;
    for (int model = 0; model < 20; ++model) {
        const auto m = model_cast<double>(random_rational_model(rng));
        const int h = hd(rng);
        const auto t = bounded_gf_series(m, h, 45);
        for (int i = 0; i < 5; ++i, ++points) {
            const cplx z = std::polar(rz(rng), ang(rng));
            const cplx u = std::polar(ru(rng), ang(rng));
            const auto v = bounded_gf_closed_form(m, h, z, u);
            const double e = std::max(std::abs(v.W - eval_series(t.W, z, u)), std::abs(v.F - eval_series(t.F, z, u)));
            rec.residual(e);
            rec.expect(e < 1e-9, "model " + std::to_string(model) + " residual " + fmt(e));
        }
    }
    rec.expect(points == 100, "point count");
    return rec.finish();
}

inline CheckResult height_law_consistency() {
    Recorder rec("height-law");
    std::mt19937_64 rng(5);
    for (int model = 0; model < 10; ++model) {
        const auto m = random_rational_model(rng);
        for (long long h = 0; h <= 4; ++h) {
            const auto t = bounded_gf_series(m, h, 40);
            for (long long n = 0; n <= 40; n += 8)
                rec.expect(t.cdf(n) == height_dist_dp(m, n, h).heights.total(),
                           "series vs DP, model " + std::to_string(model));
        }
        const auto hd = height_dist_dp(m, 30, 90);
        rec.expect(hd.heights.total() + hd.tail == Rational(1), "mass");
    }
    for (long long n = 1; n < 60; n += 7)
        for (long long h = 0; h < 10; ++h) {
            rec.expect(moran_height_cdf(Rational(1, 3), h, n) <= moran_height_cdf(Rational(1, 3), h + 1, n), "monotone in h");
            rec.expect(moran_height_cdf(Rational(1, 3), h, n + 1) <= moran_height_cdf(Rational(1, 3), h, n), "monotone in n");
        }
    return rec.finish();
}

inline CheckResult pippenger() {
    Recorder rec("pippenger");
    using R = Rational;
    for (const R& p : {R(1, 4), R(1, 2), R(2, 3)})
        for (long long h = 0; h <= 10; ++h)
            for (long long n = 0; n <= 100; ++n)
                rec.expect(pippenger_sum(p, h, n) == moran_height_cdf(p, h, n),
                           "p=" + to_string_value(p) + " h=" + std::to_string(h) + " n=" + std::to_string(n));
    const double s = rec.elapsed();
    rec.expect(s < 10.0, "took " + fmt(s) + " s");
    return rec.finish();
}

inline CheckResult large_n_height() {
    Recorder rec("large-n-height");
    const long long n = 1LL << 25;
    for (double p : {0.5, 0.25}) {
        std::vector<double> pmf;
        double worst_ms = 0;
        for (long long h = 0; h <= 60; ++h) {
            const auto t0 = std::chrono::steady_clock::now();
            pmf.push_back(moran_height_pmf(p, h, n));
            worst_ms = std::max(worst_ms, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
        }
        rec.expect(worst_ms < 50.0, "slowest query " + fmt(worst_ms) + " ms");
        const auto am = std::max_element(pmf.begin(), pmf.end()) - pmf.begin();
        // differences of CDFs carry about 1e-16 absolute noise
        int changes = 0;
        for (std::size_t i = 1; i < pmf.size(); ++i) {
            const bool after = static_cast<long long>(i) > am;
            if (after ? pmf[i] > pmf[i - 1] + 1e-15 : pmf[i] < pmf[i - 1] - 1e-15) ++changes;
        }
        rec.expect(changes == 0, "pmf not unimodal at p=" + fmt(p));
        rec.note("p=" + fmt(p) + " argmax " + std::to_string(am) + " pmf " + fmt(pmf[static_cast<std::size_t>(am)]));
        if (p == 0.5) rec.expect(am == 25, "p=1/2 argmax is " + std::to_string(am) + ", expected 25");
        else rec.expect(am == 12 || am == 13, "p=1/4 argmax is " + std::to_string(am));
    }
    return rec.finish();
}

/// sup_h |exact - approx| n / ln(n)^3 for p = 1/2 over n = 2^10..2^22.
inline std::vector<double> gumbel_error_constants() {
    std::vector<double> c;
    for (int e : {10, 14, 18, 22}) {
        const long long n = 1LL << e;
        double sup = 0;
        for (long long h = 0; h < 80; ++h)
            sup = std::max(sup, std::abs(moran_height_cdf(0.5, h, n) - height_cdf_approx(0.5, static_cast<double>(n), h)));
        c.push_back(sup * static_cast<double>(n) / std::pow(std::log(static_cast<double>(n)), 3));
    }
    return c;
}

inline CheckResult gumbel_approximation() {
    Recorder rec("gumbel-approximation");
    const auto c = gumbel_error_constants();
    std::string s;
    for (double v : c) s += (s.empty() ? "" : ",") + fmt(v);
    rec.note("constants " + s);
    rec.expect(*std::max_element(c.begin(), c.end()) <= 3 * c.front(), "error constant not stable");
    const auto pk = peak_height(0.5, 1 << 20);
    const double exact = moran_height_pmf(0.5, pk.h_star, 1LL << 20);
    rec.residual(std::abs(exact - 0.25));
    rec.expect(std::abs(exact - 0.25) <= 0.02, "peak probability " + fmt(exact));
    return rec.finish();
}

inline CheckResult root_layout() {
    Recorder rec("root-layout");
    for (double p : {0.25, 1.0 / 3, 0.5}) {
        const auto r = locate_roots(p, 51);
        const std::string tag = "p=" + fmt(p);
        rec.expect(r.roots.size() == 53, tag + " root count");
        int inside = 0, on = 0, ring = 0;
        for (const auto& z : r.roots) {
            if (std::abs(z - cplx(1 / p)) < 1e-9) ++on;
            else if (std::abs(z) > 1 / p && std::abs(z) < 1 / p + 0.2) ++ring;
            else if (std::abs(z) < 1 / p - 1e-9) ++inside;
        }
        rec.expect(inside == 1 && r.epsilon > 0 && r.z1 < 1 / p, tag + " dominant root");
        rec.expect(on == 1, tag + " root at 1/p");
        rec.expect(ring == 51, tag + " ring has " + std::to_string(ring));
        rec.expect(r.min_gap > 1e-9, tag + " roots not simple");
        const double D = 1 - 1 / p + (1 - p) * std::pow(p, 52) * std::pow(1 / p, 53);
        rec.residual(std::abs(D));
        rec.expect(std::abs(D) < 1e-14, tag + " |D(1/p)| = " + fmt(D));
    }
    return rec.finish();
}

inline bool same_digits(double a, double b, int digits) {
    const double scale = std::pow(10.0, digits - 1 - std::floor(std::log10(std::abs(b))));
    return std::round(a * scale) == std::round(b * scale);
}

inline CheckResult fluctuation_constants() {
    Recorder rec("fluctuation-constants");
    const auto& sQ = cached_series(0.5, SeriesKind::Q);
    const auto& sR = cached_series(0.5, SeriesKind::R);
    const auto Q = sup_over_period(sQ);
    const auto R = sup_over_period(sR);
    rec.note("sup|Q| " + fmt(Q.sup) + ", sup|R| " + fmt(R.sup));
    rec.expect(same_digits(Q.sup, 1.090430e-6, 7), "sup|Q| digits");
    rec.expect(same_digits(R.sup, 2.987768e-6, 7), "sup|R| digits");
    rec.expect(Q.sup <= closed_bound_Q(0.5), "sup|Q| above closed bound");
    rec.expect(R.sup <= closed_bound_R(0.5), "sup|R| above closed bound");
    const double mean = std::abs(period_integral(sQ));
    rec.residual(mean);
    rec.expect(mean < 1e-14, "period integral " + fmt(mean));
    const auto g = discrete_gumbel_moments(GumbelParams{0, 1});
    const Float50 ref("1.077240905953631072609");
    const double err = static_cast<double>(boost::multiprecision::abs(g.mean - ref));
    rec.residual(err);
    rec.expect(err < 1e-18, "discrete Gumbel mean off by " + fmt(err));
    return rec.finish();
}

inline CheckResult moment_asymptotics() {
    Recorder rec("moment-asymptotics");
    for (double p : {0.5, 0.25}) {
        std::vector<double> cm, cv;
        for (int e = 10; e <= 20; e += 2) {
            const long long n = 1LL << e;
            const double L = std::log(static_cast<double>(n));
            const auto ex = moran_height_moments(p, n);
            cm.push_back(std::abs(ex.mean - mean_asymptotic(p, static_cast<double>(n)).value) * static_cast<double>(n) / std::pow(L, 4));
            cv.push_back(std::abs(ex.variance - variance_asymptotic(p, static_cast<double>(n)).value) * static_cast<double>(n) / std::pow(L, 5));
        }
        rec.expect(*std::max_element(cm.begin(), cm.end()) <= 3 * cm.front(), "mean constant unstable at p=" + fmt(p));
        rec.expect(*std::max_element(cv.begin(), cv.end()) <= 3 * cv.front(), "variance constant unstable at p=" + fmt(p));
        const double lp = std::log(p);
        const double target = std::numbers::pi * std::numbers::pi / (6 * lp * lp) + 1.0 / 12;
        const double var = moran_height_moments(p, 1LL << 20).variance;
        rec.residual(std::abs(var - target));
        rec.expect(std::abs(var - target) <= 0.05, "variance " + fmt(var) + " vs " + fmt(target));
    }
    return rec.finish();
}

inline CheckResult digamma_bound() {
    Recorder rec("digamma-bound");
    const int pts = 10000;
    for (int i = 0; i < pts; ++i) {
        const double t = std::pow(10.0, -2.0 + 5.0 * i / (pts - 1));
        const double m = std::abs(digamma_imag(t));
        rec.expect(m <= digamma_imag_bound(t), "bound fails at t=" + fmt(t));
        rec.expect(digamma_imag_bound(t) <= digamma_imag_bound_relaxed(t) + 1e-12, "relaxed bound below sharp at t=" + fmt(t));
        // |Gamma(it)|^2 t sinh(pi t) / pi in logs, Gamma from the Stirling series
        const double lg = 2.0 * static_cast<double>(log_gamma(cplxl(0, t)).real()) + std::log(t) +
                          log_sinh(std::numbers::pi * t) - std::log(std::numbers::pi);
        const double rel = std::abs(std::expm1(lg));
        rec.residual(rel);
        rec.expect(rel <= 1e-12, "gamma identity off by " + fmt(rel) + " at t=" + fmt(t));
    }
    return rec.finish();
}

inline CheckResult waiting_duality() {
    Recorder rec("waiting-duality");
    using R = Rational;
    for (const R& p : {R(1, 2), R(1, 3)})
        for (long long h = 1; h <= 6; ++h) {
            const auto a = series_prefix(waiting_time_gf(p, h), 200);
            R partial(0);
            for (long long n = 0; n <= 200; ++n) {
                partial += a[static_cast<std::size_t>(n)];
                rec.expect(partial == R(1) - moran_height_cdf(p, h - 1, n),
                           "h=" + std::to_string(h) + " n=" + std::to_string(n));
            }
        }
    return rec.finish();
}

inline CheckResult excursion_identity() {
    Recorder rec("excursion");
    using R = Rational;
    for (const R& p : {R(1, 2), R(2, 5)})
        for (long long h = 0; h <= 6; ++h) {
            const auto t = bounded_gf_series(moran_model(p), h, 200);
            for (long long n = 1; n <= 200; ++n)
                rec.expect(t.f(n, 0) / moran_model(p).q() == moran_height_cdf(p, h, n - 1),
                           "h=" + std::to_string(h) + " n=" + std::to_string(n));
        }
    return rec.finish();
}

inline MoranMDModel<Rational> random_general_md(std::mt19937_64& rng, int m) {
    std::map<Subset, Rational> w;
    Rational total(0);
    for (Subset I = 0; I < (Subset{1} << m); ++I) {
        const Rational v(static_cast<long long>(1 + rng() % 4), 1);
        w[I] = v;
        total += v;
    }
    for (auto& [I, v] : w) v /= total;
    return make_md_model<Rational>(m, w);
}

inline CheckResult md_rationality() {
    Recorder rec("md-rationality");
    std::mt19937_64 rng(17);
    const auto rnd = [&](int m) {
        std::vector<double> x;
        for (int i = 0; i < m; ++i) x.push_back(static_cast<double>(1 + rng() % 9) / 10.0);
        return x;
    };
    for (int m : {2, 3}) {
        std::vector<MoranMDModel<Rational>> models;
        std::vector<Rational> pi;
        for (int i = 0; i < m; ++i) pi.push_back(Rational(1, 2 * m));
        models.push_back(classical_md_model<Rational>(m, Rational(1, 4), pi, Rational(1, 4)));
        models.push_back(independent_deaths_model<Rational>(m, Rational(1, 3)));
        models.push_back(random_general_md(rng, m));
        for (const auto& md : models) {
            const auto mf = make_md_model<double>(m, [&] {
                std::map<Subset, double> d;
                for (const auto& [I, p] : md.pI()) d[I] = to_double(p);
                return d;
            }());
            const long long N = (1LL << m) + 6;
            for (int trial = 0; trial < 3; ++trial) {
                const double r = rationality_check(mf, rnd(m), N).residual;
                rec.residual(r);
                rec.expect(r < 1e-10, "m=" + std::to_string(m) + " residual " + fmt(r));
            }
            std::vector<Rational> xr;
            for (int i = 0; i < m; ++i) xr.push_back(Rational(static_cast<long long>(1 + rng() % 9), 10));
            rec.expect(rationality_check(md, xr, N).residual == Rational(0), "exact residual nonzero");
        }
        for (const auto& mu : evolve_measures(models.back(), 12)) rec.expect(mu.total() == Rational(1), "mass");
    }
    return rec.finish();
}

inline CheckResult md_age_law() {
    Recorder rec("md-age-law");
    const auto md = classical_md_model<double>(3, 0.0, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.0);
    const auto marg = evolve_measure(md, 200).marginal(0);
    double tv = 0;
    for (long long k = 0; k <= 200; ++k) tv += std::abs(marg.at(k) - (1.0 / 3) * std::pow(2.0 / 3, static_cast<double>(k)));
    tv /= 2;
    rec.residual(tv);
    rec.expect(tv < 0.01, "total variation " + fmt(tv));
    // one individual reduces to the Moran altitude
    const auto one = evolve_measure(make_md_model<Rational>(1, {{0, Rational(2, 3)}, {1, Rational(1, 3)}}), 15).marginal(0);
    const auto dp = altitude_dist_dp(moran_model(Rational(2, 3)), 15);
    for (long long k = 0; k <= 15; ++k) rec.expect(one.at(k) == dp.at(k), "m=1 reduction");
    return rec.finish();
}

inline CheckResult soliton() {
    Recorder rec("soliton");
    for (int m = 1; m <= 8; ++m) {
        const auto run = simulate_soliton(m, 100000, 100 + static_cast<std::uint64_t>(m));
        rec.expect(run.representations_agree, "representations disagree at m=" + std::to_string(m));
        for (std::size_t t = 0; t < run.lengths.size(); ++t)
            rec.expect(run.lengths[t] >= m && run.lengths[t] <= m + static_cast<long long>(t), "length out of range");
    }
    const std::vector<long long> column{4, 5, 6, 6, 4, 5, 6};
    const auto seqs = reconstruct_choices(4, column);
    rec.expect(!seqs.empty(), "no choice sequence reproduces the length column");
    if (!seqs.empty()) rec.expect(soliton_lengths(4, seqs.front()) == column, "replay differs");
    const double r = soliton_gf_check<double>(2, {0.3, 0.6}, 12);
    rec.residual(r);
    rec.expect(r < 1e-12, "gf residual " + fmt(r));
    return rec.finish();
}

} // namespace checks

inline const std::vector<CheckSpec>& check_registry() {
    static const std::vector<CheckSpec> reg{
        {"altitude-trinity", "enumeration, DP, power formula and closed moments agree exactly", true, checks::altitude_trinity},
        {"kernel-worked-example", "bounded walk polynomial of the thirds model", true, checks::kernel_worked_example},
        {"kernel-closed-form", "kernel-method closed form against the series", true, checks::kernel_closed_form},
        {"height-law", "bounded series against height DP; monotone CDF", true, checks::height_law_consistency},
        {"pippenger", "binomial sum equals the GF coefficient", true, checks::pippenger},
        {"large-n-height", "n = 2^25 queries, unimodality and argmax", false, checks::large_n_height},
        {"gumbel-approximation", "error constant stability and peak probability", true, checks::gumbel_approximation},
        {"root-layout", "roots of the height denominator at h = 51", true, checks::root_layout},
        {"fluctuation-constants", "sup of the periodic series and the Gumbel mean", true, checks::fluctuation_constants},
        {"moment-asymptotics", "mean and variance expansions against exact sums", true, checks::moment_asymptotics},
        {"digamma-bound", "digamma bound and the Gamma reflection identity", true, checks::digamma_bound},
        {"waiting-duality", "waiting time CDF equals the height tail", true, checks::waiting_duality},
        {"excursion", "excursion height against the walk one step shorter", true, checks::excursion_identity},
        {"md-rationality", "denominator times series is a polynomial", true, checks::md_rationality},
        {"md-age-law", "age marginal and the one-individual reduction", true, checks::md_age_law},
        {"soliton", "urn/particle agreement, length column, gf residual", true, checks::soliton},
    };
    return reg;
}

} // namespace resetwalks
