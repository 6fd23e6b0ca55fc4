#pragma once

#include "errors.hpp"
#include "numeric.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace resetwalks {

/// Finite Laurent polynomial sum_i coeffs[i] * u^(offset + i).
template <class T>
class LaurentPoly {
public:
    LaurentPoly() = default;
    LaurentPoly(long long offset, std::vector<T> coeffs) : offset_(offset), coeffs_(std::move(coeffs)) { normalize(); }

    static LaurentPoly monomial(long long k, T c = T(1)) { return LaurentPoly(k, {std::move(c)}); }
    static LaurentPoly constant(T c) { return LaurentPoly(0, {std::move(c)}); }

    long long offset() const { return offset_; }
    long long degree() const { return offset_ + static_cast<long long>(coeffs_.size()) - 1; }
    const std::vector<T>& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }
    std::size_t width() const { return coeffs_.size(); }

    T operator[](long long k) const {
        const long long i = k - offset_;
        if (i < 0 || i >= static_cast<long long>(coeffs_.size())) return T(0);
        return coeffs_[static_cast<std::size_t>(i)];
    }

    template <class U>
    U evaluate(const U& u) const {
        if (coeffs_.empty()) return U(0);
        U acc(0);
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * u + U(numeric_cast<double>(*it));
        return acc * ipow_any(u, offset_);
    }

    T evaluate_exact(const T& u) const {
        T acc(0);
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * u + *it;
        return coeffs_.empty() ? T(0) : acc * ipow(u, offset_);
    }

    T sum() const {
        T s(0);
        for (const auto& c : coeffs_) s += c;
        return s;
    }

    LaurentPoly derivative() const {
        if (coeffs_.empty()) return {};
        std::vector<T> out(coeffs_.size());
        for (std::size_t i = 0; i < coeffs_.size(); ++i) out[i] = coeffs_[i] * T(offset_ + static_cast<long long>(i));
        return LaurentPoly(offset_ - 1, std::move(out));
    }

    LaurentPoly& operator+=(const LaurentPoly& o) {
        if (o.is_zero()) return *this;
        if (is_zero()) return *this = o;
        const long long lo = std::min(offset_, o.offset_);
        const long long hi = std::max(degree(), o.degree());
        std::vector<T> out(static_cast<std::size_t>(hi - lo + 1), T(0));
        for (std::size_t i = 0; i < coeffs_.size(); ++i) out[static_cast<std::size_t>(offset_ - lo) + i] += coeffs_[i];
        for (std::size_t i = 0; i < o.coeffs_.size(); ++i) out[static_cast<std::size_t>(o.offset_ - lo) + i] += o.coeffs_[i];
        offset_ = lo;
        coeffs_ = std::move(out);
        normalize();
        return *this;
    }

    LaurentPoly& operator*=(const T& s) {
        for (auto& c : coeffs_) c *= s;
        normalize();
        return *this;
    }

    friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }
    friend LaurentPoly operator*(LaurentPoly a, const T& s) { return a *= s; }

    friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<T> out(a.coeffs_.size() + b.coeffs_.size() - 1, T(0));
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
            if (a.coeffs_[i] == T(0)) continue;
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
        }
        return LaurentPoly(a.offset_ + b.offset_, std::move(out));
    }

    /// Drops every coefficient of u^k with k > h.
    LaurentPoly truncate_above(long long h) const {
        if (is_zero() || degree() <= h) return *this;
        if (h < offset_) return {};
        return LaurentPoly(offset_, std::vector<T>(coeffs_.begin(), coeffs_.begin() + (h - offset_ + 1)));
    }

    friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
        return a.offset_ == b.offset_ && a.coeffs_ == b.coeffs_;
    }

private:
    template <class U>
    static U ipow_any(const U& u, long long e) {
        U r(1), b = e < 0 ? U(1) / u : u;
        for (long long k = e < 0 ? -e : e; k > 0; k >>= 1) {
            if (k & 1) r *= b;
            b *= b;
        }
        return r;
    }

    void normalize() {
        std::size_t lo = 0, hi = coeffs_.size();
        while (lo < hi && coeffs_[lo] == T(0)) ++lo;
        while (hi > lo && coeffs_[hi - 1] == T(0)) --hi;
        if (lo == hi) {
            coeffs_.clear();
            offset_ = 0;
            return;
        }
        if (lo > 0 || hi < coeffs_.size()) coeffs_ = std::vector<T>(coeffs_.begin() + lo, coeffs_.begin() + hi);
        offset_ += static_cast<long long>(lo);
    }

    long long offset_ = 0;
    std::vector<T> coeffs_;
};

/// Law of a walk with resets: jump k with probability steps[k], reset to 0 with probability q.
template <class T>
class StepModel {
public:
    StepModel() = default;

    const std::map<int, T>& steps() const { return steps_; }
    const T& q() const { return q_; }
    int c() const { return steps_.begin()->first; }
    int d() const { return steps_.rbegin()->first; }
    T prob(int k) const {
        auto it = steps_.find(k);
        return it == steps_.end() ? T(0) : it->second;
    }
    bool is_moran() const { return steps_.size() == 1 && steps_.begin()->first == 1; }

    template <class U>
    friend StepModel<U> validate_model(std::map<int, U> steps, U q);

private:
    std::map<int, T> steps_;
    T q_{};
};

/// Checks stochasticity and the reset range. Float inputs within tolerance are renormalized.
template <class T>
StepModel<T> validate_model(std::map<int, T> steps, T q) {
    for (auto it = steps.begin(); it != steps.end();) {
        RESETWALKS_REQUIRE(it->second >= T(0), ErrorCode::NonStochastic, "negative step probability");
        it = it->second == T(0) ? steps.erase(it) : std::next(it);
    }
    RESETWALKS_REQUIRE(!steps.empty(), ErrorCode::EmptySupport, "step set has no positive probability");
    RESETWALKS_REQUIRE(q > T(0) && q < T(1), ErrorCode::DegenerateReset, "reset probability must lie in (0,1)");
    T mass = q;
    for (const auto& [k, p] : steps) mass += p;
    const T err = abs_value(T(mass - T(1)));
    RESETWALKS_REQUIRE(err <= stochastic_tolerance<T>(), ErrorCode::NonStochastic,
                       "probabilities sum to " + to_string_value(mass) + ", not 1");
    if constexpr (!is_exact_v<T>) {
        q /= mass;
        for (auto& [k, p] : steps) p /= mass;
    }
    StepModel<T> m;
    m.steps_ = std::move(steps);
    m.q_ = q;
    return m;
}

template <class T>
StepModel<T> moran_model(const T& p) {
    return validate_model<T>({{1, p}}, T(1) - p);
}

template <class To, class From>
StepModel<To> model_cast(const StepModel<From>& m) {
    std::map<int, To> steps;
    for (const auto& [k, p] : m.steps()) steps[k] = numeric_cast<To>(p);
    return validate_model<To>(std::move(steps), numeric_cast<To>(m.q()));
}

template <class T>
LaurentPoly<T> step_polynomial(const StepModel<T>& m) {
    std::vector<T> coeffs(static_cast<std::size_t>(m.d() - m.c() + 1), T(0));
    for (const auto& [k, p] : m.steps()) coeffs[static_cast<std::size_t>(k - m.c())] = p;
    return LaurentPoly<T>(m.c(), std::move(coeffs));
}

template <class T>
struct Drift {
    T delta; // P'(1)
    T V;     // P''(1)
};

template <class T>
Drift<T> drift_moments(const StepModel<T>& m) {
    T delta(0), V(0);
    for (const auto& [k, p] : m.steps()) {
        delta += T(k) * p;
        V += T(k) * T(k - 1) * p;
    }
    return {delta, V};
}

/// Probability mass function on consecutive integers starting at offset.
template <class T>
struct DistVector {
    long long offset = 0;
    std::vector<T> masses;

    T at(long long k) const {
        const long long i = k - offset;
        if (i < 0 || i >= static_cast<long long>(masses.size())) return T(0);
        return masses[static_cast<std::size_t>(i)];
    }
    long long lo() const { return offset; }
    long long hi() const { return offset + static_cast<long long>(masses.size()) - 1; }

    T total() const {
        T s(0);
        for (const auto& v : masses) s += v;
        return s;
    }
    T mean() const {
        T s(0);
        for (std::size_t i = 0; i < masses.size(); ++i) s += masses[i] * T(offset + static_cast<long long>(i));
        return s;
    }
    T variance() const {
        T m = mean(), s(0);
        for (std::size_t i = 0; i < masses.size(); ++i) {
            T x = T(offset + static_cast<long long>(i)) - m;
            s += masses[i] * x * x;
        }
        return s;
    }
    /// Pr(X <= k).
    T cdf(long long k) const {
        T s(0);
        for (long long j = offset; j <= std::min(k, hi()); ++j) s += at(j);
        return s;
    }

    static DistVector from_poly(const LaurentPoly<T>& f) {
        DistVector d;
        d.offset = f.offset();
        d.masses = f.coeffs();
        return d;
    }

    friend bool operator==(const DistVector&, const DistVector&) = default;
};

} // namespace resetwalks
