#pragma once

// Exterior algebra Λ(E*) and the bi-graded algebra Λ(E*) ⊗̂ Λ(E*) of an n-dimensional
// inner-product space with orthonormal coframe e^0..e^{n-1}. Index 0 is the collar normal
// direction when the space is the tangent space at a boundary point.

#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "torsion/error.hpp"
#include "torsion/scalar.hpp"

namespace torsion {

inline constexpr int kMaxDimension = 16;

inline void check_dimension(int n) {
    if (n < 1 || n > kMaxDimension)
        throw InputError("dimension must lie in [1, " + std::to_string(kMaxDimension) + "], got " + std::to_string(n));
}

inline void require_same_dimension(int a, int b, const char* op) {
    if (a != b)
        throw DimensionMismatch(std::string(op) + ": dimensions " + std::to_string(a) + " and " + std::to_string(b));
}

/// Element of Λ(E*): map from strictly increasing index sets to coefficients.
template <Scalar S>
class ExteriorForm {
public:
    explicit ExteriorForm(int n) : n_(n) { check_dimension(n); }

    static ExteriorForm scalar(int n, S value) {
        ExteriorForm f(n);
        f.add_term(0, std::move(value));
        return f;
    }

    static ExteriorForm basis(int n, IndexMask indices, S value = S(1)) {
        ExteriorForm f(n);
        f.add_term(indices, std::move(value));
        return f;
    }

    int dimension() const { return n_; }
    const std::map<IndexMask, S>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    S coefficient(IndexMask indices) const {
        auto it = terms_.find(indices);
        return it == terms_.end() ? S(0) : it->second;
    }

    void add_term(IndexMask indices, S value) {
        if ((indices & ~full_mask(n_)) != 0) throw InputError("exterior index out of range");
        if (torsion::is_zero(value)) return;
        auto [it, inserted] = terms_.try_emplace(indices, value);
        if (!inserted) {
            it->second += value;
            if (torsion::is_zero(it->second)) terms_.erase(it);
        }
    }

    ExteriorForm& operator+=(const ExteriorForm& o) {
        require_same_dimension(n_, o.n_, "ExteriorForm +");
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    ExteriorForm& operator*=(const S& s) {
        if (torsion::is_zero(s)) { terms_.clear(); return *this; }
        for (auto& [m, c] : terms_) c *= s;
        return *this;
    }
    friend ExteriorForm operator+(ExteriorForm a, const ExteriorForm& b) { return a += b; }
    friend ExteriorForm operator-(ExteriorForm a, const ExteriorForm& b) {
        ExteriorForm nb = b;
        nb *= S(-1);
        return a += nb;
    }
    friend ExteriorForm operator*(ExteriorForm a, const S& s) { return a *= s; }
    friend bool operator==(const ExteriorForm& a, const ExteriorForm& b) { return a.n_ == b.n_ && a.terms_ == b.terms_; }

    friend ExteriorForm wedge(const ExteriorForm& a, const ExteriorForm& b) {
        require_same_dimension(a.n_, b.n_, "wedge");
        ExteriorForm out(a.n_);
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) {
                if (ma & mb) continue;
                S v = ca * cb;
                if (merge_sign(ma, mb) < 0) v = -v;
                out.add_term(ma | mb, std::move(v));
            }
        return out;
    }

private:
    int n_;
    std::map<IndexMask, S> terms_;
};

/// Key of a bi-graded monomial e^A ∧ ê^Â, stored with all unhatted generators first.
struct BiIndex {
    IndexMask plain = 0;
    IndexMask hatted = 0;
    friend auto operator<=>(const BiIndex&, const BiIndex&) = default;
    int degree() const { return popcount(plain) + popcount(hatted); }
};

/// Element of Λ(E*) ⊗̂ Λ(Ê*). Hatted and unhatted generators anticommute with each other
/// (graded tensor product), so the algebra is Λ of a 2n-dimensional space.
template <Scalar S>
class BiGradedElement {
public:
    using scalar_type = S;

    explicit BiGradedElement(int n) : n_(n) { check_dimension(n); }

    static BiGradedElement scalar(int n, S value) {
        BiGradedElement e(n);
        e.add_term({0, 0}, std::move(value));
        return e;
    }
    static BiGradedElement one(int n) { return scalar(n, S(1)); }

    static BiGradedElement monomial(int n, IndexMask plain, IndexMask hatted, S value = S(1)) {
        BiGradedElement e(n);
        e.add_term({plain, hatted}, std::move(value));
        return e;
    }
    /// e^i
    static BiGradedElement e(int n, int i) { return monomial(n, IndexMask(1) << i, 0); }
    /// ê^i
    static BiGradedElement ehat(int n, int i) { return monomial(n, 0, IndexMask(1) << i); }

    int dimension() const { return n_; }
    const std::map<BiIndex, S>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    S coefficient(BiIndex key) const {
        auto it = terms_.find(key);
        return it == terms_.end() ? S(0) : it->second;
    }
    S scalar_part() const { return coefficient({0, 0}); }

    void add_term(BiIndex key, S value) {
        const IndexMask range = ~full_mask(n_);
        if ((key.plain & range) || (key.hatted & range)) throw InputError("bi-graded index out of range");
        if (torsion::is_zero(value)) return;
        auto [it, inserted] = terms_.try_emplace(key, value);
        if (!inserted) {
            it->second += value;
            if (torsion::is_zero(it->second)) terms_.erase(it);
        }
    }

    /// Part of total (plain, hatted) bidegree (p, q).
    BiGradedElement bidegree_part(int p, int q) const {
        BiGradedElement out(n_);
        for (const auto& [k, c] : terms_)
            if (popcount(k.plain) == p && popcount(k.hatted) == q) out.terms_.emplace(k, c);
        return out;
    }

    BiGradedElement& operator+=(const BiGradedElement& o) {
        require_same_dimension(n_, o.n_, "BiGradedElement +");
        for (const auto& [k, c] : o.terms_) add_term(k, c);
        return *this;
    }
    BiGradedElement& operator-=(const BiGradedElement& o) {
        require_same_dimension(n_, o.n_, "BiGradedElement -");
        for (const auto& [k, c] : o.terms_) add_term(k, -c);
        return *this;
    }
    BiGradedElement& operator*=(const S& s) {
        if (torsion::is_zero(s)) { terms_.clear(); return *this; }
        for (auto& [k, c] : terms_) c *= s;
        return *this;
    }
    BiGradedElement operator-() const { return *this * S(-1); }

    friend BiGradedElement operator+(BiGradedElement a, const BiGradedElement& b) { return a += b; }
    friend BiGradedElement operator-(BiGradedElement a, const BiGradedElement& b) { return a -= b; }
    friend BiGradedElement operator*(BiGradedElement a, const S& s) { return a *= s; }
    friend BiGradedElement operator*(const S& s, BiGradedElement a) { return a *= s; }
    friend bool operator==(const BiGradedElement& a, const BiGradedElement& b) {
        return a.n_ == b.n_ && a.terms_ == b.terms_;
    }

    /// Graded-commutative product.
    friend BiGradedElement wedge(const BiGradedElement& a, const BiGradedElement& b) {
        require_same_dimension(a.n_, b.n_, "wedge");
        BiGradedElement out(a.n_);
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_) {
                if ((ka.plain & kb.plain) || (ka.hatted & kb.hatted)) continue;
                int sign = merge_sign(ka.plain, kb.plain) * merge_sign(ka.hatted, kb.hatted);
                if ((popcount(ka.hatted) * popcount(kb.plain)) & 1) sign = -sign;
                S v = ca * cb;
                if (sign < 0) v = -v;
                out.add_term({ka.plain | kb.plain, ka.hatted | kb.hatted}, std::move(v));
            }
        return out;
    }
    friend BiGradedElement operator*(const BiGradedElement& a, const BiGradedElement& b) { return wedge(a, b); }

    template <Scalar T>
    BiGradedElement<T> convert() const {
        BiGradedElement<T> out(n_);
        for (const auto& [k, c] : terms_) {
            if constexpr (std::is_same_v<T, S>)
                out.add_term(k, c);
            else if constexpr (is_exact_v<S>)
                out.add_term(k, static_cast<T>(to_double(c)));
            else
                out.add_term(k, T(c));
        }
        return out;
    }

    std::string to_string() const {
        std::ostringstream os;
        bool first = true;
        for (const auto& [k, c] : terms_) {
            if (!first) os << " + ";
            first = false;
            os << "(" << c << ")";
            for (int i = 0; i < n_; ++i)
                if (k.plain >> i & 1) os << " e" << i;
            for (int i = 0; i < n_; ++i)
                if (k.hatted >> i & 1) os << " ê" << i;
        }
        return first ? "0" : os.str();
    }

private:
    int n_;
    std::map<BiIndex, S> terms_;
};

/// Σ_{k=0}^{2n} a^k / k!; a must have no scalar part.
template <Scalar S>
BiGradedElement<S> nilpotent_exp(const BiGradedElement<S>& a) {
    if (!is_zero(a.scalar_part()))
        throw InputError("nilpotent_exp: element has a nonzero scalar part; split it off first");
    const int n = a.dimension();
    BiGradedElement<S> result = BiGradedElement<S>::one(n);
    BiGradedElement<S> power = BiGradedElement<S>::one(n);
    for (int k = 1; k <= 2 * n; ++k) {
        power = wedge(power, a);
        if (power.is_zero()) break;
        result += power * (S(1) / factorial<S>(k));
    }
    return result;
}

/// e^{-tA} for an element without scalar part, as a polynomial in t (coefficient k multiplies t^k).
template <Scalar S>
std::vector<BiGradedElement<S>> nilpotent_exp_series(const BiGradedElement<S>& a) {
    if (!is_zero(a.scalar_part()))
        throw InputError("nilpotent_exp_series: element has a nonzero scalar part");
    const int n = a.dimension();
    std::vector<BiGradedElement<S>> out{BiGradedElement<S>::one(n)};
    BiGradedElement<S> power = BiGradedElement<S>::one(n);
    for (int k = 1; k <= 2 * n; ++k) {
        power = wedge(power, a * S(-1));
        if (power.is_zero()) break;
        out.push_back(power * (S(1) / factorial<S>(k)));
    }
    return out;
}

/// Sign of the Berezin normalization in odd dimension, where Gauss–Bonnet does not pin it.
enum class OddBerezinSign {
    supertrace_compatible, ///< κ_n = (4π)^{-n/2} (-2)^n (-1)^{n(n-1)/2}, the even-n formula continued
    flipped,
};

struct BerezinConvention {
    OddBerezinSign odd_sign = OddBerezinSign::supertrace_compatible;
    /// Multiplies κ_n. Only the sensitivity check of the Gauss–Bonnet criterion moves it off 1.
    double scale = 1.0;
};

/// κ_n. For even n this equals (-1/π)^{n/2}, the value making ∫^B exp(-R) the Euler form
/// with ∫_{S^2} e = 2; it coincides with (4π)^{-n/2} times the supertrace normalization
/// Tr_s[c_0ĉ_0...] = (-2)^n.
inline double berezin_normalization(int n, BerezinConvention conv = {}) {
    const int sign_pow = n + n * (n - 1) / 2;
    double sign = (sign_pow % 2) ? -1.0 : 1.0;
    if (n % 2 == 1 && conv.odd_sign == OddBerezinSign::flipped) sign = -sign;
    return conv.scale * sign * std::pow(std::numbers::pi, -0.5 * n);
}

/// Unnormalized Berezin integral: coefficient form of the full hatted volume ê^0∧...∧ê^{n-1}
/// (with the unhatted part written first). Exact in both scalar modes.
template <Scalar S>
ExteriorForm<S> berezin_coefficients(const BiGradedElement<S>& a) {
    const int n = a.dimension();
    const IndexMask top = full_mask(n);
    ExteriorForm<S> out(n);
    for (const auto& [k, c] : a.terms())
        if (k.hatted == top) out.add_term(k.plain, c);
    return out;
}

/// Normalized Berezin integral ∫^B : Λ ⊗̂ Λ̂ → Λ.
template <std::floating_point S>
ExteriorForm<S> berezin(const BiGradedElement<S>& a, BerezinConvention conv = {}) {
    return berezin_coefficients(a) * static_cast<S>(berezin_normalization(a.dimension(), conv));
}

} // namespace torsion
