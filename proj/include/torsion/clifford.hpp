#pragma once

// The two Clifford actions on Λ(E*):
//   c(e_i) = e^i∧ − ι_{e_i},   ĉ(e_i) = e^i∧ + ι_{e_i},
// with c_i c_j + c_j c_i = −2δ_ij, ĉ_i ĉ_j + ĉ_j ĉ_i = 2δ_ij, c_i ĉ_j + ĉ_j c_i = 0.
// Words are stored canonically as c_A ĉ_Â (all c's ascending, then all ĉ's ascending).

#include <map>
#include <string>

#include "torsion/exterior.hpp"

namespace torsion {

template <Scalar S>
class CliffordElement {
public:
    using scalar_type = S;

    explicit CliffordElement(int n) : n_(n) { check_dimension(n); }

    static CliffordElement scalar(int n, S value) {
        CliffordElement w(n);
        w.add_term({0, 0}, std::move(value));
        return w;
    }
    static CliffordElement identity(int n) { return scalar(n, S(1)); }
    static CliffordElement word(int n, IndexMask c, IndexMask chat, S value = S(1)) {
        CliffordElement w(n);
        w.add_term({c, chat}, std::move(value));
        return w;
    }
    static CliffordElement c(int n, int i) { return word(n, IndexMask(1) << i, 0); }
    static CliffordElement chat(int n, int i) { return word(n, 0, IndexMask(1) << i); }
    /// e^i∧ = ½(c_i + ĉ_i)
    static CliffordElement exterior(int n, int i) {
        return (c(n, i) + chat(n, i)) * (S(1) / S(2));
    }
    /// ι_{e_i} = ½(ĉ_i − c_i)
    static CliffordElement interior(int n, int i) {
        return (chat(n, i) - c(n, i)) * (S(1) / S(2));
    }
    /// c_0ĉ_0 c_1ĉ_1 ... c_{n-1}ĉ_{n-1}, rewritten in canonical order.
    static CliffordElement interleaved_top(int n) {
        const int swaps = n * (n - 1) / 2;
        return word(n, full_mask(n), full_mask(n), (swaps & 1) ? S(-1) : S(1));
    }

    int dimension() const { return n_; }
    const std::map<BiIndex, S>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    S coefficient(BiIndex key) const {
        auto it = terms_.find(key);
        return it == terms_.end() ? S(0) : it->second;
    }

    void add_term(BiIndex key, S value) {
        const IndexMask range = ~full_mask(n_);
        if ((key.plain & range) || (key.hatted & range)) throw InputError("Clifford index out of range");
        if (torsion::is_zero(value)) return;
        auto [it, inserted] = terms_.try_emplace(key, value);
        if (!inserted) {
            it->second += value;
            if (torsion::is_zero(it->second)) terms_.erase(it);
        }
    }

    CliffordElement& operator+=(const CliffordElement& o) {
        require_same_dimension(n_, o.n_, "CliffordElement +");
        for (const auto& [k, v] : o.terms_) add_term(k, v);
        return *this;
    }
    CliffordElement& operator-=(const CliffordElement& o) {
        require_same_dimension(n_, o.n_, "CliffordElement -");
        for (const auto& [k, v] : o.terms_) add_term(k, -v);
        return *this;
    }
    CliffordElement& operator*=(const S& s) {
        if (torsion::is_zero(s)) { terms_.clear(); return *this; }
        for (auto& [k, v] : terms_) v *= s;
        return *this;
    }
    friend CliffordElement operator+(CliffordElement a, const CliffordElement& b) { return a += b; }
    friend CliffordElement operator-(CliffordElement a, const CliffordElement& b) { return a -= b; }
    friend CliffordElement operator*(CliffordElement a, const S& s) { return a *= s; }
    friend bool operator==(const CliffordElement& a, const CliffordElement& b) {
        return a.n_ == b.n_ && a.terms_ == b.terms_;
    }

    friend CliffordElement operator*(const CliffordElement& a, const CliffordElement& b) {
        return clifford_product(a, b);
    }

    /// Canonical product, reduced with the three anticommutation relations.
    friend CliffordElement clifford_product(const CliffordElement& a, const CliffordElement& b) {
        require_same_dimension(a.n_, b.n_, "clifford_product");
        CliffordElement out(a.n_);
        for (const auto& [ka, va] : a.terms_)
            for (const auto& [kb, vb] : b.terms_) {
                // c_A ĉ_Â c_B ĉ_B̂: move c_B left past ĉ_Â, then sort each family.
                int sign = merge_sign(ka.plain, kb.plain) * merge_sign(ka.hatted, kb.hatted);
                if ((popcount(ka.hatted) * popcount(kb.plain)) & 1) sign = -sign;
                if (popcount(ka.plain & kb.plain) & 1) sign = -sign; // c_i c_i = −1
                S v = va * vb;
                if (sign < 0) v = -v;
                out.add_term({ka.plain ^ kb.plain, ka.hatted ^ kb.hatted}, std::move(v));
            }
        return out;
    }

    /// Highest word length present (filtration degree); −1 for zero.
    int filtration_degree() const {
        int d = -1;
        for (const auto& [k, v] : terms_) d = std::max(d, k.degree());
        return d;
    }

private:
    int n_;
    std::map<BiIndex, S> terms_;
};

template <Scalar S>
CliffordElement<S> commutator(const CliffordElement<S>& a, const CliffordElement<S>& b) {
    return a * b - b * a;
}

namespace detail {

// e^i∧ and ι_{e_i} on a single basis monomial e^S. Returns the sign (0 if the result vanishes).
inline int exterior_on(IndexMask s, int i, IndexMask& out) {
    const IndexMask bit = IndexMask(1) << i;
    if (s & bit) return 0;
    out = s | bit;
    return (popcount(s & (bit - 1)) & 1) ? -1 : 1;
}
inline int interior_on(IndexMask s, int i, IndexMask& out) {
    const IndexMask bit = IndexMask(1) << i;
    if (!(s & bit)) return 0;
    out = s & ~bit;
    return (popcount(s & (bit - 1)) & 1) ? -1 : 1;
}

template <Scalar S>
ExteriorForm<S> apply_letter(const ExteriorForm<S>& w, int i, bool hatted) {
    ExteriorForm<S> out(w.dimension());
    for (const auto& [m, v] : w.terms()) {
        IndexMask r = 0;
        if (int s = exterior_on(m, i, r)) out.add_term(r, s > 0 ? v : S(-v));
        if (int s = interior_on(m, i, r)) {
            const bool negate = hatted ? (s < 0) : (s > 0);
            out.add_term(r, negate ? S(-v) : v);
        }
    }
    return out;
}

} // namespace detail

/// Action of a Clifford element on Λ(E*); letters act right to left.
template <Scalar S>
ExteriorForm<S> clifford_apply(const CliffordElement<S>& w, const ExteriorForm<S>& form) {
    require_same_dimension(w.dimension(), form.dimension(), "clifford_apply");
    const int n = w.dimension();
    ExteriorForm<S> out(n);
    for (const auto& [k, v] : w.terms()) {
        ExteriorForm<S> cur = form;
        for (int i = n - 1; i >= 0 && !cur.is_zero(); --i)
            if (k.hatted >> i & 1) cur = detail::apply_letter(cur, i, true);
        for (int i = n - 1; i >= 0 && !cur.is_zero(); --i)
            if (k.plain >> i & 1) cur = detail::apply_letter(cur, i, false);
        out += cur * v;
    }
    return out;
}

/// Tr_s over Λ(E*) with sign (−1)^p on p-forms. Only the full word survives:
/// Tr_s[c_0ĉ_0 ... c_{n-1}ĉ_{n-1}] = (−2)^n.
template <Scalar S>
S supertrace(const CliffordElement<S>& w) {
    const int n = w.dimension();
    S top = w.coefficient({full_mask(n), full_mask(n)});
    if (is_zero(top)) return S(0);
    const int sign_pow = n + n * (n - 1) / 2; // (−1)^n from (−2)^n, and the reordering sign
    S mag(1);
    for (int i = 0; i < n; ++i) mag *= S(2);
    return (sign_pow & 1) ? S(-(top * mag)) : S(top * mag);
}

/// Associated-graded identification e^i ↦ c_i, ê^i ↦ ĉ_i on canonical monomials.
template <Scalar S>
CliffordElement<S> quantize(const BiGradedElement<S>& a) {
    CliffordElement<S> out(a.dimension());
    for (const auto& [k, v] : a.terms()) out.add_term(k, v);
    return out;
}

/// Symbol: image of the top filtration component in the associated graded algebra.
template <Scalar S>
BiGradedElement<S> symbol(const CliffordElement<S>& w) {
    BiGradedElement<S> out(w.dimension());
    const int top = w.filtration_degree();
    for (const auto& [k, v] : w.terms())
        if (k.degree() == top) out.add_term(k, v);
    return out;
}

/// Left multiplication by a bi-graded element, as an operator on Λ ⊗̂ Λ̂ ≅ Λ(ℝ^{2n}).
/// Unhatted index i maps to generator i, hatted index i to generator n + i.
template <Scalar S>
CliffordElement<S> left_multiplication(const BiGradedElement<S>& a) {
    const int n = a.dimension();
    if (2 * n > kMaxDimension) throw InputError("left_multiplication: doubled dimension too large");
    const int m = 2 * n;
    CliffordElement<S> out(m);
    for (const auto& [k, v] : a.terms()) {
        CliffordElement<S> term = CliffordElement<S>::scalar(m, v);
        for (int i = 0; i < n; ++i)
            if (k.plain >> i & 1) term = term * CliffordElement<S>::exterior(m, i);
        for (int i = 0; i < n; ++i)
            if (k.hatted >> i & 1) term = term * CliffordElement<S>::exterior(m, n + i);
        out += term;
    }
    return out;
}

/// ι_{e_i} acting on the unhatted factor of Λ ⊗̂ Λ̂ (as a graded derivation).
template <Scalar S>
CliffordElement<S> unhatted_interior(int n, int i) {
    return CliffordElement<S>::interior(2 * n, i);
}

/// e^i∧ acting on the unhatted factor of Λ ⊗̂ Λ̂.
template <Scalar S>
CliffordElement<S> unhatted_exterior(int n, int i) {
    return CliffordElement<S>::exterior(2 * n, i);
}

} // namespace torsion
