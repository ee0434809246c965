#pragma once

// Operators on Λ(E*) ⊗̂ Λ(Ê*) of the form P_N∘L_A + P_D∘L_B, where L_X is left multiplication
// and P_N = ι_{e_0} e^0∧, P_D = e^0∧ ι_{e_0} are the tangential/normal projections acting on the
// unhatted factor. This is the algebra in which the half-space model kernels take values.

#include "torsion/clifford.hpp"

namespace torsion {

namespace detail {

template <Scalar S>
BiGradedElement<S> without_normal(const BiGradedElement<S>& x) {
    BiGradedElement<S> out(x.dimension());
    for (const auto& [k, v] : x.terms())
        if (!(k.plain & 1u)) out.add_term(k, v);
    return out;
}

template <Scalar S>
BiGradedElement<S> with_normal(const BiGradedElement<S>& x) {
    BiGradedElement<S> out(x.dimension());
    for (const auto& [k, v] : x.terms())
        if (k.plain & 1u) out.add_term(k, v);
    return out;
}

} // namespace detail

/// P_N∘L_A + P_D∘L_B, stored canonically with A free of e^0 (P_N kills e^0∧·).
template <Scalar S>
class BoundaryOperator {
public:
    explicit BoundaryOperator(int n) : tangential_(n), normal_(n) {}
    BoundaryOperator(BiGradedElement<S> tangential, BiGradedElement<S> normal)
        : tangential_(detail::without_normal(tangential)), normal_(std::move(normal)) {
        require_same_dimension(tangential_.dimension(), normal_.dimension(), "BoundaryOperator");
    }

    static BoundaryOperator left(const BiGradedElement<S>& x) { return {x, x}; }
    static BoundaryOperator identity(int n) { return left(BiGradedElement<S>::one(n)); }
    static BoundaryOperator neumann_projection(int n) { return {BiGradedElement<S>::one(n), BiGradedElement<S>(n)}; }
    static BoundaryOperator dirichlet_projection(int n) { return {BiGradedElement<S>(n), BiGradedElement<S>::one(n)}; }

    int dimension() const { return normal_.dimension(); }
    const BiGradedElement<S>& tangential_block() const { return tangential_; }
    const BiGradedElement<S>& normal_block() const { return normal_; }
    bool is_zero() const { return tangential_.is_zero() && normal_.is_zero(); }

    BoundaryOperator& operator+=(const BoundaryOperator& o) {
        tangential_ += o.tangential_;
        normal_ += o.normal_;
        return *this;
    }
    BoundaryOperator& operator-=(const BoundaryOperator& o) {
        tangential_ -= o.tangential_;
        normal_ -= o.normal_;
        return *this;
    }
    BoundaryOperator& operator*=(const S& s) {
        tangential_ *= s;
        normal_ *= s;
        return *this;
    }
    friend BoundaryOperator operator+(BoundaryOperator a, const BoundaryOperator& b) { return a += b; }
    friend BoundaryOperator operator-(BoundaryOperator a, const BoundaryOperator& b) { return a -= b; }
    friend BoundaryOperator operator*(BoundaryOperator a, const S& s) { return a *= s; }
    friend BoundaryOperator operator*(const S& s, BoundaryOperator a) { return a *= s; }
    friend bool operator==(const BoundaryOperator& a, const BoundaryOperator& b) {
        return a.tangential_ == b.tangential_ && a.normal_ == b.normal_;
    }

    // (P_N L_A + P_D L_B)(P_N L_C + P_D L_D) = P_N L_{A C} + P_D L_{B' D + e^0B'' C}, where
    // B = B' + e^0 B'' splits off the e^0-containing part. Uses that L_X commutes with both
    // projections when X is free of e^0, and P_N e^0 = 0, P_D e^0 = e^0, e^0 P_N = e^0.
    friend BoundaryOperator operator*(const BoundaryOperator& a, const BoundaryOperator& b) {
        return {wedge(a.tangential_, b.tangential_),
                wedge(detail::without_normal(a.normal_), b.normal_) + wedge(detail::with_normal(a.normal_), b.tangential_)};
    }

    template <Scalar T>
    BoundaryOperator<T> convert() const {
        return {tangential_.template convert<T>(), normal_.template convert<T>()};
    }

    /// Largest absolute coefficient; a norm on the canonical representation.
    double max_abs() const {
        double m = 0;
        for (const auto& [k, v] : tangential_.terms()) m = std::max(m, std::abs(to_double(v)));
        for (const auto& [k, v] : normal_.terms()) m = std::max(m, std::abs(to_double(v)));
        return m;
    }

    /// The same operator in the Clifford representation on Λ(ℝ^{2n}).
    CliffordElement<S> to_clifford() const {
        const int n = dimension();
        const auto pn = unhatted_interior<S>(n, 0) * unhatted_exterior<S>(n, 0);
        const auto pd = unhatted_exterior<S>(n, 0) * unhatted_interior<S>(n, 0);
        return pn * left_multiplication(tangential_) + pd * left_multiplication(normal_);
    }

private:
    BiGradedElement<S> tangential_;
    BiGradedElement<S> normal_;
};

} // namespace torsion
