#pragma once

// Reidemeister torsion of finite based cochain complexes over ℚ, with cohomology bases given
// as rational cocycles times a real scale per degree (the harmonic identification).

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "torsion/error.hpp"
#include "torsion/scalar.hpp"
#include "torsion/spectral.hpp"

namespace torsion {

/// Dense rational matrix, row-major.
class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(std::size_t(rows) * cols, Rational(0)) {
        if (rows < 0 || cols < 0) throw DimensionMismatch("negative matrix size");
    }

    static RationalMatrix identity(int n) {
        RationalMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Rational& operator()(int r, int c) { return data_[std::size_t(r) * cols_ + c]; }
    const Rational& operator()(int r, int c) const { return data_[std::size_t(r) * cols_ + c]; }

    RationalMatrix column(int c) const {
        RationalMatrix out(rows_, 1);
        for (int r = 0; r < rows_; ++r) out(r, 0) = (*this)(r, c);
        return out;
    }

    bool is_zero() const {
        for (const auto& v : data_)
            if (v != 0) return false;
        return true;
    }

    friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
        if (a.cols_ != b.rows_) throw DimensionMismatch("matrix product: inner dimensions differ");
        RationalMatrix out(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                const Rational& x = a(i, k);
                if (x == 0) continue;
                for (int j = 0; j < b.cols_; ++j) out(i, j) += x * b(k, j);
            }
        return out;
    }
    friend RationalMatrix operator+(RationalMatrix a, const RationalMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionMismatch("matrix sum: shapes differ");
        for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
        return a;
    }
    friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    /// Columns side by side.
    static RationalMatrix hstack(const std::vector<RationalMatrix>& blocks, int rows) {
        int cols = 0;
        for (const auto& b : blocks) {
            if (b.cols_ && b.rows_ != rows) throw DimensionMismatch("hstack: row counts differ");
            cols += b.cols_;
        }
        RationalMatrix out(rows, cols);
        int c0 = 0;
        for (const auto& b : blocks) {
            for (int r = 0; r < b.rows_; ++r)
                for (int c = 0; c < b.cols_; ++c) out(r, c0 + c) = b(r, c);
            c0 += b.cols_;
        }
        return out;
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<Rational> data_;
};

/// Exact determinant by fraction-exact Gaussian elimination.
inline Rational determinant(RationalMatrix m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("determinant of a non-square matrix");
    const int n = m.rows();
    Rational det = 1;
    for (int c = 0; c < n; ++c) {
        int p = c;
        while (p < n && m(p, c) == 0) ++p;
        if (p == n) return 0;
        if (p != c) {
            for (int j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
            det = -det;
        }
        det *= m(c, c);
        for (int r = c + 1; r < n; ++r) {
            if (m(r, c) == 0) continue;
            const Rational f = m(r, c) / m(c, c);
            for (int j = c; j < n; ++j) m(r, j) -= f * m(c, j);
        }
    }
    return det;
}

/// Indices of the pivot columns of m (a maximal independent set of columns, greedy from the left).
inline std::vector<int> pivot_columns(RationalMatrix m) {
    std::vector<int> pivots;
    int row = 0;
    for (int c = 0; c < m.cols() && row < m.rows(); ++c) {
        int p = row;
        while (p < m.rows() && m(p, c) == 0) ++p;
        if (p == m.rows()) continue;
        for (int j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
        for (int r = row + 1; r < m.rows(); ++r) {
            if (m(r, c) == 0) continue;
            const Rational f = m(r, c) / m(row, c);
            for (int j = c; j < m.cols(); ++j) m(r, j) -= f * m(row, j);
        }
        pivots.push_back(c);
        ++row;
    }
    return pivots;
}

inline int rank(const RationalMatrix& m) { return int(pivot_columns(m).size()); }

/// Cohomology basis of one degree: columns of `cocycles` scaled by e^{log_scale}.
struct CohomologyBasis {
    RationalMatrix cocycles;
    double log_scale = 0;
};

/// 0 → C^0 → C^1 → ... → C^top → 0 with cell bases, coboundaries d[p] : C^p → C^{p+1}, and a
/// cohomology basis per degree. The complex already includes the representation: for rank ρ > 1
/// it is the direct sum of the twisted complexes of the characters.
struct BasedCochainComplex {
    std::string name;
    std::vector<int> dims;
    std::vector<RationalMatrix> d;
    std::vector<CohomologyBasis> cohomology;
    int representation_rank = 1;

    int top() const { return int(dims.size()) - 1; }

    /// ∂² = 0 exactly, shapes, and cocycle conditions.
    void validate() const {
        if (dims.empty()) throw InputError("complex has no degrees");
        if (int(d.size()) != top()) throw InputError("complex needs one coboundary per consecutive degree pair");
        if (int(cohomology.size()) != int(dims.size())) throw InputError("complex needs a cohomology basis per degree");
        for (int p = 0; p < top(); ++p)
            if (d[p].rows() != dims[p + 1] || d[p].cols() != dims[p])
                throw DimensionMismatch("coboundary " + std::to_string(p) + " has the wrong shape");
        for (int p = 0; p + 1 < top(); ++p)
            if (!(d[p + 1] * d[p]).is_zero()) throw InputError("coboundaries do not square to zero");
        for (int p = 0; p <= top(); ++p) {
            const auto& h = cohomology[p].cocycles;
            if (h.cols() && h.rows() != dims[p]) throw DimensionMismatch("cohomology basis of degree " + std::to_string(p) + " has the wrong length");
            if (p < top() && h.cols() && !(d[p] * h).is_zero())
                throw InputError("cohomology basis of degree " + std::to_string(p) + " is not closed");
        }
    }
};

enum class TorsionConvention {
    milnor,  ///< ln τ = Σ_p (-1)^p ln|det[d b̃_{p-1}, h_p, b̃_p]|
    squared, ///< twice the above; matches ζ_T without the factor ½
};

inline const char* to_string(TorsionConvention c) { return c == TorsionConvention::milnor ? "milnor" : "squared"; }

struct TorsionValue {
    double log_tau = 0;
    /// Π_p det_p^{(-1)^p} of the rational parts (exact).
    Rational rational_part = 1;
    /// Σ_p (-1)^p dim H^p log_scale_p.
    double scale_part = 0;
    bool exact = true; ///< all cohomology scales are 1
    TorsionConvention convention = TorsionConvention::squared;
    std::string provenance;
};

/// Basis lifts: for each degree p < top, a matrix whose columns are preimages in C^p of a basis
/// of im d[p]. Defaults to the pivot cell vectors.
using Lifts = std::vector<RationalMatrix>;

inline Lifts default_lifts(const BasedCochainComplex& cx) {
    Lifts lifts;
    for (int p = 0; p < cx.top(); ++p) {
        const auto piv = pivot_columns(cx.d[p]);
        RationalMatrix l(cx.dims[p], int(piv.size()));
        for (int j = 0; j < int(piv.size()); ++j) l(piv[j], j) = 1;
        lifts.push_back(l);
    }
    return lifts;
}

/// det_p = det[d lifts_{p-1} | h_p | lifts_p] for every degree.
inline std::vector<Rational> torsion_determinants(const BasedCochainComplex& cx, const Lifts& lifts) {
    cx.validate();
    if (int(lifts.size()) != cx.top()) throw InputError("one lift matrix per coboundary is required");
    std::vector<Rational> dets;
    for (int p = 0; p <= cx.top(); ++p) {
        std::vector<RationalMatrix> blocks;
        if (p > 0) blocks.push_back(cx.d[p - 1] * lifts[p - 1]);
        blocks.push_back(cx.cohomology[p].cocycles);
        if (p < cx.top()) {
            if (rank(cx.d[p] * lifts[p]) != rank(cx.d[p]) || lifts[p].cols() != rank(cx.d[p]))
                throw InputError("lifts of degree " + std::to_string(p) + " do not map onto a basis of the image");
            blocks.push_back(lifts[p]);
        }
        const RationalMatrix m = RationalMatrix::hstack(blocks, cx.dims[p]);
        if (m.cols() != cx.dims[p])
            throw InputError("cohomology basis of degree " + std::to_string(p) + " has the wrong number of vectors");
        const Rational det = determinant(m);
        if (det == 0) throw InputError("cohomology basis of degree " + std::to_string(p) + " is rank-deficient");
        dets.push_back(det);
    }
    return dets;
}

inline TorsionValue r_torsion(const BasedCochainComplex& cx, TorsionConvention conv = TorsionConvention::squared,
                              const std::optional<Lifts>& lifts = std::nullopt) {
    const auto dets = torsion_determinants(cx, lifts ? *lifts : default_lifts(cx));
    TorsionValue v;
    v.convention = conv;
    v.provenance = cx.name;
    double log_abs = 0;
    for (int p = 0; p <= cx.top(); ++p) {
        const Rational a = abs(dets[p]);
        v.rational_part = (p % 2) ? Rational(v.rational_part / a) : Rational(v.rational_part * a);
        log_abs += ((p % 2) ? -1 : 1) * std::log(to_double(a));
        const double s = cx.cohomology[p].cocycles.cols() * cx.cohomology[p].log_scale;
        v.scale_part += ((p % 2) ? -1 : 1) * s;
        if (cx.cohomology[p].log_scale != 0 && cx.cohomology[p].cocycles.cols()) v.exact = false;
    }
    const double factor = conv == TorsionConvention::squared ? 2 : 1;
    v.log_tau = factor * (log_abs + v.scale_part);
    return v;
}

/// χ = Σ_p (-1)^p dim C^p (the cell counts times rank ρ).
inline int euler_characteristic(const BasedCochainComplex& cx) {
    int chi = 0;
    for (int p = 0; p <= cx.top(); ++p) chi += (p % 2 ? -1 : 1) * cx.dims[p];
    return chi;
}

/// Direct sum of complexes of equal top degree.
inline BasedCochainComplex direct_sum(const BasedCochainComplex& a, const BasedCochainComplex& b) {
    if (a.top() != b.top()) throw DimensionMismatch("direct sum of complexes of different length");
    BasedCochainComplex out;
    out.name = a.name + "+" + b.name;
    out.representation_rank = a.representation_rank + b.representation_rank;
    auto block = [](const RationalMatrix& x, const RationalMatrix& y) {
        RationalMatrix m(x.rows() + y.rows(), x.cols() + y.cols());
        for (int r = 0; r < x.rows(); ++r)
            for (int c = 0; c < x.cols(); ++c) m(r, c) = x(r, c);
        for (int r = 0; r < y.rows(); ++r)
            for (int c = 0; c < y.cols(); ++c) m(x.rows() + r, x.cols() + c) = y(r, c);
        return m;
    };
    for (int p = 0; p <= a.top(); ++p) {
        out.dims.push_back(a.dims[p] + b.dims[p]);
        const auto& ha = a.cohomology[p];
        const auto& hb = b.cohomology[p];
        if (ha.cocycles.cols() && hb.cocycles.cols() && ha.log_scale != hb.log_scale)
            throw InputError("direct sum needs equal cohomology scales per degree");
        RationalMatrix h = block(ha.cocycles, hb.cocycles);
        out.cohomology.push_back({h, ha.cocycles.cols() ? ha.log_scale : hb.log_scale});
    }
    for (int p = 0; p < a.top(); ++p) out.d.push_back(block(a.d[p], b.d[p]));
    return out;
}

/// A metric graph that is a path or a cycle: edge e runs from vertex e to vertex e+1 (mod the
/// vertex count for cycles). The character ε = ±1 is the holonomy, carried by the last edge.
struct OneComplex {
    bool cycle = false;
    bool relative = false; ///< paths only: cochains vanishing on the two end vertices
    std::vector<Rational> lengths;
    int holonomy = 1;

    int edges() const { return int(lengths.size()); }
    int vertices() const { return cycle ? edges() : edges() + 1; }
    Rational total_length() const {
        Rational s = 0;
        for (const auto& l : lengths) s += l;
        return s;
    }
};

inline OneComplex path_complex(const Rational& length, int edges = 1, bool relative = false) {
    if (edges < 1) throw InputError("a path needs at least one edge");
    if (length <= 0) throw InputError("path length must be positive");
    return {false, relative, std::vector<Rational>(std::size_t(edges), length / edges), 1};
}

inline OneComplex cycle_complex(const Rational& length, int edges = 1, int holonomy = 1) {
    if (edges < 1) throw InputError("a cycle needs at least one edge");
    if (length <= 0) throw InputError("cycle length must be positive");
    if (holonomy != 1 && holonomy != -1) throw InputError("holonomy must be +1 or -1");
    return {true, false, std::vector<Rational>(std::size_t(edges), length / edges), holonomy};
}

/// Each edge split at its midpoint; the holonomy stays on the last edge.
inline OneComplex subdivide(const OneComplex& c) {
    OneComplex out = c;
    out.lengths.clear();
    for (const auto& l : c.lengths) {
        out.lengths.push_back(l / 2);
        out.lengths.push_back(l / 2);
    }
    return out;
}

/// Based cochain complex with the harmonic identification of the metric graph: the L²-unit
/// flat section 1/√L in degree 0 (absolute, untwisted) and the unit harmonic 1-form dx/√L,
/// whose de Rham cocycle is ℓ_e/√L, in degree 1 (relative paths, untwisted cycles).
inline BasedCochainComplex based_complex(const OneComplex& c) {
    if (c.relative && c.cycle) throw InputError("relative cochains are defined for paths only");
    BasedCochainComplex cx;
    cx.name = c.cycle ? "cycle" : (c.relative ? "path-relative" : "path-absolute");
    const int V = c.vertices(), E = c.edges();
    // Active vertices: relative paths drop the two ends.
    std::vector<int> index(std::size_t(V), -1);
    int nv = 0;
    for (int v = 0; v < V; ++v)
        if (!(c.relative && (v == 0 || v == V - 1))) index[v] = nv++;
    RationalMatrix d(E, nv);
    for (int e = 0; e < E; ++e) {
        const int tail = e, head = (e + 1) % V;
        const Rational rho = (c.cycle && e == E - 1) ? Rational(c.holonomy) : Rational(1);
        if (index[head] >= 0) d(e, index[head]) += rho;
        if (index[tail] >= 0) d(e, index[tail]) -= 1;
    }
    cx.dims = {nv, E};
    cx.d = {d};
    const double log_scale = -0.5 * std::log(to_double(c.total_length()));
    const bool twisted = c.cycle && c.holonomy == -1;
    CohomologyBasis h0{RationalMatrix(nv, 0), 0}, h1{RationalMatrix(E, 0), 0};
    if (!c.relative && !twisted) {
        h0.cocycles = RationalMatrix(nv, 1);
        for (int v = 0; v < nv; ++v) h0.cocycles(v, 0) = 1;
        h0.log_scale = log_scale;
    }
    if ((c.relative || c.cycle) && !twisted) {
        h1.cocycles = RationalMatrix(E, 1);
        for (int e = 0; e < E; ++e) h1.cocycles(e, 0) = c.lengths[e];
        h1.log_scale = log_scale;
    }
    cx.cohomology = {h0, h1};
    return cx;
}

/// Interval [0, L] split into `edges` equal edges with absolute or relative cochains; rank ρ
/// copies of the trivial character.
inline BasedCochainComplex interval_complex(double L, BoundaryCondition bc, int edges = 1, int rank = 1) {
    if (!(L > 0)) throw InputError("interval length must be positive");
    if (rank < 1) throw InputError("representation rank must be positive");
    BasedCochainComplex cx = based_complex(path_complex(Rational(L), edges, bc == BoundaryCondition::relative));
    for (int r = 1; r < rank; ++r) cx = direct_sum(cx, based_complex(path_complex(Rational(L), edges, bc == BoundaryCondition::relative)));
    return cx;
}

/// ln T - ln τ for the interval family, with T from its spectrum and τ in the squared convention.
struct SpectralAnomaly {
    double length = 0;
    BoundaryCondition bc = BoundaryCondition::absolute;
    int rank = 1;
    double log_T = 0;
    double log_tau = 0;
    double anomaly = 0;
};

inline SpectralAnomaly spectral_anomaly(double L, BoundaryCondition bc, const TorsionValue& tau, int rank = 1) {
    if (tau.convention != TorsionConvention::squared)
        throw InputError("the spectral comparison uses the squared torsion convention");
    SpectralAnomaly a;
    a.length = L;
    a.bc = bc;
    a.rank = rank;
    a.log_T = rank * zeta_torsion(interval_spectrum(L, bc)).log_torsion;
    a.log_tau = tau.log_tau;
    a.anomaly = a.log_T - a.log_tau;
    return a;
}

inline SpectralAnomaly interval_anomaly(double L, BoundaryCondition bc, int rank = 1, int edges = 1) {
    return spectral_anomaly(L, bc, r_torsion(interval_complex(L, bc, edges, rank)), rank);
}

/// Random invertible rational matrix with small integer entries (for basis-change checks).
inline RationalMatrix random_invertible(int n, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dist(-4, 4);
    for (;;) {
        RationalMatrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = Rational(dist(rng), 1 + (dist(rng) + 4) % 3);
        if (determinant(m) != 0) return m;
    }
}

} // namespace torsion
