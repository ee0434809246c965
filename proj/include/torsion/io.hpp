#pragma once

// Human-diffable file formats: tensor files (plain text or JSON), cochain complex files (JSON),
// torsion values (JSON) and spectra (CSV).

#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "torsion/curvature.hpp"
#include "torsion/r_torsion.hpp"
#include "torsion/spectral.hpp"

namespace torsion {

using Json = nlohmann::ordered_json;

namespace detail {

// Base-10 only: cpp_int's string constructor reads a leading 0 as octal and 0x as hex.
inline boost::multiprecision::cpp_int decimal_integer(const std::string& s) {
    std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (i == s.size()) throw InputError("malformed integer '" + s + "'");
    boost::multiprecision::cpp_int v = 0;
    for (std::size_t k = i; k < s.size(); ++k) {
        if (!std::isdigit(static_cast<unsigned char>(s[k]))) throw InputError("malformed integer '" + s + "'");
        v = v * 10 + (s[k] - '0');
    }
    return s[0] == '-' ? boost::multiprecision::cpp_int(-v) : v;
}

} // namespace detail

/// Exact rational from "p", "p/q", or a decimal such as "-1.25e-3".
inline Rational parse_rational(const std::string& text) {
    auto fail = [&] { return InputError("malformed number '" + text + "'"); };
    const auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            const Rational num(detail::decimal_integer(text.substr(0, slash)));
            const boost::multiprecision::cpp_int den = detail::decimal_integer(text.substr(slash + 1));
            if (den == 0) throw fail();
            return num / Rational(den);
        }
        std::string mant = text;
        long exp10 = 0;
        if (const auto e = text.find_first_of("eE"); e != std::string::npos) {
            mant = text.substr(0, e);
            std::size_t used = 0;
            exp10 = std::stol(text.substr(e + 1), &used);
            if (used != text.size() - e - 1) throw fail();
        }
        std::string digits;
        bool neg = false;
        long frac = 0;
        bool dot = false;
        for (std::size_t i = 0; i < mant.size(); ++i) {
            const char c = mant[i];
            if (i == 0 && (c == '-' || c == '+')) {
                neg = c == '-';
            } else if (c == '.' && !dot) {
                dot = true;
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                digits += c;
                frac += dot;
            } else {
                throw fail();
            }
        }
        if (digits.empty()) throw fail();
        Rational v{detail::decimal_integer(digits)};
        const long shift = exp10 - frac;
        const Rational ten = boost::multiprecision::pow(boost::multiprecision::cpp_int(10), int(std::abs(shift)));
        v = shift >= 0 ? Rational(v * ten) : Rational(v / ten);
        return neg ? Rational(-v) : v;
    } catch (const InputError&) {
        throw fail();
    } catch (const std::exception&) {
        throw fail();
    }
}

template <Scalar S>
S parse_scalar(const std::string& text) {
    if constexpr (is_exact_v<S>) return parse_rational(text);
    else return to_double(parse_rational(text));
}

inline std::string to_string(const Rational& q) { return q.str(); }

/// How listed curvature entries are completed to a full tensor.
enum class TensorSymmetry {
    curvature, ///< pair symmetries applied, first Bianchi identity required
    pair,      ///< pair symmetries applied, no Bianchi requirement
    none,      ///< entries taken literally
};

inline TensorSymmetry tensor_symmetry_from_string(const std::string& s) {
    if (s == "curvature") return TensorSymmetry::curvature;
    if (s == "pair") return TensorSymmetry::pair;
    if (s == "none") return TensorSymmetry::none;
    throw InputError("unknown symmetry class '" + s + "' (expected curvature, pair or none)");
}

inline const char* to_string(TensorSymmetry s) {
    switch (s) {
    case TensorSymmetry::curvature: return "curvature";
    case TensorSymmetry::pair: return "pair";
    case TensorSymmetry::none: return "none";
    }
    return "?";
}

/// A tensor file before completion: raw entries as written.
struct TensorFile {
    int dimension = 0;
    TensorSymmetry symmetry = TensorSymmetry::curvature;
    std::vector<std::pair<std::array<int, 4>, std::string>> riemann;
    std::vector<std::pair<std::array<int, 2>, std::string>> h;
};

namespace detail {

inline std::string json_number_text(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return v.dump();
    throw InputError("tensor entry value must be a number or a \"p/q\" string");
}

inline int json_index(const Json& v) {
    if (!v.is_number_integer()) throw InputError("tensor index must be an integer");
    return v.get<int>();
}

inline TensorFile tensor_file_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("dimension")) throw InputError("tensor file needs a 'dimension' field");
    TensorFile f;
    f.dimension = j.at("dimension").get<int>();
    if (j.contains("symmetry")) f.symmetry = tensor_symmetry_from_string(j.at("symmetry").get<std::string>());
    for (const auto& e : j.value("R", Json::array())) {
        if (!e.is_array() || e.size() != 5) throw InputError("R entries are [i, j, k, l, value]");
        f.riemann.push_back({{json_index(e[0]), json_index(e[1]), json_index(e[2]), json_index(e[3])}, json_number_text(e[4])});
    }
    for (const auto& e : j.value("h", Json::array())) {
        if (!e.is_array() || e.size() != 3) throw InputError("h entries are [a, b, value]");
        f.h.push_back({{json_index(e[0]), json_index(e[1])}, json_number_text(e[2])});
    }
    return f;
}

inline TensorFile tensor_file_from_text(const std::string& text) {
    TensorFile f;
    bool have_dim = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        auto where = [&] { return " (line " + std::to_string(lineno) + ")"; };
        auto index = [&](const std::string& s) {
            try {
                std::size_t used = 0;
                const int v = std::stoi(s, &used);
                if (used == s.size()) return v;
            } catch (const std::exception&) {
            }
            throw InputError("malformed index '" + s + "'" + where());
        };
        if (tok[0] == "dimension" && tok.size() == 2) {
            f.dimension = index(tok[1]);
            have_dim = true;
        } else if (tok[0] == "symmetry" && tok.size() == 2) {
            f.symmetry = tensor_symmetry_from_string(tok[1]);
        } else if (tok[0] == "R" && tok.size() == 6) {
            f.riemann.push_back({{index(tok[1]), index(tok[2]), index(tok[3]), index(tok[4])}, tok[5]});
        } else if (tok[0] == "h" && tok.size() == 4) {
            f.h.push_back({{index(tok[1]), index(tok[2])}, tok[3]});
        } else {
            throw InputError("unrecognized tensor line" + where());
        }
    }
    if (!have_dim) throw InputError("tensor file needs a 'dimension' line");
    return f;
}

} // namespace detail

inline TensorFile parse_tensor_file(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        Json j;
        try {
            j = Json::parse(text);
        } catch (const Json::exception& e) {
            throw InputError(std::string("malformed tensor JSON: ") + e.what());
        }
        try {
            return detail::tensor_file_from_json(j);
        } catch (const Json::exception& e) {
            throw InputError(std::string("malformed tensor JSON: ") + e.what());
        }
    }
    return detail::tensor_file_from_text(text);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Complete a tensor file. Unlisted entries are 0; an entry listed twice (directly or through its
/// symmetry orbit) with different values is an error.
template <Scalar S>
CurvatureData<S> build_curvature(const TensorFile& f) {
    if (f.dimension < 1 || f.dimension > 8) throw InputError("tensor dimension must be in 1..8");
    const int n = f.dimension;
    CurvatureData<S> cd(n);
    std::vector<char> set_r(cd.riemann.size(), 0);
    auto flat = [n](int i, int j, int k, int l) { return ((std::size_t(i) * n + j) * n + k) * n + l; };
    auto check_range = [n](int i) {
        if (i < 0 || i >= n) throw InputError("tensor index " + std::to_string(i) + " out of range");
    };
    auto assign = [&](int i, int j, int k, int l, const S& v) {
        const std::size_t at = flat(i, j, k, l);
        if (set_r[at] && cd.riemann[at] != v)
            throw InputError("inconsistent duplicate for R(" + std::to_string(i) + "," + std::to_string(j) + "," +
                             std::to_string(k) + "," + std::to_string(l) + ")");
        cd.riemann[at] = v;
        set_r[at] = 1;
    };
    for (const auto& [idx, text] : f.riemann) {
        const auto [i, j, k, l] = idx;
        for (int x : idx) check_range(x);
        const S v = parse_scalar<S>(text);
        if (f.symmetry == TensorSymmetry::none) {
            assign(i, j, k, l, v);
            continue;
        }
        const S mv = -v;
        assign(i, j, k, l, v);
        assign(j, i, k, l, mv);
        assign(i, j, l, k, mv);
        assign(j, i, l, k, v);
        assign(k, l, i, j, v);
        assign(l, k, i, j, mv);
        assign(k, l, j, i, mv);
        assign(l, k, j, i, v);
    }
    std::vector<char> set_h(cd.second_fundamental.size(), 0);
    for (const auto& [idx, text] : f.h) {
        const auto [a, b] = idx;
        check_range(a);
        check_range(b);
        if (a == 0 || b == 0) throw InputError("h is tangential: indices must be in 1..n-1");
        const S v = parse_scalar<S>(text);
        for (const auto& [p, q] : {std::pair{a, b}, std::pair{b, a}}) {
            const std::size_t at = std::size_t(p) * n + q;
            if (set_h[at] && cd.second_fundamental[at] != v)
                throw InputError("inconsistent duplicate for h(" + std::to_string(a) + "," + std::to_string(b) + ")");
            cd.second_fundamental[at] = v;
            set_h[at] = 1;
        }
    }
    if (f.symmetry == TensorSymmetry::curvature) {
        const double tol = is_exact_v<S> ? 0.0 : 1e-12;
        if (cd.bianchi_residual() > tol) throw InputError("tensor violates the first Bianchi identity");
    }
    return cd;
}

template <Scalar S>
CurvatureData<S> read_tensor(const std::string& path) {
    return build_curvature<S>(parse_tensor_file(read_text_file(path)));
}

/// Matrix as a list of rows of "p/q" strings.
inline Json to_json(const RationalMatrix& m) {
    Json rows = Json::array();
    for (int r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(to_string(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

inline Json to_json(const TorsionValue& v) {
    Json j;
    j["log_tau"] = v.log_tau;
    j["rational_part"] = to_string(v.rational_part);
    j["scale_part"] = v.scale_part;
    j["exact"] = v.exact;
    j["convention"] = to_string(v.convention);
    j["provenance"] = v.provenance;
    return j;
}

namespace detail {

inline Rational json_rational(const Json& v) {
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number()) return parse_rational(v.dump());
    throw InputError("matrix entries must be integers, decimals or \"p/q\" strings");
}

} // namespace detail

/// JSON complex file:
///   {"name": str, "dims": [n_0, ...], "representation_rank": int,
///    "coboundaries": [{"degree": p, "entries": [[row, col, value], ...]}, ...],
///    "cohomology": [{"degree": p, "basis": [[v_0, ..., v_{n_p - 1}], ...], "log_scale": x}, ...]}
/// Coboundary p maps C^p to C^{p+1}; omitted coboundaries are zero and omitted cohomology is empty.
inline BasedCochainComplex complex_from_json(const Json& j) {
    try {
        BasedCochainComplex cx;
        cx.name = j.value("name", std::string("complex"));
        cx.dims = j.at("dims").get<std::vector<int>>();
        if (cx.dims.empty()) throw InputError("complex has no degrees");
        for (int d : cx.dims)
            if (d < 0) throw InputError("negative cell count");
        cx.representation_rank = j.value("representation_rank", 1);
        for (int p = 0; p < cx.top(); ++p) cx.d.emplace_back(cx.dims[p + 1], cx.dims[p]);
        for (int p = 0; p <= cx.top(); ++p) cx.cohomology.push_back({RationalMatrix(cx.dims[p], 0), 0});
        auto degree_of = [&](const Json& e, int hi) {
            const int p = e.at("degree").get<int>();
            if (p < 0 || p > hi) throw InputError("degree " + std::to_string(p) + " out of range");
            return p;
        };
        for (const auto& b : j.value("coboundaries", Json::array())) {
            const int p = degree_of(b, cx.top() - 1);
            for (const auto& e : b.at("entries")) {
                if (!e.is_array() || e.size() != 3) throw InputError("coboundary entries are [row, col, value]");
                const int r = e[0].get<int>(), c = e[1].get<int>();
                if (r < 0 || r >= cx.dims[p + 1] || c < 0 || c >= cx.dims[p])
                    throw InputError("coboundary entry out of range in degree " + std::to_string(p));
                cx.d[p](r, c) = detail::json_rational(e[2]);
            }
        }
        for (const auto& h : j.value("cohomology", Json::array())) {
            const int p = degree_of(h, cx.top());
            const auto& basis = h.at("basis");
            RationalMatrix m(cx.dims[p], int(basis.size()));
            for (int c = 0; c < int(basis.size()); ++c) {
                if (int(basis[c].size()) != cx.dims[p])
                    throw InputError("cohomology vector of degree " + std::to_string(p) + " has the wrong length");
                for (int r = 0; r < cx.dims[p]; ++r) m(r, c) = detail::json_rational(basis[c][r]);
            }
            cx.cohomology[p] = {m, h.value("log_scale", 0.0)};
        }
        cx.validate();
        return cx;
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed complex file: ") + e.what());
    }
}

inline Json to_json(const BasedCochainComplex& cx) {
    Json j;
    j["name"] = cx.name;
    j["dims"] = cx.dims;
    j["representation_rank"] = cx.representation_rank;
    Json cob = Json::array();
    for (int p = 0; p < cx.top(); ++p) {
        Json entries = Json::array();
        for (int r = 0; r < cx.d[p].rows(); ++r)
            for (int c = 0; c < cx.d[p].cols(); ++c)
                if (cx.d[p](r, c) != 0) entries.push_back(Json::array({r, c, to_string(cx.d[p](r, c))}));
        cob.push_back({{"degree", p}, {"entries", entries}});
    }
    j["coboundaries"] = cob;
    Json coh = Json::array();
    for (int p = 0; p <= cx.top(); ++p) {
        const auto& m = cx.cohomology[p].cocycles;
        Json basis = Json::array();
        for (int c = 0; c < m.cols(); ++c) {
            Json v = Json::array();
            for (int r = 0; r < m.rows(); ++r) v.push_back(to_string(m(r, c)));
            basis.push_back(v);
        }
        coh.push_back({{"degree", p}, {"basis", basis}, {"log_scale", cx.cohomology[p].log_scale}});
    }
    j["cohomology"] = coh;
    return j;
}

inline BasedCochainComplex read_complex(const std::string& path) {
    try {
        return complex_from_json(Json::parse(read_text_file(path)));
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed complex file: ") + e.what());
    }
}

/// CSV "lambda,multiplicity,degree" with the first `terms` eigenvalues of every degree.
inline void write_spectrum_csv(std::ostream& out, const ModelSpectrum& s, int terms) {
    out << "lambda,multiplicity,degree\n";
    out.precision(17);
    for (int p = 0; p <= s.top_degree; ++p) {
        if (p < int(s.zero_modes.size()) && s.zero_modes[p]) out << 0 << ',' << s.zero_modes[p] << ',' << p << '\n';
        for (const auto& e : s.listing(p, terms)) out << e.lambda << ',' << e.multiplicity << ',' << e.degree << '\n';
    }
}

} // namespace torsion
