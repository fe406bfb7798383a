#pragma once

// The path groupoid: triples (lambda.w, d(lambda)-d(mu), mu.w) with an
// explicit witness (lambda, mu, w), multiplication and inversion, and the
// compact-open basis sets Z(lambda, mu).  Element equality is equality of
// (x, shift, y) as paths, never witness equality: the same element has many
// witnesses, obtained by pushing a head of w into lambda and mu.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "paths.hpp"
#include "topology.hpp"

namespace pathspace {

using Shift = std::vector<std::int64_t>;  // Z^k

inline Shift shift_of(const Degree& dl, const Degree& dm) {
    detail::check_rank(dl.rank(), dm.rank(), "shift");
    Shift s(dl.rank());
    for (std::size_t i = 0; i < dl.rank(); ++i)
        s[i] = static_cast<std::int64_t>(dl[i]) - static_cast<std::int64_t>(dm[i]);
    return s;
}

inline Shift shift_add(const Shift& a, const Shift& b) {
    Shift s(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) s[i] = a[i] + b[i];
    return s;
}

inline Shift shift_neg(const Shift& a) {
    Shift s(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) s[i] = -a[i];
    return s;
}

inline std::string shift_str(const Shift& s) {
    std::string out = "(";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(s[i]);
    }
    return out + ")";
}

struct GroupoidElement {
    Path x;
    Shift shift;
    Path y;
    // witness: x = lambda.w, y = mu.w, shift = d(lambda) - d(mu)
    Morphism wit_lambda;
    Morphism wit_mu;
    Path wit_w;
};

inline GroupoidElement make_element(const KGraph& g, const Morphism& lambda, const Morphism& mu,
                                    const Path& w) {
    if (w.range() != lambda.source() || w.range() != mu.source())
        throw NotComposableError("make_element: r(w) must equal s(lambda) = s(mu)");
    GroupoidElement el;
    el.x = product(g, lambda, w);
    el.y = product(g, mu, w);
    el.shift = shift_of(lambda.degree(), mu.degree());
    el.wit_lambda = lambda;
    el.wit_mu = mu;
    el.wit_w = w;
    return el;
}

inline GroupoidElement unit_element(const KGraph& g, const Path& w) {
    Morphism v = g.vertex_morphism(w.range());
    return make_element(g, v, v, w);
}

inline bool element_eq(const KGraph& g, const GroupoidElement& a, const GroupoidElement& b) {
    return a.shift == b.shift && path_eq(g, a.x, b.x) && path_eq(g, a.y, b.y);
}

inline bool is_unit(const KGraph& g, const GroupoidElement& el) {
    for (auto s : el.shift)
        if (s != 0) return false;
    return path_eq(g, el.x, el.y);
}

inline bool element_defined_pair(const KGraph& g, const GroupoidElement& a,
                                 const GroupoidElement& b) {
    return path_eq(g, a.y, b.x);
}

// (x,n,y)(y,l,z) = (x,n+l,z).  The common witness refines both given
// witnesses over the shared middle path.
inline GroupoidElement compose(const KGraph& g, const GroupoidElement& a,
                               const GroupoidElement& b) {
    if (!element_defined_pair(g, a, b))
        throw NotComposableError("groupoid compose: a.y != b.x");
    const Path& z = a.y;  // == b.x as a point
    Degree p = join(a.wit_mu.degree(), b.wit_lambda.degree());
    Morphism lambda = g.compose(a.wit_lambda, path_segment(g, z, a.wit_mu.degree(), p));
    Morphism mu = g.compose(b.wit_mu, path_segment(g, b.x, b.wit_lambda.degree(), p));
    Path w = path_suffix(g, z, p);
    return make_element(g, lambda, mu, w);
}

inline GroupoidElement invert(const KGraph& g, const GroupoidElement& el) {
    (void)g;
    GroupoidElement out;
    out.x = el.y;
    out.shift = shift_neg(el.shift);
    out.y = el.x;
    out.wit_lambda = el.wit_mu;
    out.wit_mu = el.wit_lambda;
    out.wit_w = el.wit_w;
    return out;
}

// ---------------------------------------------------------------------------
// basis sets

struct BasisSet {
    Morphism lambda;
    Morphism mu;
};

inline BasisSet basis_set(const KGraph& g, Morphism lambda, Morphism mu) {
    (void)g;
    if (lambda.source() != mu.source())
        throw NotComposableError("Z(lambda,mu) requires s(lambda) == s(mu)");
    return BasisSet{std::move(lambda), std::move(mu)};
}

// (x,n,y) in Z(lambda,mu) iff lambda <= x, mu <= y, n = d(lambda)-d(mu),
// and the two tails agree as paths.
inline bool basis_membership(const KGraph& g, const GroupoidElement& el, const BasisSet& Z) {
    if (el.shift != shift_of(Z.lambda.degree(), Z.mu.degree())) return false;
    if (!path_has_prefix(g, el.x, Z.lambda)) return false;
    if (!path_has_prefix(g, el.y, Z.mu)) return false;
    return path_eq(g, path_suffix(g, el.x, Z.lambda.degree()),
                   path_suffix(g, el.y, Z.mu.degree()));
}

// Z(lambda,mu) n Z(lambda2,mu2) as a finite union of basis sets: pairs
// (nu, tau) from E_{lambda,lambda2} x E_{mu,mu2} whose relative tails
// match.  When both extension sets are singletons this is the join formula
// Z(lambda v lambda2, mu v mu2).
inline std::vector<BasisSet> basis_intersection(const KGraph& g, const BasisSet& A,
                                                const BasisSet& B,
                                                std::uint64_t family_limit = 0) {
    std::vector<BasisSet> out;
    if (A.lambda.range() != B.lambda.range() || A.mu.range() != B.mu.range()) return out;
    if (shift_of(A.lambda.degree(), A.mu.degree()) != shift_of(B.lambda.degree(), B.mu.degree()))
        return out;
    std::vector<Morphism> Es = g.common_extensions(A.lambda, B.lambda, family_limit);
    std::vector<Morphism> Et = g.common_extensions(A.mu, B.mu, family_limit);
    for (const Morphism& nu : Es) {
        Morphism rel_nu = g.factorize(nu, A.lambda.degree()).second;
        for (const Morphism& tau : Et) {
            Morphism rel_tau = g.factorize(tau, A.mu.degree()).second;
            if (rel_nu == rel_tau) out.push_back(BasisSet{nu, tau});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// range/source homeomorphism check (bounded)

struct BijectionReport {
    bool pass = true;
    std::uint64_t elements = 0;
    std::string note;
};

// Verifies on the enumerated truncation that w -> (lambda.w, ., mu.w) ->
// lambda.w is a bijection from Z(lambda,mu) onto the cylinder lambda.W, and
// likewise for the mu side.
inline BijectionReport range_source_bijection_check(const KGraph& g, const BasisSet& Z,
                                                    const std::vector<Path>& ws) {
    BijectionReport rep;
    std::vector<Path> images_x, images_y;
    for (const Path& w : ws) {
        if (w.range() != Z.lambda.source()) {
            rep.pass = false;
            rep.note = "fixture path does not start at s(lambda)";
            return rep;
        }
        GroupoidElement el = make_element(g, Z.lambda, Z.mu, w);
        ++rep.elements;
        for (const Path& seen : images_x)
            if (path_eq(g, seen, el.x)) {
                rep.pass = false;
                rep.note = "range map is not injective: duplicated image " + path_str(g, el.x);
                return rep;
            }
        for (const Path& seen : images_y)
            if (path_eq(g, seen, el.y)) {
                rep.pass = false;
                rep.note = "source map is not injective: duplicated image " + path_str(g, el.y);
                return rep;
            }
        images_x.push_back(el.x);
        images_y.push_back(el.y);
    }
    return rep;
}

inline BijectionReport range_source_bijection_check(const KGraph& g, const BasisSet& Z,
                                                    const Degree& bound,
                                                    std::uint64_t family_limit = 0) {
    std::vector<Path> ws = enumerate_Wv(g, Z.lambda.source(), bound, family_limit);
    BijectionReport rep = range_source_bijection_check(g, Z, ws);
    if (!rep.pass) return rep;
    // surjectivity onto the enumerated truncation of lambda.W: every
    // enumerated path extending lambda is hit
    Degree outer = add(bound, Z.lambda.degree());
    for (const Path& x : enumerate_Wv(g, Z.lambda.range(), outer, family_limit)) {
        if (!path_has_prefix(g, x, Z.lambda)) continue;
        Path w = path_suffix(g, x, Z.lambda.degree());
        bool found = false;
        for (const Path& u : ws)
            if (path_eq(g, u, w)) {
                found = true;
                break;
            }
        if (!found) {
            // only degrees within the truncation are in scope
            bool in_scope = leq(w.prefix_morphism().degree(), bound) &&
                            (w.is_finite() ||
                             (w.tail_kind() == TailKind::Cycle &&
                              leq(w.cycle_morphism().degree(),
                                  join(bound, Degree(std::vector<std::uint64_t>(bound.rank(), 1))))));
            if (in_scope) {
                rep.pass = false;
                rep.note = "range map misses " + path_str(g, x);
                return rep;
            }
        }
    }
    return rep;
}

inline std::string element_str(const KGraph& g, const GroupoidElement& el) {
    return "(" + path_str(g, el.x) + ", " + shift_str(el.shift) + ", " + path_str(g, el.y) + ")";
}

}  // namespace pathspace
