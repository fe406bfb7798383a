#pragma once

// Finite and infinite paths.  An N-path is the coherent family of its
// initial segments; a finite path is identified with its top morphism.
// Infinite paths are represented symbolically by a finite prefix plus a
// tail rule:
//
//   Cycle - a cycle morphism repeated forever (any rank);
//   Ramp  - one-graph only: tail edge j (j = 1,2,...) is fam[stride*j +
//           offset] with stride >= 1.  Ramps are the limits of sequences
//           like 1,12,123,... and are never produced by enumerate_Wv.
//
// This symbolic class keeps equality, prefixes and convergence decidable.

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "kgraph.hpp"

namespace pathspace {

enum class TailKind { None, Cycle, Ramp };

class Path {
public:
    Path() = default;

    static Path finite(Morphism m) {
        Path p;
        p.prefix_ = std::move(m);
        return p;
    }

    static Path infinite(const KGraph& g, Morphism prefix, Morphism cycle) {
        if (cycle.is_vertex()) throw ParseError("infinite path: tail cycle must be non-trivial");
        if (cycle.range() != cycle.source())
            throw ParseError("infinite path: tail must be a cycle (r(c) == s(c))");
        if (prefix.source() != cycle.range())
            throw NotComposableError("infinite path: s(prefix) != r(cycle)");
        (void)g;
        Path p;
        p.prefix_ = std::move(prefix);
        p.tail_ = TailKind::Cycle;
        p.cycle_ = std::move(cycle);
        return p;
    }

    static Path ramp(const KGraph& g, Morphism prefix, std::uint32_t family,
                     std::uint64_t stride, std::uint64_t offset) {
        if (g.rank() != 1) throw ParseError("ramp tails exist only in one-graphs");
        if (family >= g.families().size()) throw ParseError("ramp: unknown family");
        const auto& fam = g.families()[family];
        if (!fam.infinite) throw ParseError("ramp: family must be N-indexed");
        if (fam.src != fam.dst || fam.src != prefix.source())
            throw NotComposableError("ramp: family must be a loop family at s(prefix)");
        if (stride == 0) throw ParseError("ramp: stride must be >= 1");
        Path p;
        p.prefix_ = std::move(prefix);
        p.tail_ = TailKind::Ramp;
        p.ramp_family_ = family;
        p.ramp_stride_ = stride;
        p.ramp_offset_ = offset;
        return p;
    }

    bool is_finite() const { return tail_ == TailKind::None; }
    TailKind tail_kind() const { return tail_; }
    const Morphism& prefix_morphism() const { return prefix_; }
    const Morphism& cycle_morphism() const { return cycle_; }
    std::uint32_t ramp_family() const { return ramp_family_; }
    std::uint64_t ramp_stride() const { return ramp_stride_; }
    std::uint64_t ramp_offset() const { return ramp_offset_; }

    VertexId range() const { return prefix_.range(); }

    // N: infinite exactly in the coordinates where the tail makes progress.
    ExtDegree extdegree() const {
        std::vector<ExtNat> coords(prefix_.degree().rank());
        for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = prefix_.degree()[i];
        if (tail_ == TailKind::Cycle) {
            for (std::size_t i = 0; i < coords.size(); ++i)
                if (cycle_.degree()[i] > 0) coords[i] = ExtNat::infinity();
        } else if (tail_ == TailKind::Ramp) {
            coords[0] = ExtNat::infinity();
        }
        return ExtDegree(std::move(coords));
    }

private:
    Morphism prefix_;
    TailKind tail_ = TailKind::None;
    Morphism cycle_;
    std::uint32_t ramp_family_ = 0;
    std::uint64_t ramp_stride_ = 1;
    std::uint64_t ramp_offset_ = 0;
};

// ---------------------------------------------------------------------------
// prefixes and segments

namespace detail {
// Unroll enough tail copies that the explicit part reaches degree m.
inline Morphism unrolled_head(const KGraph& g, const Path& w, const Degree& m) {
    const Morphism& p = w.prefix_morphism();
    if (w.tail_kind() == TailKind::Cycle) {
        std::uint64_t copies = 0;
        const Degree& dc = w.cycle_morphism().degree();
        for (std::size_t i = 0; i < m.rank(); ++i) {
            if (m[i] <= p.degree()[i]) continue;
            std::uint64_t need = m[i] - p.degree()[i];
            std::uint64_t per = dc[i];
            if (per == 0) throw FactorizationError("degree exceeds N in a finite coordinate");
            copies = std::max(copies, (need + per - 1) / per);
        }
        Morphism head = p;
        for (std::uint64_t t = 0; t < copies; ++t) head = g.compose(head, w.cycle_morphism());
        return head;
    }
    // Ramp (rank 1): append explicit family edges.
    std::uint64_t have = p.degree()[0];
    Morphism head = p;
    for (std::uint64_t j = 1; have < m[0]; ++j, ++have) {
        head = g.compose(head, g.family_edge(g.families()[w.ramp_family()].name,
                                             w.ramp_stride() * j + w.ramp_offset()));
    }
    return head;
}
}  // namespace detail

// The unique degree-m initial segment lambda_m.
inline Morphism path_prefix(const KGraph& g, const Path& w, const Degree& m) {
    if (!leq(ExtDegree(m), w.extdegree()))
        throw FactorizationError("prefix: " + m.str() + " is not <= N = " + w.extdegree().str());
    if (w.is_finite()) return g.factorize(w.prefix_morphism(), m).first;
    return g.factorize(detail::unrolled_head(g, w, m), m).first;
}

// x(m,n): the unique segment with prefix(n) = prefix(m).x(m,n).
inline Morphism path_segment(const KGraph& g, const Path& w, const Degree& m, const Degree& n) {
    if (!leq(m, n)) throw FactorizationError("segment: m must be <= n");
    return g.factorize(path_prefix(g, w, n), m).second;
}

// The path left after removing the degree-m initial segment.
inline Path path_suffix(const KGraph& g, const Path& w, const Degree& m) {
    if (!leq(ExtDegree(m), w.extdegree()))
        throw FactorizationError("suffix: " + m.str() + " is not <= N = " + w.extdegree().str());
    switch (w.tail_kind()) {
        case TailKind::None:
            return Path::finite(g.factorize(w.prefix_morphism(), m).second);
        case TailKind::Cycle: {
            Morphism head = detail::unrolled_head(g, w, m);
            return Path::infinite(g, g.factorize(head, m).second, w.cycle_morphism());
        }
        case TailKind::Ramp: {
            std::uint64_t plen = w.prefix_morphism().degree()[0];
            if (m[0] <= plen) {
                return Path::ramp(g, g.factorize(w.prefix_morphism(), m).second, w.ramp_family(),
                                  w.ramp_stride(), w.ramp_offset());
            }
            std::uint64_t eaten = m[0] - plen;  // tail edges consumed
            VertexId at = g.families()[w.ramp_family()].src;
            return Path::ramp(g, g.vertex_morphism(at), w.ramp_family(), w.ramp_stride(),
                              w.ramp_offset() + w.ramp_stride() * eaten);
        }
    }
    throw Error("unreachable");
}

// ---------------------------------------------------------------------------
// products

// yw for finite y; the result keeps w's tail rule.
inline Path product(const KGraph& g, const Morphism& y, const Path& w) {
    if (y.source() != w.range()) throw NotComposableError("product: s(y) != r(w)");
    switch (w.tail_kind()) {
        case TailKind::None:
            return Path::finite(g.compose(y, w.prefix_morphism()));
        case TailKind::Cycle:
            return Path::infinite(g, g.compose(y, w.prefix_morphism()), w.cycle_morphism());
        case TailKind::Ramp:
            return Path::ramp(g, g.compose(y, w.prefix_morphism()), w.ramp_family(),
                              w.ramp_stride(), w.ramp_offset());
    }
    throw Error("unreachable");
}

// (yw)_n computed through an explicit admissible p (p <= N(w), n <= d(y)+p).
// Exposed so independence of the choice of p can be tested directly.
inline Morphism product_prefix_via(const KGraph& g, const Morphism& y, const Path& w,
                                   const Degree& n, const Degree& p) {
    if (!leq(ExtDegree(p), w.extdegree()))
        throw FactorizationError("product_prefix_via: p is not <= N(w)");
    if (!leq(n, add(y.degree(), p)))
        throw FactorizationError("product_prefix_via: n is not <= d(y)+p");
    Morphism ywp = g.compose(y, path_prefix(g, w, p));
    return g.factorize(ywp, n).first;
}

// ---------------------------------------------------------------------------
// coordinates and equality (rank 1 closed forms)

// Edge at position i (1-based) of a rank-1 path.
inline EdgeRef coordinate_at(const KGraph& g, const Path& w, std::uint64_t i) {
    if (g.rank() != 1) throw Error("coordinate_at: rank-1 paths only");
    if (i == 0) throw Error("coordinate_at: positions are 1-based");
    std::uint64_t plen = w.prefix_morphism().degree()[0];
    if (i <= plen) return w.prefix_morphism().word()[i - 1];
    switch (w.tail_kind()) {
        case TailKind::None:
            throw FactorizationError("coordinate_at: position beyond path length");
        case TailKind::Cycle: {
            std::uint64_t q = w.cycle_morphism().degree()[0];
            return w.cycle_morphism().word()[(i - plen - 1) % q];
        }
        case TailKind::Ramp: {
            std::uint64_t j = i - plen;
            return EdgeRef{w.ramp_family(), w.ramp_stride() * j + w.ramp_offset()};
        }
    }
    throw Error("unreachable");
}

inline ExtNat path_length(const Path& w) {
    // Rank-1 convenience: l(w).
    return w.extdegree()[0];
}

// Path equality: equality of N plus agreement of every prefix.  Decided by
// comparing the single prefix at a sufficient bound (Fine-Wilf for rank 1;
// for higher rank the bound below covers the prefix join plus two aligned
// cycle periods).
inline bool path_eq(const KGraph& g, const Path& a, const Path& b) {
    if (a.range() != b.range()) return false;
    if (a.extdegree() != b.extdegree()) return false;
    if (a.is_finite() && b.is_finite()) return a.prefix_morphism() == b.prefix_morphism();

    if (g.rank() == 1) {
        std::uint64_t pa = a.prefix_morphism().degree()[0];
        std::uint64_t pb = b.prefix_morphism().degree()[0];
        std::uint64_t P = std::max(pa, pb);
        if (a.tail_kind() == TailKind::Ramp && b.tail_kind() == TailKind::Ramp) {
            for (std::uint64_t i = 1; i <= P + 1; ++i)
                if (coordinate_at(g, a, i) != coordinate_at(g, b, i)) return false;
            // Beyond P both are pure affine ramps; equal slope plus one shared
            // value pins them.
            return a.ramp_family() == b.ramp_family() && a.ramp_stride() == b.ramp_stride();
        }
        if (a.tail_kind() != b.tail_kind()) {
            // A ramp takes infinitely many distinct letters; a cycle tail
            // takes finitely many.  They always differ somewhere, and the
            // first difference is within one cycle period past the ramp
            // onset: find it to keep the answer witness-backed.
            return false;
        }
        std::uint64_t qa = a.cycle_morphism().degree()[0];
        std::uint64_t qb = b.cycle_morphism().degree()[0];
        std::uint64_t M = P + qa + qb;
        for (std::uint64_t i = 1; i <= M; ++i)
            if (coordinate_at(g, a, i) != coordinate_at(g, b, i)) return false;
        return true;
    }

    // rank >= 2: both tails are cycles (ramps are rank-1 only).
    const Degree& dpa = a.prefix_morphism().degree();
    const Degree& dpb = b.prefix_morphism().degree();
    const Degree& dca = a.cycle_morphism().degree();
    const Degree& dcb = b.cycle_morphism().degree();
    std::vector<std::uint64_t> bound(g.rank());
    for (std::size_t i = 0; i < g.rank(); ++i) {
        std::uint64_t period = 0;
        if (dca[i] > 0 || dcb[i] > 0) period = std::lcm(std::max<std::uint64_t>(dca[i], 1),
                                                        std::max<std::uint64_t>(dcb[i], 1));
        bound[i] = std::max(dpa[i], dpb[i]) + 2 * period;
    }
    Degree M(std::move(bound));
    return path_prefix(g, a, M) == path_prefix(g, b, M);
}

// ---------------------------------------------------------------------------
// enumeration of W_v

// All finite paths from v of degree <= bound, followed by the infinite paths
// with prefix degree <= bound and tail cycle degree <= max(bound, 1),
// deduplicated as points (not representations).  N-indexed families are
// truncated at family_limit.
inline std::vector<Path> enumerate_Wv(const KGraph& g, VertexId v, const Degree& bound,
                                      std::uint64_t family_limit = 0) {
    std::vector<Path> out;
    std::vector<Morphism> finite;
    for (const Degree& d : detail::degrees_up_to(bound))
        for (const Morphism& m : g.morphisms_of_degree(d, v, family_limit))
            finite.push_back(m);
    for (const Morphism& m : finite) out.push_back(Path::finite(m));

    std::vector<std::uint64_t> cb(bound.rank());
    for (std::size_t i = 0; i < bound.rank(); ++i) cb[i] = std::max<std::uint64_t>(bound[i], 1);
    Degree cycle_bound(std::move(cb));

    std::vector<Path> infinite;
    for (const Morphism& p : finite) {
        for (const Degree& dc : detail::degrees_up_to(cycle_bound)) {
            if (dc.is_zero()) continue;
            for (const Morphism& c : g.morphisms_of_degree(dc, p.source(), family_limit)) {
                if (c.source() != p.source()) continue;
                Path cand = Path::infinite(g, p, c);
                bool seen = false;
                for (const Path& w : infinite)
                    if (path_eq(g, w, cand)) {
                        seen = true;
                        break;
                    }
                if (!seen) infinite.push_back(std::move(cand));
            }
        }
    }
    out.insert(out.end(), infinite.begin(), infinite.end());
    return out;
}

// ---------------------------------------------------------------------------
// display

inline std::string path_str(const KGraph& g, const Path& w) {
    const Morphism& p = w.prefix_morphism();
    std::string head = g.vertex_name(w.range());
    if (!p.is_vertex()) {
        head += ':';
        for (std::size_t i = 0; i < p.word().size(); ++i) {
            if (i) head += '.';
            head += g.letter_str(p.word()[i]);
        }
    }
    switch (w.tail_kind()) {
        case TailKind::None:
            return head;
        case TailKind::Cycle: {
            std::string c;
            for (std::size_t i = 0; i < w.cycle_morphism().word().size(); ++i) {
                if (i) c += '.';
                c += g.letter_str(w.cycle_morphism().word()[i]);
            }
            return head + (p.is_vertex() ? ":(" : ".(") + c + ")*";
        }
        case TailKind::Ramp: {
            const auto& fam = g.families()[w.ramp_family()];
            std::string idx;
            if (w.ramp_stride() != 1) idx += std::to_string(w.ramp_stride());
            idx += 'j';
            if (w.ramp_offset() != 0) idx += '+' + std::to_string(w.ramp_offset());
            return head + (p.is_vertex() ? ":(" : ".(") + fam.name + '[' + idx + "])*";
        }
    }
    throw Error("unreachable");
}

}  // namespace pathspace
