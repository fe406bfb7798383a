#pragma once

// Symbolically specified path sequences n -> x^n and the convergence
// oracle.  The representable class:
//
//   Rules   - one-graphs: a length term (const / affine / infinite) plus
//             finitely many per-position edge terms and a default term.
//             Edge terms are a fixed edge, fam[a*n+b] (strictly increasing
//             in the sequence index), or fam[a*i+b] (affine in the
//             position).
//   Pumped  - any rank: x^n = head . cycle^(e(n)) . tail with e const or
//             affine.
//   Const   - a fixed path.
//
// A sequence is an interleaving of branches (branch j serves the indices
// n = j mod M), which keeps the class closed under affine reindexing and
// makes "no limit" witnesses expressible.
//
// For one-graphs convergence is decided by the two-case length/coordinate
// criterion; converges_encoding decides bitwise convergence of the
// encodings on a window and is used both as the independent cross-check
// and as the oracle for rank >= 2, where eventual bits are computed
// exactly by iterating the finite prefix-state map until it cycles.

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "topology.hpp"

namespace pathspace {

struct AffineTerm {
    std::uint64_t a = 0;
    std::uint64_t b = 0;

    std::uint64_t eval(std::uint64_t n) const { return a * n + b; }
};

struct LengthTerm {
    enum class Kind { Const, Affine, Infinite };
    Kind kind = Kind::Const;
    std::uint64_t value = 0;  // Const
    AffineTerm affine;        // Affine, a >= 1

    static LengthTerm constant(std::uint64_t c) { return {Kind::Const, c, {}}; }
    static LengthTerm affine_n(std::uint64_t a, std::uint64_t b) {
        if (a == 0) return constant(b);
        return {Kind::Affine, 0, {a, b}};
    }
    static LengthTerm infinite() { return {Kind::Infinite, 0, {}}; }

    ExtNat eval(std::uint64_t n) const {
        switch (kind) {
            case Kind::Const: return value;
            case Kind::Affine: return affine.eval(n);
            case Kind::Infinite: return ExtNat::infinity();
        }
        return 0;
    }
    bool tends_to_infinity() const { return kind != Kind::Const; }
    // least n with eval(n) >= L (Const: 0 when satisfied; caller checks)
    std::uint64_t threshold_geq(std::uint64_t L) const {
        if (kind != Kind::Affine) return 0;
        if (affine.b >= L) return 0;
        return (L - affine.b + affine.a - 1) / affine.a;
    }
};

struct EdgeTerm {
    enum class Kind { ConstEdge, FamN, FamI };
    Kind kind = Kind::ConstEdge;
    EdgeRef const_edge;
    std::uint32_t family = 0;
    AffineTerm idx;

    static EdgeTerm edge(EdgeRef e) { return {Kind::ConstEdge, e, 0, {}}; }
    static EdgeTerm fam_n(std::uint32_t family, std::uint64_t a, std::uint64_t b) {
        if (a == 0) return edge(EdgeRef{family, b});
        return {Kind::FamN, {}, family, {a, b}};
    }
    static EdgeTerm fam_i(std::uint32_t family, std::uint64_t a, std::uint64_t b) {
        if (a == 0) return edge(EdgeRef{family, b});
        return {Kind::FamI, {}, family, {a, b}};
    }

    // value at position i for sequence index n
    EdgeRef eval(std::uint64_t i, std::uint64_t n) const {
        switch (kind) {
            case Kind::ConstEdge: return const_edge;
            case Kind::FamN: return EdgeRef{family, idx.eval(n)};
            case Kind::FamI: return EdgeRef{family, idx.eval(i)};
        }
        return const_edge;
    }
    bool escapes() const { return kind == Kind::FamN; }
    // eventual (n-independent) value at a fixed position; requires !escapes()
    EdgeRef settled(std::uint64_t i) const {
        return kind == Kind::FamI ? EdgeRef{family, idx.eval(i)} : const_edge;
    }
};

struct RulesSeq {
    VertexId start = 0;
    LengthTerm length;
    std::map<std::uint64_t, EdgeTerm> rules;  // 1-based positions
    EdgeTerm default_term;

    const EdgeTerm& term_at(std::uint64_t i) const {
        auto it = rules.find(i);
        return it == rules.end() ? default_term : it->second;
    }
};

struct PumpedSeq {
    Morphism head;
    Morphism cycle;
    LengthTerm exponent;  // Const or Affine
    Path tail;            // r(tail) == s(cycle); may be a vertex path
};

struct ConstSeq {
    Path value;
};

using SeqBranch = std::variant<RulesSeq, PumpedSeq, ConstSeq>;

struct PathSequence {
    std::vector<SeqBranch> branches;  // branch j serves n = j (mod M)
};

struct ConvergenceVerdict {
    bool pass = false;
    std::uint64_t threshold = 0;  // certified for all n >= threshold when pass
    std::string reason;
};

// ---------------------------------------------------------------------------
// instantiation

inline VertexId branch_start(const KGraph& g, const SeqBranch& br) {
    if (const auto* r = std::get_if<RulesSeq>(&br)) return r->start;
    if (const auto* p = std::get_if<PumpedSeq>(&br)) return p->head.range();
    (void)g;
    return std::get<ConstSeq>(br).value.range();
}

inline VertexId sequence_start(const KGraph& g, const PathSequence& seq) {
    if (seq.branches.empty()) throw ParseError("sequence has no branches");
    VertexId v = branch_start(g, seq.branches.front());
    for (const SeqBranch& br : seq.branches)
        if (branch_start(g, br) != v)
            throw ParseError("sequence branches start at different vertices");
    return v;
}

namespace detail {

inline Morphism cycle_power(const KGraph& g, const Morphism& c, std::uint64_t e) {
    Morphism out = g.vertex_morphism(c.range());
    for (std::uint64_t t = 0; t < e; ++t) out = g.compose(out, c);
    return out;
}

inline Path instantiate_branch(const KGraph& g, const SeqBranch& br, std::uint64_t n) {
    if (const auto* cs = std::get_if<ConstSeq>(&br)) return cs->value;
    if (const auto* ps = std::get_if<PumpedSeq>(&br)) {
        std::uint64_t e = ps->exponent.eval(n).finite();
        Morphism head = g.compose(ps->head, cycle_power(g, ps->cycle, e));
        return product(g, head, ps->tail);
    }
    const RulesSeq& rs = std::get<RulesSeq>(br);
    if (g.rank() != 1) throw ParseError("rules sequences require a one-graph");
    ExtNat L = rs.length.eval(n);
    if (!L.is_infinite()) {
        std::vector<EdgeRef> word;
        for (std::uint64_t i = 1; i <= L.finite(); ++i) word.push_back(rs.term_at(i).eval(i, n));
        return Path::finite(g.path_word(rs.start, std::move(word)));
    }
    std::uint64_t P = rs.rules.empty() ? 0 : rs.rules.rbegin()->first;
    std::vector<EdgeRef> word;
    for (std::uint64_t i = 1; i <= P; ++i) word.push_back(rs.term_at(i).eval(i, n));
    Morphism prefix = g.path_word(rs.start, std::move(word));
    const EdgeTerm& d = rs.default_term;
    switch (d.kind) {
        case EdgeTerm::Kind::ConstEdge: {
            Morphism cyc(Degree::scalar(1), g.letter_src(d.const_edge), g.letter_dst(d.const_edge),
                         {d.const_edge});
            return Path::infinite(g, prefix, cyc);
        }
        case EdgeTerm::Kind::FamN: {
            EdgeRef e = d.eval(0, n);
            Morphism cyc(Degree::scalar(1), g.letter_src(e), g.letter_dst(e), {e});
            return Path::infinite(g, prefix, cyc);
        }
        case EdgeTerm::Kind::FamI:
            // tail edge j sits at position P + j
            return Path::ramp(g, prefix, d.family, d.idx.a, d.idx.a * P + d.idx.b);
    }
    throw Error("unreachable");
}

}  // namespace detail

inline Path instantiate(const KGraph& g, const PathSequence& seq, std::uint64_t n) {
    if (seq.branches.empty()) throw ParseError("sequence has no branches");
    return detail::instantiate_branch(g, seq.branches[n % seq.branches.size()], n);
}

// ---------------------------------------------------------------------------
// rank-1 coordinate criterion

namespace detail {

// Does the term at position i eventually equal `want` (for n in any
// arithmetic progression)?  FamN never settles.
inline bool term_settles_to(const EdgeTerm& t, std::uint64_t i, const EdgeRef& want) {
    return !t.escapes() && t.settled(i) == want;
}

// Eventual equality of the branch's coordinates with x on every position of
// an infinite-limit x: explicit positions up to H, then tail pattern match.
inline bool rules_match_infinite_limit(const KGraph& g, const RulesSeq& rs, const Path& x,
                                       std::string& why) {
    std::uint64_t P = rs.rules.empty() ? 0 : rs.rules.rbegin()->first;
    std::uint64_t Px = x.prefix_morphism().degree()[0];
    std::uint64_t qx = x.tail_kind() == TailKind::Cycle ? x.cycle_morphism().degree()[0] : 1;
    std::uint64_t H = std::max(P, Px) + qx;
    for (std::uint64_t i = 1; i <= H; ++i) {
        const EdgeTerm& t = rs.term_at(i);
        if (t.escapes()) {
            why = "position " + std::to_string(i) + " has a strictly increasing family index";
            return false;
        }
        if (t.settled(i) != coordinate_at(g, x, i)) {
            why = "position " + std::to_string(i) + " settles to a different edge";
            return false;
        }
    }
    // beyond H every position is unlisted: the default term must reproduce
    // x's tail rule
    const EdgeTerm& d = rs.default_term;
    if (d.escapes()) {
        why = "default term has a strictly increasing family index";
        return false;
    }
    if (x.tail_kind() == TailKind::Cycle) {
        if (d.kind != EdgeTerm::Kind::ConstEdge) {
            why = "default term is position-affine but the limit tail is a cycle";
            return false;
        }
        for (const EdgeRef& e : x.cycle_morphism().word())
            if (e != d.const_edge) {
                why = "default edge differs from the limit's cycle";
                return false;
            }
        return true;
    }
    // ramp limit
    if (d.kind != EdgeTerm::Kind::FamI || d.family != x.ramp_family() ||
        d.idx.a != x.ramp_stride()) {
        why = "default term does not match the limit's ramp";
        return false;
    }
    // equal slopes: one shared value (checked at H+1 above via settled()?
    // positions <= H were explicit; check alignment at H+1)
    EdgeRef lhs = d.settled(H + 1);
    EdgeRef rhs = coordinate_at(g, x, H + 1);
    if (lhs != rhs) {
        why = "ramp offset differs from the limit's";
        return false;
    }
    return true;
}

inline ConvergenceVerdict converges_rules(const KGraph& g, const RulesSeq& rs, const Path& x) {
    ConvergenceVerdict v;
    ExtNat lx = path_length(x);
    if (lx.is_infinite()) {
        // case (a): l(x^n) -> infinity and every coordinate settles to x's
        if (!rs.length.tends_to_infinity()) {
            v.reason = "l(x) is infinite but the length term is bounded";
            return v;
        }
        std::string why;
        if (!rules_match_infinite_limit(g, rs, x, why)) {
            v.reason = why;
            return v;
        }
        std::uint64_t P = rs.rules.empty() ? 0 : rs.rules.rbegin()->first;
        std::uint64_t Px = x.prefix_morphism().degree()[0];
        std::uint64_t qx = x.tail_kind() == TailKind::Cycle ? x.cycle_morphism().degree()[0] : 1;
        v.pass = true;
        v.threshold = rs.length.threshold_geq(std::max(P, Px) + qx + 1);
        v.reason = "length escapes and all coordinates settle";
        return v;
    }
    // case (b): finite limit of length L
    std::uint64_t L = lx.finite();
    std::uint64_t n0 = 0;
    if (rs.length.kind == LengthTerm::Kind::Const && rs.length.value < L) {
        v.reason = "length term stays below l(x)";
        return v;
    }
    n0 = std::max(n0, rs.length.threshold_geq(L));
    for (std::uint64_t i = 1; i <= L; ++i) {
        const EdgeTerm& t = rs.term_at(i);
        if (!term_settles_to(t, i, coordinate_at(g, x, i))) {
            v.reason = "position " + std::to_string(i) + " does not settle to x's coordinate";
            return v;
        }
    }
    // position L+1 must escape to infinity, or the length must exhaust at L
    if (rs.length.kind == LengthTerm::Kind::Const && rs.length.value == L) {
        v.pass = true;
        v.threshold = n0;
        v.reason = "length exhausts at l(x); coordinates settle";
        return v;
    }
    const EdgeTerm& t = rs.term_at(L + 1);
    if (!t.escapes()) {
        v.reason = "position " + std::to_string(L + 1) + " does not escape to infinity";
        return v;
    }
    v.pass = true;
    v.threshold = std::max(n0, rs.length.threshold_geq(L + 1));
    v.reason = "coordinates settle and position " + std::to_string(L + 1) + " escapes";
    return v;
}

inline ConvergenceVerdict converges_const(const KGraph& g, const ConstSeq& cs, const Path& x) {
    ConvergenceVerdict v;
    v.pass = path_eq(g, cs.value, x);
    v.reason = v.pass ? "constant branch equals the limit" : "constant branch differs from the limit";
    return v;
}

inline ConvergenceVerdict converges_pumped_rank1(const KGraph& g, const PumpedSeq& ps,
                                                 const Path& x) {
    ConvergenceVerdict v;
    if (ps.exponent.kind == LengthTerm::Kind::Const) {
        Path value = product(g, g.compose(ps.head, cycle_power(g, ps.cycle, ps.exponent.value)),
                             ps.tail);
        v.pass = path_eq(g, value, x);
        v.reason = v.pass ? "constant pumped branch equals the limit"
                          : "constant pumped branch differs from the limit";
        return v;
    }
    // e(n) -> infinity: in a one-graph the tail is pushed out and the branch
    // converges to head.cycle^infinity
    Path lim = Path::infinite(g, ps.head, ps.cycle);
    v.pass = path_eq(g, lim, x);
    if (!v.pass) {
        v.reason = "pumped branch converges to head.cycle^inf, which differs from x";
        return v;
    }
    std::uint64_t Px = x.prefix_morphism().degree()[0];
    std::uint64_t q = ps.cycle.degree()[0];
    v.threshold = ps.exponent.threshold_geq((Px + q) / std::max<std::uint64_t>(q, 1) + 1);
    v.reason = "exponent escapes; branch agrees with head.cycle^inf";
    return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// encoding-based oracle (any rank; exact per window)

namespace detail {

struct EventualBit {
    bool defined = false;  // false: the bit oscillates forever
    char value = 0;
    std::uint64_t threshold = 0;  // in sequence indices n
};

// Eventual value of [y <= x^n] for n in the arithmetic progression
// n = j + t*M, t = 0,1,2,...
inline EventualBit eventual_bit(const KGraph& g, const SeqBranch& br, std::uint64_t j,
                                std::uint64_t M, const Morphism& y) {
    EventualBit out;
    if (const auto* cs = std::get_if<ConstSeq>(&br)) {
        out.defined = true;
        out.value = path_has_prefix(g, cs->value, y) ? 1 : 0;
        return out;
    }
    if (const auto* rs = std::get_if<RulesSeq>(&br)) {
        // bit = [l(n) >= |y|] and [every coordinate <= |y| matches]
        if (y.range() != rs->start) {
            out.defined = true;
            out.value = 0;
            return out;
        }
        std::uint64_t len = y.degree()[0];
        if (rs->length.kind == LengthTerm::Kind::Const && rs->length.value < len) {
            out.defined = true;
            out.value = 0;
            return out;
        }
        std::uint64_t n0 = rs->length.threshold_geq(len);
        char bit = 1;
        for (std::uint64_t i = 1; i <= len && bit; ++i) {
            const EdgeTerm& t = rs->term_at(i);
            if (t.escapes()) {
                // strictly increasing index matches a fixed edge at most once
                bit = 0;
                std::uint64_t idx_target =
                    g.families()[y.word()[i - 1].family].infinite ? y.word()[i - 1].index : 0;
                n0 = std::max(n0, idx_target / std::max<std::uint64_t>(t.idx.a, 1) + 1);
            } else if (t.settled(i) != y.word()[i - 1]) {
                bit = 0;
            }
        }
        out.defined = true;
        out.value = bit;
        out.threshold = n0;
        return out;
    }
    const PumpedSeq& ps = std::get<PumpedSeq>(br);
    if (y.range() != ps.head.range()) {
        out.defined = true;
        out.value = 0;
        return out;
    }
    if (ps.exponent.kind == LengthTerm::Kind::Const) {
        Path val = instantiate_branch(g, br, 0);  // exponent constant: n-independent
        out.defined = true;
        out.value = path_has_prefix(g, val, y) ? 1 : 0;
        return out;
    }
    // e(n) -> infinity.  The prefix of x^n at d(y), as a function of the
    // exponent, is driven by a self-map on the finite slice of morphisms of
    // that degree; iterate until the state repeats, then read the bits off
    // the cycle.
    std::map<Morphism, std::uint64_t> seen;  // state tau -> iteration t
    std::vector<char> bits;
    std::uint64_t t = 0;
    std::uint64_t settle_t = 0;
    while (true) {
        std::uint64_t n = j + t * M;
        std::uint64_t e = ps.exponent.eval(n).finite();
        Path xn = product(g, g.compose(ps.head, cycle_power(g, ps.cycle, e)), ps.tail);
        bool defined = leq(ExtDegree(y.degree()), xn.extdegree());
        if (!defined) {
            // d(x^n) only grows along cycle coordinates; if y does not fit
            // now it never will in those coordinates that are already
            // saturated
            bool ever = true;
            for (std::size_t i = 0; i < y.degree().rank(); ++i) {
                if (ps.cycle.degree()[i] == 0 &&
                    ExtNat(y.degree()[i]) > xn.extdegree()[i]) {
                    ever = false;
                    break;
                }
            }
            if (!ever) {
                out.defined = true;
                out.value = 0;
                out.threshold = j + t * M;
                return out;
            }
            ++t;  // grow the exponent until y fits
            continue;
        }
        // state: the prefix of cycle^e . tail at (d(y) monus d(head))
        std::vector<std::uint64_t> m0(y.degree().rank());
        for (std::size_t i = 0; i < m0.size(); ++i)
            m0[i] = y.degree()[i] > ps.head.degree()[i] ? y.degree()[i] - ps.head.degree()[i] : 0;
        Path ct = product(g, cycle_power(g, ps.cycle, e), ps.tail);
        Morphism tau = path_prefix(g, ct, Degree(std::move(m0)));
        Morphism sigma = path_prefix(g, xn, y.degree());
        char bit = sigma == y ? 1 : 0;
        auto it = seen.find(tau);
        if (it != seen.end()) {
            // bits from iteration it->second onward repeat with period
            // t - it->second
            bool all_equal = true;
            for (std::uint64_t k = it->second; k < bits.size(); ++k)
                if (bits[k] != bits[it->second]) all_equal = false;
            if (bit != bits[it->second]) all_equal = false;
            if (!all_equal) return out;  // oscillates: no eventual bit
            out.defined = true;
            out.value = bits[it->second];
            out.threshold = j + std::max(settle_t, it->second) * M;
            return out;
        }
        seen.emplace(std::move(tau), t);
        bits.push_back(bit);
        settle_t = t;
        ++t;
    }
}

}  // namespace detail

// Decides bitwise convergence of the encodings on the window: for every
// window element the bit [y <= x^n] must settle and equal [y <= x].  Exact
// for the window; used directly as the oracle for rank >= 2 and as the
// cross-check for the rank-1 coordinate criterion.
inline ConvergenceVerdict converges_encoding(const KGraph& g, const PathSequence& seq,
                                             const Path& x, const Window& window) {
    ConvergenceVerdict v;
    if (sequence_start(g, seq) != x.range())
        throw NotComposableError("converges: sequence and limit start at different vertices");
    std::uint64_t M = seq.branches.size();
    Encoding ax = alpha(g, x, window);
    std::uint64_t n0 = 0;
    for (std::size_t i = 0; i < window.size(); ++i) {
        const Morphism& y = window.at(i);
        for (std::uint64_t j = 0; j < M; ++j) {
            detail::EventualBit bit = detail::eventual_bit(g, seq.branches[j], j, M, y);
            if (!bit.defined) {
                v.reason = "bit of " + g.morphism_str(y) + " oscillates on branch " +
                           std::to_string(j);
                return v;
            }
            if (bit.value != ax.bits[i]) {
                v.reason = "bit of " + g.morphism_str(y) + " settles to " +
                           std::to_string(int(bit.value)) + " but alpha(x) has " +
                           std::to_string(int(ax.bits[i]));
                return v;
            }
            n0 = std::max(n0, bit.threshold);
        }
    }
    v.pass = true;
    v.threshold = n0;
    v.reason = "all " + std::to_string(window.size()) + " window bits settle to alpha(x)";
    return v;
}

// ---------------------------------------------------------------------------
// the convergence oracle

// Rank 1: the two-case length/coordinate criterion, decided symbolically.
// Rank >= 2: the encoding criterion on a derived window (the bounded form
// of pointwise convergence on Y); the verdict records the window bound.
inline ConvergenceVerdict converges(const KGraph& g, const PathSequence& seq, const Path& x,
                                    std::uint64_t family_limit = 0) {
    if (seq.branches.empty()) throw ParseError("sequence has no branches");
    if (sequence_start(g, seq) != x.range())
        throw NotComposableError("converges: sequence and limit start at different vertices");
    if (g.rank() == 1) {
        ConvergenceVerdict all;
        all.pass = true;
        for (std::size_t j = 0; j < seq.branches.size(); ++j) {
            const SeqBranch& br = seq.branches[j];
            ConvergenceVerdict v;
            if (const auto* rs = std::get_if<RulesSeq>(&br))
                v = detail::converges_rules(g, *rs, x);
            else if (const auto* ps = std::get_if<PumpedSeq>(&br))
                v = detail::converges_pumped_rank1(g, *ps, x);
            else
                v = detail::converges_const(g, std::get<ConstSeq>(br), x);
            if (!v.pass) {
                v.reason = "branch " + std::to_string(j) + ": " + v.reason;
                return v;
            }
            all.threshold = std::max(all.threshold, v.threshold * seq.branches.size() + j);
            all.reason = v.reason;
        }
        return all;
    }
    // derive a window box covering every branch and the candidate limit
    std::vector<std::uint64_t> box(g.rank(), 1);
    auto grow = [&](const Degree& d, std::uint64_t times) {
        for (std::size_t i = 0; i < g.rank(); ++i)
            box[i] = std::max(box[i], d[i] * times);
    };
    for (const SeqBranch& br : seq.branches) {
        if (const auto* ps = std::get_if<PumpedSeq>(&br)) {
            grow(add(ps->head.degree(), ps->tail.prefix_morphism().degree()), 1);
            grow(ps->cycle.degree(), 2);
            if (ps->tail.tail_kind() == TailKind::Cycle) grow(ps->tail.cycle_morphism().degree(), 2);
        } else if (const auto* cs = std::get_if<ConstSeq>(&br)) {
            grow(cs->value.prefix_morphism().degree(), 1);
            if (cs->value.tail_kind() == TailKind::Cycle)
                grow(cs->value.cycle_morphism().degree(), 2);
        }
    }
    grow(x.prefix_morphism().degree(), 1);
    if (x.tail_kind() == TailKind::Cycle) grow(x.cycle_morphism().degree(), 2);
    std::vector<std::uint64_t> sum(g.rank(), 0);
    for (std::size_t i = 0; i < g.rank(); ++i) sum[i] = box[i] + 1;
    Degree bound(std::move(sum));
    Window window = Window::prefix_window(g, x.range(), bound, family_limit);
    ConvergenceVerdict v = converges_encoding(g, seq, x, window);
    v.reason += " (window bound " + bound.str() + ")";
    return v;
}

// ---------------------------------------------------------------------------
// limit extraction

namespace detail {

inline std::optional<Path> branch_limit_candidate(const KGraph& g, const SeqBranch& br) {
    if (const auto* cs = std::get_if<ConstSeq>(&br)) return cs->value;
    if (const auto* ps = std::get_if<PumpedSeq>(&br)) {
        if (ps->exponent.kind == LengthTerm::Kind::Const) return instantiate_branch(g, br, 0);
        if (g.rank() == 1) return Path::infinite(g, ps->head, ps->cycle);
        // settled prefixes at d(head)+residue and one cycle step further
        // reconstruct the limit when the commuted tail stabilizes
        std::vector<std::uint64_t> res(g.rank(), 0);
        const Degree& dt = ps->tail.prefix_morphism().degree();
        for (std::size_t i = 0; i < g.rank(); ++i)
            if (ps->cycle.degree()[i] == 0) res[i] = dt[i];
        if (ps->tail.tail_kind() != TailKind::None) {
            for (std::size_t i = 0; i < g.rank(); ++i)
                if (ps->cycle.degree()[i] == 0 && ps->tail.tail_kind() == TailKind::Cycle &&
                    ps->tail.cycle_morphism().degree()[i] > 0)
                    return std::nullopt;  // tail escapes in a direction the cycle never covers
        }
        Degree d1 = add(ps->head.degree(), Degree(std::move(res)));
        Degree d2 = add(d1, ps->cycle.degree());
        auto settled_prefix = [&](const Degree& m) -> std::optional<Morphism> {
            std::map<Morphism, std::uint64_t> seen;
            std::vector<Morphism> states;
            for (std::uint64_t e = 0;; ++e) {
                std::uint64_t ee = ps->exponent.eval(e).finite();
                Path xn = product(g, g.compose(ps->head, cycle_power(g, ps->cycle, ee)), ps->tail);
                if (!leq(ExtDegree(m), xn.extdegree())) {
                    bool ever = true;
                    for (std::size_t i = 0; i < m.rank(); ++i)
                        if (ps->cycle.degree()[i] == 0 && ExtNat(m[i]) > xn.extdegree()[i])
                            ever = false;
                    if (!ever) return std::nullopt;
                    continue;
                }
                Morphism s = path_prefix(g, xn, m);
                auto it = seen.find(s);
                if (it != seen.end()) {
                    for (std::uint64_t k = it->second; k < states.size(); ++k)
                        if (states[k] != s) return std::nullopt;  // oscillates
                    return s;
                }
                seen.emplace(s, states.size());
                states.push_back(s);
            }
        };
        auto p1 = settled_prefix(d1);
        auto p2 = settled_prefix(d2);
        if (!p1 || !p2) return std::nullopt;
        Morphism cyc = g.factorize(*p2, d1).second;
        if (cyc.range() != cyc.source() || cyc.is_vertex()) return std::nullopt;
        return Path::infinite(g, *p1, cyc);
    }
    const RulesSeq& rs = std::get<RulesSeq>(br);
    std::uint64_t cap = rs.length.kind == LengthTerm::Kind::Const
                            ? rs.length.value
                            : std::numeric_limits<std::uint64_t>::max();
    std::uint64_t P = rs.rules.empty() ? 0 : rs.rules.rbegin()->first;
    // first escaping position, scanning listed positions then the default
    std::optional<std::uint64_t> escape;
    for (std::uint64_t i = 1; i <= P + 1 && i <= cap; ++i) {
        if (rs.term_at(i).escapes()) {
            escape = i;
            break;
        }
    }
    std::uint64_t L = escape ? *escape - 1 : cap;
    if (L != std::numeric_limits<std::uint64_t>::max()) {
        std::vector<EdgeRef> word;
        for (std::uint64_t i = 1; i <= L; ++i) {
            const EdgeTerm& t = rs.term_at(i);
            if (t.escapes()) return std::nullopt;  // escape before a settled stretch
            word.push_back(t.settled(i));
        }
        return Path::finite(g.path_word(rs.start, std::move(word)));
    }
    // no escape, unbounded length: an infinite candidate from the settled terms
    std::vector<EdgeRef> word;
    for (std::uint64_t i = 1; i <= P; ++i) word.push_back(rs.term_at(i).settled(i));
    Morphism prefix = g.path_word(rs.start, std::move(word));
    const EdgeTerm& d = rs.default_term;
    if (d.kind == EdgeTerm::Kind::ConstEdge) {
        Morphism cyc(Degree::scalar(1), g.letter_src(d.const_edge), g.letter_dst(d.const_edge),
                     {d.const_edge});
        return Path::infinite(g, prefix, cyc);
    }
    return Path::ramp(g, prefix, d.family, d.idx.a, d.idx.a * P + d.idx.b);
}

}  // namespace detail

// The unique x with converges(seq, x), when one exists in the representable
// class; std::nullopt otherwise ("no limit in symbolic class").
inline std::optional<Path> sequence_limit(const KGraph& g, const PathSequence& seq,
                                          std::uint64_t family_limit = 0) {
    if (seq.branches.empty()) throw ParseError("sequence has no branches");
    std::optional<Path> candidate;
    for (const SeqBranch& br : seq.branches) {
        std::optional<Path> c = detail::branch_limit_candidate(g, br);
        if (!c) return std::nullopt;
        if (!candidate)
            candidate = c;
        else if (!path_eq(g, *candidate, *c))
            return std::nullopt;  // two distinct cluster points
    }
    if (!candidate) return std::nullopt;
    ConvergenceVerdict v = converges(g, seq, *candidate, family_limit);
    if (!v.pass) return std::nullopt;
    return candidate;
}

}  // namespace pathspace
