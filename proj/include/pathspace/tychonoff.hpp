#pragma once

// The product construction over countable discrete factor spaces X_1, X_2,
// ...: one-point compactifications X_n^inf, the product A, the quotient map
// Q onto W_0 = Y_0 u Z (truncate at the first infinity), the relation R
// determined by Q, pointwise convergence in W_0, and cluster points of
// symbolic lift sequences in A.
//
// Factors are countable discrete enumerated spaces: either a finite named
// point list (indices 0..size-1) or the naturals (indices 1,2,3,..., the
// paper's P).  In a discrete factor a point sequence converges iff it is
// eventually constant, or its index increases without bound (to inf_n).

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "sequences.hpp"

namespace pathspace::tych {

using pathspace::AffineTerm;
using pathspace::LengthTerm;

// A point of X_i^inf.
struct PointVal {
    std::uint64_t idx = 0;
    bool inf = false;

    static PointVal infinity() { return {0, true}; }
    static PointVal at(std::uint64_t i) { return {i, false}; }

    friend bool operator==(const PointVal&, const PointVal&) = default;
    friend auto operator<=>(const PointVal&, const PointVal&) = default;

    std::string str() const { return inf ? "inf" : std::to_string(idx); }
};

struct FactorSpace {
    std::string name;
    std::vector<std::string> points;  // finite case
    bool naturals = false;

    static FactorSpace finite(std::string name, std::vector<std::string> pts) {
        return {std::move(name), std::move(pts), false};
    }
    static FactorSpace nat(std::string name = "N") { return {std::move(name), {}, true}; }

    bool is_infinite() const { return naturals; }
    bool valid_index(std::uint64_t i) const { return naturals ? i >= 1 : i < points.size(); }
};

// X_1 x X_2 x ...: explicitly named head factors, one default factor for
// every later position.
class FactorProduct {
public:
    FactorProduct() : tail_(FactorSpace::nat()) {}
    FactorProduct(std::vector<FactorSpace> head, FactorSpace tail)
        : head_(std::move(head)), tail_(std::move(tail)) {}

    static FactorProduct all_naturals() { return FactorProduct(); }

    const FactorSpace& factor(std::uint64_t i) const {  // 1-based
        if (i == 0) throw Error("factor positions are 1-based");
        if (i <= head_.size()) return head_[i - 1];
        return tail_;
    }
    std::size_t head_size() const { return head_.size(); }

private:
    std::vector<FactorSpace> head_;
    FactorSpace tail_;
};

// ---------------------------------------------------------------------------
// symbolic tuples

// A total N-indexed family of point values: explicit head, then a tail rule.
struct Tuple {
    enum class Tail { Const, Periodic, Ramp };

    std::vector<PointVal> head;  // positions 1..head.size()
    Tail tail = Tail::Const;
    PointVal tail_const = PointVal::infinity();
    std::vector<PointVal> tail_period;  // non-constant, length >= 2 after normalization
    AffineTerm ramp;                    // value at tail offset j is a*j+b, a >= 1

    static Tuple constant(std::vector<PointVal> head, PointVal rest) {
        Tuple t;
        t.head = std::move(head);
        t.tail = Tail::Const;
        t.tail_const = rest;
        return t;
    }
    static Tuple periodic(std::vector<PointVal> head, std::vector<PointVal> period) {
        if (period.empty()) throw ParseError("periodic tail must be non-empty");
        bool all_eq = true;
        for (const auto& v : period)
            if (v != period.front()) all_eq = false;
        if (all_eq) return constant(std::move(head), period.front());
        Tuple t;
        t.head = std::move(head);
        t.tail = Tail::Periodic;
        t.tail_period = std::move(period);
        return t;
    }
    static Tuple ramped(std::vector<PointVal> head, std::uint64_t a, std::uint64_t b) {
        if (a == 0) return constant(std::move(head), PointVal::at(b));
        Tuple t;
        t.head = std::move(head);
        t.tail = Tail::Ramp;
        t.ramp = {a, b};
        return t;
    }

    PointVal at(std::uint64_t i) const {  // 1-based
        if (i == 0) throw Error("tuple positions are 1-based");
        if (i <= head.size()) return head[i - 1];
        std::uint64_t j = i - head.size();
        switch (tail) {
            case Tail::Const: return tail_const;
            case Tail::Periodic: return tail_period[(j - 1) % tail_period.size()];
            case Tail::Ramp: return PointVal::at(ramp.eval(j));
        }
        return tail_const;
    }
};

inline bool tuple_eq(const Tuple& a, const Tuple& b) {
    std::uint64_t P = std::max(a.head.size(), b.head.size());
    std::uint64_t extra = 1;
    if (a.tail == Tuple::Tail::Periodic) extra += a.tail_period.size();
    if (b.tail == Tuple::Tail::Periodic) extra += b.tail_period.size();
    for (std::uint64_t i = 1; i <= P + extra; ++i)
        if (a.at(i) != b.at(i)) return false;
    if (a.tail == Tuple::Tail::Ramp || b.tail == Tuple::Tail::Ramp) {
        // past P both must be pure ramps; equal slope plus the shared values
        // already checked pins them
        return a.tail == b.tail && a.ramp.a == b.ramp.a;
    }
    // eventually periodic tails agreeing on P + p_a + p_b positions agree
    // everywhere (Fine-Wilf)
    return true;
}

// ---------------------------------------------------------------------------
// A, W_0 and the quotient map

// A point of A = prod X_n^inf.
struct APoint {
    Tuple coords;
};

// First position carrying an infinity, if any.
inline std::optional<std::uint64_t> first_infinity(const APoint& a) {
    for (std::size_t i = 0; i < a.coords.head.size(); ++i)
        if (a.coords.head[i].inf) return i + 1;
    std::uint64_t base = a.coords.head.size();
    switch (a.coords.tail) {
        case Tuple::Tail::Const:
            if (a.coords.tail_const.inf) return base + 1;
            return std::nullopt;
        case Tuple::Tail::Periodic:
            for (std::size_t j = 0; j < a.coords.tail_period.size(); ++j)
                if (a.coords.tail_period[j].inf) return base + j + 1;
            return std::nullopt;
        case Tuple::Tail::Ramp:
            return std::nullopt;
    }
    return std::nullopt;
}

// A point of W_0 = Y_0 u Z: the empty tuple 0, a finite tuple, or an
// infinite coordinate family with no infinities.
class WPoint {
public:
    static WPoint zero() { return WPoint(); }

    static WPoint finite(std::vector<std::uint64_t> values) {
        WPoint w;
        w.len_ = values.size();
        std::vector<PointVal> head;
        head.reserve(values.size());
        for (auto v : values) head.push_back(PointVal::at(v));
        w.coords_ = Tuple::constant(std::move(head), PointVal::infinity());
        return w;
    }

    static WPoint infinite(Tuple coords) {
        APoint probe{coords};
        if (first_infinity(probe))
            throw ParseError("a WPoint carries no infinities");
        WPoint w;
        w.len_ = ExtNat::infinity();
        w.coords_ = std::move(coords);
        return w;
    }

    ExtNat length() const { return len_; }
    bool is_zero() const { return !len_.is_infinite() && len_.finite() == 0; }

    PointVal coord(std::uint64_t i) const {  // 1-based, i <= length
        if (!len_.is_infinite() && i > len_.finite())
            throw Error("WPoint coordinate beyond length");
        return coords_.at(i);
    }
    const Tuple& coords() const { return coords_; }

private:
    ExtNat len_ = 0;
    Tuple coords_;
};

inline bool wpoint_eq(const WPoint& a, const WPoint& b) {
    if (a.length() != b.length()) return false;
    if (a.length().is_infinite()) return tuple_eq(a.coords(), b.coords());
    for (std::uint64_t i = 1; i <= a.length().finite(); ++i)
        if (a.coord(i) != b.coord(i)) return false;
    return true;
}

// Q: A -> W_0.  Total: the full family when no coordinate is infinite, the
// truncation before the first infinity otherwise, 0 when x_1 is infinite.
inline WPoint Q(const APoint& a) {
    std::optional<std::uint64_t> cut = first_infinity(a);
    if (!cut) return WPoint::infinite(a.coords);
    std::vector<std::uint64_t> values;
    for (std::uint64_t i = 1; i < *cut; ++i) values.push_back(a.coords.at(i).idx);
    return WPoint::finite(std::move(values));
}

// N(x) = l(Q(x)): inf / first-infinity position minus one / 0.
inline ExtNat N_of(const APoint& a) {
    std::optional<std::uint64_t> cut = first_infinity(a);
    if (!cut) return ExtNat::infinity();
    return *cut - 1;
}

inline bool r_related(const APoint& a, const APoint& b) {
    if (N_of(a) != N_of(b)) return false;
    return wpoint_eq(Q(a), Q(b));
}

// The canonical preimage: pad a finite point with infinities immediately
// after its coordinates (the minimal lift); an infinite point lifts to
// itself.
inline APoint canonical_lift(const WPoint& w) {
    if (w.length().is_infinite()) return APoint{w.coords()};
    std::vector<PointVal> head;
    for (std::uint64_t i = 1; i <= w.length().finite(); ++i) head.push_back(w.coord(i));
    return APoint{Tuple::constant(std::move(head), PointVal::infinity())};
}

// ---------------------------------------------------------------------------
// symbolic sequences in W_0

struct PointTerm {
    enum class Kind { Const, FamN, FamI, Inf };
    Kind kind = Kind::Const;
    PointVal cval;
    AffineTerm idx;

    static PointTerm constant(std::uint64_t v) { return {Kind::Const, PointVal::at(v), {}}; }
    static PointTerm fam_n(std::uint64_t a, std::uint64_t b) {
        if (a == 0) return constant(b);
        return {Kind::FamN, {}, {a, b}};
    }
    static PointTerm fam_i(std::uint64_t a, std::uint64_t b) {
        if (a == 0) return constant(b);
        return {Kind::FamI, {}, {a, b}};
    }
    static PointTerm infinity() { return {Kind::Inf, PointVal::infinity(), {}}; }

    PointVal eval(std::uint64_t i, std::uint64_t n) const {
        switch (kind) {
            case Kind::Const: return cval;
            case Kind::FamN: return PointVal::at(idx.eval(n));
            case Kind::FamI: return PointVal::at(idx.eval(i));
            case Kind::Inf: return PointVal::infinity();
        }
        return cval;
    }
    bool escapes() const { return kind == Kind::FamN; }
    // limit over n at a fixed position (FamN escapes to infinity)
    PointVal limit_at(std::uint64_t i) const {
        switch (kind) {
            case Kind::Const: return cval;
            case Kind::FamN: return PointVal::infinity();
            case Kind::FamI: return PointVal::at(idx.eval(i));
            case Kind::Inf: return PointVal::infinity();
        }
        return cval;
    }
};

struct WRules {
    LengthTerm length;
    std::map<std::uint64_t, PointTerm> rules;  // 1-based positions; no Inf terms
    PointTerm default_term;

    const PointTerm& term_at(std::uint64_t i) const {
        auto it = rules.find(i);
        return it == rules.end() ? default_term : it->second;
    }
    std::uint64_t max_rule_pos() const { return rules.empty() ? 0 : rules.rbegin()->first; }
};

struct WConst {
    WPoint value;
};

using WBranch = std::variant<WRules, WConst>;

struct WSequence {
    std::vector<WBranch> branches;  // branch j serves n = j (mod M)
};

namespace detail {

inline void validate_term(const FactorProduct& fp, const PointTerm& t, std::uint64_t i,
                          bool allow_inf) {
    const FactorSpace& X = fp.factor(i);
    switch (t.kind) {
        case PointTerm::Kind::Const:
            if (!X.valid_index(t.cval.idx))
                throw ParseError("position " + std::to_string(i) + ": point index " +
                                 std::to_string(t.cval.idx) + " is not in " + X.name);
            return;
        case PointTerm::Kind::FamN:
            if (!X.is_infinite())
                throw ParseError("position " + std::to_string(i) +
                                 ": strictly increasing index on the finite factor " + X.name);
            if (!X.valid_index(t.idx.b + t.idx.a))
                throw ParseError("position " + std::to_string(i) + ": index term leaves " + X.name);
            return;
        case PointTerm::Kind::FamI:
            if (!X.valid_index(t.idx.eval(i)))
                throw ParseError("position " + std::to_string(i) + ": index term leaves " + X.name);
            return;
        case PointTerm::Kind::Inf:
            if (!allow_inf) throw ParseError("infinity is not a W-sequence value");
            return;
    }
}

}  // namespace detail

inline void validate_wsequence(const FactorProduct& fp, const WSequence& seq,
                               std::uint64_t depth = 8) {
    if (seq.branches.empty()) throw ParseError("sequence has no branches");
    for (const WBranch& br : seq.branches) {
        const auto* rules = std::get_if<WRules>(&br);
        if (!rules) continue;
        for (const auto& [i, t] : rules->rules) detail::validate_term(fp, t, i, false);
        std::uint64_t P = rules->max_rule_pos();
        for (std::uint64_t i = P + 1; i <= P + depth; ++i)
            detail::validate_term(fp, rules->default_term, i, false);
    }
}

inline WPoint instantiate_w(const FactorProduct& fp, const WSequence& seq, std::uint64_t n) {
    if (seq.branches.empty()) throw ParseError("sequence has no branches");
    const WBranch& br = seq.branches[n % seq.branches.size()];
    if (const auto* c = std::get_if<WConst>(&br)) return c->value;
    const WRules& rs = std::get<WRules>(br);
    ExtNat L = rs.length.eval(n);
    if (!L.is_infinite()) {
        std::vector<std::uint64_t> vals;
        for (std::uint64_t i = 1; i <= L.finite(); ++i) {
            PointVal v = rs.term_at(i).eval(i, n);
            if (v.inf || !fp.factor(i).valid_index(v.idx))
                throw ParseError("instantiation leaves the factor spaces at position " +
                                 std::to_string(i));
            vals.push_back(v.idx);
        }
        return WPoint::finite(std::move(vals));
    }
    std::uint64_t P = rs.max_rule_pos();
    std::vector<PointVal> head;
    for (std::uint64_t i = 1; i <= P; ++i) head.push_back(rs.term_at(i).eval(i, n));
    const PointTerm& d = rs.default_term;
    switch (d.kind) {
        case PointTerm::Kind::Const:
            return WPoint::infinite(Tuple::constant(std::move(head), d.cval));
        case PointTerm::Kind::FamN:
            return WPoint::infinite(
                Tuple::constant(std::move(head), PointVal::at(d.idx.eval(n))));
        case PointTerm::Kind::FamI:
            // tail offset j is position P + j
            return WPoint::infinite(
                Tuple::ramped(std::move(head), d.idx.a, d.idx.a * P + d.idx.b));
        case PointTerm::Kind::Inf:
            throw ParseError("infinity is not a W-sequence value");
    }
    throw Error("unreachable");
}

// ---------------------------------------------------------------------------
// pointwise convergence (the two-clause definition)

namespace detail {

inline bool term_limit_matches(const WRules& rs, std::uint64_t i, PointVal want) {
    const PointTerm& t = rs.term_at(i);
    return !t.escapes() && t.limit_at(i) == want;
}

inline ConvergenceVerdict wrules_converges(const FactorProduct& fp, const WRules& rs,
                                           const WPoint& x) {
    (void)fp;
    ConvergenceVerdict v;
    if (x.length().is_infinite()) {
        // clause (i): l(x^n) -> inf and coordinatewise convergence
        if (!rs.length.tends_to_infinity()) {
            v.reason = "x is infinite but the length term is bounded";
            return v;
        }
        std::uint64_t P = rs.max_rule_pos();
        std::uint64_t Px = x.coords().head.size();
        std::uint64_t px =
            x.coords().tail == Tuple::Tail::Periodic ? x.coords().tail_period.size() : 1;
        std::uint64_t H = std::max(P, Px) + px;
        for (std::uint64_t i = 1; i <= H; ++i) {
            if (!term_limit_matches(rs, i, x.coord(i))) {
                v.reason = "coordinate " + std::to_string(i) + " does not settle to x";
                return v;
            }
        }
        const PointTerm& d = rs.default_term;
        if (d.escapes()) {
            v.reason = "default coordinate escapes to infinity";
            return v;
        }
        // beyond H the default term must reproduce x's tail rule
        bool ok = false;
        if (x.coords().tail == Tuple::Tail::Const)
            ok = d.kind == PointTerm::Kind::Const && d.cval == x.coords().tail_const;
        else if (x.coords().tail == Tuple::Tail::Ramp)
            ok = d.kind == PointTerm::Kind::FamI && d.idx.a == x.coords().ramp.a &&
                 d.limit_at(H + 1) == x.coord(H + 1);
        if (!ok) {
            v.reason = "default coordinate does not reproduce x's tail";
            return v;
        }
        v.pass = true;
        v.threshold = rs.length.threshold_geq(H + 1);
        v.reason = "length escapes and all coordinates settle";
        return v;
    }
    // clause (ii): finite x of length L
    std::uint64_t L = x.length().finite();
    if (rs.length.kind == LengthTerm::Kind::Const && rs.length.value < L) {
        v.reason = "length term stays below l(x)";
        return v;
    }
    std::uint64_t n0 = rs.length.threshold_geq(L);
    for (std::uint64_t i = 1; i <= L; ++i) {
        if (!term_limit_matches(rs, i, x.coord(i))) {
            v.reason = "coordinate " + std::to_string(i) + " does not settle to x";
            return v;
        }
    }
    if (rs.length.kind == LengthTerm::Kind::Const && rs.length.value == L) {
        v.pass = true;
        v.threshold = n0;
        v.reason = "length exhausts at l(x); coordinates settle";
        return v;
    }
    if (!rs.term_at(L + 1).escapes()) {
        v.reason = "coordinate " + std::to_string(L + 1) + " does not escape to infinity";
        return v;
    }
    v.pass = true;
    v.threshold = std::max(n0, rs.length.threshold_geq(L + 1));
    v.reason = "coordinates settle and coordinate " + std::to_string(L + 1) + " escapes";
    return v;
}

}  // namespace detail

inline ConvergenceVerdict converges_pointwise(const FactorProduct& fp, const WSequence& seq,
                                              const WPoint& x) {
    validate_wsequence(fp, seq);
    ConvergenceVerdict all;
    all.pass = true;
    for (std::size_t j = 0; j < seq.branches.size(); ++j) {
        const WBranch& br = seq.branches[j];
        ConvergenceVerdict v;
        if (const auto* c = std::get_if<WConst>(&br)) {
            v.pass = wpoint_eq(c->value, x);
            v.reason = v.pass ? "constant branch equals x" : "constant branch differs from x";
        } else {
            v = detail::wrules_converges(fp, std::get<WRules>(br), x);
        }
        if (!v.pass) {
            v.reason = "branch " + std::to_string(j) + ": " + v.reason;
            return v;
        }
        all.threshold = std::max(all.threshold, v.threshold * seq.branches.size() + j);
        all.reason = v.reason;
    }
    return all;
}

// ---------------------------------------------------------------------------
// lifts and cluster points

// A symbolic lift sequence for one branch: coordinates follow the branch up
// to its length, the next coordinate is infinity, and later coordinates are
// free junk values.
struct LiftProfile {
    std::map<std::uint64_t, PointTerm> junk_rules;  // absolute positions; Inf allowed
    PointTerm junk_default = PointTerm::infinity();

    const PointTerm& junk_at(std::uint64_t i) const {
        auto it = junk_rules.find(i);
        return it == junk_rules.end() ? junk_default : it->second;
    }
};

// A symbolic sequence in A: lifted branches of a W-sequence, or constant
// A-points.
struct LiftedBranch {
    WBranch base;
    LiftProfile profile;
};
struct AConst {
    APoint value;
};
using ABranch = std::variant<LiftedBranch, AConst>;

struct APointSequence {
    std::vector<ABranch> branches;
};

// Minimal lift of a whole W-sequence: pad with infinities past the length.
inline APointSequence minimal_lift(const WSequence& seq) {
    APointSequence out;
    for (const WBranch& br : seq.branches) out.branches.push_back(LiftedBranch{br, {}});
    return out;
}

// Instantiate a lift branch at index n (explicit coordinates + tail rule).
inline APoint instantiate_lift(const FactorProduct& fp, const ABranch& br, std::uint64_t n,
                               std::uint64_t head_depth) {
    if (const auto* c = std::get_if<AConst>(&br)) return c->value;
    const LiftedBranch& lb = std::get<LiftedBranch>(br);
    WPoint base = instantiate_w(fp, WSequence{{lb.base}}, n);
    if (base.length().is_infinite()) return APoint{base.coords()};
    std::uint64_t L = base.length().finite();
    std::uint64_t depth = std::max({head_depth, L + 1,
                                    lb.profile.junk_rules.empty()
                                        ? 0
                                        : lb.profile.junk_rules.rbegin()->first});
    std::vector<PointVal> head;
    for (std::uint64_t i = 1; i <= depth; ++i) {
        if (i <= L)
            head.push_back(base.coord(i));
        else if (i == L + 1)
            head.push_back(PointVal::infinity());
        else
            head.push_back(lb.profile.junk_at(i).eval(i, n));
    }
    const PointTerm& d = lb.profile.junk_default;
    switch (d.kind) {
        case PointTerm::Kind::Const:
            return APoint{Tuple::constant(std::move(head), d.cval)};
        case PointTerm::Kind::Inf:
            return APoint{Tuple::constant(std::move(head), PointVal::infinity())};
        case PointTerm::Kind::FamN:
            return APoint{Tuple::constant(std::move(head), PointVal::at(d.idx.eval(n)))};
        case PointTerm::Kind::FamI: {
            std::uint64_t P = head.size();
            return APoint{Tuple::ramped(std::move(head), d.idx.a, d.idx.a * P + d.idx.b)};
        }
    }
    throw Error("unreachable");
}

namespace detail {

// The limit in A of one lifted branch (every branch of the symbolic class
// converges in the compact product: each coordinate is eventually constant
// or escapes to the adjoined point).
inline APoint lifted_branch_limit(const FactorProduct& fp, const LiftedBranch& lb) {
    (void)fp;
    if (const auto* c = std::get_if<WConst>(&lb.base)) {
        const WPoint& w = c->value;
        if (w.length().is_infinite()) return APoint{w.coords()};
        std::uint64_t L = w.length().finite();
        std::uint64_t depth = std::max(
            L + 1, lb.profile.junk_rules.empty() ? 0 : lb.profile.junk_rules.rbegin()->first);
        std::vector<PointVal> head;
        for (std::uint64_t i = 1; i <= depth; ++i) {
            if (i <= L)
                head.push_back(w.coord(i));
            else if (i == L + 1)
                head.push_back(PointVal::infinity());
            else
                head.push_back(lb.profile.junk_at(i).limit_at(i));
        }
        const PointTerm& d = lb.profile.junk_default;
        if (d.kind == PointTerm::Kind::FamI) {
            std::uint64_t P = head.size();
            return APoint{Tuple::ramped(std::move(head), d.idx.a, d.idx.a * P + d.idx.b)};
        }
        return APoint{Tuple::constant(std::move(head), d.limit_at(0))};
    }
    const WRules& rs = std::get<WRules>(lb.base);
    if (rs.length.tends_to_infinity()) {
        // junk washes out: every fixed position is eventually within the
        // length, so the limit is driven by the base terms alone
        std::uint64_t P = rs.max_rule_pos();
        std::vector<PointVal> head;
        for (std::uint64_t i = 1; i <= P; ++i) head.push_back(rs.term_at(i).limit_at(i));
        const PointTerm& d = rs.default_term;
        if (d.kind == PointTerm::Kind::FamI)
            return APoint{Tuple::ramped(std::move(head), d.idx.a, d.idx.a * P + d.idx.b)};
        return APoint{Tuple::constant(std::move(head), d.limit_at(0))};
    }
    // constant length L: base limits up to L, infinity at L+1, junk limits after
    std::uint64_t L = rs.length.value;
    std::uint64_t depth = std::max({rs.max_rule_pos(), L + 1,
                                    lb.profile.junk_rules.empty()
                                        ? 0
                                        : lb.profile.junk_rules.rbegin()->first});
    std::vector<PointVal> head;
    for (std::uint64_t i = 1; i <= depth; ++i) {
        if (i <= L)
            head.push_back(rs.term_at(i).limit_at(i));
        else if (i == L + 1)
            head.push_back(PointVal::infinity());
        else
            head.push_back(lb.profile.junk_at(i).limit_at(i));
    }
    const PointTerm& d = lb.profile.junk_default;
    if (d.kind == PointTerm::Kind::FamI) {
        std::uint64_t P = head.size();
        return APoint{Tuple::ramped(std::move(head), d.idx.a, d.idx.a * P + d.idx.b)};
    }
    return APoint{Tuple::constant(std::move(head), d.limit_at(0))};
}

}  // namespace detail

// All subsequential limits of a symbolic sequence in A.  Every branch of
// the class converges in the compact product, so the cluster set is exactly
// the set of branch limits; affine reindexings produce nothing new.  The
// horizon only bounds the explicit head used for displays.
inline std::vector<APoint> cluster_points(const FactorProduct& fp, const APointSequence& seq,
                                          std::uint64_t horizon = 16) {
    (void)horizon;
    if (seq.branches.empty()) throw ParseError("sequence has no branches");
    std::vector<APoint> out;
    for (const ABranch& br : seq.branches) {
        APoint lim = std::holds_alternative<AConst>(br)
                         ? std::get<AConst>(br).value
                         : detail::lifted_branch_limit(fp, std::get<LiftedBranch>(br));
        bool seen = false;
        for (const APoint& p : out)
            if (tuple_eq(p.coords, lim.coords)) seen = true;
        if (!seen) out.push_back(std::move(lim));
    }
    return out;
}

// ---------------------------------------------------------------------------
// quotient convergence via the cluster-point criterion

// Builds the canonical minimal lift plus `sample_lifts` random symbolic
// lifts, computes every cluster point, and checks each is R-related to a
// lift of x (equivalently, its Q-image equals x).
inline ConvergenceVerdict converges_quotient(const FactorProduct& fp, const WSequence& seq,
                                             const WPoint& x, std::uint64_t horizon = 16,
                                             std::uint64_t sample_lifts = 8,
                                             std::uint64_t seed = 0x9e3779b97f4a7c15ull) {
    validate_wsequence(fp, seq);
    ConvergenceVerdict v;
    std::mt19937_64 rng(seed);
    auto random_junk_term = [&](std::uint64_t pos) -> PointTerm {
        const FactorSpace& X = fp.factor(pos == 0 ? fp.head_size() + 1 : pos);
        switch (rng() % 4) {
            case 0: return PointTerm::infinity();
            case 1: return PointTerm::constant(X.naturals ? 1 + rng() % 7 : rng() % std::max<std::uint64_t>(X.points.size(), 1));
            case 2:
                if (X.is_infinite()) return PointTerm::fam_n(1 + rng() % 3, 1 + rng() % 4);
                return PointTerm::infinity();
            default:
                if (X.is_infinite()) return PointTerm::fam_i(1 + rng() % 2, 1 + rng() % 4);
                return PointTerm::constant(rng() % std::max<std::uint64_t>(X.points.size(), 1));
        }
    };

    std::vector<APointSequence> lift_seqs;
    lift_seqs.push_back(minimal_lift(seq));
    for (std::uint64_t k = 0; k < sample_lifts; ++k) {
        APointSequence ls;
        for (const WBranch& br : seq.branches) {
            LiftProfile prof;
            prof.junk_default = random_junk_term(0);
            std::uint64_t extras = rng() % 3;
            for (std::uint64_t e = 0; e < extras; ++e) {
                std::uint64_t pos = 2 + rng() % (horizon == 0 ? 8 : horizon);
                prof.junk_rules[pos] = random_junk_term(pos);
            }
            ls.branches.push_back(LiftedBranch{br, std::move(prof)});
        }
        lift_seqs.push_back(std::move(ls));
    }

    for (std::size_t k = 0; k < lift_seqs.size(); ++k) {
        for (const APoint& cp : cluster_points(fp, lift_seqs[k], horizon)) {
            if (!wpoint_eq(Q(cp), x)) {
                v.reason = std::string(k == 0 ? "minimal" : "sampled") +
                           " lift has a cluster point outside the fiber of x";
                return v;
            }
        }
    }
    v.pass = true;
    v.reason = "all cluster points of " + std::to_string(lift_seqs.size()) +
               " lift sequences lie in the fiber of x";
    return v;
}

// ---------------------------------------------------------------------------
// display

inline std::string tuple_str(const Tuple& t) {
    std::string out = "(";
    for (std::size_t i = 0; i < t.head.size(); ++i) {
        if (i) out += ',';
        out += t.head[i].str();
    }
    if (!t.head.empty()) out += ',';
    switch (t.tail) {
        case Tuple::Tail::Const: out += t.tail_const.str() + ",..."; break;
        case Tuple::Tail::Periodic: {
            out += '(';
            for (std::size_t i = 0; i < t.tail_period.size(); ++i) {
                if (i) out += ',';
                out += t.tail_period[i].str();
            }
            out += ")*";
            break;
        }
        case Tuple::Tail::Ramp:
            out += std::to_string(t.ramp.a) + "j+" + std::to_string(t.ramp.b) + ",...";
            break;
    }
    out += ')';
    return out;
}

inline std::string wpoint_str(const WPoint& w) {
    if (w.is_zero()) return "0";
    if (w.length().is_infinite()) return tuple_str(w.coords());
    std::string out = "(";
    for (std::uint64_t i = 1; i <= w.length().finite(); ++i) {
        if (i > 1) out += ',';
        out += w.coord(i).str();
    }
    out += ')';
    return out;
}

inline std::string apoint_str(const APoint& a) { return tuple_str(a.coords); }

}  // namespace pathspace::tych

// ---------------------------------------------------------------------------
// the bridge to section-2 encodings: beta = alpha o Q

namespace pathspace {

// Interpret a WPoint over the naturals factors as a path in a one-vertex
// one-family graph (the infinite-bouquet instantiation).
inline Path wpoint_to_path(const KGraph& g, const tych::WPoint& w) {
    if (g.rank() != 1 || g.families().size() != 1 || !g.families()[0].infinite)
        throw ParseError("wpoint_to_path expects the one-vertex infinite-bouquet graph");
    const std::string& fam = g.families()[0].name;
    VertexId v = g.families()[0].src;
    if (w.is_zero()) return Path::finite(g.vertex_morphism(v));
    if (!w.length().is_infinite()) {
        Morphism m = g.vertex_morphism(v);
        for (std::uint64_t i = 1; i <= w.length().finite(); ++i)
            m = g.compose(m, g.family_edge(fam, w.coord(i).idx));
        return Path::finite(m);
    }
    const tych::Tuple& t = w.coords();
    Morphism prefix = g.vertex_morphism(v);
    for (const tych::PointVal& pv : t.head) prefix = g.compose(prefix, g.family_edge(fam, pv.idx));
    switch (t.tail) {
        case tych::Tuple::Tail::Const:
            return Path::infinite(g, prefix, g.family_edge(fam, t.tail_const.idx));
        case tych::Tuple::Tail::Periodic: {
            Morphism cyc = g.vertex_morphism(v);
            for (const tych::PointVal& pv : t.tail_period)
                cyc = g.compose(cyc, g.family_edge(fam, pv.idx));
            return Path::infinite(g, prefix, cyc);
        }
        case tych::Tuple::Tail::Ramp:
            return Path::ramp(g, prefix, 0, t.ramp.a, t.ramp.b);
    }
    throw Error("unreachable");
}

// beta(x)(y) = 1 iff x begins with y, decided directly on the A-point; by
// construction this must agree bit-for-bit with alpha(Q(x)).
inline Encoding beta(const KGraph& g, const tych::APoint& a, const Window& window) {
    if (g.rank() != 1 || g.families().size() != 1 || !g.families()[0].infinite)
        throw ParseError("beta expects the one-vertex infinite-bouquet graph");
    Encoding enc;
    enc.bits.resize(window.size(), 0);
    for (std::size_t k = 0; k < window.size(); ++k) {
        const Morphism& y = window.at(k);
        bool begins = true;
        for (std::size_t i = 0; i < y.word().size() && begins; ++i) {
            tych::PointVal v = a.coords.at(i + 1);
            if (v.inf || v.idx != y.word()[i].index) begins = false;
        }
        enc.bits[k] = begins ? 1 : 0;
    }
    return enc;
}

}  // namespace pathspace
