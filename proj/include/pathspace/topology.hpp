#pragma once

// The encoding of paths into 2^Y and everything the pointwise topology
// needs in bounded form: windows (prefix-closed finite truncations of Y
// with a fixed enumeration), the membership test for the image of the
// encoding, decoding, the window metric, cylinder sets and their
// intersections, and the finite-subcover search.
//
// 2^Y is infinite; the product topology is determined by finite coordinate
// sets, so every assertion here is window-relative and faithful.

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "paths.hpp"

namespace pathspace {

inline bool path_has_prefix(const KGraph& g, const Path& w, const Morphism& y) {
    if (y.range() != w.range()) return false;
    if (!leq(ExtDegree(y.degree()), w.extdegree())) return false;
    return path_prefix(g, w, y.degree()) == y;
}

// A finite prefix-closed subset of Y with a fixed enumeration order.
class Window {
public:
    Window(const KGraph& g, std::vector<Morphism> elements) : graph_(&g), elems_(std::move(elements)) {
        for (std::size_t i = 0; i < elems_.size(); ++i) {
            if (!index_.emplace(elems_[i], i).second)
                throw ParseError("window: duplicate element");
        }
        for (const Morphism& y : elems_) {
            for (std::size_t dim = 0; dim < g.rank(); ++dim) {
                if (y.degree()[dim] == 0) continue;
                std::vector<std::uint64_t> c = y.degree().coords();
                --c[dim];
                Morphism head = g.factorize(y, Degree(std::move(c))).first;
                if (!index_.count(head))
                    throw ParseError("window is not closed under prefixes (missing " +
                                     g.morphism_str(head) + ")");
            }
        }
    }

    // All finite paths from v of degree <= bound, breadth-first by total
    // degree, then lexicographically.  This is the enumeration order the
    // window metric is defined against.
    static Window prefix_window(const KGraph& g, VertexId v, const Degree& bound,
                                std::uint64_t family_limit = 0) {
        std::vector<Morphism> elems;
        for (const Degree& d : detail::degrees_up_to(bound))
            for (const Morphism& m : g.morphisms_of_degree(d, v, family_limit))
                elems.push_back(m);
        return Window(g, std::move(elems));
    }

    const KGraph& graph() const { return *graph_; }
    std::size_t size() const { return elems_.size(); }
    const Morphism& at(std::size_t i) const { return elems_[i]; }
    const std::vector<Morphism>& elements() const { return elems_; }

    std::optional<std::size_t> index_of(const Morphism& y) const {
        auto it = index_.find(y);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

private:
    const KGraph* graph_;
    std::vector<Morphism> elems_;
    std::map<Morphism, std::size_t> index_;
};

// The restriction of an element of 2^Y to a window.
struct Encoding {
    std::vector<char> bits;

    friend bool operator==(const Encoding&, const Encoding&) = default;
};

// alpha(w) restricted to the window: bit y = 1 iff y <= w.
inline Encoding alpha(const KGraph& g, const Path& w, const Window& window) {
    Encoding enc;
    enc.bits.resize(window.size(), 0);
    for (std::size_t i = 0; i < window.size(); ++i)
        enc.bits[i] = path_has_prefix(g, w, window.at(i)) ? 1 : 0;
    return enc;
}

inline std::vector<Morphism> encoding_support(const Window& window, const Encoding& a) {
    std::vector<Morphism> out;
    for (std::size_t i = 0; i < window.size() && i < a.bits.size(); ++i)
        if (a.bits[i]) out.push_back(window.at(i));
    return out;
}

// ---------------------------------------------------------------------------
// Lemma membership conditions

struct LemmaVerdict {
    enum class Status {
        Pass,
        FailEmpty,       // (i)  A_a is empty
        FailHereditary,  // (ii) some prefix of a member is missing
        FailDirected,    // (iii) a pair with no upper bound anywhere
        Bounded,         // (iii) holds up to the window; upper bounds may lie outside
    };
    Status status = Status::Pass;
    std::optional<std::pair<Morphism, Morphism>> witness;

    bool pass() const { return status == Status::Pass; }
    bool definite_fail() const {
        return status == Status::FailEmpty || status == Status::FailHereditary ||
               status == Status::FailDirected;
    }
};

inline const char* lemma_status_str(LemmaVerdict::Status s) {
    switch (s) {
        case LemmaVerdict::Status::Pass: return "pass";
        case LemmaVerdict::Status::FailEmpty: return "fail(i)";
        case LemmaVerdict::Status::FailHereditary: return "fail(ii)";
        case LemmaVerdict::Status::FailDirected: return "fail(iii)";
        case LemmaVerdict::Status::Bounded: return "bounded";
    }
    return "?";
}

inline LemmaVerdict check_lemma_conditions(const KGraph& g, const Window& window,
                                           const Encoding& a, std::uint64_t family_limit = 0) {
    LemmaVerdict verdict;
    std::vector<Morphism> A = encoding_support(window, a);
    if (A.empty()) {
        verdict.status = LemmaVerdict::Status::FailEmpty;
        return verdict;
    }
    // (ii) hereditary within the window
    for (const Morphism& y2 : A) {
        for (std::size_t i = 0; i < window.size(); ++i) {
            const Morphism& y1 = window.at(i);
            if (!a.bits[i] && g.is_prefix(y1, y2)) {
                verdict.status = LemmaVerdict::Status::FailHereditary;
                verdict.witness = {y1, y2};
                return verdict;
            }
        }
    }
    // (iii) directed upwards.  For a pair without an upper bound in A, the
    // minimal common extensions E decide: E empty means no upper bound can
    // exist anywhere; E entirely inside the window means any hereditary
    // extension of A would already contain one of them, so this is a
    // definite failure; otherwise the upper bound may lie past the window.
    bool bounded = false;
    for (std::size_t i = 0; i < A.size(); ++i) {
        for (std::size_t j = i + 1; j < A.size(); ++j) {
            bool found = false;
            for (const Morphism& y : A) {
                if (g.is_prefix(A[i], y) && g.is_prefix(A[j], y)) {
                    found = true;
                    break;
                }
            }
            if (found) continue;
            if (A[i].range() != A[j].range()) {
                verdict.status = LemmaVerdict::Status::FailDirected;
                verdict.witness = {A[i], A[j]};
                return verdict;
            }
            std::vector<Morphism> ext = g.common_extensions(A[i], A[j], family_limit);
            bool any_outside = false;
            for (const Morphism& nu : ext)
                if (!window.index_of(nu)) any_outside = true;
            if (ext.empty() || !any_outside) {
                verdict.status = LemmaVerdict::Status::FailDirected;
                verdict.witness = {A[i], A[j]};
                return verdict;
            }
            bounded = true;
        }
    }
    if (bounded) verdict.status = LemmaVerdict::Status::Bounded;
    return verdict;
}

// Reconstruct the unique window-truncated path with the given encoding.
// Requires a full pass verdict, under which A_a is a finite directed
// hereditary set and so has a greatest element.
inline std::optional<Morphism> decode(const KGraph& g, const Window& window, const Encoding& a,
                                      std::uint64_t family_limit = 0) {
    LemmaVerdict v = check_lemma_conditions(g, window, a, family_limit);
    if (!v.pass()) return std::nullopt;
    std::vector<Morphism> A = encoding_support(window, a);
    for (const Morphism& cand : A) {
        bool top = true;
        for (const Morphism& y : A) {
            if (!g.is_prefix(y, cand)) {
                top = false;
                break;
            }
        }
        if (top) return cand;
    }
    return std::nullopt;  // directed but no greatest: cannot happen on a pass
}

// ---------------------------------------------------------------------------
// window metric

// 2^-j at the least enumeration index j where the encodings differ; zero
// when they agree on the whole window (an upper bound, not exact zero).
struct WindowMetric {
    std::optional<std::size_t> first_difference;

    double value() const {
        if (!first_difference) return 0.0;
        return std::ldexp(1.0, -static_cast<int>(*first_difference));
    }
    friend bool operator==(const WindowMetric&, const WindowMetric&) = default;
};

inline WindowMetric metric(const KGraph& g, const Path& w, const Path& w2, const Window& window) {
    Encoding a = alpha(g, w, window);
    Encoding b = alpha(g, w2, window);
    WindowMetric m;
    for (std::size_t i = 0; i < window.size(); ++i) {
        if (a.bits[i] != b.bits[i]) {
            m.first_difference = i;
            break;
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// cylinders

// lambda W_{s(lambda)}: all paths extending the base.
struct Cylinder {
    Morphism base;

    friend bool operator==(const Cylinder&, const Cylinder&) = default;
};

inline bool cylinder_contains(const KGraph& g, const Cylinder& c, const Path& w) {
    return path_has_prefix(g, w, c.base);
}

// The refinement of an intersection: lambda W meets lambda2 W in the union
// of nu W over nu in E_{lambda,lambda2}.  Empty means disjoint.
inline std::vector<Cylinder> cylinder_intersection(const KGraph& g, const Cylinder& c,
                                                   const Cylinder& c2,
                                                   std::uint64_t family_limit = 0) {
    if (c.base.range() != c2.base.range()) return {};
    std::vector<Cylinder> out;
    for (const Morphism& nu : g.common_extensions(c.base, c2.base, family_limit))
        out.push_back(Cylinder{nu});
    return out;
}

// ---------------------------------------------------------------------------
// finite subcover search

enum class CoverTarget {
    AllPaths,      // points of W_v: every finite path is itself a point
    InfiniteOnly,  // points of Z_v only
};

struct SubcoverResult {
    enum class Status { Subcover, Counterexample, Inconclusive };
    Status status = Status::Subcover;
    std::vector<Cylinder> subcover;
    std::optional<Path> witness;
    Degree bound;
};

// Walk the prefix tree of W_v to the stated bound.  A node covered by some
// cylinder closes its whole subtree; in AllPaths mode an uncovered node is
// itself an uncovered point.  In InfiniteOnly mode an uncovered branch at
// the frontier is closed into an infinite witness by a cycle when one
// exists, otherwise the search is inconclusive at this bound.
inline SubcoverResult finite_subcover(const KGraph& g, const std::vector<Cylinder>& cover,
                                      VertexId v, const Degree& bound,
                                      std::uint64_t family_limit = 0,
                                      CoverTarget target = CoverTarget::AllPaths) {
    SubcoverResult res;
    res.bound = bound;
    std::vector<char> used(cover.size(), 0);

    std::vector<Morphism> frontier{g.vertex_morphism(v)};
    bool inconclusive = false;
    while (!frontier.empty()) {
        std::vector<Morphism> next;
        for (const Morphism& p : frontier) {
            std::optional<std::size_t> covering;
            for (std::size_t i = 0; i < cover.size(); ++i) {
                if (g.is_prefix(cover[i].base, p)) {
                    covering = i;
                    break;
                }
            }
            if (covering) {
                used[*covering] = 1;
                continue;
            }
            if (target == CoverTarget::AllPaths) {
                res.status = SubcoverResult::Status::Counterexample;
                res.witness = Path::finite(p);
                return res;
            }
            bool has_edge = false;
            for (std::size_t dim = 0; dim < g.rank() && !has_edge; ++dim) {
                std::vector<std::uint64_t> unit(g.rank(), 0);
                unit[dim] = 1;
                has_edge =
                    !g.morphisms_of_degree(Degree(std::move(unit)), p.source(), family_limit)
                         .empty();
            }
            if (!has_edge) continue;  // dead end: no infinite path through p

            // expand within the bound
            std::vector<Morphism> children;
            for (std::size_t dim = 0; dim < g.rank(); ++dim) {
                std::vector<std::uint64_t> c = p.degree().coords();
                ++c[dim];
                if (!leq(Degree(c), bound)) continue;
                std::vector<std::uint64_t> unit(g.rank(), 0);
                unit[dim] = 1;
                for (const Morphism& e : g.morphisms_of_degree(Degree(std::move(unit)), p.source(),
                                                               family_limit))
                    children.push_back(g.compose(p, e));
            }
            if (!children.empty()) {
                next.insert(next.end(), children.begin(), children.end());
                continue;
            }
            // frontier node at the bound: try to close the branch with a cycle
            std::vector<std::uint64_t> cb(bound.rank());
            for (std::size_t i = 0; i < bound.rank(); ++i)
                cb[i] = std::max<std::uint64_t>(bound[i], 1);
            for (const Degree& dc : detail::degrees_up_to(Degree(std::move(cb)))) {
                if (dc.is_zero()) continue;
                for (const Morphism& c : g.morphisms_of_degree(dc, p.source(), family_limit)) {
                    if (c.source() != p.source()) continue;
                    Path cand = Path::infinite(g, p, c);
                    bool hit = false;
                    for (const Cylinder& cyl : cover)
                        if (cylinder_contains(g, cyl, cand)) {
                            hit = true;
                            break;
                        }
                    if (!hit) {
                        res.status = SubcoverResult::Status::Counterexample;
                        res.witness = cand;
                        return res;
                    }
                }
            }
            // every closure at this bound is covered; deeper or aperiodic
            // continuations remain unchecked
            inconclusive = true;
        }
        frontier = std::move(next);
    }
    if (inconclusive) {
        res.status = SubcoverResult::Status::Inconclusive;
        return res;
    }
    res.status = SubcoverResult::Status::Subcover;
    for (std::size_t i = 0; i < cover.size(); ++i)
        if (used[i]) res.subcover.push_back(cover[i]);
    return res;
}

}  // namespace pathspace
