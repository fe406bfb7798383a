#pragma once

// File formats and literals.
//
// Graph files (pathspace-graph.v1): {"rank", "vertices", "backend", ...}
// with backend one of "one-graph" (edges: {"name"|"family", "src", "dst"}),
// "squares" (blue/red edge lists plus squares [e, f, f2, e2] meaning
// e.f = f2.e2) and "table" ("bound", "morphisms", "compose").
//
// Path literals: finite "v:e1.e2", infinite "v:e1.(e2.e3)*"; members of
// N-indexed families are written "fam[7]", and a ramp tail uses a
// j-expression index, "v:(loop[j])*" or "v:(loop[2j+1])*".
//
// Sequence files (pathspace-sequence.v1) mirror the symbolic sequence
// fields; factor files (pathspace-factors.v1) describe factor products,
// A-points and W-sequences.  Degrees serialize as integer arrays with "inf"
// for an infinite coordinate.

#include <charconv>
#include <cstdint>
#include <optional>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "groupoid.hpp"
#include "sequences.hpp"
#include "tychonoff.hpp"

namespace pathspace::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// small parsing helpers

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

inline std::uint64_t parse_u64(std::string_view s, const char* what) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw ParseError(std::string("expected a number for ") + what + ", got '" +
                         std::string(s) + "'");
    return v;
}

// "7" -> const; "j", "2j", "j+1", "2j+3" -> affine in j
struct IndexExpr {
    bool affine = false;
    std::uint64_t a = 0, b = 0;
};

inline IndexExpr parse_index_expr(std::string_view s) {
    IndexExpr e;
    auto jpos = s.find('j');
    if (jpos == std::string_view::npos) {
        e.b = parse_u64(s, "family index");
        return e;
    }
    e.affine = true;
    e.a = jpos == 0 ? 1 : parse_u64(s.substr(0, jpos), "ramp stride");
    std::string_view rest = s.substr(jpos + 1);
    if (!rest.empty()) {
        if (rest.front() != '+') throw ParseError("malformed index expression '" + std::string(s) + "'");
        e.b = parse_u64(rest.substr(1), "ramp offset");
    }
    return e;
}

}  // namespace detail

// "e1" or "fam[7]"
inline Morphism parse_edge(const KGraph& g, std::string_view text) {
    text = detail::trim(text);
    auto lb = text.find('[');
    if (lb == std::string_view::npos) return g.edge(text);
    if (text.back() != ']') throw ParseError("malformed edge literal '" + std::string(text) + "'");
    std::string_view fam = text.substr(0, lb);
    std::uint64_t idx = detail::parse_u64(text.substr(lb + 1, text.size() - lb - 2), "family index");
    return g.family_edge(fam, idx);
}

// "v" or "v:e1.e2" (finite only)
inline Morphism parse_finite_path(const KGraph& g, std::string_view text);

// full path literal, including "(...)*" tails
inline Path parse_path(const KGraph& g, std::string_view text) {
    text = detail::trim(text);
    auto colon = text.find(':');
    std::string_view vname = colon == std::string_view::npos ? text : text.substr(0, colon);
    VertexId v = g.vertex(detail::trim(vname));
    Morphism prefix = g.vertex_morphism(v);
    if (colon == std::string_view::npos) return Path::finite(prefix);
    std::string_view rest = detail::trim(text.substr(colon + 1));
    while (!rest.empty()) {
        if (rest.front() == '(') {
            auto close = rest.find(')');
            if (close == std::string_view::npos || close + 1 >= rest.size() ||
                rest[close + 1] != '*' || close + 2 != rest.size())
                throw ParseError("malformed tail group in '" + std::string(text) + "'");
            std::string_view body = rest.substr(1, close - 1);
            // a j-expression index makes the group a ramp tail
            if (body.find('j') != std::string_view::npos) {
                auto lb = body.find('[');
                if (lb == std::string_view::npos || body.back() != ']' ||
                    body.find('.') != std::string_view::npos)
                    throw ParseError("a ramp tail must be a single family edge");
                std::string_view fam = body.substr(0, lb);
                detail::IndexExpr e =
                    detail::parse_index_expr(body.substr(lb + 1, body.size() - lb - 2));
                auto fidx = g.family_index(fam);
                if (!fidx) throw ParseError("unknown family '" + std::string(fam) + "'");
                return Path::ramp(g, prefix, *fidx, e.a, e.b);
            }
            Morphism cycle = g.vertex_morphism(prefix.source());
            std::size_t start = 0;
            std::string b(body);
            while (start <= b.size()) {
                auto dot = b.find('.', start);
                std::string_view tok(b.data() + start,
                                     (dot == std::string::npos ? b.size() : dot) - start);
                cycle = g.compose(cycle, parse_edge(g, tok));
                if (dot == std::string::npos) break;
                start = dot + 1;
            }
            return Path::infinite(g, prefix, cycle);
        }
        auto dot = rest.find('.');
        std::string_view tok = dot == std::string_view::npos ? rest : rest.substr(0, dot);
        prefix = g.compose(prefix, parse_edge(g, tok));
        rest = dot == std::string_view::npos ? std::string_view{} : rest.substr(dot + 1);
    }
    return Path::finite(prefix);
}

inline Morphism parse_finite_path(const KGraph& g, std::string_view text) {
    Path p = parse_path(g, text);
    if (!p.is_finite())
        throw ParseError("expected a finite path, got '" + std::string(text) + "'");
    return p.prefix_morphism();
}

// "lambda | mu | w"
inline GroupoidElement parse_element(const KGraph& g, std::string_view text) {
    auto p1 = text.find('|');
    auto p2 = p1 == std::string_view::npos ? p1 : text.find('|', p1 + 1);
    if (p1 == std::string_view::npos || p2 == std::string_view::npos)
        throw ParseError("element literal is 'lambda | mu | w'");
    Morphism lambda = parse_finite_path(g, text.substr(0, p1));
    Morphism mu = parse_finite_path(g, text.substr(p1 + 1, p2 - p1 - 1));
    Path w = parse_path(g, text.substr(p2 + 1));
    return make_element(g, lambda, mu, w);
}

// "3" (all coordinates) or "3,2"
inline Degree parse_degree(std::string_view text, std::size_t rank) {
    std::vector<std::uint64_t> coords;
    std::string s(detail::trim(text));
    std::size_t start = 0;
    while (start <= s.size()) {
        auto comma = s.find(',', start);
        std::string_view tok(s.data() + start, (comma == std::string::npos ? s.size() : comma) - start);
        coords.push_back(detail::parse_u64(detail::trim(tok), "degree coordinate"));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (coords.size() == 1 && rank > 1) coords.assign(rank, coords[0]);
    if (coords.size() != rank)
        throw ParseError("degree '" + std::string(text) + "' does not have rank " +
                         std::to_string(rank));
    return Degree(std::move(coords));
}

// ---------------------------------------------------------------------------
// graph files

inline KGraph load_graph(const json& j) {
    if (!j.contains("backend")) throw ParseError("graph file: missing 'backend'");
    std::string backend = j.at("backend").get<std::string>();
    std::size_t rank = j.at("rank").get<std::size_t>();
    std::vector<std::string> vertices = j.at("vertices").get<std::vector<std::string>>();

    if (backend == "one-graph") {
        if (rank != 1) throw ParseError("one-graph backend requires rank 1");
        KGraph::OneGraphBuilder b;
        for (auto& v : vertices) b.vertex(v);
        for (const auto& e : j.value("edges", json::array())) {
            std::string src = e.at("src").get<std::string>();
            std::string dst = e.at("dst").get<std::string>();
            if (e.contains("family"))
                b.family(e.at("family").get<std::string>(), src, dst);
            else
                b.edge(e.at("name").get<std::string>(), src, dst);
        }
        return b.build();
    }
    if (backend == "squares") {
        if (rank != 2) throw ParseError("squares backend requires rank 2");
        KGraph::SquaresBuilder b;
        for (auto& v : vertices) b.vertex(v);
        for (const auto& e : j.value("blue", json::array()))
            b.blue(e.at("name").get<std::string>(), e.at("src").get<std::string>(),
                   e.at("dst").get<std::string>());
        for (const auto& e : j.value("red", json::array()))
            b.red(e.at("name").get<std::string>(), e.at("src").get<std::string>(),
                  e.at("dst").get<std::string>());
        for (const auto& s : j.value("squares", json::array())) {
            if (!s.is_array() || s.size() != 4)
                throw ParseError("a square is a 4-tuple [e, f, f2, e2]");
            b.square(s[0].get<std::string>(), s[1].get<std::string>(), s[2].get<std::string>(),
                     s[3].get<std::string>());
        }
        return b.build();
    }
    if (backend == "table") {
        Degree bound(j.at("bound").get<std::vector<std::uint64_t>>());
        KGraph::TableBuilder b(rank, bound);
        for (auto& v : vertices) b.vertex(v);
        for (const auto& m : j.value("morphisms", json::array()))
            b.morphism(m.at("id").get<std::string>(),
                       Degree(m.at("degree").get<std::vector<std::uint64_t>>()),
                       m.at("range").get<std::string>(), m.at("source").get<std::string>());
        for (const auto& c : j.value("compose", json::array())) {
            if (!c.is_array() || c.size() != 3)
                throw ParseError("a composition entry is a triple [a, b, ab]");
            b.compose(c[0].get<std::string>(), c[1].get<std::string>(), c[2].get<std::string>());
        }
        return b.build();
    }
    throw ParseError("unknown backend '" + backend + "'");
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
    return j;
}

inline KGraph load_graph_file(const std::string& path) { return load_graph(load_json_file(path)); }

// ---------------------------------------------------------------------------
// sequence files

namespace detail {

inline LengthTerm load_length(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return LengthTerm::infinite();
        throw ParseError("length: expected \"inf\", {\"const\": c} or {\"affine\": [a,b]}");
    }
    if (j.contains("const")) return LengthTerm::constant(j.at("const").get<std::uint64_t>());
    if (j.contains("affine")) {
        auto ab = j.at("affine").get<std::vector<std::uint64_t>>();
        if (ab.size() != 2) throw ParseError("affine length is [a, b]");
        return LengthTerm::affine_n(ab[0], ab[1]);
    }
    throw ParseError("malformed length term");
}

inline EdgeTerm load_edge_term(const KGraph& g, const json& j) {
    if (j.contains("edge")) {
        Morphism e = parse_edge(g, j.at("edge").get<std::string>());
        return EdgeTerm::edge(e.word().at(0));
    }
    if (j.contains("family")) {
        auto fidx = g.family_index(j.at("family").get<std::string>());
        if (!fidx) throw ParseError("unknown family '" + j.at("family").get<std::string>() + "'");
        const json& idx = j.at("index");
        if (idx.contains("const")) return EdgeTerm::edge(EdgeRef{*fidx, idx.at("const").get<std::uint64_t>()});
        if (idx.contains("n")) {
            auto ab = idx.at("n").get<std::vector<std::uint64_t>>();
            return EdgeTerm::fam_n(*fidx, ab.at(0), ab.at(1));
        }
        if (idx.contains("i")) {
            auto ab = idx.at("i").get<std::vector<std::uint64_t>>();
            return EdgeTerm::fam_i(*fidx, ab.at(0), ab.at(1));
        }
        throw ParseError("family index term is {\"const\": c}, {\"n\": [a,b]} or {\"i\": [a,b]}");
    }
    throw ParseError("malformed edge term");
}

}  // namespace detail

inline PathSequence load_sequence(const KGraph& g, const json& j) {
    PathSequence seq;
    for (const json& bj : j.at("branches")) {
        std::string kind = bj.value("kind", "rules");
        if (kind == "const") {
            seq.branches.push_back(ConstSeq{parse_path(g, bj.at("path").get<std::string>())});
        } else if (kind == "pumped") {
            PumpedSeq ps;
            ps.head = parse_finite_path(g, bj.at("head").get<std::string>());
            ps.cycle = parse_finite_path(g, bj.at("cycle").get<std::string>());
            ps.exponent = detail::load_length(bj.at("exponent"));
            ps.tail = bj.contains("tail")
                          ? parse_path(g, bj.at("tail").get<std::string>())
                          : Path::finite(g.vertex_morphism(ps.cycle.source()));
            seq.branches.push_back(std::move(ps));
        } else if (kind == "rules") {
            RulesSeq rs;
            rs.start = g.vertex(bj.at("start").get<std::string>());
            rs.length = detail::load_length(bj.at("length"));
            for (const json& r : bj.value("rules", json::array()))
                rs.rules[r.at("position").get<std::uint64_t>()] =
                    detail::load_edge_term(g, r.at("term"));
            rs.default_term = detail::load_edge_term(g, bj.at("default"));
            seq.branches.push_back(std::move(rs));
        } else {
            throw ParseError("unknown branch kind '" + kind + "'");
        }
    }
    if (seq.branches.empty()) throw ParseError("sequence file has no branches");
    return seq;
}

// ---------------------------------------------------------------------------
// factor files

namespace tio {

inline tych::FactorProduct load_factors(const json& j) {
    auto load_factor = [](const json& f) {
        if (f.value("naturals", false)) return tych::FactorSpace::nat(f.value("name", "N"));
        return tych::FactorSpace::finite(f.at("name").get<std::string>(),
                                         f.at("points").get<std::vector<std::string>>());
    };
    std::vector<tych::FactorSpace> head;
    for (const json& f : j.value("head", json::array())) head.push_back(load_factor(f));
    tych::FactorSpace tail =
        j.contains("tail") ? load_factor(j.at("tail")) : tych::FactorSpace::nat();
    return tych::FactorProduct(std::move(head), tail);
}

inline tych::PointVal load_pointval(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return tych::PointVal::infinity();
        throw ParseError("point value: expected a number or \"inf\"");
    }
    return tych::PointVal::at(j.get<std::uint64_t>());
}

inline tych::Tuple load_tuple(const json& j) {
    std::vector<tych::PointVal> head;
    for (const json& h : j.value("head", json::array())) head.push_back(load_pointval(h));
    const json& tail = j.at("tail");
    if (tail.contains("const")) return tych::Tuple::constant(std::move(head), load_pointval(tail.at("const")));
    if (tail.contains("period")) {
        std::vector<tych::PointVal> per;
        for (const json& p : tail.at("period")) per.push_back(load_pointval(p));
        return tych::Tuple::periodic(std::move(head), std::move(per));
    }
    if (tail.contains("ramp")) {
        auto ab = tail.at("ramp").get<std::vector<std::uint64_t>>();
        if (ab.size() != 2) throw ParseError("ramp tail is [a, b]");
        return tych::Tuple::ramped(std::move(head), ab[0], ab[1]);
    }
    throw ParseError("tuple tail is {\"const\": v}, {\"period\": [...]} or {\"ramp\": [a,b]}");
}

inline tych::APoint load_apoint(const json& j) { return tych::APoint{load_tuple(j)}; }

inline tych::WPoint load_wpoint(const json& j) {
    const json& len = j.at("length");
    if (len.is_string() && len.get<std::string>() == "inf")
        return tych::WPoint::infinite(load_tuple(j));
    std::uint64_t L = len.get<std::uint64_t>();
    if (L == 0) return tych::WPoint::zero();
    std::vector<std::uint64_t> coords = j.at("coords").get<std::vector<std::uint64_t>>();
    if (coords.size() != L) throw ParseError("wpoint: coords length differs from 'length'");
    return tych::WPoint::finite(std::move(coords));
}

inline tych::PointTerm load_point_term(const json& j) {
    if (j.is_string() && j.get<std::string>() == "inf") return tych::PointTerm::infinity();
    if (j.contains("const")) return tych::PointTerm::constant(j.at("const").get<std::uint64_t>());
    if (j.contains("n")) {
        auto ab = j.at("n").get<std::vector<std::uint64_t>>();
        return tych::PointTerm::fam_n(ab.at(0), ab.at(1));
    }
    if (j.contains("i")) {
        auto ab = j.at("i").get<std::vector<std::uint64_t>>();
        return tych::PointTerm::fam_i(ab.at(0), ab.at(1));
    }
    throw ParseError("point term is {\"const\": v}, {\"n\": [a,b]} or {\"i\": [a,b]}");
}

inline tych::WSequence load_wsequence(const json& j) {
    tych::WSequence seq;
    for (const json& bj : j.at("branches")) {
        std::string kind = bj.value("kind", "rules");
        if (kind == "const") {
            seq.branches.push_back(tych::WConst{load_wpoint(bj.at("value"))});
        } else if (kind == "rules") {
            tych::WRules rs;
            rs.length = pathspace::io::detail::load_length(bj.at("length"));
            for (const json& r : bj.value("rules", json::array()))
                rs.rules[r.at("position").get<std::uint64_t>()] = load_point_term(r.at("term"));
            rs.default_term = load_point_term(bj.at("default"));
            seq.branches.push_back(std::move(rs));
        } else {
            throw ParseError("unknown branch kind '" + kind + "'");
        }
    }
    if (seq.branches.empty()) throw ParseError("sequence has no branches");
    return seq;
}

}  // namespace tio

}  // namespace pathspace::io
