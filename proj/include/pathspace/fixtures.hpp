#pragma once

// Built-in fixtures: the bouquet graphs E_n and E_infty, the one-vertex
// 2-graph with the single commuting square b.r = r.b, explicit-table
// truncations, and the deliberately corrupted presentations the axiom
// checker must reject.  The JSON texts here are the same fixtures shipped
// under fixtures/ and are what the CLI's --fixture flag resolves.

#include <map>
#include <string>

#include "io.hpp"

namespace pathspace::fixtures {

// bouquet of n circles at one vertex; loops named "1".."n"
inline KGraph e_n(std::uint64_t n) {
    KGraph::OneGraphBuilder b;
    b.vertex("v");
    for (std::uint64_t i = 1; i <= n; ++i) b.edge(std::to_string(i), "v", "v");
    return b.build();
}

// infinite bouquet: one vertex, one N-indexed loop family
inline KGraph e_infty() {
    return KGraph::OneGraphBuilder().vertex("v").family("loop", "v", "v").build();
}

// one vertex, one blue loop b, one red loop r, single square b.r = r.b
inline KGraph one_vertex_square() {
    return KGraph::SquaresBuilder()
        .vertex("u")
        .blue("b", "u", "u")
        .red("r", "u", "u")
        .square("b", "r", "r", "b")
        .build();
}

// Explicit-table truncation of any finite k-graph up to `bound`: morphism
// ids are the canonical word strings, compositions are tabulated by
// enumeration.
inline KGraph table_truncation(const KGraph& g, const Degree& bound) {
    KGraph::TableBuilder b(g.rank(), bound);
    for (VertexId v = 0; v < g.vertex_count(); ++v) b.vertex(g.vertex_name(v));
    std::vector<Morphism> all;
    for (const Degree& d : detail::degrees_up_to(bound))
        for (const Morphism& m : g.morphisms_of_degree(d, std::nullopt))
            if (!m.is_vertex()) {
                b.morphism(g.morphism_str(m), m.degree(), g.vertex_name(m.range()),
                           g.vertex_name(m.source()));
                all.push_back(m);
            }
    for (const Morphism& x : all)
        for (const Morphism& y : all) {
            if (x.source() != y.range()) continue;
            if (!leq(add(x.degree(), y.degree()), bound)) continue;
            b.compose(g.morphism_str(x), g.morphism_str(y), g.morphism_str(g.compose(x, y)));
        }
    return b.build();
}

// two blue-red pairs mapped to the same red-blue pair: the square relation
// is not a bijection
inline KGraph broken_squares() {
    return KGraph::SquaresBuilder()
        .vertex("u")
        .blue("b1", "u", "u")
        .blue("b2", "u", "u")
        .red("r", "u", "u")
        .square("b1", "r", "r", "b1")
        .square("b2", "r", "r", "b1")
        .build();
}

// c factors as a.b1 and a.b2: factorization at (1,0) is not unique
inline KGraph table_nonunique() {
    return KGraph::TableBuilder(2, Degree{{1, 1}})
        .vertex("u")
        .morphism("a", Degree{{1, 0}}, "u", "u")
        .morphism("b1", Degree{{0, 1}}, "u", "u")
        .morphism("b2", Degree{{0, 1}}, "u", "u")
        .morphism("c", Degree{{1, 1}}, "u", "u")
        .compose("a", "b1", "c")
        .compose("a", "b2", "c")
        .compose("b1", "a", "c")
        .compose("b2", "a", "c")
        .build();
}

// compose(a, b) declared with the wrong degree: composition is not
// degree-additive
inline KGraph table_skew() {
    return KGraph::TableBuilder(2, Degree{{2, 1}})
        .vertex("u")
        .morphism("a", Degree{{1, 0}}, "u", "u")
        .morphism("b", Degree{{0, 1}}, "u", "u")
        .morphism("c", Degree{{2, 1}}, "u", "u")
        .compose("a", "b", "c")
        .build();
}

// ---------------------------------------------------------------------------
// embedded JSON fixtures (also shipped under fixtures/)

inline const std::map<std::string, std::string>& json_fixtures() {
    static const std::map<std::string, std::string> table = {
        {"e2", R"({
  "schema": "pathspace-graph.v1",
  "rank": 1,
  "vertices": ["v"],
  "backend": "one-graph",
  "edges": [
    {"name": "1", "src": "v", "dst": "v"},
    {"name": "2", "src": "v", "dst": "v"}
  ]
})"},
        {"e3", R"({
  "schema": "pathspace-graph.v1",
  "rank": 1,
  "vertices": ["v"],
  "backend": "one-graph",
  "edges": [
    {"name": "1", "src": "v", "dst": "v"},
    {"name": "2", "src": "v", "dst": "v"},
    {"name": "3", "src": "v", "dst": "v"}
  ]
})"},
        {"einfty", R"({
  "schema": "pathspace-graph.v1",
  "rank": 1,
  "vertices": ["v"],
  "backend": "one-graph",
  "edges": [
    {"family": "loop", "src": "v", "dst": "v"}
  ]
})"},
        {"square2", R"({
  "schema": "pathspace-graph.v1",
  "rank": 2,
  "vertices": ["u"],
  "backend": "squares",
  "blue": [{"name": "b", "src": "u", "dst": "u"}],
  "red": [{"name": "r", "src": "u", "dst": "u"}],
  "squares": [["b", "r", "r", "b"]]
})"},
        {"squares-broken", R"({
  "schema": "pathspace-graph.v1",
  "rank": 2,
  "vertices": ["u"],
  "backend": "squares",
  "blue": [{"name": "b1", "src": "u", "dst": "u"}, {"name": "b2", "src": "u", "dst": "u"}],
  "red": [{"name": "r", "src": "u", "dst": "u"}],
  "squares": [["b1", "r", "r", "b1"], ["b2", "r", "r", "b1"]]
})"},
        {"table-nonunique", R"({
  "schema": "pathspace-graph.v1",
  "rank": 2,
  "vertices": ["u"],
  "backend": "table",
  "bound": [1, 1],
  "morphisms": [
    {"id": "a", "degree": [1, 0], "range": "u", "source": "u"},
    {"id": "b1", "degree": [0, 1], "range": "u", "source": "u"},
    {"id": "b2", "degree": [0, 1], "range": "u", "source": "u"},
    {"id": "c", "degree": [1, 1], "range": "u", "source": "u"}
  ],
  "compose": [["a", "b1", "c"], ["a", "b2", "c"], ["b1", "a", "c"], ["b2", "a", "c"]]
})"},
        {"table-skew", R"({
  "schema": "pathspace-graph.v1",
  "rank": 2,
  "vertices": ["u"],
  "backend": "table",
  "bound": [2, 1],
  "morphisms": [
    {"id": "a", "degree": [1, 0], "range": "u", "source": "u"},
    {"id": "b", "degree": [0, 1], "range": "u", "source": "u"},
    {"id": "c", "degree": [2, 1], "range": "u", "source": "u"}
  ],
  "compose": [["a", "b", "c"]]
})"},
        {"einfty-sequences", R"({
  "schema": "pathspace-sequence.v1",
  "graph": "einfty",
  "cases": [
    {
      "name": "increasing-word",
      "branches": [
        {"kind": "rules", "start": "v", "length": {"affine": [1, 0]},
         "default": {"family": "loop", "index": {"i": [1, 0]}}}
      ],
      "limit": "v:(loop[j])*"
    },
    {
      "name": "escaping-third-letter",
      "branches": [
        {"kind": "rules", "start": "v", "length": "inf",
         "rules": [
           {"position": 1, "term": {"edge": "loop[1]"}},
           {"position": 2, "term": {"edge": "loop[2]"}},
           {"position": 3, "term": {"family": "loop", "index": {"n": [1, 0]}}}
         ],
         "default": {"edge": "loop[1]"}}
      ],
      "limit": "v:loop[1].loop[2]"
    },
    {
      "name": "escaping-everywhere",
      "branches": [
        {"kind": "rules", "start": "v", "length": "inf",
         "default": {"family": "loop", "index": {"n": [1, 0]}}}
      ],
      "limit": "v"
    }
  ]
})"},
        {"naturals-factors", R"({
  "schema": "pathspace-factors.v1",
  "factors": {"tail": {"name": "N", "naturals": true}},
  "points": [
    {"head": [1, 2, "inf"], "tail": {"const": "inf"}},
    {"head": ["inf"], "tail": {"const": 5}},
    {"head": [3], "tail": {"period": [1, 2]}},
    {"head": [], "tail": {"ramp": [1, 0]}}
  ],
  "sequence": {
    "branches": [
      {"kind": "rules", "length": "inf",
       "rules": [
         {"position": 1, "term": {"const": 1}},
         {"position": 2, "term": {"const": 2}},
         {"position": 3, "term": {"n": [1, 0]}}
       ],
       "default": {"const": 1}}
    ],
    "limit": {"length": 2, "coords": [1, 2]}
  }
})"},
    };
    return table;
}

inline std::string json_text(const std::string& name) {
    auto it = json_fixtures().find(name);
    if (it == json_fixtures().end()) throw ParseError("unknown fixture '" + name + "'");
    return it->second;
}

inline KGraph graph(const std::string& name) {
    return io::load_graph(io::json::parse(json_text(name)));
}

}  // namespace pathspace::fixtures
