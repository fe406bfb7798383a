// Batch front door: load graph/sequence/factor files, run the checks, and
// emit machine-readable verdicts.  Reports are line-oriented records with a
// stable schema version; ordering is deterministic (sorted by check id).
//
// Exit codes: 0 all checks pass, 1 a check failed (witness printed),
// 2 usage or parse error, 3 inconclusive at the given bound.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pathspace/fixtures.hpp"
#include "pathspace/groupoid.hpp"
#include "pathspace/io.hpp"
#include "pathspace/sequences.hpp"
#include "pathspace/tychonoff.hpp"

namespace {

using namespace pathspace;
using io::json;

struct Record {
    std::string check;
    std::string status;  // pass | fail | inconclusive | info
    std::vector<std::pair<std::string, std::string>> fields;
};

struct Report {
    std::vector<Record> records;
    bool jsonl = false;

    void add(Record r) { records.push_back(std::move(r)); }

    int emit(std::ostream& os) {
        std::stable_sort(records.begin(), records.end(),
                         [](const Record& a, const Record& b) { return a.check < b.check; });
        bool failed = false, inconclusive = false;
        for (const Record& r : records) {
            if (r.status == "fail") failed = true;
            if (r.status == "inconclusive") inconclusive = true;
            if (jsonl) {
                json j;
                j["schema"] = "pathspace.v1";
                j["check"] = r.check;
                j["status"] = r.status;
                for (const auto& [k, v] : r.fields) j[k] = v;
                os << j.dump() << "\n";
            } else {
                os << "pathspace.v1 check=" << r.check << " status=" << r.status;
                for (const auto& [k, v] : r.fields) os << " " << k << "=\"" << v << "\"";
                os << "\n";
            }
        }
        return failed ? 1 : inconclusive ? 3 : 0;
    }
};

struct CommonOpts {
    std::string graph_file;
    std::string fixture;
    std::string bound = "3";
    std::uint64_t limit = 8;
    std::uint64_t horizon = 16;
    std::string format = "text";
};

void add_common(CLI::App* cmd, CommonOpts& o, bool wants_graph = true) {
    if (wants_graph) {
        cmd->add_option("--graph", o.graph_file, "graph specification file (JSON)");
        cmd->add_option("--fixture", o.fixture, "built-in fixture name (see `fixtures --list`)");
    }
    cmd->add_option("--bound", o.bound, "degree bound, e.g. 3 or 2,2");
    cmd->add_option("--limit", o.limit, "members enumerated per N-indexed family");
    cmd->add_option("--horizon", o.horizon, "index horizon for sequence checks");
    cmd->add_option("--format", o.format, "text | jsonl")
        ->check(CLI::IsMember({"text", "jsonl"}));
}

KGraph load_graph_opt(const CommonOpts& o) {
    if (!o.fixture.empty()) return fixtures::graph(o.fixture);
    if (!o.graph_file.empty()) return io::load_graph_file(o.graph_file);
    throw ParseError("either --graph or --fixture is required");
}

std::uint64_t seed_from_env() {
    if (const char* s = std::getenv("PATHSPACE_SEED")) return std::strtoull(s, nullptr, 10);
    return 0x9e3779b97f4a7c15ull;
}

std::string verdict_status(bool pass) { return pass ? "pass" : "fail"; }

// --------------------------------------------------------------------------
// subcommands

int run_validate(const CommonOpts& o, Report& rep) {
    KGraph g = load_graph_opt(o);
    Degree bound = io::parse_degree(o.bound, g.rank());
    AxiomReport r = g.verify_axioms(bound, o.limit);
    Record rec{"validate", verdict_status(r.pass), {}};
    rec.fields.emplace_back("bound", bound.str());
    rec.fields.emplace_back("limit", std::to_string(o.limit));
    rec.fields.emplace_back("morphisms", std::to_string(r.checked_morphisms));
    rec.fields.emplace_back("factorizations", std::to_string(r.checked_factorizations));
    rep.add(std::move(rec));
    for (std::size_t i = 0; i < r.failures.size(); ++i) {
        Record c{"validate.counterexample." + std::to_string(i), "fail", {}};
        c.fields.emplace_back("morphism", g.morphism_str(r.failures[i].morphism));
        c.fields.emplace_back("split", r.failures[i].split.str());
        c.fields.emplace_back("what", r.failures[i].what);
        rep.add(std::move(c));
    }
    return 0;
}

int run_align(const CommonOpts& o, std::uint64_t threshold, Report& rep) {
    KGraph g = load_graph_opt(o);
    Degree bound = io::parse_degree(o.bound, g.rank());
    AlignmentReport r = g.check_finitely_aligned(bound, o.limit, threshold);
    Record rec{"align", verdict_status(r.pass), {}};
    rec.fields.emplace_back("bound", bound.str());
    rec.fields.emplace_back("pairs", std::to_string(r.checked_pairs));
    if (!r.note.empty()) rec.fields.emplace_back("note", r.note);
    if (r.witness) {
        rec.fields.emplace_back("witness_lambda", g.morphism_str(r.witness->first));
        rec.fields.emplace_back("witness_mu", g.morphism_str(r.witness->second));
        rec.fields.emplace_back("extensions", std::to_string(r.witness_count));
    }
    rep.add(std::move(rec));
    return 0;
}

int run_enumerate(const CommonOpts& o, const std::string& vertex, Report& rep) {
    KGraph g = load_graph_opt(o);
    Degree bound = io::parse_degree(o.bound, g.rank());
    VertexId v = vertex.empty() ? 0 : g.vertex(vertex);
    std::vector<Path> paths = enumerate_Wv(g, v, bound, o.limit);
    Record rec{"enumerate", "info", {}};
    rec.fields.emplace_back("vertex", g.vertex_name(v));
    rec.fields.emplace_back("bound", bound.str());
    rec.fields.emplace_back("count", std::to_string(paths.size()));
    rep.add(std::move(rec));
    for (std::size_t i = 0; i < paths.size(); ++i) {
        std::ostringstream id;
        id << "enumerate.path." << std::setw(4) << std::setfill('0') << i;
        Record c{id.str(), "info", {}};
        c.fields.emplace_back("path", path_str(g, paths[i]));
        c.fields.emplace_back("degree", paths[i].extdegree().str());
        rep.add(std::move(c));
    }
    return 0;
}

int run_encode(const CommonOpts& o, const std::string& path_literal, Report& rep) {
    KGraph g = load_graph_opt(o);
    Degree bound = io::parse_degree(o.bound, g.rank());
    Path w = io::parse_path(g, path_literal);
    Window window = Window::prefix_window(g, w.range(), bound, o.limit);
    Encoding a = alpha(g, w, window);
    std::string bits;
    for (char b : a.bits) bits += b ? '1' : '0';
    Record rec{"encode", "info", {}};
    rec.fields.emplace_back("path", path_str(g, w));
    rec.fields.emplace_back("window", std::to_string(window.size()));
    rec.fields.emplace_back("bits", bits);
    std::string support;
    for (const Morphism& y : encoding_support(window, a)) {
        if (!support.empty()) support += ' ';
        support += g.morphism_str(y);
    }
    rec.fields.emplace_back("support", support);
    rep.add(std::move(rec));
    LemmaVerdict lv = check_lemma_conditions(g, window, a, o.limit);
    Record lrec{"encode.lemma", lv.pass() || lv.status == LemmaVerdict::Status::Bounded ? "pass" : "fail", {}};
    lrec.fields.emplace_back("verdict", lemma_status_str(lv.status));
    if (lv.witness) {
        lrec.fields.emplace_back("witness_1", g.morphism_str(lv.witness->first));
        lrec.fields.emplace_back("witness_2", g.morphism_str(lv.witness->second));
    }
    rep.add(std::move(lrec));
    return 0;
}

void converge_case(const KGraph& g, const json& spec, const std::string& name,
                   const CommonOpts& o, Report& rep) {
    PathSequence seq = io::load_sequence(g, spec);
    Record rec{"converge." + name, "info", {}};
    std::optional<Path> lim = sequence_limit(g, seq, o.limit);
    rec.fields.emplace_back("limit", lim ? path_str(g, *lim) : "none-in-class");
    if (spec.contains("limit")) {
        Path x = io::parse_path(g, spec.at("limit").get<std::string>());
        ConvergenceVerdict v = converges(g, seq, x, o.limit);
        rec.status = verdict_status(v.pass);
        rec.fields.emplace_back("candidate", path_str(g, x));
        rec.fields.emplace_back("threshold", std::to_string(v.threshold));
        rec.fields.emplace_back("reason", v.reason);
    }
    rep.add(std::move(rec));
}

int run_converge(const CommonOpts& o, const std::string& input, Report& rep) {
    json j = io::load_json_file(input);
    std::string schema = j.value("schema", "");
    if (schema == "pathspace-factors.v1") {
        // tychonoff oracle, selected by input kind
        tych::FactorProduct fp = io::tio::load_factors(j.value("factors", json::object()));
        if (!j.contains("sequence")) throw ParseError("factor file has no 'sequence'");
        const json& sj = j.at("sequence");
        tych::WSequence seq = io::tio::load_wsequence(sj);
        if (!sj.contains("limit")) throw ParseError("sequence has no 'limit'");
        tych::WPoint x = io::tio::load_wpoint(sj.at("limit"));
        ConvergenceVerdict pw = tych::converges_pointwise(fp, seq, x);
        ConvergenceVerdict qt =
            tych::converges_quotient(fp, seq, x, o.horizon, 8, seed_from_env());
        Record rec{"converge.pointwise", verdict_status(pw.pass), {{"reason", pw.reason}}};
        rep.add(std::move(rec));
        Record rec2{"converge.quotient", verdict_status(qt.pass), {{"reason", qt.reason}}};
        rep.add(std::move(rec2));
        Record agree{"converge.agreement", verdict_status(pw.pass == qt.pass), {}};
        rep.add(std::move(agree));
        return 0;
    }
    // path-space sequence input
    KGraph g = !o.fixture.empty() || !o.graph_file.empty()
                   ? load_graph_opt(o)
                   : fixtures::graph(j.value("graph", "einfty"));
    if (j.contains("cases")) {
        for (const json& c : j.at("cases"))
            converge_case(g, c, c.value("name", "case"), o, rep);
    } else {
        converge_case(g, j, "sequence", o, rep);
    }
    return 0;
}

int run_subcover(const CommonOpts& o, const std::string& vertex,
                 const std::vector<std::string>& cylinder_literals, const std::string& target,
                 Report& rep) {
    KGraph g = load_graph_opt(o);
    Degree bound = io::parse_degree(o.bound, g.rank());
    VertexId v = vertex.empty() ? 0 : g.vertex(vertex);
    std::vector<Cylinder> cover;
    for (const std::string& lit : cylinder_literals)
        cover.push_back(Cylinder{io::parse_finite_path(g, lit)});
    CoverTarget tgt = target == "Z" ? CoverTarget::InfiniteOnly : CoverTarget::AllPaths;
    SubcoverResult r = finite_subcover(g, cover, v, bound, o.limit, tgt);
    Record rec{"subcover", "", {}};
    rec.fields.emplace_back("bound", bound.str());
    rec.fields.emplace_back("target", target);
    switch (r.status) {
        case SubcoverResult::Status::Subcover: {
            rec.status = "pass";
            std::string bases;
            for (const Cylinder& c : r.subcover) {
                if (!bases.empty()) bases += ' ';
                bases += g.morphism_str(c.base);
            }
            rec.fields.emplace_back("subcover", bases);
            break;
        }
        case SubcoverResult::Status::Counterexample:
            rec.status = "fail";
            rec.fields.emplace_back("witness", path_str(g, *r.witness));
            break;
        case SubcoverResult::Status::Inconclusive:
            rec.status = "inconclusive";
            break;
    }
    rep.add(std::move(rec));
    return 0;
}

int run_groupoid(const CommonOpts& o, const std::string& left, const std::string& right,
                 const std::string& element, const std::string& basis, bool do_invert,
                 Report& rep) {
    KGraph g = load_graph_opt(o);
    if (!left.empty() && !right.empty()) {
        GroupoidElement a = io::parse_element(g, left);
        GroupoidElement b = io::parse_element(g, right);
        Record rec{"groupoid.compose", "info", {}};
        rec.fields.emplace_back("left", element_str(g, a));
        rec.fields.emplace_back("right", element_str(g, b));
        if (element_defined_pair(g, a, b)) {
            GroupoidElement ab = compose(g, a, b);
            rec.fields.emplace_back("result", element_str(g, ab));
        } else {
            rec.status = "fail";
            rec.fields.emplace_back("reason", "not composable: left.y != right.x");
        }
        rep.add(std::move(rec));
    }
    if (!element.empty() && do_invert) {
        GroupoidElement el = io::parse_element(g, element);
        Record rec{"groupoid.invert", "info", {}};
        rec.fields.emplace_back("element", element_str(g, el));
        rec.fields.emplace_back("result", element_str(g, invert(g, el)));
        rep.add(std::move(rec));
    }
    if (!element.empty() && !basis.empty()) {
        GroupoidElement el = io::parse_element(g, element);
        auto bar = basis.find('|');
        if (bar == std::string::npos) throw ParseError("basis literal is 'lambda | mu'");
        BasisSet Z = basis_set(g, io::parse_finite_path(g, basis.substr(0, bar)),
                               io::parse_finite_path(g, basis.substr(bar + 1)));
        Record rec{"groupoid.membership", "info", {}};
        rec.fields.emplace_back("element", element_str(g, el));
        rec.fields.emplace_back("basis",
                                "Z(" + g.morphism_str(Z.lambda) + "," + g.morphism_str(Z.mu) + ")");
        rec.fields.emplace_back("member", basis_membership(g, el, Z) ? "true" : "false");
        rep.add(std::move(rec));
    }
    return 0;
}

int run_tychonoff(const CommonOpts& o, const std::string& input, Report& rep) {
    json j = io::load_json_file(input);
    tych::FactorProduct fp = io::tio::load_factors(j.value("factors", json::object()));
    const json& points = j.value("points", json::array());
    for (std::size_t i = 0; i < points.size(); ++i) {
        tych::APoint a = io::tio::load_apoint(points[i]);
        Record rec{"tychonoff.point." + std::to_string(i), "info", {}};
        rec.fields.emplace_back("apoint", tych::apoint_str(a));
        rec.fields.emplace_back("N", tych::N_of(a).str());
        rec.fields.emplace_back("Q", tych::wpoint_str(tych::Q(a)));
        rep.add(std::move(rec));
    }
    if (j.contains("sequence")) {
        const json& sj = j.at("sequence");
        tych::WSequence seq = io::tio::load_wsequence(sj);
        tych::APointSequence lifts = tych::minimal_lift(seq);
        std::vector<tych::APoint> cps = tych::cluster_points(fp, lifts, o.horizon);
        for (std::size_t i = 0; i < cps.size(); ++i) {
            Record rec{"tychonoff.cluster." + std::to_string(i), "info", {}};
            rec.fields.emplace_back("apoint", tych::apoint_str(cps[i]));
            rec.fields.emplace_back("Q", tych::wpoint_str(tych::Q(cps[i])));
            rep.add(std::move(rec));
        }
        if (sj.contains("limit")) {
            tych::WPoint x = io::tio::load_wpoint(sj.at("limit"));
            ConvergenceVerdict pw = tych::converges_pointwise(fp, seq, x);
            ConvergenceVerdict qt =
                tych::converges_quotient(fp, seq, x, o.horizon, 8, seed_from_env());
            rep.add(Record{"tychonoff.pointwise", verdict_status(pw.pass), {{"reason", pw.reason}}});
            rep.add(Record{"tychonoff.quotient", verdict_status(qt.pass), {{"reason", qt.reason}}});
        }
    }
    return 0;
}

int run_fixtures(bool list, const std::string& dump_dir, const std::string& show, Report& rep) {
    if (list) {
        for (const auto& [name, text] : fixtures::json_fixtures()) {
            Record rec{"fixtures." + name, "info", {}};
            rec.fields.emplace_back("bytes", std::to_string(text.size()));
            rep.add(std::move(rec));
        }
    }
    if (!show.empty()) std::cout << fixtures::json_text(show) << "\n";
    if (!dump_dir.empty()) {
        for (const auto& [name, text] : fixtures::json_fixtures()) {
            std::string path = dump_dir + "/" + name + ".json";
            std::ofstream out(path);
            if (!out) throw ParseError("cannot write '" + path + "'");
            out << text << "\n";
            Record rec{"fixtures.dump." + name, "info", {{"file", path}}};
            rep.add(std::move(rec));
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"path-space topology toolkit for finitely aligned k-graphs"};
    app.require_subcommand(1);

    CommonOpts validate_o, align_o, enum_o, encode_o, converge_o, subcover_o, groupoid_o, tych_o;
    std::uint64_t align_threshold = 1u << 20;
    std::string enum_vertex, encode_path, converge_input, subcover_vertex, subcover_target = "W";
    std::vector<std::string> subcover_cylinders;
    std::string gp_left, gp_right, gp_element, gp_basis;
    bool gp_invert = false;
    std::string tych_input;
    bool fx_list = false;
    std::string fx_dump, fx_show;

    auto* c_validate = app.add_subcommand("validate", "verify k-graph axioms up to a bound");
    add_common(c_validate, validate_o);

    auto* c_align = app.add_subcommand("align", "check finite alignment up to a bound");
    add_common(c_align, align_o);
    c_align->add_option("--threshold", align_threshold, "finiteness threshold for |E|");

    auto* c_enum = app.add_subcommand("enumerate", "enumerate W_v up to a bound");
    add_common(c_enum, enum_o);
    c_enum->add_option("--vertex", enum_vertex, "start vertex (default: first)");

    auto* c_encode = app.add_subcommand("encode", "alpha-encode a path and check the membership conditions");
    add_common(c_encode, encode_o);
    c_encode->add_option("--path", encode_path, "path literal")->required();

    auto* c_converge = app.add_subcommand("converge", "decide convergence of a symbolic sequence");
    add_common(c_converge, converge_o);
    c_converge->add_option("input", converge_input, "sequence or factor file (JSON)")->required();

    auto* c_subcover = app.add_subcommand("subcover", "finite subcover search over the prefix tree");
    add_common(c_subcover, subcover_o);
    c_subcover->add_option("--vertex", subcover_vertex, "start vertex (default: first)");
    c_subcover->add_option("--cylinder", subcover_cylinders, "cylinder base (repeatable)")
        ->required();
    c_subcover->add_option("--target", subcover_target, "W (all paths) or Z (infinite only)")
        ->check(CLI::IsMember({"W", "Z"}));

    auto* c_groupoid = app.add_subcommand("groupoid", "compose/invert elements, test basis membership");
    add_common(c_groupoid, groupoid_o);
    c_groupoid->add_option("--left", gp_left, "element literal 'lambda | mu | w'");
    c_groupoid->add_option("--right", gp_right, "element literal");
    c_groupoid->add_option("--element", gp_element, "element literal");
    c_groupoid->add_flag("--invert", gp_invert, "invert --element");
    c_groupoid->add_option("--basis", gp_basis, "basis literal 'lambda | mu'");

    auto* c_tych = app.add_subcommand("tychonoff", "Q/N/cluster traces over factor spaces");
    add_common(c_tych, tych_o, false);
    c_tych->add_option("input", tych_input, "factor file (JSON)")->required();

    auto* c_fixtures = app.add_subcommand("fixtures", "list or dump the built-in fixtures");
    c_fixtures->add_flag("--list", fx_list, "list fixture names");
    c_fixtures->add_option("--dump", fx_dump, "write all fixtures into a directory");
    c_fixtures->add_option("--show", fx_show, "print one fixture");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    Report rep;
    try {
        if (c_validate->parsed()) {
            rep.jsonl = validate_o.format == "jsonl";
            run_validate(validate_o, rep);
        } else if (c_align->parsed()) {
            rep.jsonl = align_o.format == "jsonl";
            run_align(align_o, align_threshold, rep);
        } else if (c_enum->parsed()) {
            rep.jsonl = enum_o.format == "jsonl";
            run_enumerate(enum_o, enum_vertex, rep);
        } else if (c_encode->parsed()) {
            rep.jsonl = encode_o.format == "jsonl";
            run_encode(encode_o, encode_path, rep);
        } else if (c_converge->parsed()) {
            rep.jsonl = converge_o.format == "jsonl";
            run_converge(converge_o, converge_input, rep);
        } else if (c_subcover->parsed()) {
            rep.jsonl = subcover_o.format == "jsonl";
            run_subcover(subcover_o, subcover_vertex, subcover_cylinders, subcover_target, rep);
        } else if (c_groupoid->parsed()) {
            rep.jsonl = groupoid_o.format == "jsonl";
            run_groupoid(groupoid_o, gp_left, gp_right, gp_element, gp_basis, gp_invert, rep);
        } else if (c_tych->parsed()) {
            rep.jsonl = tych_o.format == "jsonl";
            run_tychonoff(tych_o, tych_input, rep);
        } else if (c_fixtures->parsed()) {
            run_fixtures(fx_list, fx_dump, fx_show, rep);
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const io::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rep.emit(std::cout);
}
