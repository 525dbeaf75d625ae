#pragma once

// Configuration loading: strict JSON with full parse-time validation.  Every
// schema violation is reported with the file name and the line of the
// offending key, unknown keys are rejected, and the module preconditions
// (grid divisibility, component clearance, dimensions) are checked here so a
// config that loads cleanly cannot fail structurally later.

#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "harmap/solver.hpp"

namespace harmap {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    Problem problem;
    std::string output_dir;  // empty when the config does not set one
};

namespace config_detail {

using json = nlohmann::json;

inline int line_of_byte(const std::string& text, size_t byte) {
    int line = 1;
    for (size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

// Map every JSON-pointer path in the document to the line of its key (object
// members anchor at the key, array elements at the value).  The standard
// parser validates values but drops positions, so this companion scan keeps
// them; it also rejects duplicate keys, which the parser would fold silently.
class LineScanner {
  public:
    LineScanner(const std::string& text, const std::string& file) : text_(text), file_(file) {}

    std::map<std::string, int> scan() {
        lines_["" /* root */] = 1;
        skip_ws();
        parse_value("");
        return std::move(lines_);
    }

  private:
    const std::string& text_;
    const std::string& file_;
    size_t pos_ = 0;
    int line_ = 1;
    std::map<std::string, int> lines_;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(file_ + ":" + std::to_string(line_) + ": " + msg);
    }
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    char take() {
        if (pos_ >= text_.size()) fail("unexpected end of file");
        const char c = text_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) take();
    }
    static std::string escape_ptr(const std::string& key) {
        std::string o;
        for (const char c : key) {
            if (c == '~') o += "~0";
            else if (c == '/') o += "~1";
            else o += c;
        }
        return o;
    }
    std::string parse_string() {
        if (take() != '"') fail("expected a string");
        std::string s;
        while (true) {
            const char c = take();
            if (c == '"') return s;
            if (c == '\\') {
                take();  // the validated parse handles escapes; skip here
                s += '?';
            } else {
                s += c;
            }
        }
    }
    void parse_value(const std::string& ptr) {
        skip_ws();
        const char c = peek();
        if (c == '{') {
            take();
            std::set<std::string> seen;
            skip_ws();
            if (peek() == '}') {
                take();
                return;
            }
            while (true) {
                skip_ws();
                const int key_line = line_;
                const std::string key = parse_string();
                if (!seen.insert(key).second)
                    fail("duplicate key \"" + key + "\"");
                const std::string child = ptr + "/" + escape_ptr(key);
                lines_[child] = key_line;
                skip_ws();
                if (take() != ':') fail("expected ':' after key");
                parse_value(child);
                skip_ws();
                const char d = take();
                if (d == '}') return;
                if (d != ',') fail("expected ',' or '}'");
            }
        } else if (c == '[') {
            take();
            skip_ws();
            if (peek() == ']') {
                take();
                return;
            }
            long idx = 0;
            while (true) {
                skip_ws();
                lines_[ptr + "/" + std::to_string(idx)] = line_;
                parse_value(ptr + "/" + std::to_string(idx));
                ++idx;
                skip_ws();
                const char d = take();
                if (d == ']') return;
                if (d != ',') fail("expected ',' or ']'");
            }
        } else if (c == '"') {
            parse_string();
        } else {  // number / true / false / null — consume the atom
            while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(peek())) &&
                   peek() != ',' && peek() != '}' && peek() != ']')
                take();
        }
    }
};

// One location-aware view of a JSON node.
struct Node {
    const json* j;
    const std::map<std::string, int>* lines;
    const std::string* file;
    std::string ptr;

    int line() const {
        auto it = lines->find(ptr);
        if (it != lines->end()) return it->second;
        return 1;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        const std::string at = ptr.empty() ? std::string("document root") : ptr;
        throw ConfigError(*file + ":" + std::to_string(line()) + ": " + msg + " (at " + at + ")");
    }
    bool has(const std::string& key) const { return j->is_object() && j->contains(key); }
    Node child(const std::string& key) const {
        return Node{&j->at(key), lines, file, ptr + "/" + LineScannerEscape(key)};
    }
    Node child(size_t idx) const {
        return Node{&j->at(idx), lines, file, ptr + "/" + std::to_string(idx)};
    }
    static std::string LineScannerEscape(const std::string& key) {
        std::string o;
        for (const char c : key) {
            if (c == '~') o += "~0";
            else if (c == '/') o += "~1";
            else o += c;
        }
        return o;
    }

    void require_object(const std::set<std::string>& allowed,
                        const std::set<std::string>& required) const {
        if (!j->is_object()) fail("expected an object");
        for (const auto& [key, value] : j->items()) {
            (void)value;
            if (!allowed.count(key)) child(key).fail("unknown key \"" + key + "\"");
        }
        for (const auto& key : required)
            if (!j->contains(key)) fail("missing required key \"" + key + "\"");
    }
    double number(const std::string& what) const {
        if (!j->is_number()) fail(what + " must be a number");
        return j->get<double>();
    }
    long integer(const std::string& what) const {
        if (!j->is_number_integer()) fail(what + " must be an integer");
        return j->get<long>();
    }
    bool boolean(const std::string& what) const {
        if (!j->is_boolean()) fail(what + " must be a boolean");
        return j->get<bool>();
    }
    std::string string(const std::string& what) const {
        if (!j->is_string()) fail(what + " must be a string");
        return j->get<std::string>();
    }
    std::vector<double> number_array(const std::string& what, size_t len) const {
        if (!j->is_array()) fail(what + " must be an array of numbers");
        if (j->size() != len)
            fail(what + " must have " + std::to_string(len) + " entries, got " +
                 std::to_string(j->size()));
        std::vector<double> out;
        out.reserve(len);
        for (size_t i = 0; i < len; ++i) out.push_back(child(i).number(what + " entry"));
        return out;
    }
};

inline Family parse_family(const Node& n) {
    const std::string s = n.string("target.family");
    if (s == "R" || s == "real") return Family::Real;
    if (s == "C" || s == "complex") return Family::Complex;
    if (s == "H" || s == "quaternionic") return Family::Quaternionic;
    n.fail("family must be one of \"R\", \"C\", \"H\"");
}

inline RunConfig parse_validated(const json& root, const std::map<std::string, int>& lines,
                                 const std::string& file) {
    Node doc{&root, &lines, &file, ""};
    doc.require_object({"target", "domain", "singularities", "boundary", "solver", "output"},
                       {"target", "domain", "singularities", "boundary"});
    RunConfig rc;
    Problem& pb = rc.problem;

    {  // target
        const Node t = doc.child("target");
        t.require_object({"family", "ell"}, {"family", "ell"});
        const Family fam = parse_family(t.child("family"));
        const long ell = t.child("ell").integer("ell");
        if (ell < 2) t.child("ell").fail("ell must be at least 2");
        if (ell > 64) t.child("ell").fail("ell is unreasonably large");
        pb.params = ModelParams(fam, static_cast<int>(ell));
    }

    {  // domain
        const Node d = doc.child("domain");
        d.require_object({"n", "box", "h"}, {"n", "box", "h"});
        const long n = d.child("n").integer("n");
        if (n != 2 && n != 3) d.child("n").fail("n must be 2 or 3");
        pb.box.n = static_cast<int>(n);
        const Node b = d.child("box");
        b.require_object({"lo", "hi"}, {"lo", "hi"});
        const auto lo = b.child("lo").number_array("box.lo", n);
        const auto hi = b.child("hi").number_array("box.hi", n);
        for (long k = 0; k < n; ++k) {
            if (!(lo[k] < hi[k])) b.fail("box.lo must be strictly below box.hi on every axis");
            pb.box.lo[k] = lo[k];
            pb.box.hi[k] = hi[k];
        }
        const Node hn = d.child("h");
        const double h = hn.number("h");
        if (!(h > 0.0)) hn.fail("h must be positive");
        pb.box.h = h;
        for (long k = 0; k < n; ++k) {
            const double cells = (hi[k] - lo[k]) / h;
            const long nc = std::lround(cells);
            if (nc < 2 || std::abs(cells - nc) > 1e-9 * std::max(1.0, cells))
                hn.fail("h must divide each box edge into at least 2 cells");
        }
    }

    {  // singularities
        const Node list = doc.child("singularities");
        if (!list.j->is_array()) list.fail("singularities must be an array");
        if (list.j->empty()) list.fail("at least one singular component is required");
        const int vd = pb.params.v_dim();
        for (size_t i = 0; i < list.j->size(); ++i) {
            const Node cn = list.child(i);
            SingularComponent c;
            if (!cn.j->is_object()) cn.fail("each singularity must be an object");
            const std::string kind =
                cn.has("kind") ? cn.child("kind").string("kind") : std::string();
            if (kind == "point") {
                cn.require_object({"kind", "position", "density", "w"},
                                  {"kind", "position", "density", "w"});
                c.kind = SingularComponent::Kind::Point;
                const auto p = cn.child("position").number_array("position", pb.box.n);
                for (int k = 0; k < pb.box.n; ++k) c.a[k] = p[k];
            } else if (kind == "segment") {
                cn.require_object({"kind", "endpoints", "density", "w"},
                                  {"kind", "endpoints", "density", "w"});
                if (pb.box.n != 3) cn.fail("segment components require n = 3");
                c.kind = SingularComponent::Kind::Segment;
                const Node e = cn.child("endpoints");
                if (!e.j->is_array() || e.j->size() != 2)
                    e.fail("endpoints must be an array of two points");
                const auto pa = e.child(0).number_array("endpoint", pb.box.n);
                const auto pc = e.child(1).number_array("endpoint", pb.box.n);
                double len2 = 0.0;
                for (int k = 0; k < pb.box.n; ++k) {
                    c.a[k] = pa[k];
                    c.b[k] = pc[k];
                    len2 += (pa[k] - pc[k]) * (pa[k] - pc[k]);
                }
                if (len2 == 0.0) e.fail("segment endpoints must be distinct");
            } else {
                cn.fail("kind must be \"point\" or \"segment\"");
            }
            c.density = cn.child("density").number("density");
            if (!(c.density > 0.0)) cn.child("density").fail("density must be positive");
            c.w = cn.child("w").number_array("w", vd);
            // clearance from the domain boundary (one layer of cells)
            for (const std::array<double, 3>& p :
                 {c.a, c.kind == SingularComponent::Kind::Segment ? c.b : c.a}) {
                for (int k = 0; k < pb.box.n; ++k)
                    if (p[k] <= pb.box.lo[k] + pb.box.h - 1e-12 ||
                        p[k] >= pb.box.hi[k] - pb.box.h + 1e-12)
                        cn.fail("singular component touches the domain boundary");
            }
            pb.comps.push_back(std::move(c));
        }
    }

    {  // boundary
        const Node b = doc.child("boundary");
        b.require_object({"constant", "table"}, {});
        const bool has_const = b.has("constant"), has_table = b.has("table");
        if (has_const == has_table)
            b.fail("boundary must set exactly one of \"constant\" or \"table\"");
        if (has_const) {
            const Node cn = b.child("constant");
            cn.require_object({"u", "v"}, {"u", "v"});
            pb.boundary.constant = true;
            pb.boundary.u = cn.child("u").number("boundary u");
            pb.boundary.v = cn.child("v").number_array("boundary v", pb.params.v_dim());
        } else {
            pb.boundary.constant = false;
            pb.boundary.table_path = b.child("table").string("boundary table");
            if (pb.boundary.table_path.empty()) b.child("table").fail("table path is empty");
        }
    }

    if (doc.has("solver")) {
        const Node s = doc.child("solver");
        s.require_object({"tol", "f_decrease", "max_sweeps", "truncation", "truncation_every",
                          "method", "seed", "rho"},
                         {});
        SolverOptions& o = pb.opts;
        if (s.has("tol")) {
            o.tol = s.child("tol").number("tol");
            if (!(o.tol > 0.0)) s.child("tol").fail("tol must be positive");
        }
        if (s.has("f_decrease")) {
            o.f_decrease = s.child("f_decrease").number("f_decrease");
            if (o.f_decrease < 0.0) s.child("f_decrease").fail("f_decrease must be nonnegative");
        }
        if (s.has("max_sweeps")) {
            o.max_sweeps = s.child("max_sweeps").integer("max_sweeps");
            if (o.max_sweeps < 1) s.child("max_sweeps").fail("max_sweeps must be at least 1");
        }
        if (s.has("truncation")) o.truncation = s.child("truncation").boolean("truncation");
        if (s.has("truncation_every")) {
            o.truncation_every =
                static_cast<int>(s.child("truncation_every").integer("truncation_every"));
            if (o.truncation_every < 1)
                s.child("truncation_every").fail("truncation_every must be at least 1");
        }
        if (s.has("method")) {
            o.method = s.child("method").string("method");
            if (o.method != "bb" && o.method != "gd" && o.method != "gs")
                s.child("method").fail("method must be \"bb\", \"gd\", or \"gs\"");
        }
        if (s.has("seed")) {
            const long seed = s.child("seed").integer("seed");
            if (seed < 0) s.child("seed").fail("seed must be nonnegative");
            o.seed = static_cast<std::uint64_t>(seed);
        }
        if (s.has("rho")) {
            o.rho = s.child("rho").number("rho");
            if (o.rho < 0.0) s.child("rho").fail("rho must be nonnegative");
        }
    }

    if (doc.has("output")) {
        rc.output_dir = doc.child("output").string("output");
        if (rc.output_dir.empty()) doc.child("output").fail("output directory is empty");
    }

    // dry-run the grid build so exclusion-coverage problems surface now, with
    // a config anchor, instead of later inside the solve
    try {
        build_grid(pb.box, pb.comps);
    } catch (const std::invalid_argument& e) {
        doc.child("singularities").fail(std::string(e.what()));
    }
    return rc;
}

}  // namespace config_detail

inline RunConfig parse_config_text(const std::string& text, const std::string& file_label) {
    using config_detail::json;
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const int line = config_detail::line_of_byte(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ConfigError(file_label + ":" + std::to_string(line) + ": " + e.what());
    }
    const auto lines = config_detail::LineScanner(text, file_label).scan();
    return config_detail::parse_validated(root, lines, file_label);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError(path + ": cannot open config file");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str(), path);
}

}  // namespace harmap
