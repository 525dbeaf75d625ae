#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "harmap/cli.hpp"

using namespace harmap;
namespace fs = std::filesystem;

namespace {

std::string parse_error(const std::string& text) {
    try {
        parse_config_text(text, "cfg");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

// asserts the error is anchored at cfg:<line> and mentions every fragment
void expect_error(const std::string& text, int line, const std::vector<std::string>& fragments) {
    const std::string msg = parse_error(text);
    REQUIRE_MESSAGE(!msg.empty(), "config was accepted but should have been rejected");
    const std::string prefix = "cfg:" + std::to_string(line) + ":";
    CHECK_MESSAGE(msg.rfind(prefix, 0) == 0, "expected prefix ", prefix, " in: ", msg);
    for (const auto& f : fragments)
        CHECK_MESSAGE(msg.find(f) != std::string::npos, "expected \"", f, "\" in: ", msg);
}

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("harmap_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name, const std::string& content) const {
        const fs::path p = path / name;
        std::ofstream os(p, std::ios::binary);
        os << content;
        return p.string();
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE_MESSAGE(is.good(), "cannot open ", p.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// minimal valid two-dimensional configuration; u- and v-free data make the
// initial extension already stationary, so solves built on it are instant
std::string trivial_config(const std::string& outdir) {
    return std::string("{\n") +
           " \"target\": { \"family\": \"R\", \"ell\": 2 },\n" +
           " \"domain\": { \"n\": 2, \"box\": { \"lo\": [-1.0, -1.0], \"hi\": [1.0, 1.0] }, "
           "\"h\": 0.25 },\n" +
           " \"singularities\": [\n" +
           "  { \"kind\": \"point\", \"position\": [0.25, 0.0], \"density\": 1.0, \"w\": [0.0] },\n" +
           "  { \"kind\": \"point\", \"position\": [-0.25, 0.0], \"density\": 1.0, \"w\": [0.0] }\n" +
           " ],\n" +
           " \"boundary\": { \"constant\": { \"u\": 0.0, \"v\": [0.0] } },\n" +
           " \"output\": \"" + outdir + "\"\n" +
           "}\n";
}

// same geometry with opposite v-offsets and a finer grid, so the offset
// collar around each component reaches active nodes: a genuine minimization
std::string offset_config(const std::string& outdir, const std::string& solver_extra = "") {
    return std::string("{\n") +
           " \"target\": { \"family\": \"R\", \"ell\": 2 },\n" +
           " \"domain\": { \"n\": 2, \"box\": { \"lo\": [-1.0, -1.0], \"hi\": [1.0, 1.0] }, "
           "\"h\": 0.125 },\n" +
           " \"singularities\": [\n" +
           "  { \"kind\": \"point\", \"position\": [0.25, 0.0], \"density\": 1.0, \"w\": [0.4] },\n" +
           "  { \"kind\": \"point\", \"position\": [-0.25, 0.0], \"density\": 1.0, \"w\": [-0.4] }\n" +
           " ],\n" +
           " \"boundary\": { \"constant\": { \"u\": 0.0, \"v\": [0.0] } },\n" +
           " \"solver\": { \"tol\": 1e-9" + solver_extra + " },\n" +
           " \"output\": \"" + outdir + "\"\n" +
           "}\n";
}

double parsed_value(const std::string& text, const std::string& label) {
    const size_t at = text.find(label);
    REQUIRE_MESSAGE(at != std::string::npos, "missing \"", label, "\" in: ", text);
    return std::strtod(text.c_str() + at + label.size(), nullptr);
}

}  // namespace

TEST_CASE("config: full document lands in the problem description") {
    const char* text = R"({
 "target": { "family": "H", "ell": 2 },
 "domain": {
  "n": 3,
  "box": { "lo": [-0.5, -0.5, -0.5], "hi": [0.5, 0.5, 0.5] },
  "h": 0.125
 },
 "singularities": [
  { "kind": "point", "position": [0.0, 0.125, 0.0], "density": 1.5,
    "w": [0.1, 0.0, 0.0, 0.0, 0.0, 0.0, -0.2] },
  { "kind": "segment", "endpoints": [[-0.125, -0.125, -0.125], [0.125, -0.125, -0.125]],
    "density": 2.0, "w": [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0] }
 ],
 "boundary": { "constant": { "u": 0.25, "v": [0.0, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0] } },
 "solver": { "tol": 1e-10, "f_decrease": 0.0, "max_sweeps": 500, "truncation": false,
             "truncation_every": 3, "method": "gd", "seed": 7, "rho": 0.1 },
 "output": "some/dir"
})";
    const RunConfig rc = parse_config_text(text, "cfg");
    const Problem& pb = rc.problem;
    CHECK(pb.params.fam == Family::Quaternionic);
    CHECK(pb.params.ell == 2);
    CHECK(pb.params.v_dim() == 7);
    CHECK(pb.box.n == 3);
    CHECK(pb.box.lo[0] == -0.5);
    CHECK(pb.box.hi[2] == 0.5);
    CHECK(pb.box.h == 0.125);
    REQUIRE(pb.comps.size() == 2);
    CHECK(pb.comps[0].kind == SingularComponent::Kind::Point);
    CHECK(pb.comps[0].a[1] == 0.125);
    CHECK(pb.comps[0].density == 1.5);
    REQUIRE(pb.comps[0].w.size() == 7);
    CHECK(pb.comps[0].w[6] == -0.2);
    CHECK(pb.comps[1].kind == SingularComponent::Kind::Segment);
    CHECK(pb.comps[1].a[0] == -0.125);
    CHECK(pb.comps[1].b[0] == 0.125);
    CHECK(pb.boundary.constant);
    CHECK(pb.boundary.u == 0.25);
    REQUIRE(pb.boundary.v.size() == 7);
    CHECK(pb.boundary.v[1] == 0.1);
    CHECK(pb.opts.tol == 1e-10);
    CHECK(pb.opts.f_decrease == 0.0);
    CHECK(pb.opts.max_sweeps == 500);
    CHECK_FALSE(pb.opts.truncation);
    CHECK(pb.opts.truncation_every == 3);
    CHECK(pb.opts.method == "gd");
    CHECK(pb.opts.seed == 7);
    CHECK(pb.opts.rho == 0.1);
    CHECK(rc.output_dir == "some/dir");
}

TEST_CASE("config: omitted solver block keeps library defaults") {
    TempDir tmp;
    const RunConfig rc = parse_config_text(trivial_config((tmp.path / "o").string()), "cfg");
    const SolverOptions def;
    CHECK(rc.problem.opts.tol == def.tol);
    CHECK(rc.problem.opts.f_decrease == def.f_decrease);
    CHECK(rc.problem.opts.max_sweeps == def.max_sweeps);
    CHECK(rc.problem.opts.truncation == def.truncation);
    CHECK(rc.problem.opts.truncation_every == def.truncation_every);
    CHECK(rc.problem.opts.method == def.method);
    CHECK(rc.problem.opts.seed == def.seed);
    CHECK(rc.problem.opts.rho == def.rho);
}

TEST_CASE("config: syntax errors carry the line of the failure") {
    const std::string msg = parse_error("{\n \"target\": { \"family\": \"R\" \"ell\": 2 }\n}");
    CHECK(msg.rfind("cfg:2:", 0) == 0);
}

TEST_CASE("config: duplicate keys are rejected") {
    expect_error("{\n \"target\": { \"family\": \"R\",\n  \"family\": \"C\", \"ell\": 2 }\n}", 3,
                 {"duplicate key \"family\""});
}

TEST_CASE("config: unknown keys are rejected at their own line") {
    const char* text = R"({
 "target": { "family": "R", "ell": 2 },
 "domain": { "n": 2, "box": { "lo": [-1.0, -1.0], "hi": [1.0, 1.0] }, "h": 0.25 },
 "singularities": [
  { "kind": "point", "position": [0.25, 0.0], "density": 1.0, "w": [0.0],
    "mass": 3.0 }
 ],
 "boundary": { "constant": { "u": 0.0, "v": [0.0] } }
})";
    expect_error(text, 6, {"unknown key \"mass\"", "/singularities/0/mass"});

    expect_error(R"({
 "target": { "family": "R", "ell": 2 },
 "extra": 1
})",
                 3, {"unknown key \"extra\""});
}

TEST_CASE("config: missing required keys anchor at the owning object") {
    expect_error(R"({
 "target": { "family": "R", "ell": 2 }
})",
                 1, {"missing required key"});
    expect_error(R"({
 "target": { "family": "R" },
 "domain": { "n": 2, "box": { "lo": [-1.0, -1.0], "hi": [1.0, 1.0] }, "h": 0.25 },
 "singularities": [ { "kind": "point", "position": [0.25, 0.0], "density": 1.0, "w": [0.0] } ],
 "boundary": { "constant": { "u": 0.0, "v": [0.0] } }
})",
                 2, {"missing required key \"ell\""});
}

TEST_CASE("config: target validation") {
    const auto with_target = [](const std::string& target) {
        return "{\n \"target\": " + target +
               ",\n"
               " \"domain\": { \"n\": 2, \"box\": { \"lo\": [-1.0, -1.0], \"hi\": [1.0, 1.0] }, "
               "\"h\": 0.25 },\n"
               " \"singularities\": [ { \"kind\": \"point\", \"position\": [0.25, 0.0], "
               "\"density\": 1.0, \"w\": [0.0] } ],\n"
               " \"boundary\": { \"constant\": { \"u\": 0.0, \"v\": [0.0] } }\n}";
    };
    expect_error(with_target(R"({ "family": "X", "ell": 2 })"), 2, {"family must be one of"});
    expect_error(with_target(R"({ "family": "R", "ell": 1 })"), 2, {"ell must be at least 2"});
    expect_error(with_target(R"({ "family": "R", "ell": 2.5 })"), 2, {"must be an integer"});
    expect_error(with_target(R"({ "family": "R", "ell": 1000 })"), 2, {"unreasonably large"});
    // long families change the v-dimension: w must track it
    expect_error(with_target(R"({ "family": "C", "ell": 2 })"), 4, {"w must have 3 entries"});
}

TEST_CASE("config: domain validation") {
    const auto with_domain = [](const std::string& domain) {
        return "{\n \"target\": { \"family\": \"R\", \"ell\": 2 },\n \"domain\": " + domain +
               ",\n"
               " \"singularities\": [ { \"kind\": \"point\", \"position\": [0.25, 0.0], "
               "\"density\": 1.0, \"w\": [0.0] } ],\n"
               " \"boundary\": { \"constant\": { \"u\": 0.0, \"v\": [0.0] } }\n}";
    };
    expect_error(with_domain(
                     R"({ "n": 4, "box": { "lo": [-1.0, -1.0], "hi": [1.0, 1.0] }, "h": 0.25 })"),
                 3, {"n must be 2 or 3"});
    expect_error(
        with_domain(
            R"({ "n": 2, "box": { "lo": [-1.0, -1.0, -1.0], "hi": [1.0, 1.0] }, "h": 0.25 })"),
        3, {"box.lo must have 2 entries, got 3"});
    expect_error(
        with_domain(R"({ "n": 2, "box": { "lo": [-1.0, 1.0], "hi": [1.0, 1.0] }, "h": 0.25 })"), 3,
        {"strictly below"});
    expect_error(
        with_domain(R"({ "n": 2, "box": { "lo": [-1.0, -1.0], "hi": [1.0, 1.0] }, "h": -0.25 })"),
        3, {"h must be positive"});
    expect_error(
        with_domain(R"({ "n": 2, "box": { "lo": [-1.0, -1.0], "hi": [1.0, 1.0] }, "h": 0.3 })"), 3,
        {"h must divide each box edge"});
    expect_error(
        with_domain(R"({ "n": 2, "box": { "lo": [-1.0, -1.0], "hi": [1.0, 1.0] }, "h": 2.0 })"), 3,
        {"at least 2 cells"});
}

TEST_CASE("config: singularity validation") {
    const auto with_sing = [](const std::string& sing, bool n3 = false) {
        const std::string domain =
            n3 ? R"({ "n": 3, "box": { "lo": [-0.5, -0.5, -0.5], "hi": [0.5, 0.5, 0.5] }, "h": 0.125 })"
               : R"({ "n": 2, "box": { "lo": [-1.0, -1.0], "hi": [1.0, 1.0] }, "h": 0.25 })";
        return "{\n \"target\": { \"family\": \"R\", \"ell\": 2 },\n \"domain\": " + domain +
               ",\n \"singularities\": " + sing +
               ",\n \"boundary\": { \"constant\": { \"u\": 0.0, \"v\": [0.0] } }\n}";
    };
    expect_error(with_sing("[]"), 4, {"at least one singular component"});
    expect_error(with_sing("{}"), 4, {"must be an array"});
    expect_error(with_sing(R"([ { "kind": "blob" } ])"), 4, {"kind must be \"point\" or \"segment\""});
    expect_error(with_sing(
                     R"([ { "kind": "point", "position": [0.25, 0.0], "density": 0.0, "w": [0.0] } ])"),
                 4, {"density must be positive"});
    expect_error(with_sing(
                     R"([ { "kind": "point", "position": [0.25, 0.0], "density": 1.0, "w": [0.0, 0.0] } ])"),
                 4, {"w must have 1 entries, got 2"});
    expect_error(with_sing(
                     R"([ { "kind": "point", "position": [0.95, 0.0], "density": 1.0, "w": [0.0] } ])"),
                 4, {"touches the domain boundary"});
    expect_error(
        with_sing(
            R"([ { "kind": "segment", "endpoints": [[-0.25, 0.0], [0.25, 0.0]], "density": 1.0, "w": [0.0] } ])"),
        4, {"segment components require n = 3"});
    expect_error(
        with_sing(
            R"([ { "kind": "segment", "endpoints": [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]], "density": 1.0, "w": [0.0] } ])",
            true),
        4, {"endpoints must be distinct"});
    // passes the schema but cannot be realized on the grid: caught by the dry run
    expect_error(with_sing(
                     R"([ { "kind": "point", "position": [0.1, 0.1], "density": 1.0, "w": [0.0] } ])"),
                 4, {"excludes no node"});
}

TEST_CASE("config: boundary validation") {
    const auto with_boundary = [](const std::string& boundary) {
        return "{\n \"target\": { \"family\": \"R\", \"ell\": 2 },\n"
               " \"domain\": { \"n\": 2, \"box\": { \"lo\": [-1.0, -1.0], \"hi\": [1.0, 1.0] }, "
               "\"h\": 0.25 },\n"
               " \"singularities\": [ { \"kind\": \"point\", \"position\": [0.25, 0.0], "
               "\"density\": 1.0, \"w\": [0.0] } ],\n \"boundary\": " +
               boundary + "\n}";
    };
    expect_error(with_boundary("{}"), 5, {"exactly one of \"constant\" or \"table\""});
    expect_error(with_boundary(
                     R"({ "constant": { "u": 0.0, "v": [0.0] }, "table": "b.csv" })"),
                 5, {"exactly one of"});
    expect_error(with_boundary(R"({ "table": "" })"), 5, {"table path is empty"});
    expect_error(with_boundary(R"({ "constant": { "u": 0.0, "v": [0.0, 0.0] } })"), 5,
                 {"boundary v must have 1 entries"});
    expect_error(with_boundary(R"({ "constant": { "u": "zero", "v": [0.0] } })"), 5,
                 {"boundary u must be a number"});
}

TEST_CASE("config: solver and output validation") {
    const auto with_solver = [](const std::string& solver) {
        return "{\n \"target\": { \"family\": \"R\", \"ell\": 2 },\n"
               " \"domain\": { \"n\": 2, \"box\": { \"lo\": [-1.0, -1.0], \"hi\": [1.0, 1.0] }, "
               "\"h\": 0.25 },\n"
               " \"singularities\": [ { \"kind\": \"point\", \"position\": [0.25, 0.0], "
               "\"density\": 1.0, \"w\": [0.0] } ],\n"
               " \"boundary\": { \"constant\": { \"u\": 0.0, \"v\": [0.0] } },\n \"solver\": " +
               solver + "\n}";
    };
    expect_error(with_solver(R"({ "tol": 0.0 })"), 6, {"tol must be positive"});
    expect_error(with_solver(R"({ "f_decrease": -1.0 })"), 6, {"f_decrease must be nonnegative"});
    expect_error(with_solver(R"({ "max_sweeps": 0 })"), 6, {"max_sweeps must be at least 1"});
    expect_error(with_solver(R"({ "truncation": 1 })"), 6, {"truncation must be a boolean"});
    expect_error(with_solver(R"({ "truncation_every": 0 })"), 6, {"truncation_every"});
    expect_error(with_solver(R"({ "method": "newton" })"), 6, {"method must be"});
    expect_error(with_solver(R"({ "seed": -1 })"), 6, {"seed must be nonnegative"});
    expect_error(with_solver(R"({ "rho": -0.5 })"), 6, {"rho must be nonnegative"});
    expect_error(with_solver(R"({ "verbose": true })"), 6, {"unknown key \"verbose\""});

    expect_error(R"({
 "target": { "family": "R", "ell": 2 },
 "domain": { "n": 2, "box": { "lo": [-1.0, -1.0], "hi": [1.0, 1.0] }, "h": 0.25 },
 "singularities": [ { "kind": "point", "position": [0.25, 0.0], "density": 1.0, "w": [0.0] } ],
 "boundary": { "constant": { "u": 0.0, "v": [0.0] } },
 "output": ""
})",
                 6, {"output directory is empty"});
}

TEST_CASE("config: boundary tables load through make_setup") {
    TempDir tmp;
    // 2x2-cell grid: every boundary node listed with u = x + y and v = 0.5
    const GridSpec spec = [] {
        GridSpec s;
        s.n = 2;
        s.lo = {-1.0, -1.0, 0.0};
        s.hi = {1.0, 1.0, 0.0};
        s.h = 0.25;
        return s;
    }();
    std::ostringstream table;
    table << "x0,x1,u,v0\n";
    for (int i = 0; i <= 8; ++i) {
        for (int j = 0; j <= 8; ++j) {
            if (i != 0 && i != 8 && j != 0 && j != 8) continue;
            const double x = spec.lo[0] + i * spec.h, y = spec.lo[1] + j * spec.h;
            table << x << "," << y << "," << x + y << ",0.5\n";
        }
    }
    const std::string table_path = tmp.file("boundary.csv", table.str());
    const std::string cfg =
        "{\n \"target\": { \"family\": \"R\", \"ell\": 2 },\n"
        " \"domain\": { \"n\": 2, \"box\": { \"lo\": [-1.0, -1.0], \"hi\": [1.0, 1.0] }, "
        "\"h\": 0.25 },\n"
        " \"singularities\": [ { \"kind\": \"point\", \"position\": [0.25, 0.0], \"density\": 1.0, "
        "\"w\": [0.0] } ],\n"
        " \"boundary\": { \"table\": \"" + table_path + "\" }\n}";
    const RunConfig rc = parse_config_text(cfg, "cfg");
    REQUIRE_FALSE(rc.problem.boundary.constant);
    const Setup s = make_setup(rc.problem);
    long checked = 0;
    for (long id = 0; id < s.grid.node_count(); ++id) {
        if (s.grid.role[id] != NodeRole::Boundary) continue;
        const auto x = s.grid.coords(id);
        CHECK(s.psi.u[id] == doctest::Approx(x[0] + x[1]).epsilon(1e-12));
        CHECK(s.psi.v[id] == 0.5);
        ++checked;
    }
    CHECK(checked == 32);

    SUBCASE("a truncated table is rejected with its row number") {
        const std::string short_path = tmp.file("short.csv", "x0,x1,u,v0\n-1,-1,0,0\n-1,0\n");
        Problem pb = rc.problem;
        pb.boundary.table_path = short_path;
        CHECK_THROWS_WITH_AS(make_setup(pb),
                             doctest::Contains("row 3 has wrong column count"),
                             std::invalid_argument);
    }
}

TEST_CASE("cli solve: malformed configs exit 1 and write nothing") {
    TempDir tmp;
    const fs::path outdir = tmp.path / "never";
    const std::string cfg = tmp.file("bad.json", "{ \"target\": { \"family\": \"R\" } }");
    std::ostringstream out, err;
    CHECK(cmd_solve(cfg, outdir.string(), 1, out, err) == 1);
    CHECK(err.str().find("missing required key") != std::string::npos);
    CHECK_FALSE(fs::exists(outdir));

    std::ostringstream out2, err2;
    CHECK(cmd_solve((tmp.path / "missing.json").string(), outdir.string(), 1, out2, err2) == 1);
    CHECK(err2.str().find("cannot open config file") != std::string::npos);
    CHECK_FALSE(fs::exists(outdir));
}

TEST_CASE("cli solve: stationary data converges in zero sweeps and round-trips") {
    TempDir tmp;
    const std::string outdir = (tmp.path / "out").string();
    const std::string cfg = tmp.file("cfg.json", trivial_config(outdir));
    std::ostringstream out, err;
    REQUIRE_MESSAGE(cmd_solve(cfg, "", 1, out, err) == 0, err.str());

    const auto rep = nlohmann::json::parse(slurp(fs::path(outdir) / "report.json"));
    CHECK(rep.at("status") == "converged");
    CHECK(rep.at("sweeps").get<long>() == 0);
    CHECK(std::abs(rep.at("F").get<double>()) <= 1e-12);
    CHECK(rep.at("v_sup").get<double>() <= 1e-12);
    CHECK(rep.at("oracle_match").get<bool>());
    CHECK(rep.at("oracle_gap").get<double>() <= 1e-10);
    CHECK(rep.at("apriori_ok").get<bool>());
    REQUIRE(rep.at("components").size() == 2);
    for (const auto& c : rep.at("components")) {
        CHECK(c.at("radius_ok").get<bool>());
        CHECK(c.at("observed_radius").get<double>() <=
              rep.at("apriori_radius").get<double>() + 10.0 * 0.25);
    }
    // console summary reports the wall time, the report file never does
    CHECK(out.str().find("wall_time_s:") != std::string::npos);
    CHECK(slurp(fs::path(outdir) / "report.json").find("wall_time") == std::string::npos);

    SUBCASE("the stored field reproduces the reported energy") {
        const RunConfig rc = load_config(cfg);
        const Setup s = make_setup(rc.problem);
        const MapField f = read_field_csv((fs::path(outdir) / "field.csv").string(), s.grid,
                                          s.params.v_dim());
        const double F = discrete_F(s.grid, s.q, s.mp.u0, f, 1);
        CHECK(std::abs(F - rep.at("F").get<double>()) <= 1e-12);
    }
}

TEST_CASE("cli solve: output bytes are identical across reruns") {
    TempDir tmp;
    const std::string cfg = tmp.file("cfg.json", offset_config((tmp.path / "a").string()));
    std::ostringstream out1, err1, out2, err2;
    REQUIRE(cmd_solve(cfg, (tmp.path / "r1").string(), 1, out1, err1) == 0);
    REQUIRE(cmd_solve(cfg, (tmp.path / "r2").string(), 1, out2, err2) == 0);
    CHECK(slurp(tmp.path / "r1" / "field.csv") == slurp(tmp.path / "r2" / "field.csv"));
    CHECK(slurp(tmp.path / "r1" / "report.json") == slurp(tmp.path / "r2" / "report.json"));

    const auto rep = nlohmann::json::parse(slurp(tmp.path / "r1" / "report.json"));
    CHECK(rep.at("sweeps").get<long>() > 0);
    CHECK(rep.at("oracle_match").is_null());  // v-offsets: not a height-only problem
    REQUIRE(rep.at("components").size() == 2);
    CHECK(rep.at("components")[0].at("d").get<double>() ==
          doctest::Approx(rep.at("components")[1].at("d").get<double>()).epsilon(1e-9));
}

TEST_CASE("cli solve: hitting the sweep cap exits 2 but still reports") {
    TempDir tmp;
    const std::string outdir = (tmp.path / "out").string();
    const std::string cfg =
        tmp.file("cfg.json", offset_config(outdir, ", \"max_sweeps\": 1"));
    std::ostringstream out, err;
    CHECK(cmd_solve(cfg, "", 1, out, err) == 2);
    const auto rep = nlohmann::json::parse(slurp(fs::path(outdir) / "report.json"));
    CHECK(rep.at("status") == "max-sweeps");
    CHECK(rep.at("sweeps").get<long>() == 1);
}

TEST_CASE("cli solve: --out overrides the configured directory") {
    TempDir tmp;
    const std::string cfg = tmp.file("cfg.json", trivial_config((tmp.path / "ignored").string()));
    std::ostringstream out, err;
    REQUIRE(cmd_solve(cfg, (tmp.path / "chosen").string(), 1, out, err) == 0);
    CHECK(fs::exists(tmp.path / "chosen" / "report.json"));
    CHECK_FALSE(fs::exists(tmp.path / "ignored"));
}

TEST_CASE("cli geo: distances, Busemann values, geodesics") {
    std::ostringstream out, err;
    CHECK(cmd_geo("dist", "R", 2, {"0", "0", "0", "0"}, out, err) == 0);
    CHECK(out.str() == "0\n");

    std::ostringstream out2, err2;
    CHECK(cmd_geo("busemann", "R", 2, {"0", "1"}, out2, err2) == 0);
    CHECK(parsed_value(out2.str(), "busemann_plus =") ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(parsed_value(out2.str(), "busemann_minus =") == doctest::Approx(0.0));

    std::ostringstream out3, err3;
    CHECK(cmd_geo("geodesic", "R", 2, {"0", "0", "1", "2"}, out3, err3) == 0);
    const std::string text = out3.str();
    const double len = parsed_value(text, "length =");
    const size_t at = text.find("point =");
    REQUIRE(at != std::string::npos);
    std::istringstream pt(text.substr(at + 7));
    double pu = 0.0, pv = 0.0;
    pt >> pu >> pv;
    CHECK(pu == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(pv == doctest::Approx(2.0).epsilon(1e-9));

    // the reported length agrees with the dist query on the same pair
    std::ostringstream out4, err4;
    REQUIRE(cmd_geo("dist", "R", 2, {"0", "0", "1", "2"}, out4, err4) == 0);
    CHECK(len == doctest::Approx(std::strtod(out4.str().c_str(), nullptr)).epsilon(1e-12));

    SUBCASE("an explicit arclength walks the same geodesic") {
        std::ostringstream mid_out, mid_err;
        char half[64];
        std::snprintf(half, sizeof(half), "%.17g", len / 2);
        REQUIRE(cmd_geo("geodesic", "R", 2, {"0", "0", "1", "2", half}, mid_out, mid_err) == 0);
        const std::string mtext = mid_out.str();
        const size_t mat = mtext.find("point =");
        REQUIRE(mat != std::string::npos);
        std::istringstream mpt(mtext.substr(mat + 7));
        double mu = 0.0, mv = 0.0;
        mpt >> mu >> mv;
        const ModelParams P(Family::Real, 2);
        HoroPoint p{0.0, {0.0}}, m{mu, {mv}};
        CHECK(dist_horo(P, p, m) == doctest::Approx(len / 2).epsilon(1e-6));
    }
}

TEST_CASE("cli geo: invalid queries exit 1") {
    const auto fails = [](const std::string& query, const std::string& fam, long ell,
                          const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int rc = cmd_geo(query, fam, ell, args, out, err);
        CHECK_MESSAGE(rc == 1, query, " should have failed");
        CHECK_FALSE(err.str().empty());
    };
    fails("dist", "R", 2, {"0", "0", "0"});            // wrong coordinate count
    fails("dist", "R", 2, {"0", "zebra", "0", "0"});   // not a number
    fails("dist", "R", 2, {"0", "nan", "0", "0"});     // not finite
    fails("dist", "K", 2, {"0", "0", "0", "0"});       // unknown family
    fails("dist", "R", 1, {"0", "0", "0", "0"});       // ell too small
    fails("orbit", "R", 2, {"0", "0"});                // unknown query
    fails("geodesic", "R", 2, {"0", "1", "0", "1", "0.5"});  // coincident with arclength
    fails("busemann", "C", 2, {"0", "1"});             // wrong dimension for C
}

TEST_CASE("cli verify: single checks run and unknown ids exit 1") {
    std::ostringstream out, err;
    CHECK(cmd_verify({"norm1"}, 11, 25, out, err) == 0);
    CHECK(out.str().find("norm1") != std::string::npos);
    CHECK(out.str().find("pass") != std::string::npos);
    CHECK(out.str().find("all 1 checks passed") != std::string::npos);

    std::ostringstream out2, err2;
    CHECK(cmd_verify({"lemma9.9"}, 11, 25, out2, err2) == 1);
    CHECK(err2.str().find("unknown check id") != std::string::npos);

    std::ostringstream out3, err3;
    CHECK(cmd_verify({"norm1"}, 11, 0, out3, err3) == 1);
}

TEST_CASE("cli verify: full run is deterministic for a fixed seed") {
    std::ostringstream a_out, a_err, b_out, b_err;
    REQUIRE(cmd_verify({}, 5, 25, a_out, a_err) == 0);
    REQUIRE(cmd_verify({}, 5, 25, b_out, b_err) == 0);
    CHECK(a_out.str() == b_out.str());
    CHECK(a_out.str().find("all 15 checks passed") != std::string::npos);
}
