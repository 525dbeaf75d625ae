#pragma once

// Command implementations behind the executable: solve a configured problem,
// run the certification suite, answer geometry queries.  They are plain
// functions over streams so the test suite can drive them in-process; the
// binary adds only argument parsing.
//
// Exit codes: 0 success/converged, 1 configuration or usage error,
// 2 max-sweeps (solve) or failed checks (verify), 3 numerical failure.
// Output files are byte-deterministic for a fixed config and seed in
// single-worker mode, so wall-clock time is printed to the console only and
// never written into the report.

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "harmap/config.hpp"
#include "harmap/linsolve.hpp"
#include "harmap/verify.hpp"

namespace harmap {

namespace cli_detail {

inline std::string fmt15(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", x);
    return buf;
}

inline const char* status_name(SolveResult::Status s) {
    switch (s) {
        case SolveResult::Status::Converged: return "converged";
        case SolveResult::Status::MaxSweeps: return "max-sweeps";
        default: return "numerical-failure";
    }
}

inline int status_exit(SolveResult::Status s) {
    switch (s) {
        case SolveResult::Status::Converged: return 0;
        case SolveResult::Status::MaxSweeps: return 2;
        default: return 3;
    }
}

}  // namespace cli_detail

inline int cmd_solve(const std::string& config_path, const std::string& out_override, int workers,
                     std::ostream& out, std::ostream& err) {
    namespace fs = std::filesystem;
    using nlohmann::json;

    RunConfig rc;
    try {
        rc = load_config(config_path);
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return 1;
    }
    rc.problem.opts.workers = std::max(1, workers);
    const std::string outdir =
        !out_override.empty() ? out_override : (!rc.output_dir.empty() ? rc.output_dir : "out");

    Setup s;
    try {
        s = make_setup(rc.problem);
    } catch (const std::invalid_argument& e) {
        // residual configuration problems (e.g. boundary-table contents)
        err << config_path << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "numerical failure during setup: " << e.what() << "\n";
        return 3;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const SolveResult r = minimize(s, rc.problem.opts);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto diags = diagnostics_multi(s, r.field);

    json rep;
    rep["status"] = cli_detail::status_name(r.status);
    rep["message"] = r.message;
    rep["sweeps"] = r.sweeps;
    rep["F"] = r.F;
    rep["el_residual"] = r.el;
    rep["f_history"] = r.f_history;
    rep["T"] = s.T;
    rep["Tbar"] = s.Tbar;
    rep["apriori_radius"] = s.R;
    rep["truncation_events"] = r.truncation_events;
    rep["truncation_reverts"] = r.truncation_reverts;
    rep["method"] = rc.problem.opts.method;
    rep["tol"] = rc.problem.opts.tol;
    rep["workers"] = rc.problem.opts.workers;

    double v_sup = 0.0;
    for (long id = 0; id < s.grid.node_count(); ++id) {
        if (!s.grid.is_active(id)) continue;
        for (int c = 0; c < r.field.vdim; ++c)
            v_sup = std::max(v_sup, std::abs(r.field.v_at(id)[c]));
    }
    rep["v_sup"] = v_sup;

    // totally-geodesic oracle: with a real target and v-free boundary data the
    // height solves the linear problem, checked against an independent solver
    bool geodesic_target = s.params.fam == Family::Real;
    for (size_t i = 0; geodesic_target && i < s.psi.v.size(); ++i)
        if (s.psi.v[i] != 0.0) geodesic_target = false;
    for (const auto& c : rc.problem.comps)
        for (const double wi : c.w)
            if (wi != 0.0) geodesic_target = false;
    if (geodesic_target) {
        const auto oracle = harmonic_on_active_graph(s.grid, s.psi.u);
        double gap = 0.0;
        for (long id = 0; id < s.grid.node_count(); ++id)
            if (s.grid.role[id] == NodeRole::Interior)
                gap = std::max(gap, std::abs(r.field.uhat[id] - oracle[id]));
        rep["oracle_gap"] = gap;
        rep["oracle_match"] = gap <= 1e-6;
    } else {
        rep["oracle_gap"] = nullptr;
        rep["oracle_match"] = nullptr;
    }

    const double slack = 10.0 * s.grid.spec.h;
    bool radius_ok = true;
    json comps = json::array();
    double observed_max = 0.0;
    for (const auto& d : diags) {
        json c;
        c["e"] = d.e;
        c["e_variation"] = d.e_variation;
        if (d.d) c["d"] = *d.d;
        else c["d"] = nullptr;
        c["d_tail"] = d.d_tail;
        c["omega_radius"] = d.omega_radius;
        c["observed_radius"] = d.observed_radius;
        c["radius_ok"] = d.observed_radius <= s.R + slack;
        radius_ok = radius_ok && d.observed_radius <= s.R + slack;
        observed_max = std::max(observed_max, d.observed_radius);
        comps.push_back(std::move(c));
    }
    rep["components"] = std::move(comps);
    rep["observed_radius_max"] = observed_max;
    rep["apriori_ok"] = radius_ok;

    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) {
        err << "cannot create output directory " << outdir << ": " << ec.message() << "\n";
        return 3;
    }
    {
        std::ofstream fs_field(fs::path(outdir) / "field.csv", std::ios::binary);
        fs_field << format_field_csv(s.grid, r.field);
        if (!fs_field) {
            err << "cannot write field.csv\n";
            return 3;
        }
    }
    {
        std::ofstream fs_rep(fs::path(outdir) / "report.json", std::ios::binary);
        fs_rep << rep.dump(1, '\t') << "\n";
        if (!fs_rep) {
            err << "cannot write report.json\n";
            return 3;
        }
    }

    out << "status: " << cli_detail::status_name(r.status) << "\n";
    if (!r.message.empty()) out << "message: " << r.message << "\n";
    out << "sweeps: " << r.sweeps << "\n";
    out << "F: " << cli_detail::fmt15(r.F) << "\n";
    out << "el_residual: " << cli_detail::fmt15(r.el) << "\n";
    out << "apriori_radius: " << cli_detail::fmt15(s.R) << "\n";
    out << "observed_radius_max: " << cli_detail::fmt15(observed_max) << "\n";
    if (!radius_ok) out << "warning: observed radius exceeds the a-priori bound plus 10h\n";
    out << "wall_time_s: " << wall << "\n";
    out << "output: " << (fs::path(outdir) / "field.csv").string() << " "
        << (fs::path(outdir) / "report.json").string() << "\n";
    return cli_detail::status_exit(r.status);
}

inline int cmd_verify(const std::vector<std::string>& ids, std::uint64_t seed, long samples,
                      std::ostream& out, std::ostream& err) {
    std::vector<const CheckSpec*> specs;
    if (ids.empty()) {
        for (const auto& c : check_registry()) specs.push_back(&c);
    } else {
        for (const auto& id : ids) {
            const CheckSpec* c = find_check(id);
            if (!c) {
                err << "unknown check id \"" << id << "\"; known ids:";
                for (const auto& k : check_registry()) err << " " << k.id;
                err << "\n";
                return 1;
            }
            specs.push_back(c);
        }
    }
    if (samples < 1) {
        err << "samples must be at least 1\n";
        return 1;
    }

    char row[256];
    std::snprintf(row, sizeof(row), "%-16s %9s %14s  %-6s %s\n", "check", "samples", "margin",
                  "result", "description");
    out << row;
    int failed = 0;
    for (const CheckSpec* spec : specs) {
        const CheckResult r = run_check(*spec, seed, samples);
        std::snprintf(row, sizeof(row), "%-16s %9ld %+14.6e  %-6s %s\n", r.id.c_str(), r.samples,
                      r.margin, r.pass ? "pass" : "FAIL", r.description.c_str());
        out << row;
        if (!r.pass) {
            ++failed;
            if (!r.detail.empty()) out << "    worst offender: " << r.detail << "\n";
        }
    }
    if (failed == 0) {
        out << "all " << specs.size() << " checks passed (seed " << seed << ", samples " << samples
            << ")\n";
        return 0;
    }
    out << failed << " of " << specs.size() << " checks failed (seed " << seed << ", samples "
        << samples << ")\n";
    return 2;
}

inline int cmd_geo(const std::string& query, const std::string& family, long ell,
                   const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Family fam;
    if (family == "R" || family == "real") fam = Family::Real;
    else if (family == "C" || family == "complex") fam = Family::Complex;
    else if (family == "H" || family == "quaternionic") fam = Family::Quaternionic;
    else {
        err << "family must be one of R, C, H\n";
        return 1;
    }
    if (ell < 2 || ell > 64) {
        err << "ell must be between 2 and 64\n";
        return 1;
    }
    const ModelParams P(fam, static_cast<int>(ell));
    const int dim = P.real_dim();

    std::vector<double> nums;
    nums.reserve(args.size());
    for (const auto& a : args) {
        char* end = nullptr;
        const double x = std::strtod(a.c_str(), &end);
        if (end == a.c_str() || *end != '\0' || !std::isfinite(x)) {
            err << "invalid coordinate \"" << a << "\"\n";
            return 1;
        }
        nums.push_back(x);
    }
    auto point_at = [&](size_t off) {
        HoroPoint p;
        p.u = nums[off];
        p.v.assign(nums.begin() + off + 1, nums.begin() + off + dim);
        return p;
    };
    const std::string usage =
        "points are given in horospherical coordinates: u then " + std::to_string(dim - 1) +
        " v-components for family " + family + ", ell " + std::to_string(ell);

    if (query == "dist") {
        if (nums.size() != 2 * static_cast<size_t>(dim)) {
            err << "dist needs two points (" << 2 * dim << " numbers); " << usage << "\n";
            return 1;
        }
        out << cli_detail::fmt15(dist_horo(P, point_at(0), point_at(dim))) << "\n";
        return 0;
    }
    if (query == "busemann") {
        if (nums.size() != static_cast<size_t>(dim)) {
            err << "busemann needs one point (" << dim << " numbers); " << usage << "\n";
            return 1;
        }
        const HoroPoint p = point_at(0);
        out << "busemann_minus = " << cli_detail::fmt15(busemann_minus(P, p)) << "\n";
        out << "busemann_plus = " << cli_detail::fmt15(busemann_plus(P, p)) << "\n";
        return 0;
    }
    if (query == "geodesic") {
        const size_t base = 2 * static_cast<size_t>(dim);
        if (nums.size() != base && nums.size() != base + 1) {
            err << "geodesic needs two points and an optional arclength (" << base << " or "
                << base + 1 << " numbers); " << usage << "\n";
            return 1;
        }
        const HoroPoint hp = point_at(0), hq = point_at(dim);
        const DiskPoint zp = horo_to_disk(P, hp), zq = horo_to_disk(P, hq);
        const Connection c = connect_geodesic(P, zp, zq);
        const double t = nums.size() == base + 1 ? nums[base] : c.length;
        if (c.length <= 1e-14) {  // coincident up to round-off: no direction
            if (nums.size() == base + 1) {
                err << "geodesic direction is undefined for coincident points\n";
                return 1;
            }
            out << "length = " << cli_detail::fmt15(c.length) << "\n";
            out << "point =";
            out << " " << cli_detail::fmt15(hp.u);
            for (const double x : hp.v) out << " " << cli_detail::fmt15(x);
            out << "\n";
            return 0;
        }
        out << "length = " << cli_detail::fmt15(c.length) << "\n";
        const HoroPoint hs = disk_to_horo(P, connection_point(P, c, t));
        out << "point =";
        out << " " << cli_detail::fmt15(hs.u);
        for (const double x : hs.v) out << " " << cli_detail::fmt15(x);
        out << "\n";
        return 0;
    }
    err << "unknown geo query \"" << query << "\" (expected dist, busemann, or geodesic)\n";
    return 1;
}

}  // namespace harmap
