#pragma once

// Minimization of the renormalized energy F over admissible nodal fields:
// problem setup (grid, potentials, boundary extension, truncation caps),
// BB/GD/Gauss–Seidel descent with Armijo backtracking, the two truncation
// projections, the uniqueness certificate, and per-component diagnostics.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "harmap/chart.hpp"
#include "harmap/energy.hpp"
#include "harmap/field.hpp"
#include "harmap/grid.hpp"
#include "harmap/metric.hpp"
#include "harmap/model.hpp"
#include "harmap/potentials.hpp"
#include "harmap/rng.hpp"

namespace harmap {

struct numerical_failure : std::runtime_error {
    explicit numerical_failure(const std::string& m) : std::runtime_error(m) {}
};

struct SolverOptions {
    double tol = 1e-8;           // Euler–Lagrange residual target
    double f_decrease = 1e-12;   // relative F decrease per sweep at convergence
    long max_sweeps = 100000;
    bool truncation = true;
    int truncation_every = 10;
    std::string method = "bb";   // bb | gd | gs
    int workers = 1;
    std::uint64_t seed = 1;
    double rho = 0.0;            // boundary-extension blend radius (0 = default)
};

struct BoundarySpec {
    bool constant = true;
    double u = 0.0;
    std::vector<double> v;       // constant case, length v_dim
    std::string table_path;      // table case
};

struct Problem {
    ModelParams params{Family::Real, 2};
    GridSpec box;
    std::vector<SingularComponent> comps;
    BoundarySpec boundary;
    SolverOptions opts;
};

struct Setup {
    ModelParams params{Family::Real, 2};
    Grid grid;
    QForm q{ModelParams{Family::Real, 2}};
    MultiPotential mp;
    BoundaryData psi;
    MapField init;
    double T = 0.0, Tbar = 0.0, R = 0.0;
    double rho = 0.0;
};

// -------------------------------------------------------- boundary tables

// Boundary table: one CSV row per boundary node, coordinates then u then the
// v-components; rows are matched to the nearest grid node (within h/2) and
// every boundary node must be covered exactly once.
inline BoundaryData read_boundary_table(const std::string& path, const Grid& g, int vdim) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("boundary table: cannot open " + path);
    BoundaryData bd;
    bd.vdim = vdim;
    bd.u.assign(g.node_count(), 0.0);
    bd.v.assign(g.node_count() * static_cast<long>(vdim), 0.0);
    std::vector<char> seen(g.node_count(), 0);
    std::string line;
    long covered = 0;
    long lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0])))
            continue;  // header or comment
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        if (static_cast<int>(row.size()) != g.spec.n + 1 + vdim)
            throw std::invalid_argument("boundary table: row " + std::to_string(lineno) +
                                        " has wrong column count");
        std::array<int, 3> idx{0, 0, 0};
        for (int k = 0; k < g.spec.n; ++k) {
            const double t = (row[k] - g.spec.lo[k]) / g.spec.h;
            idx[k] = static_cast<int>(std::lround(t));
            if (idx[k] < 0 || idx[k] >= g.spec.dims[k] || std::abs(t - idx[k]) > 0.5)
                throw std::invalid_argument("boundary table: row " + std::to_string(lineno) +
                                            " does not match a grid node");
        }
        const long id = g.index(idx[0], idx[1], idx[2]);
        if (g.role[id] != NodeRole::Boundary)
            throw std::invalid_argument("boundary table: row " + std::to_string(lineno) +
                                        " is not a boundary node");
        if (seen[id])
            throw std::invalid_argument("boundary table: duplicate row for a boundary node (row " +
                                        std::to_string(lineno) + ")");
        seen[id] = 1;
        ++covered;
        bd.u[id] = row[g.spec.n];
        for (int c = 0; c < vdim; ++c) bd.v[id * vdim + c] = row[g.spec.n + 1 + c];
    }
    long boundary_nodes = 0;
    for (long id = 0; id < g.node_count(); ++id)
        if (g.role[id] == NodeRole::Boundary) ++boundary_nodes;
    if (covered != boundary_nodes)
        throw std::invalid_argument("boundary table: covers " + std::to_string(covered) + " of " +
                                    std::to_string(boundary_nodes) + " boundary nodes");
    return bd;
}

inline BoundaryData materialize_boundary(const Problem& pb, const Grid& g) {
    const int vd = pb.params.v_dim();
    if (!pb.boundary.constant) return read_boundary_table(pb.boundary.table_path, g, vd);
    if (static_cast<int>(pb.boundary.v.size()) != vd)
        throw std::invalid_argument("boundary data: v has wrong dimension");
    BoundaryData bd;
    bd.vdim = vd;
    bd.u.assign(g.node_count(), 0.0);
    bd.v.assign(g.node_count() * static_cast<long>(vd), 0.0);
    for (long id = 0; id < g.node_count(); ++id) {
        if (g.role[id] != NodeRole::Boundary) continue;
        bd.u[id] = pb.boundary.u;
        for (int c = 0; c < vd; ++c) bd.v[id * vd + c] = pb.boundary.v[c];
    }
    return bd;
}

// ------------------------------------------------------------------ setup

// Truncation caps: T̄ = sup_∂Ω ū + 1 and T = max{sup_∂Ω u + 1, T̄, log2/(2a)};
// the a-priori radius is R = T + log2/a.
inline Setup make_setup(const Problem& pb) {
    for (const auto& c : pb.comps) {
        if (static_cast<int>(c.w.size()) != pb.params.v_dim())
            throw std::invalid_argument("setup: component target w has wrong dimension");
        if (c.density <= 0.0) throw std::invalid_argument("setup: density must be positive");
        if (c.kind == SingularComponent::Kind::Segment && pb.box.n != 3)
            throw std::invalid_argument("setup: segment components require n = 3");
    }
    Setup s;
    s.params = pb.params;
    s.q = QForm(pb.params);
    s.grid = build_grid(pb.box, pb.comps);
    s.mp = multi_potential(s.grid, pb.comps);
    s.psi = materialize_boundary(pb, s.grid);

    double sup_u = -std::numeric_limits<double>::infinity();
    double sup_ubar = -std::numeric_limits<double>::infinity();
    const int vd = pb.params.v_dim();
    for (long id = 0; id < s.grid.node_count(); ++id) {
        if (s.grid.role[id] != NodeRole::Boundary) continue;
        sup_u = std::max(sup_u, s.psi.u[id]);
        HoroPoint p{s.psi.u[id], std::vector<double>(s.psi.v.begin() + id * vd,
                                                     s.psi.v.begin() + (id + 1) * vd)};
        sup_ubar = std::max(sup_ubar, busemann_plus(pb.params, p));
    }
    const double a = pb.params.curv_a();
    s.Tbar = sup_ubar + 1.0;
    s.T = std::max({sup_u + 1.0, s.Tbar, std::log(2.0) / (2.0 * a)});
    s.R = s.T + std::log(2.0) / a;
    s.rho = pb.opts.rho;
    s.init = boundary_extension(s.grid, pb.comps, s.psi, s.rho);
    if (s.rho <= 0.0 && !pb.comps.empty()) {
        const double sep = sigma_boundary_separation(s.grid.spec, pb.comps);
        const double pair = pb.comps.size() >= 2
                                ? min_pairwise_separation(pb.comps, s.grid.spec.n)
                                : std::numeric_limits<double>::infinity();
        s.rho = 0.5 * std::min(sep, pair);
    }
    return s;
}

// ------------------------------------------------------------ truncations

// û ← min(û, T); energy non-increase is exact edgewise (|Δû| cannot grow and
// Q is monotone in its base height).  Returns whether anything changed.
inline bool truncate_u(const Grid& g, double T, MapField& f) {
    bool changed = false;
    for (long id = 0; id < g.node_count(); ++id) {
        if (g.role[id] != NodeRole::Interior) continue;
        if (f.uhat[id] > T) {
            f.uhat[id] = T;
            changed = true;
        }
    }
    return changed;
}

// Reverse-chart truncation: cap ū + u₀ at T̄ where ū is the height of the
// point in the chart adapted to the reversed geodesic.  Round-trip accuracy
// of the chart is verified on every touched node.
inline bool truncate_ubar(const ModelParams& P, const Grid& g, const std::vector<double>& u0,
                          double Tbar, MapField& f) {
    const int vd = f.vdim;
    bool changed = false;
    for (long id = 0; id < g.node_count(); ++id) {
        if (g.role[id] != NodeRole::Interior) continue;
        HoroPoint p{u0[id] + f.uhat[id], std::vector<double>(f.v_at(id), f.v_at(id) + vd)};
        HoroPoint r = reverse_chart(P, p);
        if (!std::isfinite(r.u))
            throw numerical_failure("truncate_ubar: reverse chart is not finite");
        {
            const HoroPoint back = reverse_chart(P, r);
            double err = std::abs(back.u - p.u);
            for (int c = 0; c < vd; ++c) err = std::max(err, std::abs(back.v[c] - p.v[c]));
            const double scale = std::max({1.0, std::abs(p.u), std::abs(r.u)});
            if (!(err <= 1e-10 * scale))  // also trips on NaN round-trips
                throw numerical_failure("truncate_ubar: chart round-trip error " +
                                        std::to_string(err) + " exceeds 1e-10");
        }
        if (r.u + u0[id] > Tbar) {
            r.u = Tbar - u0[id];
            const HoroPoint capped = reverse_chart(P, r);
            f.uhat[id] = capped.u - u0[id];
            for (int c = 0; c < vd; ++c) f.v_at(id)[c] = capped.v[c];
            changed = true;
        }
    }
    return changed;
}

// ---------------------------------------------------------------- results

struct SolveResult {
    enum class Status { Converged, MaxSweeps, Failure } status = Status::Converged;
    std::string message;
    long sweeps = 0;
    double F = 0.0;
    double el = 0.0;
    std::vector<double> f_history;
    MapField field;
    long truncation_events = 0;  // distinct sweeps where a truncation changed the field
    long truncation_reverts = 0;
};

namespace detail {

inline double dot_field(const MapField& a, const MapField& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.uhat.size(); ++i) s += a.uhat[i] * b.uhat[i];
    for (size_t i = 0; i < a.v.size(); ++i) s += a.v[i] * b.v[i];
    return s;
}

inline void axpy_field(double alpha, const MapField& x, MapField& y) {
    for (size_t i = 0; i < y.uhat.size(); ++i) y.uhat[i] += alpha * x.uhat[i];
    for (size_t i = 0; i < y.v.size(); ++i) y.v[i] += alpha * x.v[i];
}

inline double max_abs_field(const MapField& a) {
    double m = 0.0;
    for (const double x : a.uhat) m = std::max(m, std::abs(x));
    for (const double x : a.v) m = std::max(m, std::abs(x));
    return m;
}

// one Gauss–Seidel sweep: per interior node, a backtracking step along the
// negative local gradient, accepted on local-energy decrease
inline void gauss_seidel_sweep(const Grid& g, const QForm& q, const std::vector<double>& u0,
                               MapField& f) {
    const int vd = f.vdim;
    const double scale = std::pow(g.spec.h, g.spec.n - 2);
    std::vector<double> vm(vd), dv(vd), gv(vd), gxi(vd), qv(vd);

    // visit the active edges incident to node id as (id, neighbor) pairs
    auto for_neighbors = [&](long id, auto&& fn) {
        const auto m = g.multi_index(id);
        for (int axis = 0; axis < g.spec.n; ++axis) {
            const long st = g.stride(axis);
            if (m[axis] > 0 && g.is_active(id - st)) fn(id - st);
            if (m[axis] + 1 < g.spec.dims[axis] && g.is_active(id + st)) fn(id + st);
        }
    };
    auto edge_term = [&](long a, long b) {
        const double du = f.uhat[b] - f.uhat[a];
        const double um = 0.5 * (u0[a] + f.uhat[a] + u0[b] + f.uhat[b]);
        const double *va = f.v_at(a), *vb = f.v_at(b);
        for (int c = 0; c < vd; ++c) {
            vm[c] = 0.5 * (va[c] + vb[c]);
            dv[c] = vb[c] - va[c];
        }
        return scale * (du * du + q.value(um, vm, dv));
    };

    for (long id = 0; id < g.node_count(); ++id) {
        if (g.role[id] != NodeRole::Interior) continue;
        // local gradient at this node: Σ over incident edges (id, nbr)
        double gu = 0.0;
        std::fill(gv.begin(), gv.end(), 0.0);
        for_neighbors(id, [&](long nbr) {
            const double du = f.uhat[nbr] - f.uhat[id];
            const double um = 0.5 * (u0[id] + f.uhat[id] + u0[nbr] + f.uhat[nbr]);
            const double *va = f.v_at(id), *vb = f.v_at(nbr);
            for (int c = 0; c < vd; ++c) {
                vm[c] = 0.5 * (va[c] + vb[c]);
                dv[c] = vb[c] - va[c];
            }
            double qu = 0.0;
            std::fill(gxi.begin(), gxi.end(), 0.0);
            std::fill(qv.begin(), qv.end(), 0.0);
            q.add_grad(um, vm, dv, scale, &qu, qv.data(), gxi.data());
            gu += -2.0 * scale * du + 0.5 * qu;
            for (int c = 0; c < vd; ++c) gv[c] += -gxi[c] + 0.5 * qv[c];
        });
        double gn = gu * gu;
        for (int c = 0; c < vd; ++c) gn += gv[c] * gv[c];
        if (gn == 0.0) continue;
        double e0 = 0.0;
        for_neighbors(id, [&](long nbr) { e0 += edge_term(id, nbr); });
        const double u_save = f.uhat[id];
        std::vector<double> v_save(f.v_at(id), f.v_at(id) + vd);
        double alpha = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 60 && !accepted; ++bt) {
            f.uhat[id] = u_save - alpha * gu;
            for (int c = 0; c < vd; ++c) f.v_at(id)[c] = v_save[c] - alpha * gv[c];
            double e1 = 0.0;
            for_neighbors(id, [&](long nbr) { e1 += edge_term(id, nbr); });
            if (std::isfinite(e1) && e1 <= e0 - 1e-4 * alpha * gn)
                accepted = true;
            else
                alpha *= 0.5;
        }
        if (!accepted) {
            f.uhat[id] = u_save;
            for (int c = 0; c < vd; ++c) f.v_at(id)[c] = v_save[c];
        }
    }
}

}  // namespace detail

// guarded truncation pass: apply each projection, recompute F, revert if it
// ever increased (it cannot for truncate_u; the reverse-chart cap is guarded
// against quadrature artifacts)
inline void apply_truncations(const Setup& s, MapField& f, double& F, int workers,
                              long& events, long& reverts) {
    MapField trial = f;
    if (truncate_u(s.grid, s.T, trial)) {
        const double Ft = discrete_F(s.grid, s.q, s.mp.u0, trial, workers);
        if (Ft <= F) {
            f = trial;
            F = Ft;
            ++events;
        } else {
            trial = f;
            ++reverts;
        }
    }
    if (truncate_ubar(s.params, s.grid, s.mp.u0, s.Tbar, trial)) {
        const double Ft = discrete_F(s.grid, s.q, s.mp.u0, trial, workers);
        if (Ft <= F) {
            f = trial;
            F = Ft;
            ++events;
        } else {
            ++reverts;
        }
    }
}

inline SolveResult minimize(const Setup& s, const SolverOptions& opts,
                            const MapField* initial = nullptr) {
    SolveResult res;
    MapField f = initial ? *initial : s.init;
    const int workers = std::max(1, opts.workers);
    double F = discrete_F(s.grid, s.q, s.mp.u0, f, workers);
    res.f_history.push_back(F);

    MapField grad, prev_grad, step_dir;
    double alpha_bb = 0.0;
    double last_decrease = 0.0;
    bool have_prev = false;
    int stalls = 0;  // consecutive sweeps whose accepted step fell below ulp
    const double hn = std::pow(s.grid.spec.h, -s.grid.spec.n);
    // F comparisons near the optimum sit below the summation noise of
    // discrete_F (the true decrease is quadratic in the gradient), so the
    // acceptance test tolerates increases up to an explicit rounding budget;
    // the history is monotone up to this invisible slack
    const double noise_budget = 8.0 * std::numeric_limits<double>::epsilon() *
                                std::sqrt(static_cast<double>(s.grid.edges.size() + 1));

    for (long sweep = 0; sweep <= opts.max_sweeps; ++sweep) {
        grad_F(s.grid, s.q, s.mp.u0, f, grad, workers);
        const double el = detail::max_abs_field(grad) * hn;
        if (el <= opts.tol && (sweep == 0 || last_decrease <= opts.f_decrease)) {
            res.status = SolveResult::Status::Converged;
            res.sweeps = sweep;
            res.F = F;
            res.el = el;
            res.field = std::move(f);
            return res;
        }
        if (sweep == opts.max_sweeps) break;

        if (opts.method == "gs") {
            detail::gauss_seidel_sweep(s.grid, s.q, s.mp.u0, f);
            const double Fn = discrete_F(s.grid, s.q, s.mp.u0, f, workers);
            last_decrease = (F - Fn) / std::max(std::abs(Fn), 1e-30);
            F = Fn;
        } else {
            const double gg = detail::dot_field(grad, grad);
            if (gg == 0.0) {  // flat to machine precision but residual > tol
                res.status = SolveResult::Status::Failure;
                res.message = "zero gradient with unmet residual target";
                res.sweeps = sweep;
                res.F = F;
                res.el = el;
                res.field = std::move(f);
                return res;
            }
            double alpha;
            if (opts.method == "bb" && have_prev) {
                // BB1 step from the previous (s, y) pair
                MapField sdiff = grad;  // reuse storage: sdiff = grad − prev_grad (y)
                for (size_t i = 0; i < sdiff.uhat.size(); ++i)
                    sdiff.uhat[i] -= prev_grad.uhat[i];
                for (size_t i = 0; i < sdiff.v.size(); ++i) sdiff.v[i] -= prev_grad.v[i];
                const double sy = detail::dot_field(step_dir, sdiff);
                const double ss = detail::dot_field(step_dir, step_dir);
                // a degenerate pair carries no curvature: restart large
                alpha = (sy > 0.0 && ss > 0.0)
                            ? std::min(std::max(ss / sy, 1e-12), 1e6)
                            : std::max(1.0, 2.0 * alpha_bb);
            } else {
                alpha = have_prev ? 2.0 * alpha_bb : 1.0;
            }
            // backtracking along −grad; Fref carries the rounding budget
            const double Fref = F + noise_budget * (std::abs(F) + 1.0);
            MapField trial;
            double Fn = 0.0;
            bool accepted = false;
            for (int bt = 0; bt < 80; ++bt) {
                trial = f;
                detail::axpy_field(-alpha, grad, trial);
                Fn = discrete_F(s.grid, s.q, s.mp.u0, trial, workers);
                if (std::isfinite(Fn) && Fn <= Fref - 1e-4 * alpha * gg) {
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!accepted) {
                res.status = SolveResult::Status::Failure;
                res.message = "line search failed to decrease F";
                res.sweeps = sweep;
                res.F = F;
                res.el = el;
                res.field = std::move(f);
                return res;
            }
            // the pair (s, y) must reflect the realized movement: steps below
            // one ulp leave the field unchanged and carry no curvature
            step_dir = trial;
            for (size_t i = 0; i < step_dir.uhat.size(); ++i) step_dir.uhat[i] -= f.uhat[i];
            for (size_t i = 0; i < step_dir.v.size(); ++i) step_dir.v[i] -= f.v[i];
            if (detail::max_abs_field(step_dir) == 0.0) {
                have_prev = false;
                alpha_bb = 1.0;
                if (++stalls >= 3) {
                    res.status = SolveResult::Status::Failure;
                    res.message =
                        "descent stalled at machine precision before the residual target";
                    res.sweeps = sweep + 1;
                    res.F = F;
                    res.el = el;
                    res.field = std::move(f);
                    return res;
                }
            } else {
                stalls = 0;
                prev_grad = grad;
                have_prev = true;
                alpha_bb = alpha;
            }
            f = std::move(trial);
            last_decrease = (F - Fn) / std::max(std::abs(Fn), 1e-30);
            F = Fn;
        }
        if (opts.truncation && opts.truncation_every > 0 &&
            (sweep + 1) % opts.truncation_every == 0) {
            try {
                apply_truncations(s, f, F, workers, res.truncation_events,
                                  res.truncation_reverts);
            } catch (const numerical_failure& e) {
                res.status = SolveResult::Status::Failure;
                res.message = e.what();
                res.sweeps = sweep + 1;
                res.F = F;
                res.el = el_residual(s.grid, s.q, s.mp.u0, f, workers);
                res.field = std::move(f);
                return res;
            }
        }
        res.f_history.push_back(F);
    }
    res.status = SolveResult::Status::MaxSweeps;
    res.message = "sweep limit reached before convergence";
    res.sweeps = opts.max_sweeps;
    res.F = F;
    res.el = el_residual(s.grid, s.q, s.mp.u0, f, workers);
    res.field = std::move(f);
    return res;
}

// ------------------------------------------------------------- uniqueness

struct UniquenessReport {
    double max_spread = 0.0;     // sup over nodes and run pairs of dist(φ_j, φ_k)
    double min_laplacian = 0.0;  // min discrete Laplacian of dist² (subharmonicity)
    bool all_converged = true;
};

inline double node_dist(const Setup& s, const MapField& f1, const MapField& f2, long id) {
    const int vd = f1.vdim;
    HoroPoint p{s.mp.u0[id] + f1.uhat[id], std::vector<double>(f1.v_at(id), f1.v_at(id) + vd)};
    HoroPoint q{s.mp.u0[id] + f2.uhat[id], std::vector<double>(f2.v_at(id), f2.v_at(id) + vd)};
    return dist_horo(s.params, p, q);
}

inline UniquenessReport uniqueness_check(const Setup& s, const SolverOptions& opts, int n_inits) {
    UniquenessReport rep;
    std::vector<MapField> runs;
    Rng rng(opts.seed);
    for (int k = 0; k < n_inits; ++k) {
        MapField init = s.init;
        if (k > 0) {  // first run from the unperturbed extension
            for (long id = 0; id < s.grid.node_count(); ++id) {
                if (s.grid.role[id] != NodeRole::Interior) continue;
                if (s.grid.dist_sigma[id] <= 0.5 * s.rho) continue;  // keep the cap near Σ
                init.uhat[id] += rng.uniform(-0.1, 0.1);
                for (int c = 0; c < init.vdim; ++c)
                    init.v_at(id)[c] += rng.uniform(-0.1, 0.1);
            }
        }
        SolveResult r = minimize(s, opts, &init);
        if (r.status != SolveResult::Status::Converged) rep.all_converged = false;
        runs.push_back(std::move(r.field));
    }
    rep.min_laplacian = std::numeric_limits<double>::infinity();
    const double h2 = s.grid.spec.h * s.grid.spec.h;
    for (size_t j = 0; j < runs.size(); ++j)
        for (size_t k = j + 1; k < runs.size(); ++k) {
            std::vector<double> d2(s.grid.node_count(), 0.0);
            for (long id = 0; id < s.grid.node_count(); ++id) {
                if (!s.grid.is_active(id)) continue;
                const double d = node_dist(s, runs[j], runs[k], id);
                rep.max_spread = std::max(rep.max_spread, d);
                d2[id] = d * d;
            }
            for (long id = 0; id < s.grid.node_count(); ++id) {
                if (s.grid.role[id] != NodeRole::Interior) continue;
                const auto m = s.grid.multi_index(id);
                double lap = 0.0;
                bool ok = true;
                for (int axis = 0; axis < s.grid.spec.n; ++axis) {
                    const long st = s.grid.stride(axis);
                    if (m[axis] <= 0 || m[axis] + 1 >= s.grid.spec.dims[axis] ||
                        !s.grid.is_active(id - st) || !s.grid.is_active(id + st)) {
                        ok = false;
                        break;
                    }
                    lap += (d2[id + st] - 2.0 * d2[id] + d2[id - st]) / h2;
                }
                if (ok) rep.min_laplacian = std::min(rep.min_laplacian, lap);
            }
        }
    if (!std::isfinite(rep.min_laplacian)) rep.min_laplacian = 0.0;
    return rep;
}

// ------------------------------------------------------------ diagnostics

struct ComponentDiagnostics {
    double e = 0.0;                      // charge
    double e_variation = 0.0;            // |charge(s) − charge(s/2)|
    std::optional<double> d;             // asymptotic Busemann shift (N ≥ 2)
    double d_tail = 0.0;                 // |d(20) − d(10)|
    double omega_radius = 0.0;           // radius of Ω_i
    double observed_radius = 0.0;        // max dist(φ, φ_i) over Ω_i
};

// Ω_i radius: half the separation to other components and to ∂Ω
inline double omega_radius(const Setup& s, size_t i) {
    const auto& comps = s.mp.parts;
    double r = sigma_boundary_separation(s.grid.spec, {comps[i].comp});
    for (size_t j = 0; j < comps.size(); ++j) {
        if (j == i) continue;
        if (comps[i].comp.kind == SingularComponent::Kind::Point)
            r = std::min(r, dist_to_component(comps[j].comp, comps[i].comp.a, s.grid.spec.n));
        else {
            r = std::min(r, dist_to_component(comps[j].comp, comps[i].comp.a, s.grid.spec.n));
            r = std::min(r, dist_to_component(comps[j].comp, comps[i].comp.b, s.grid.spec.n));
        }
    }
    return 0.5 * r;
}

inline std::vector<ComponentDiagnostics> diagnostics_multi(const Setup& s, const MapField& f) {
    std::vector<ComponentDiagnostics> out;
    const size_t N = s.mp.parts.size();
    const int vd = s.params.v_dim();
    for (size_t i = 0; i < N; ++i) {
        ComponentDiagnostics d;
        d.omega_radius = omega_radius(s, i);
        const double sch = 0.5 * d.omega_radius;
        d.e = charge(s.grid, s.mp.parts[i], sch);
        d.e_variation = std::abs(d.e - charge(s.grid, s.mp.parts[i], 0.5 * sch));
        if (N >= 2) {
            const size_t ref = (i == 0) ? 1 : 0;  // measure relative to another component
            const auto what =
                compose_offsets(s.q, offset_inverse(s.mp.parts[ref].comp.w), s.mp.parts[i].comp.w);
            auto shift = [&](double t) {
                return t - busemann_plus(s.params, HoroPoint{t, what});
            };
            double sf2c = 0.0;  // degenerate when the offsets coincide
            for (const double x : what) sf2c += x * x;
            if (sf2c > 0.0) {
                d.d = shift(20.0);
                d.d_tail = std::abs(*d.d - shift(10.0));
            }
        }
        // observed distance to the model map φ_i = (u_i, w_i) over Ω_i
        for (long id = 0; id < s.grid.node_count(); ++id) {
            if (!s.grid.is_active(id)) continue;
            const double r = dist_to_component(s.mp.parts[i].comp, s.grid.coords(id),
                                               s.grid.spec.n);
            if (r > d.omega_radius) continue;
            HoroPoint p{s.mp.u0[id] + f.uhat[id],
                        std::vector<double>(f.v_at(id), f.v_at(id) + vd)};
            HoroPoint q{s.mp.parts[i].total[id], s.mp.parts[i].comp.w};
            d.observed_radius = std::max(d.observed_radius, dist_horo(s.params, p, q));
        }
        out.push_back(std::move(d));
    }
    return out;
}

}  // namespace harmap
