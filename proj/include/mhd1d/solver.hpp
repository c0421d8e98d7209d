#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mhd1d/constitutive.hpp"
#include "mhd1d/core.hpp"
#include "mhd1d/diagnostics.hpp"
#include "mhd1d/errors.hpp"
#include "mhd1d/tridiagonal.hpp"

namespace mhd1d {

struct SolverControls {
    double cfl = 0.4;
    double t_end = 1.0;
    double dt_max = std::numeric_limits<double>::infinity();
    double snapshot_every = 0.1;
    double pos_floor = 1e-12;       // below this, a step is a positivity event
    int max_halvings = 20;          // dt-halving retry budget per step
    int theta_picard_iters = 2;     // lagged-conductivity sweeps

    void validate() const
    {
        auto bad = [](const std::string& name) {
            throw ValidationError("SolverControls: " + name + " out of range");
        };
        if (!(cfl > 0.0 && cfl <= 1.0)) bad("cfl");
        if (!(t_end > 0.0)) bad("t_end");
        if (!(dt_max > 0.0)) bad("dt_max");
        if (!(snapshot_every > 0.0)) bad("snapshot_every");
        if (!(pos_floor > 0.0)) bad("pos_floor");
        if (max_halvings < 0) bad("max_halvings");
        if (theta_picard_iters < 1) bad("theta_picard_iters");
    }
};

/// Optional per-equation source terms (x,t) appended to the primitive-form
/// sub-step equations; the manufactured-solution oracle drives these.
struct SourceTerms {
    std::function<double(double, double)> rho;
    std::function<double(double, double)> u;
    std::function<vec2(double, double)> w;
    std::function<vec2(double, double)> b;
    std::function<double(double, double)> theta;
};

/// Integration failed; carries the failure time, the offending field and,
/// when raised from solve(), the last accepted state.
struct SolverFailure : std::runtime_error {
    double t_fail = 0.0;
    std::string field;
    std::optional<State> last_state;

    SolverFailure(const std::string& msg, double t, std::string fld)
        : std::runtime_error(msg), t_fail(t), field(std::move(fld)) {}
};

namespace detail {

/// Internal control-flow signal: a sub-step undershot the positivity floor.
struct PositivityEvent {
    std::string field;
    std::size_t node;
    double value;
};

inline double src_at(const std::function<double(double, double)>& f, double x, double t)
{
    return f ? f(x, t) : 0.0;
}

inline vec2 src2_at(const std::function<vec2(double, double)>& f, double x, double t)
{
    return f ? f(x, t) : vec2{0.0, 0.0};
}

} // namespace detail

/// Per-accepted-step diagnostics (the CSV columns plus internal extras).
struct StepDiag {
    double t = 0.0;       // end-of-step time
    double dt = 0.0;      // accepted dt
    double mass = 0.0;
    double total_energy = 0.0;
    double entropy_prod = 0.0;
    double min_rho = 0.0;
    double min_theta = 0.0;
    double bflux = 0.0;   // mu*(w . w_x)|_0^1, one-sided differences
    int halvings = 0;
    // squared L2 norms of the end-of-step gradients (space-time accumulators)
    double grad2_u = 0.0, grad2_w = 0.0, grad2_b = 0.0, grad2_theta = 0.0;
};

/// CFL time step: min(dt_max, cfl*h / max(|u| + c)) with
/// c = sqrt(gamma*theta + |b|^2/rho).
inline double cfl_dt(const State& s, const PhysParams& params, const Mesh& mesh,
                     const SolverControls& controls)
{
    double speed = 0.0;
    for (std::size_t i = 0; i < s.rho.size(); ++i) {
        const double c = std::sqrt(params.gamma * s.theta[i] + norm2(s.b.at(i)) / s.rho[i]);
        const double sp = std::abs(s.u[i]) + c;
        if (!std::isfinite(sp))
            throw SolverFailure("cfl_dt: non-finite state", s.t, "state");
        speed = std::max(speed, sp);
    }
    if (!(speed > 0.0))
        throw SolverFailure("cfl_dt: degenerate wave speed", s.t, "state");
    return std::min(controls.dt_max, controls.cfl * mesh.h / speed);
}

/// Explicit conservative continuity update, first-order upwind flux chosen
/// by the sign of the face velocity. Wall faces carry zero flux and the
/// wall nodes own half cells, so the trapezoid mass sum telescopes exactly.
inline ScalarField substep_continuity(const State& s, const Mesh& mesh, double dt,
                                      double pos_floor, const SourceTerms* src = nullptr)
{
    const std::size_t n = s.rho.size();
    const double h = mesh.h;
    std::vector<double> flux(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double uf = 0.5 * (s.u[i] + s.u[i + 1]);
        flux[i] = uf >= 0.0 ? s.rho[i] * uf : s.rho[i + 1] * uf;
    }
    ScalarField rho(n);
    rho[0] = s.rho[0] - (dt / (0.5 * h)) * flux[0];
    for (std::size_t i = 1; i + 1 < n; ++i)
        rho[i] = s.rho[i] - (dt / h) * (flux[i] - flux[i - 1]);
    rho[n - 1] = s.rho[n - 1] + (dt / (0.5 * h)) * flux[n - 2];
    if (src && src->rho)
        for (std::size_t i = 0; i < n; ++i)
            rho[i] += dt * src->rho(mesh.nodes[i], s.t);
    for (std::size_t i = 0; i < n; ++i)
        if (!(rho[i] >= pos_floor))
            throw detail::PositivityEvent{"rho", i, rho[i]};
    return rho;
}

/// Momentum: explicit upwind convection and centered gradient of the total
/// pressure p + |b|^2/2, implicit (lambda/rho) u_xx, Dirichlet u = 0.
inline ScalarField substep_momentum(const State& s, const PhysParams& params, const Mesh& mesh,
                                    double dt, const SourceTerms* src = nullptr)
{
    const std::size_t n = s.u.size();
    const double h = mesh.h;
    ScalarField ptot(n);
    for (std::size_t i = 0; i < n; ++i)
        ptot[i] = params.gamma * s.rho[i] * s.theta[i] + 0.5 * norm2(s.b.at(i));

    std::vector<double> lo(n, 0.0), di(n, 1.0), up(n, 0.0), rhs(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double ui = s.u[i];
        double conv = 0.0;
        if (ui > 0.0)
            conv = ui * (s.u[i] - s.u[i - 1]) / h;
        else if (ui < 0.0)
            conv = ui * (s.u[i + 1] - s.u[i]) / h;
        const double px = (ptot[i + 1] - ptot[i - 1]) / (2.0 * h);
        double ustar = ui + dt * (-conv - px / s.rho[i]);
        if (src && src->u)
            ustar += dt * src->u(mesh.nodes[i], s.t);
        const double a = dt * params.lambda / (s.rho[i] * h * h);
        lo[i] = -a;
        di[i] = 1.0 + 2.0 * a;
        up[i] = -a;
        rhs[i] = ustar;
    }
    // Dirichlet rows at both walls: u = 0.
    return tridiag_solve(lo, di, up, rhs);
}

/// Transverse velocity. mu > 0: explicit upwind transport and b_x/rho
/// source, implicit (mu/rho) w_xx, Dirichlet walls from the boundary data
/// at end-of-step time. mu = 0: pure transport + source; no boundary
/// condition is read or imposed, wall nodes update one-sided.
inline Vec2Field substep_transverse_velocity(const State& s, const PhysParams& params,
                                             const BoundaryData& bdry, const Mesh& mesh,
                                             double dt, const SourceTerms* src = nullptr)
{
    const std::size_t n = s.u.size();
    const double h = mesh.h;
    const bool limit_mode = params.mu == 0.0;

    Vec2Field out(n);
    vec2 bc_m{0.0, 0.0}, bc_p{0.0, 0.0};
    if (!limit_mode) {
        bc_m = bdry.w_minus(s.t + dt);
        bc_p = bdry.w_plus(s.t + dt);
    }

    for (int comp = 0; comp < 2; ++comp) {
        const ScalarField& wc = comp == 0 ? s.w.c1 : s.w.c2;
        const ScalarField& bc = comp == 0 ? s.b.c1 : s.b.c2;
        std::vector<double> lo(n, 0.0), di(n, 1.0), up(n, 0.0), rhs(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double ui = s.u[i];
            double conv = 0.0;
            if (ui > 0.0)
                conv = ui * (wc[i] - wc[i - 1]) / h;
            else if (ui < 0.0)
                conv = ui * (wc[i + 1] - wc[i]) / h;
            const double bx = (bc[i + 1] - bc[i - 1]) / (2.0 * h);
            double wstar = wc[i] + dt * (-conv + bx / s.rho[i]);
            if (src && src->w)
                wstar += dt * detail::src2_at(src->w, mesh.nodes[i], s.t)[comp];
            rhs[i] = wstar;
        }
        if (limit_mode) {
            // Characteristics are tangent to the walls (u = 0 there); the
            // endpoint values evolve by the interior scheme, one-sided.
            const double bx0 = (-3.0 * bc[0] + 4.0 * bc[1] - bc[2]) / (2.0 * h);
            const double bx1 = (3.0 * bc[n - 1] - 4.0 * bc[n - 2] + bc[n - 3]) / (2.0 * h);
            rhs[0] = wc[0] + dt * bx0 / s.rho[0];
            rhs[n - 1] = wc[n - 1] + dt * bx1 / s.rho[n - 1];
            if (src && src->w) {
                rhs[0] += dt * detail::src2_at(src->w, mesh.nodes[0], s.t)[comp];
                rhs[n - 1] += dt * detail::src2_at(src->w, mesh.nodes[n - 1], s.t)[comp];
            }
            ScalarField& dst = comp == 0 ? out.c1 : out.c2;
            dst = rhs;
            continue;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double a = dt * params.mu / (s.rho[i] * h * h);
            lo[i] = -a;
            di[i] = 1.0 + 2.0 * a;
            up[i] = -a;
        }
        rhs[0] = comp == 0 ? bc_m[0] : bc_m[1];
        rhs[n - 1] = comp == 0 ? bc_p[0] : bc_p[1];
        ScalarField& dst = comp == 0 ? out.c1 : out.c2;
        dst = tridiag_solve(lo, di, up, rhs);
    }
    return out;
}

/// Magnetic field: explicit upwind transport of u*b (flux form), explicit
/// centered w_x source, implicit nu*b_xx, Dirichlet b = 0.
inline Vec2Field substep_magnetic(const State& s, const PhysParams& params, const Mesh& mesh,
                                  double dt, const SourceTerms* src = nullptr)
{
    const std::size_t n = s.u.size();
    const double h = mesh.h;
    Vec2Field out(n);
    for (int comp = 0; comp < 2; ++comp) {
        const ScalarField& bc = comp == 0 ? s.b.c1 : s.b.c2;
        const ScalarField& wc = comp == 0 ? s.w.c1 : s.w.c2;
        std::vector<double> flux(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double uf = 0.5 * (s.u[i] + s.u[i + 1]);
            flux[i] = uf >= 0.0 ? bc[i] * uf : bc[i + 1] * uf;
        }
        std::vector<double> lo(n, 0.0), di(n, 1.0), up(n, 0.0), rhs(n, 0.0);
        const double a = dt * params.nu / (h * h);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double wx = (wc[i + 1] - wc[i - 1]) / (2.0 * h);
            double bstar = bc[i] + dt * (-(flux[i] - flux[i - 1]) / h + wx);
            if (src && src->b)
                bstar += dt * detail::src2_at(src->b, mesh.nodes[i], s.t)[comp];
            lo[i] = -a;
            di[i] = 1.0 + 2.0 * a;
            up[i] = -a;
            rhs[i] = bstar;
        }
        ScalarField& dst = comp == 0 ? out.c1 : out.c2;
        dst = tridiag_solve(lo, di, up, rhs);
    }
    return out;
}

/// Temperature (e = theta): explicit upwind transport, explicit compression
/// work and nonnegative dissipation from the end-of-step gradients of
/// u, w, b; conduction implicit with lagged conductivity, faces at the
/// arithmetic-mean theta; zero-flux walls via half cells (ghost reflection).
inline ScalarField substep_temperature(const State& s, const PhysParams& params,
                                       const ConductivityLaw& law, const Mesh& mesh, double dt,
                                       double pos_floor, int picard_iters,
                                       const SourceTerms* src = nullptr)
{
    const std::size_t n = s.theta.size();
    const double h = mesh.h;
    const ScalarField ux = gradient(s.u, mesh);
    const ScalarField w1x = gradient(s.w.c1, mesh);
    const ScalarField w2x = gradient(s.w.c2, mesh);
    const ScalarField b1x = gradient(s.b.c1, mesh);
    const ScalarField b2x = gradient(s.b.c2, mesh);

    ScalarField thstar(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ui = s.u[i];
        double conv = 0.0;
        if (i > 0 && ui > 0.0)
            conv = ui * (s.theta[i] - s.theta[i - 1]) / h;
        else if (i + 1 < n && ui < 0.0)
            conv = ui * (s.theta[i + 1] - s.theta[i]) / h;
        const double compression = params.gamma * s.theta[i] * ux[i];
        const double diss = (params.lambda * ux[i] * ux[i]
                           + params.mu * (w1x[i] * w1x[i] + w2x[i] * w2x[i])
                           + params.nu * (b1x[i] * b1x[i] + b2x[i] * b2x[i])) / s.rho[i];
        thstar[i] = s.theta[i] + dt * (-conv - compression + diss);
        if (src && src->theta)
            thstar[i] += dt * src->theta(mesh.nodes[i], s.t);
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!(thstar[i] >= pos_floor))
            throw detail::PositivityEvent{"theta", i, thstar[i]};

    ScalarField theta = thstar;
    for (int sweep = 0; sweep < picard_iters; ++sweep) {
        std::vector<double> kf(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double th_face = 0.5 * (theta[i] + theta[i + 1]);
            const double rho_face = 0.5 * (s.rho[i] + s.rho[i + 1]);
            kf[i] = conductivity(law, rho_face, th_face);
        }
        std::vector<double> lo(n, 0.0), di(n, 1.0), up(n, 0.0);
        {
            const double a = dt * kf[0] / (s.rho[0] * h * h);
            di[0] = 1.0 + 2.0 * a;
            up[0] = -2.0 * a;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double al = dt * kf[i - 1] / (s.rho[i] * h * h);
            const double ar = dt * kf[i] / (s.rho[i] * h * h);
            lo[i] = -al;
            di[i] = 1.0 + al + ar;
            up[i] = -ar;
        }
        {
            const double a = dt * kf[n - 2] / (s.rho[n - 1] * h * h);
            lo[n - 1] = -2.0 * a;
            di[n - 1] = 1.0 + 2.0 * a;
        }
        theta = tridiag_solve(lo, di, up, thstar);
        for (double v : theta)
            if (!std::isfinite(v))
                throw SolverFailure("substep_temperature: non-finite Picard iterate", s.t, "theta");
        if (!(*std::min_element(theta.begin(), theta.end()) >= pos_floor)) {
            const auto it = std::min_element(theta.begin(), theta.end());
            throw detail::PositivityEvent{"theta", static_cast<std::size_t>(it - theta.begin()), *it};
        }
    }
    return theta;
}

namespace detail {

inline StepDiag step_diagnostics(const State& s, const Mesh& mesh, const PhysParams& params,
                                 const ConductivityLaw& law, double dt, int halvings)
{
    StepDiag d;
    d.t = s.t;
    d.dt = dt;
    d.halvings = halvings;
    d.mass = total_mass(s, mesh);
    d.total_energy = total_energy(s, mesh);
    d.entropy_prod = entropy_production(s, mesh, params, law);
    d.min_rho = *std::min_element(s.rho.begin(), s.rho.end());
    d.min_theta = *std::min_element(s.theta.begin(), s.theta.end());

    const std::size_t n = s.u.size();
    const double h = mesh.h;
    auto one_sided_left = [&](const ScalarField& f) {
        return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    };
    auto one_sided_right = [&](const ScalarField& f) {
        return (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    };
    const vec2 wx0{one_sided_left(s.w.c1), one_sided_left(s.w.c2)};
    const vec2 wx1{one_sided_right(s.w.c1), one_sided_right(s.w.c2)};
    d.bflux = params.mu * (dot(s.w.at(n - 1), wx1) - dot(s.w.at(0), wx0));

    d.grad2_u = l2_norm_sq(gradient(s.u, mesh), mesh);
    d.grad2_w = l2_norm_sq(gradient(s.w.c1, mesh), mesh) + l2_norm_sq(gradient(s.w.c2, mesh), mesh);
    d.grad2_b = l2_norm_sq(gradient(s.b.c1, mesh), mesh) + l2_norm_sq(gradient(s.b.c2, mesh), mesh);
    d.grad2_theta = l2_norm_sq(gradient(s.theta, mesh), mesh);
    return d;
}

} // namespace detail

struct StepResult {
    State state;
    StepDiag diag;
};

/// One accepted time step: cfl_dt (capped by dt_cap), then the sub-steps in
/// the order rho -> u -> w -> b -> theta; positivity events discard the
/// attempt and halve dt, up to controls.max_halvings.
inline StepResult step(const State& s, const PhysParams& params, const BoundaryData& bdry,
                       const ConductivityLaw& law, const SolverControls& controls,
                       const Mesh& mesh,
                       double dt_cap = std::numeric_limits<double>::infinity(),
                       const SourceTerms* src = nullptr)
{
    double dt = std::min(cfl_dt(s, params, mesh, controls), dt_cap);
    std::string last_field = "unknown";
    for (int attempt = 0; attempt <= controls.max_halvings; ++attempt) {
        try {
            State next = s;
            next.rho = substep_continuity(next, mesh, dt, controls.pos_floor, src);
            next.u = substep_momentum(next, params, mesh, dt, src);
            next.w = substep_transverse_velocity(next, params, bdry, mesh, dt, src);
            next.b = substep_magnetic(next, params, mesh, dt, src);
            next.theta = substep_temperature(next, params, law, mesh, dt, controls.pos_floor,
                                             controls.theta_picard_iters, src);
            next.t = s.t + dt;
            StepDiag diag = detail::step_diagnostics(next, mesh, params, law, dt, attempt);
            if (!std::isfinite(diag.total_energy) || !std::isfinite(diag.entropy_prod))
                throw SolverFailure("step: non-finite diagnostics", s.t, "state");
            // sum of squares with positive weights; a negative value means
            // the scheme or the law is broken
            if (diag.entropy_prod < 0.0)
                throw SolverFailure("step: negative entropy production", s.t, "entropy");
            return {std::move(next), diag};
        } catch (const detail::PositivityEvent& ev) {
            last_field = ev.field;
            dt *= 0.5;
        }
    }
    throw SolverFailure("step: positivity rescue budget exhausted on field " + last_field,
                        s.t, last_field);
}

/// Snapshot trajectory plus per-step diagnostics and accumulated space-time
/// integrals for one run.
struct RunRecord {
    Mesh mesh;
    PhysParams params;
    SolverControls controls;
    std::vector<State> snapshots;
    std::vector<StepDiag> diag_series;
    double bflux_integral = 0.0; // rectangle-in-time integral of bflux
    double grad2_u_qt = 0.0, grad2_w_qt = 0.0, grad2_b_qt = 0.0, grad2_theta_qt = 0.0;
    // soft monitors: reported per run, never asserted
    double min_rho_run = std::numeric_limits<double>::infinity();
    double min_theta_run = std::numeric_limits<double>::infinity();
    double max_rho_run = 0.0;
    double max_theta_run = 0.0;
};

/// Integrate to t_end. dt is clipped so snapshots land exactly on
/// k*snapshot_every and on t_end; all runs sharing controls therefore
/// share snapshot times exactly.
inline RunRecord solve(const InitialData& init, const PhysParams& params, const BoundaryData& bdry,
                       const ConductivityLaw& law, const SolverControls& controls, const Mesh& mesh,
                       const SourceTerms* src = nullptr)
{
    params.validate();
    controls.validate();
    State s = make_state(mesh, init, bdry);

    RunRecord rec;
    rec.mesh = mesh;
    rec.params = params;
    rec.controls = controls;
    rec.snapshots.push_back(s);

    std::vector<double> targets;
    for (int k = 1;; ++k) {
        const double tk = k * controls.snapshot_every;
        if (tk >= controls.t_end * (1.0 - 1e-12))
            break;
        targets.push_back(tk);
    }
    targets.push_back(controls.t_end);

    double seg_start = 0.0;
    for (double target : targets) {
        // Segment-relative stepping: the dt sequence depends only on the
        // fields and the segment length, so a run continued from a snapshot
        // reproduces the uninterrupted trajectory bit-exactly.
        const double seg_len = target - seg_start;
        double tau = 0.0;
        while (tau < seg_len) {
            const double cap = seg_len - tau;
            StepResult res;
            try {
                res = step(s, params, bdry, law, controls, mesh, cap, src);
            } catch (SolverFailure& f) {
                f.t_fail = s.t;
                f.last_state = s;
                throw;
            }
            tau = (res.diag.dt == cap) ? seg_len : tau + res.diag.dt;
            if (tau >= seg_len) {
                tau = seg_len;
                res.state.t = target;
            } else {
                res.state.t = seg_start + tau;
            }
            s = std::move(res.state);
            rec.bflux_integral += res.diag.bflux * res.diag.dt;
            rec.grad2_u_qt += res.diag.grad2_u * res.diag.dt;
            rec.grad2_w_qt += res.diag.grad2_w * res.diag.dt;
            rec.grad2_b_qt += res.diag.grad2_b * res.diag.dt;
            rec.grad2_theta_qt += res.diag.grad2_theta * res.diag.dt;
            rec.min_rho_run = std::min(rec.min_rho_run, res.diag.min_rho);
            rec.min_theta_run = std::min(rec.min_theta_run, res.diag.min_theta);
            rec.max_rho_run = std::max(rec.max_rho_run, *std::max_element(s.rho.begin(), s.rho.end()));
            rec.max_theta_run = std::max(rec.max_theta_run, *std::max_element(s.theta.begin(), s.theta.end()));
            res.diag.t = s.t;
            rec.diag_series.push_back(res.diag);
        }
        rec.snapshots.push_back(s);
        seg_start = target;
    }
    return rec;
}

} // namespace mhd1d
