#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mhd1d/core.hpp"
#include "mhd1d/diagnostics.hpp"
#include "mhd1d/errors.hpp"
#include "mhd1d/mms.hpp"
#include "mhd1d/solver.hpp"

namespace mhd1d {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0; // RMS deviation in log-log coordinates
};

/// Ordinary least squares on (ln mu, ln E).
inline FitResult rate_fit(const std::vector<std::pair<double, double>>& pairs)
{
    if (pairs.size() < 3)
        throw FitError("rate_fit: need at least 3 pairs, got " + std::to_string(pairs.size()));
    std::vector<double> xs, ys;
    for (const auto& [mu, e] : pairs) {
        if (!(mu > 0.0))
            throw FitError("rate_fit: mu must be positive");
        if (!(e > 0.0))
            throw FitError("rate_fit: E <= 0 (exact coincidence with baseline or corruption)");
        xs.push_back(std::log(mu));
        ys.push_back(std::log(e));
    }
    const std::size_t n = xs.size();
    double xm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xm += xs[i];
        ym += ys[i];
    }
    xm /= n;
    ym /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - xm) * (xs[i] - xm);
        sxy += (xs[i] - xm) * (ys[i] - ym);
    }
    if (sxx == 0.0)
        throw FitError("rate_fit: mu values must be distinct");
    FitResult f;
    f.slope = sxy / sxx;
    f.intercept = ym - f.slope * xm;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (f.intercept + f.slope * xs[i]);
        ss += r * r;
    }
    f.residual = std::sqrt(ss / n);
    return f;
}

/// Fold one record pair into the composite difference norm at snapshot
/// cadence (rectangle in time; the t = 0 sample carries zero weight).
inline DiffNorms record_diff_norms(const RunRecord& rec, const RunRecord& base)
{
    if (rec.mesh.n_cells != base.mesh.n_cells)
        throw AlignmentError("record_diff_norms: records on different meshes");
    if (rec.snapshots.size() != base.snapshots.size())
        throw AlignmentError("record_diff_norms: snapshot counts differ");
    DiffNorms acc;
    double prev_t = 0.0;
    for (std::size_t k = 0; k < rec.snapshots.size(); ++k) {
        const double t = rec.snapshots[k].t;
        if (t != base.snapshots[k].t)
            throw AlignmentError("record_diff_norms: snapshot times differ");
        const double dt = k == 0 ? 0.0 : t - prev_t;
        acc = diff_norms_update(acc, rec.snapshots[k], base.snapshots[k], rec.mesh, dt);
        prev_t = t;
    }
    return acc;
}

struct RatePoint {
    double mu = 0.0;
    double E = 0.0;
    double E_rho = 0.0, E_u = 0.0, E_w = 0.0, E_b = 0.0, E_theta = 0.0;
    bool failed = false;
    std::string fail_reason;
};

struct RateReport {
    std::vector<RatePoint> points; // sorted by mu, ascending
    bool fit_ok = false;
    std::string fit_note;
    FitResult fit;
};

struct BLRow {
    double mu = 0.0;
    double delta = 0.0;
    double interior_sup = 0.0;
    double global_sup = 0.0;
    double mismatch = 0.0;
    bool failed = false;
};

struct BLReport {
    double exponent = 0.4;
    std::vector<BLRow> rows; // sorted by mu, ascending
};

/// Boundary-layer profile of one mu-case against the limit baseline.
/// delta(mu) = mu^a; sups are taken over snapshot times. The boundary
/// mismatch is the wall-trace gap max_t |w - w_bar| at the walls, which for
/// mu > 0 equals the gap between the imposed data and the limit trace.
inline BLRow bl_profile(const RunRecord& record_mu, const RunRecord& record_0, double a)
{
    if (!(a > 0.0 && a < 0.5))
        throw std::domain_error("bl_profile: thickness exponent must lie in (0, 1/2)");
    if (record_mu.mesh.n_cells != record_0.mesh.n_cells)
        throw AlignmentError("bl_profile: records on different meshes");
    if (record_mu.snapshots.size() != record_0.snapshots.size())
        throw AlignmentError("bl_profile: snapshot cadences differ");

    BLRow row;
    row.mu = record_mu.params.mu;
    row.delta = std::pow(row.mu, a);
    if (!(row.delta < 0.5))
        throw std::domain_error("bl_profile: delta(mu) >= 1/2, mu too large for this exponent");

    const Mesh& mesh = record_mu.mesh;
    const std::size_t last = mesh.n_nodes() - 1;
    for (std::size_t k = 0; k < record_mu.snapshots.size(); ++k) {
        const State& s = record_mu.snapshots[k];
        const State& sb = record_0.snapshots[k];
        if (s.t != sb.t)
            throw AlignmentError("bl_profile: snapshot times differ");
        Vec2Field diff(mesh.n_nodes());
        for (std::size_t i = 0; i <= last; ++i) {
            diff.c1[i] = s.w.c1[i] - sb.w.c1[i];
            diff.c2[i] = s.w.c2[i] - sb.w.c2[i];
        }
        row.interior_sup = std::max(row.interior_sup, interior_sup(diff, mesh, row.delta));
        row.global_sup = std::max(row.global_sup, interior_sup(diff, mesh, 0.0));
        const double mm = std::sqrt(norm2(diff.at(0)));
        const double mp = std::sqrt(norm2(diff.at(last)));
        row.mismatch = std::max({row.mismatch, mm, mp});
    }
    return row;
}

/// A vanishing-shear-viscosity sweep: shared mesh, coefficients (except mu),
/// initial and boundary data; the mu = 0 baseline is solved on the same
/// mesh and controls.
struct SweepPlan {
    std::vector<double> mu_values; // strictly positive, distinct
    bool include_limit = true;
    Mesh mesh;
    PhysParams params; // mu replaced per case
    InitialData init;
    BoundaryData bdry;
    double bl_exponent = 0.4;
    bool grid_check = false;
    int jobs = 0; // worker pool bound; 0 = hardware concurrency
};

struct SweepResult {
    RateReport rate;
    BLReport bl;
    RunRecord baseline;
    std::vector<RunRecord> case_records; // aligned with rate.points
    double grid_check_e = std::numeric_limits<double>::quiet_NaN();
    double grid_check_threshold = std::numeric_limits<double>::quiet_NaN();
    bool grid_check_ok = true;
};

namespace detail {

/// Restrict a fine-mesh record to the coarse mesh with half the cells
/// (every second node), keeping snapshot times.
inline RunRecord restrict_to_coarse(const RunRecord& fine, const Mesh& coarse)
{
    RunRecord out;
    out.mesh = coarse;
    out.params = fine.params;
    out.controls = fine.controls;
    for (const State& s : fine.snapshots) {
        State c;
        c.t = s.t;
        const std::size_t n = coarse.n_nodes();
        c.rho.resize(n);
        c.u.resize(n);
        c.theta.resize(n);
        c.w = Vec2Field(n);
        c.b = Vec2Field(n);
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t i = 2 * j;
            c.rho[j] = s.rho[i];
            c.u[j] = s.u[i];
            c.theta[j] = s.theta[i];
            c.w.set(j, s.w.at(i));
            c.b.set(j, s.b.at(i));
        }
        out.snapshots.push_back(std::move(c));
    }
    return out;
}

template <typename Fn>
inline void parallel_for(std::size_t count, int jobs, Fn&& body)
{
    int workers = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1)
        workers = 1;
    workers = std::min<int>(workers, static_cast<int>(count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int wkr = 0; wkr < workers; ++wkr) {
        pool.emplace_back([&, wkr] {
            try {
                for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
                    body(i);
            } catch (...) {
                errors[static_cast<std::size_t>(wkr)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool)
        th.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace detail

/// Solve the baseline and every mu-case (cases in parallel), compute the
/// composite norm E(mu) against the baseline at snapshot cadence, fit the
/// log-log rate, and profile the boundary layer.
inline SweepResult run_sweep(const SweepPlan& plan, const SolverControls& controls)
{
    if (!plan.include_limit)
        throw ValidationError("run_sweep: plan must include the mu = 0 baseline");
    if (plan.mu_values.empty())
        throw ValidationError("run_sweep: no mu values");
    for (double mu : plan.mu_values)
        if (!(mu > 0.0))
            throw ValidationError("run_sweep: mu values must be strictly positive");
    for (std::size_t i = 0; i < plan.mu_values.size(); ++i)
        for (std::size_t j = i + 1; j < plan.mu_values.size(); ++j)
            if (plan.mu_values[i] == plan.mu_values[j])
                throw ValidationError("run_sweep: mu values must be distinct");

    std::vector<double> mus = plan.mu_values;
    std::sort(mus.begin(), mus.end());

    const ConductivityLaw law = make_law(plan.params);
    SweepResult result;

    PhysParams base_params = plan.params;
    base_params.mu = 0.0;
    result.baseline = solve(plan.init, base_params, plan.bdry, law, controls, plan.mesh);

    const std::size_t k = mus.size();
    result.case_records.resize(k);
    result.rate.points.resize(k);
    std::vector<std::string> failures(k);

    detail::parallel_for(k, plan.jobs, [&](std::size_t i) {
        PhysParams p = plan.params;
        p.mu = mus[i];
        try {
            result.case_records[i] = solve(plan.init, p, plan.bdry, law, controls, plan.mesh);
        } catch (const SolverFailure& f) {
            failures[i] = f.what();
        }
    });

    result.bl.exponent = plan.bl_exponent;
    std::vector<std::pair<double, double>> pairs;
    bool any_zero_e = false;
    for (std::size_t i = 0; i < k; ++i) {
        RatePoint& pt = result.rate.points[i];
        pt.mu = mus[i];
        if (!failures[i].empty()) {
            pt.failed = true;
            pt.fail_reason = failures[i];
            result.bl.rows.push_back({mus[i], std::pow(mus[i], plan.bl_exponent), 0, 0, 0, true});
            continue;
        }
        const DiffNorms d = record_diff_norms(result.case_records[i], result.baseline);
        pt.E = d.composite();
        pt.E_rho = d.linf_rho;
        pt.E_u = d.linf_u + std::sqrt(d.l2qt_u);
        pt.E_w = d.linf_w;
        pt.E_b = d.linf_b + std::sqrt(d.l2qt_b);
        pt.E_theta = d.linf_theta + std::sqrt(d.l2qt_theta);
        if (pt.E > 0.0)
            pairs.emplace_back(pt.mu, pt.E);
        else
            any_zero_e = true;
        result.bl.rows.push_back(bl_profile(result.case_records[i], result.baseline, plan.bl_exponent));
    }

    if (any_zero_e) {
        result.rate.fit_ok = false;
        result.rate.fit_note = "degenerate data: E(mu) = 0 for some case (identical to baseline)";
    } else if (pairs.size() < 3) {
        result.rate.fit_ok = false;
        result.rate.fit_note = "fit requires >= 3 surviving cases, have " + std::to_string(pairs.size());
    } else {
        result.rate.fit = rate_fit(pairs);
        result.rate.fit_ok = true;
    }

    if (plan.grid_check && plan.mesh.n_cells % 2 == 0 && plan.mesh.n_cells >= 8) {
        const Mesh coarse = Mesh::uniform(plan.mesh.n_cells / 2);
        InitialData cinit;
        {
            const std::size_t n = coarse.n_nodes();
            cinit.rho0.resize(n);
            cinit.u0.resize(n);
            cinit.theta0.resize(n);
            cinit.w0 = Vec2Field(n);
            cinit.b0 = Vec2Field(n);
            for (std::size_t j = 0; j < n; ++j) {
                const std::size_t i = 2 * j;
                cinit.rho0[j] = plan.init.rho0[i];
                cinit.u0[j] = plan.init.u0[i];
                cinit.theta0[j] = plan.init.theta0[i];
                cinit.w0.set(j, plan.init.w0.at(i));
                cinit.b0.set(j, plan.init.b0.at(i));
            }
        }
        const RunRecord coarse_base = solve(cinit, base_params, plan.bdry, law, controls, coarse);
        const RunRecord fine_on_coarse = detail::restrict_to_coarse(result.baseline, coarse);
        result.grid_check_e = record_diff_norms(fine_on_coarse, coarse_base).composite();
        double min_e = std::numeric_limits<double>::infinity();
        for (const auto& pt : result.rate.points)
            if (!pt.failed && pt.E > 0.0)
                min_e = std::min(min_e, pt.E);
        result.grid_check_threshold = 0.1 * min_e;
        result.grid_check_ok = result.grid_check_e <= result.grid_check_threshold;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Manufactured-solution verification
// ---------------------------------------------------------------------------

struct MmsResolutionErrors {
    int n_cells = 0;
    double h = 0.0;
    double err_rho = 0.0, err_u = 0.0, err_w = 0.0, err_b = 0.0, err_theta = 0.0;
    double err_comp = 0.0;
};

struct MmsReport {
    std::string case_name;
    std::string gated_field;
    std::vector<MmsResolutionErrors> errors;
    double order_rho = 0.0, order_u = 0.0, order_w = 0.0, order_b = 0.0, order_theta = 0.0;
    double order_comp = 0.0;
    double gated_order = 0.0;
    bool exact = false;    // all composite errors at round-off
    bool monotone = true;  // composite error strictly decreasing with h
};

namespace detail {

inline double field_order(const std::vector<MmsResolutionErrors>& errs,
                          double MmsResolutionErrors::*member)
{
    std::vector<std::pair<double, double>> pairs;
    for (const auto& e : errs) {
        const double v = e.*member;
        if (v > 1e-13)
            pairs.emplace_back(e.h, v);
    }
    if (pairs.size() != errs.size())
        return std::numeric_limits<double>::quiet_NaN(); // inactive or exact field
    return rate_fit(pairs).slope;
}

} // namespace detail

/// Run one manufactured case at every resolution with dt proportional to
/// h^2 and report per-field L2 errors at t_end plus log-log fitted orders.
inline MmsReport mms_verify(const mms::MmsCase& mcase, const std::vector<int>& resolutions,
                            double dt_factor = 2.0)
{
    if (resolutions.size() < 3)
        throw ValidationError("mms_verify: need at least 3 resolutions");
    for (std::size_t i = 1; i < resolutions.size(); ++i)
        if (resolutions[i] <= resolutions[i - 1])
            throw ValidationError("mms_verify: resolutions must be strictly increasing");

    MmsReport report;
    report.case_name = mcase.name;
    report.gated_field = mcase.gated_field;

    const SourceTerms src = mcase.sources();
    const BoundaryData bdry = mcase.boundary_data();
    const ConductivityLaw law = make_law(mcase.params);

    for (int n : resolutions) {
        const Mesh mesh = Mesh::uniform(n);
        SolverControls controls;
        controls.cfl = 0.4;
        controls.t_end = mcase.t_end;
        controls.snapshot_every = mcase.t_end;
        controls.dt_max = dt_factor * mesh.h * mesh.h;
        const RunRecord rec = solve(mcase.initial_data(mesh), mcase.params, bdry, law,
                                    controls, mesh, &src);
        const State& got = rec.snapshots.back();
        const State ref = mcase.exact_state(mesh, mcase.t_end);

        MmsResolutionErrors e;
        e.n_cells = n;
        e.h = mesh.h;
        e.err_rho = l2_norm(field_difference(got.rho, ref.rho), mesh);
        e.err_u = l2_norm(field_difference(got.u, ref.u), mesh);
        e.err_w = std::sqrt(l2_norm_sq(field_difference(got.w.c1, ref.w.c1), mesh)
                          + l2_norm_sq(field_difference(got.w.c2, ref.w.c2), mesh));
        e.err_b = std::sqrt(l2_norm_sq(field_difference(got.b.c1, ref.b.c1), mesh)
                          + l2_norm_sq(field_difference(got.b.c2, ref.b.c2), mesh));
        e.err_theta = l2_norm(field_difference(got.theta, ref.theta), mesh);
        e.err_comp = std::sqrt(e.err_rho * e.err_rho + e.err_u * e.err_u + e.err_w * e.err_w
                             + e.err_b * e.err_b + e.err_theta * e.err_theta);
        report.errors.push_back(e);
    }

    double max_comp = 0.0;
    for (const auto& e : report.errors)
        max_comp = std::max(max_comp, e.err_comp);
    report.exact = max_comp < 1e-12;

    for (std::size_t i = 1; i < report.errors.size(); ++i)
        if (!(report.errors[i].err_comp < report.errors[i - 1].err_comp))
            report.monotone = false;
    if (report.exact)
        report.monotone = true; // round-off noise carries no order signal

    if (!report.exact) {
        report.order_rho = detail::field_order(report.errors, &MmsResolutionErrors::err_rho);
        report.order_u = detail::field_order(report.errors, &MmsResolutionErrors::err_u);
        report.order_w = detail::field_order(report.errors, &MmsResolutionErrors::err_w);
        report.order_b = detail::field_order(report.errors, &MmsResolutionErrors::err_b);
        report.order_theta = detail::field_order(report.errors, &MmsResolutionErrors::err_theta);
        report.order_comp = detail::field_order(report.errors, &MmsResolutionErrors::err_comp);
        if (report.gated_field == "rho") report.gated_order = report.order_rho;
        else if (report.gated_field == "u") report.gated_order = report.order_u;
        else if (report.gated_field == "w") report.gated_order = report.order_w;
        else if (report.gated_field == "b") report.gated_order = report.order_b;
        else if (report.gated_field == "theta") report.gated_order = report.order_theta;
        else report.gated_order = report.order_comp;
    }
    return report;
}

} // namespace mhd1d
