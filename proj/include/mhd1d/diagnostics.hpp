#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mhd1d/constitutive.hpp"
#include "mhd1d/core.hpp"
#include "mhd1d/errors.hpp"

namespace mhd1d {

/// Trapezoid quadrature over [0,1] of nodal values.
inline double trapezoid(const ScalarField& f, const Mesh& mesh)
{
    const std::size_t n = f.size();
    double s = 0.5 * (f[0] + f[n - 1]);
    for (std::size_t i = 1; i + 1 < n; ++i)
        s += f[i];
    return s * mesh.h;
}

/// Nodal gradient: centered in the interior, second-order one-sided at the
/// walls. The solver's dissipation terms use this same operator so the
/// entropy identity is internally consistent.
inline ScalarField gradient(const ScalarField& f, const Mesh& mesh)
{
    const std::size_t n = f.size();
    const double h = mesh.h;
    ScalarField g(n);
    g[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i)
        g[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    g[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return g;
}

inline double l2_norm_sq(const ScalarField& f, const Mesh& mesh)
{
    ScalarField sq(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        sq[i] = f[i] * f[i];
    return trapezoid(sq, mesh);
}

inline double l2_norm(const ScalarField& f, const Mesh& mesh)
{
    return std::sqrt(l2_norm_sq(f, mesh));
}

/// integral of rho over Omega (trapezoid).
inline double total_mass(const State& s, const Mesh& mesh)
{
    return trapezoid(s.rho, mesh);
}

/// integral of the total energy density over Omega (trapezoid).
inline double total_energy(const State& s, const Mesh& mesh)
{
    ScalarField e(s.rho.size());
    for (std::size_t i = 0; i < e.size(); ++i)
        e[i] = total_energy_density(s.rho[i], s.u[i], s.w.at(i), s.b.at(i), s.theta[i]);
    return trapezoid(e, mesh);
}

/// integral of (lambda*u_x^2 + mu*|w_x|^2 + nu*|b_x|^2)/theta
///           + kappa*theta_x^2/theta^2, nonnegative by construction.
inline double entropy_production(const State& s, const Mesh& mesh, const PhysParams& params,
                                 const ConductivityLaw& law)
{
    const ScalarField ux = gradient(s.u, mesh);
    const ScalarField w1x = gradient(s.w.c1, mesh);
    const ScalarField w2x = gradient(s.w.c2, mesh);
    const ScalarField b1x = gradient(s.b.c1, mesh);
    const ScalarField b2x = gradient(s.b.c2, mesh);
    const ScalarField thx = gradient(s.theta, mesh);
    ScalarField integrand(s.rho.size());
    for (std::size_t i = 0; i < integrand.size(); ++i) {
        const double th = s.theta[i];
        const double visc = params.lambda * ux[i] * ux[i]
                          + params.mu * (w1x[i] * w1x[i] + w2x[i] * w2x[i])
                          + params.nu * (b1x[i] * b1x[i] + b2x[i] * b2x[i]);
        const double kap = conductivity(law, s.rho[i], th);
        integrand[i] = visc / th + kap * thx[i] * thx[i] / (th * th);
    }
    return trapezoid(integrand, mesh);
}

/// || omega^p d_x field ||_{L^2(Omega)} for p in {1/2, 1}.
inline double weighted_grad_norm(const ScalarField& f, const Mesh& mesh, double weight_power)
{
    if (weight_power != 0.5 && weight_power != 1.0)
        throw std::domain_error("weighted_grad_norm: weight_power must be 1/2 or 1");
    const ScalarField g = gradient(f, mesh);
    ScalarField sq(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double w = std::pow(weight_omega(mesh.nodes[i]), 2.0 * weight_power);
        sq[i] = w * g[i] * g[i];
    }
    return std::sqrt(trapezoid(sq, mesh));
}

inline double weighted_grad_norm(const Vec2Field& f, const Mesh& mesh, double weight_power)
{
    const double a = weighted_grad_norm(f.c1, mesh, weight_power);
    const double b = weighted_grad_norm(f.c2, mesh, weight_power);
    return std::sqrt(a * a + b * b);
}

/// Running accumulator for the composite difference norm:
///   linf_l2   : sup over time of ||(rho~,u~,w~,b~,theta~)||_{L^2(Omega)}
///   l2qt_grads: accumulated ||(u~_x, b~_x, theta~_x)||^2_{L^2(Q_T)}
/// with per-field breakdowns.
struct DiffNorms {
    double linf_l2 = 0.0;
    double l2qt_grads = 0.0;
    // per-field sup-in-time L2 norms
    double linf_rho = 0.0, linf_u = 0.0, linf_w = 0.0, linf_b = 0.0, linf_theta = 0.0;
    // per-field accumulated squared L2(Q_T) gradient differences
    double l2qt_u = 0.0, l2qt_b = 0.0, l2qt_theta = 0.0;

    /// Composite rate norm: sup-in-time L2 difference plus the space-time
    /// gradient contribution.
    double composite() const { return linf_l2 + std::sqrt(l2qt_grads); }
};

inline ScalarField field_difference(const ScalarField& a, const ScalarField& b)
{
    ScalarField d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        d[i] = a[i] - b[i];
    return d;
}

/// Fold one aligned snapshot pair into the accumulator. dt is the
/// rectangle-rule weight this sample carries in the time integrals
/// (0 for the initial snapshot).
inline DiffNorms diff_norms_update(DiffNorms acc, const State& s, const State& s_bar,
                                   const Mesh& mesh, double dt)
{
    if (s.rho.size() != s_bar.rho.size() || s.rho.size() != mesh.n_nodes())
        throw AlignmentError("diff_norms_update: states on different meshes");
    if (s.t != s_bar.t)
        throw AlignmentError("diff_norms_update: states at different times");

    const ScalarField d_rho = field_difference(s.rho, s_bar.rho);
    const ScalarField d_u = field_difference(s.u, s_bar.u);
    const ScalarField d_w1 = field_difference(s.w.c1, s_bar.w.c1);
    const ScalarField d_w2 = field_difference(s.w.c2, s_bar.w.c2);
    const ScalarField d_b1 = field_difference(s.b.c1, s_bar.b.c1);
    const ScalarField d_b2 = field_difference(s.b.c2, s_bar.b.c2);
    const ScalarField d_th = field_difference(s.theta, s_bar.theta);

    const double sq_rho = l2_norm_sq(d_rho, mesh);
    const double sq_u = l2_norm_sq(d_u, mesh);
    const double sq_w = l2_norm_sq(d_w1, mesh) + l2_norm_sq(d_w2, mesh);
    const double sq_b = l2_norm_sq(d_b1, mesh) + l2_norm_sq(d_b2, mesh);
    const double sq_th = l2_norm_sq(d_th, mesh);

    acc.linf_l2 = std::max(acc.linf_l2, std::sqrt(sq_rho + sq_u + sq_w + sq_b + sq_th));
    acc.linf_rho = std::max(acc.linf_rho, std::sqrt(sq_rho));
    acc.linf_u = std::max(acc.linf_u, std::sqrt(sq_u));
    acc.linf_w = std::max(acc.linf_w, std::sqrt(sq_w));
    acc.linf_b = std::max(acc.linf_b, std::sqrt(sq_b));
    acc.linf_theta = std::max(acc.linf_theta, std::sqrt(sq_th));

    const double g_u = l2_norm_sq(gradient(d_u, mesh), mesh);
    const double g_b = l2_norm_sq(gradient(d_b1, mesh), mesh) + l2_norm_sq(gradient(d_b2, mesh), mesh);
    const double g_th = l2_norm_sq(gradient(d_th, mesh), mesh);
    acc.l2qt_u += dt * g_u;
    acc.l2qt_b += dt * g_b;
    acc.l2qt_theta += dt * g_th;
    acc.l2qt_grads += dt * (g_u + g_b + g_th);
    return acc;
}

/// sup of |diff| over nodes with delta <= x <= 1 - delta.
inline double interior_sup(const ScalarField& diff, const Mesh& mesh, double delta)
{
    if (!(delta >= 0.0 && delta < 0.5))
        throw std::domain_error("interior_sup: delta must lie in [0, 1/2)");
    double m = 0.0;
    for (std::size_t i = 0; i < diff.size(); ++i) {
        const double x = mesh.nodes[i];
        if (x >= delta && x <= 1.0 - delta)
            m = std::max(m, std::abs(diff[i]));
    }
    return m;
}

inline double interior_sup(const Vec2Field& diff, const Mesh& mesh, double delta)
{
    if (!(delta >= 0.0 && delta < 0.5))
        throw std::domain_error("interior_sup: delta must lie in [0, 1/2)");
    double m = 0.0;
    for (std::size_t i = 0; i < diff.size(); ++i) {
        const double x = mesh.nodes[i];
        if (x >= delta && x <= 1.0 - delta)
            m = std::max(m, std::sqrt(norm2(diff.at(i))));
    }
    return m;
}

} // namespace mhd1d
