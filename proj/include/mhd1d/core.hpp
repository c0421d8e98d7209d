#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mhd1d/errors.hpp"
#include "mhd1d/tridiagonal.hpp"

namespace mhd1d {

using ScalarField = std::vector<double>;
using vec2 = std::array<double, 2>;

inline double dot(const vec2& a, const vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm2(const vec2& a) { return dot(a, a); }

/// Two-component field (transverse velocity / magnetic field), one pair
/// of values per mesh node.
struct Vec2Field {
    ScalarField c1;
    ScalarField c2;

    Vec2Field() = default;
    explicit Vec2Field(std::size_t n, vec2 fill = {0.0, 0.0})
        : c1(n, fill[0]), c2(n, fill[1]) {}

    std::size_t size() const { return c1.size(); }
    vec2 at(std::size_t i) const { return {c1[i], c2[i]}; }
    void set(std::size_t i, vec2 v) { c1[i] = v[0]; c2[i] = v[1]; }

    bool operator==(const Vec2Field&) const = default;
};

/// Uniform node grid on [0,1]: nodes x_i = i*h, i = 0..n_cells.
struct Mesh {
    int n_cells = 0;
    double h = 0.0;
    std::vector<double> nodes;

    static Mesh uniform(int n_cells)
    {
        if (n_cells < 2)
            throw ValidationError("Mesh: n_cells must be >= 2, got " + std::to_string(n_cells));
        Mesh m;
        m.n_cells = n_cells;
        m.h = 1.0 / n_cells;
        m.nodes.resize(static_cast<std::size_t>(n_cells) + 1);
        for (int i = 0; i <= n_cells; ++i)
            m.nodes[static_cast<std::size_t>(i)] = i * m.h;
        m.nodes.front() = 0.0;
        m.nodes.back() = 1.0;
        return m;
    }

    std::size_t n_nodes() const { return nodes.size(); }
    bool operator==(const Mesh&) const = default;
};

/// Boundary weight: omega(x) = x on [0,1/2], 1-x on [1/2,1].
inline double weight_omega(double x)
{
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("weight_omega: x outside [0,1]");
    return std::min(x, 1.0 - x);
}

/// Physical coefficients of the system. c_v is fixed to 1 and not a field.
struct PhysParams {
    double lambda = 0.1;   // longitudinal viscosity, > 0
    double mu = 1e-3;      // shear viscosity, >= 0 (0 selects the limit system)
    double nu = 0.1;       // magnetic diffusivity, > 0
    double gamma = 5.0 / 3.0;
    double kappa1 = 0.1;   // conductivity floor coefficient, > 0
    double q = 2.0;        // conductivity exponent, > 0
    // Optional conductivity override; must dominate kappa1*theta^q wherever
    // it is evaluated (checked at every call, see constitutive module).
    std::function<double(double, double)> conductivity_override;

    void validate() const
    {
        auto bad = [](const std::string& name, double v) {
            throw ValidationError("PhysParams: " + name + " = " + std::to_string(v) + " out of range");
        };
        if (!(lambda > 0.0)) bad("lambda", lambda);
        if (!(mu >= 0.0)) bad("mu", mu);
        if (!(nu > 0.0)) bad("nu", nu);
        if (!(gamma > 0.0)) bad("gamma", gamma);
        if (!(kappa1 > 0.0)) bad("kappa1", kappa1);
        if (!(q > 0.0)) bad("q", q);
    }
};

namespace detail {

/// Natural cubic spline through (t_k, y_k), C^2 on the knot range,
/// extended linearly (C^1) outside it.
struct CubicSpline {
    std::vector<double> t, y, m; // m: second derivatives at knots

    static CubicSpline fit(std::vector<double> ts, std::vector<double> ys)
    {
        if (ts.size() != ys.size() || ts.size() < 2)
            throw ValidationError("CubicSpline: need >= 2 knots with matching values");
        for (std::size_t i = 1; i < ts.size(); ++i)
            if (!(ts[i] > ts[i - 1]))
                throw ValidationError("CubicSpline: knot times must be strictly increasing");
        const std::size_t n = ts.size();
        CubicSpline s;
        s.t = std::move(ts);
        s.y = std::move(ys);
        s.m.assign(n, 0.0);
        if (n > 2) {
            const std::size_t k = n - 2; // interior knots
            std::vector<double> lo(k, 0.0), di(k, 0.0), up(k, 0.0), rhs(k, 0.0);
            for (std::size_t i = 0; i < k; ++i) {
                const double h0 = s.t[i + 1] - s.t[i];
                const double h1 = s.t[i + 2] - s.t[i + 1];
                if (i > 0) lo[i] = h0;
                di[i] = 2.0 * (h0 + h1);
                if (i + 1 < k) up[i] = h1;
                rhs[i] = 6.0 * ((s.y[i + 2] - s.y[i + 1]) / h1 - (s.y[i + 1] - s.y[i]) / h0);
            }
            auto sol = tridiag_solve(lo, di, up, rhs);
            for (std::size_t i = 0; i < k; ++i)
                s.m[i + 1] = sol[i];
        }
        return s;
    }

    double eval(double x) const
    {
        const std::size_t n = t.size();
        if (x <= t.front()) return y.front() + deriv_at_knot(0) * (x - t.front());
        if (x >= t.back()) return y.back() + deriv_at_knot(n - 1) * (x - t.back());
        std::size_t i = 1;
        while (t[i] < x) ++i;
        const std::size_t j = i - 1;
        const double h = t[i] - t[j];
        const double a = (t[i] - x) / h, b = (x - t[j]) / h;
        return a * y[j] + b * y[i]
             + ((a * a * a - a) * m[j] + (b * b * b - b) * m[i]) * h * h / 6.0;
    }

    double deriv_at_knot(std::size_t i) const
    {
        const std::size_t n = t.size();
        if (i == 0) {
            const double h = t[1] - t[0];
            return (y[1] - y[0]) / h - h * (2.0 * m[0] + m[1]) / 6.0;
        }
        const double h = t[n - 1] - t[n - 2];
        return (y[n - 1] - y[n - 2]) / h + h * (m[n - 2] + 2.0 * m[n - 1]) / 6.0;
    }
};

} // namespace detail

/// Time-dependent transverse-velocity wall values w^-(t), w^+(t).
/// Representations are C^1 by construction: constants, sinusoids, or
/// natural cubic spline tables.
struct BoundaryData {
    enum class Kind { constant, sinusoid, cubic_table };

    Kind kind = Kind::constant;
    vec2 base_minus{0.0, 0.0}, base_plus{0.0, 0.0};
    vec2 amp_minus{0.0, 0.0}, amp_plus{0.0, 0.0};
    double freq = 0.0; // sinusoid: base + amp*sin(2*pi*freq*t)
    std::array<detail::CubicSpline, 2> spline_minus, spline_plus;

    static BoundaryData constant(vec2 w_minus, vec2 w_plus)
    {
        BoundaryData b;
        b.kind = Kind::constant;
        b.base_minus = w_minus;
        b.base_plus = w_plus;
        return b;
    }

    static BoundaryData sinusoid(vec2 base_minus, vec2 amp_minus,
                                 vec2 base_plus, vec2 amp_plus, double freq)
    {
        BoundaryData b;
        b.kind = Kind::sinusoid;
        b.base_minus = base_minus;
        b.amp_minus = amp_minus;
        b.base_plus = base_plus;
        b.amp_plus = amp_plus;
        b.freq = freq;
        return b;
    }

    static BoundaryData cubic_table(const std::vector<double>& times,
                                    const std::vector<vec2>& w_minus,
                                    const std::vector<vec2>& w_plus)
    {
        if (times.size() != w_minus.size() || times.size() != w_plus.size())
            throw ValidationError("BoundaryData: table sizes mismatch");
        BoundaryData b;
        b.kind = Kind::cubic_table;
        std::vector<double> m1, m2, p1, p2;
        for (std::size_t i = 0; i < times.size(); ++i) {
            m1.push_back(w_minus[i][0]);
            m2.push_back(w_minus[i][1]);
            p1.push_back(w_plus[i][0]);
            p2.push_back(w_plus[i][1]);
        }
        b.spline_minus = {detail::CubicSpline::fit(times, m1), detail::CubicSpline::fit(times, m2)};
        b.spline_plus = {detail::CubicSpline::fit(times, p1), detail::CubicSpline::fit(times, p2)};
        return b;
    }

    vec2 w_minus(double t) const { return eval(base_minus, amp_minus, spline_minus, t); }
    vec2 w_plus(double t) const { return eval(base_plus, amp_plus, spline_plus, t); }

private:
    vec2 eval(const vec2& base, const vec2& amp,
              const std::array<detail::CubicSpline, 2>& sp, double t) const
    {
        switch (kind) {
        case Kind::constant: return base;
        case Kind::sinusoid: {
            const double s = std::sin(2.0 * M_PI * freq * t);
            return {base[0] + amp[0] * s, base[1] + amp[1] * s};
        }
        case Kind::cubic_table: return {sp[0].eval(t), sp[1].eval(t)};
        }
        return base;
    }
};

/// The five unknowns sampled at the mesh nodes at one time instant.
struct State {
    double t = 0.0;
    ScalarField rho;
    ScalarField u;
    Vec2Field w;
    Vec2Field b;
    ScalarField theta;

    bool operator==(const State&) const = default;
};

struct InitialData {
    ScalarField rho0, u0, theta0;
    Vec2Field w0, b0;
};

/// One invariant violation: which field, where, and the offending value.
struct Violation {
    std::string field;
    std::size_t node = 0;
    double value = 0.0;
    std::string kind; // positivity | endpoint | nonfinite | size

    std::string describe() const
    {
        std::ostringstream os;
        os << kind << " violation: field=" << field << " node=" << node << " value=" << value;
        return os.str();
    }
};

namespace detail {

inline void check_sizes(const State& s, const Mesh& mesh, std::vector<Violation>& out)
{
    const std::size_t n = mesh.n_nodes();
    auto chk = [&](const char* name, std::size_t got) {
        if (got != n)
            out.push_back({name, got, static_cast<double>(n), "size"});
    };
    chk("rho", s.rho.size());
    chk("u", s.u.size());
    chk("w", s.w.size());
    chk("b", s.b.size());
    chk("theta", s.theta.size());
}

} // namespace detail

/// Invariant scan. Empty result iff the state is admissible: rho and theta
/// above the floor everywhere, u and b exactly zero at the walls, finite
/// values, and (for mu > 0) w pinned to the boundary data at time state.t.
/// Violations are data, not errors.
inline std::vector<Violation> validate_state(const State& s, const PhysParams& params,
                                             const BoundaryData& bdry, const Mesh& mesh,
                                             double pos_floor = 0.0)
{
    std::vector<Violation> out;
    detail::check_sizes(s, mesh, out);
    if (!out.empty())
        return out;

    const std::size_t n = mesh.n_nodes();
    for (std::size_t i = 0; i < n; ++i) {
        const double vals[] = {s.rho[i], s.u[i], s.w.c1[i], s.w.c2[i], s.b.c1[i], s.b.c2[i], s.theta[i]};
        const char* names[] = {"rho", "u", "w1", "w2", "b1", "b2", "theta"};
        for (int k = 0; k < 7; ++k)
            if (!std::isfinite(vals[k]))
                out.push_back({names[k], i, vals[k], "nonfinite"});
        if (!(s.rho[i] > pos_floor))
            out.push_back({"rho", i, s.rho[i], "positivity"});
        if (!(s.theta[i] > pos_floor))
            out.push_back({"theta", i, s.theta[i], "positivity"});
    }
    const std::size_t last = n - 1;
    if (s.u[0] != 0.0) out.push_back({"u", 0, s.u[0], "endpoint"});
    if (s.u[last] != 0.0) out.push_back({"u", last, s.u[last], "endpoint"});
    for (std::size_t i : {std::size_t{0}, last}) {
        if (s.b.c1[i] != 0.0 || s.b.c2[i] != 0.0)
            out.push_back({"b", i, std::sqrt(norm2(s.b.at(i))), "endpoint"});
    }
    if (params.mu > 0.0) {
        const vec2 wm = bdry.w_minus(s.t), wp = bdry.w_plus(s.t);
        if (s.w.c1[0] != wm[0] || s.w.c2[0] != wm[1])
            out.push_back({"w", 0, std::sqrt(norm2(s.w.at(0))), "endpoint"});
        if (s.w.c1[last] != wp[0] || s.w.c2[last] != wp[1])
            out.push_back({"w", last, std::sqrt(norm2(s.w.at(last))), "endpoint"});
    }
    return out;
}

/// Assemble the t = 0 state from initial data, enforcing the initial-data
/// invariants and corner compatibility. Throws ValidationError naming the
/// field and node on the first violation.
inline State make_state(const Mesh& mesh, const InitialData& data, const BoundaryData& bdry)
{
    const std::size_t n = mesh.n_nodes();
    auto size_ok = [&](const char* name, std::size_t got) {
        if (got != n)
            throw ValidationError(std::string("make_state: field ") + name + " has " +
                                  std::to_string(got) + " values, mesh has " + std::to_string(n) + " nodes");
    };
    size_ok("rho0", data.rho0.size());
    size_ok("u0", data.u0.size());
    size_ok("theta0", data.theta0.size());
    size_ok("w0", data.w0.size());
    size_ok("b0", data.b0.size());

    for (std::size_t i = 0; i < n; ++i) {
        if (!(data.rho0[i] > 0.0))
            throw ValidationError("make_state: positivity violation: field=rho0 node=" +
                                  std::to_string(i) + " value=" + std::to_string(data.rho0[i]));
        if (!(data.theta0[i] > 0.0))
            throw ValidationError("make_state: positivity violation: field=theta0 node=" +
                                  std::to_string(i) + " value=" + std::to_string(data.theta0[i]));
    }
    const std::size_t last = n - 1;
    auto endpoint_zero = [&](const char* name, double v, std::size_t node) {
        if (v != 0.0)
            throw ValidationError(std::string("make_state: endpoint violation: field=") + name +
                                  " node=" + std::to_string(node) + " value=" + std::to_string(v));
    };
    endpoint_zero("u0", data.u0[0], 0);
    endpoint_zero("u0", data.u0[last], last);
    endpoint_zero("b0", data.b0.c1[0], 0);
    endpoint_zero("b0", data.b0.c2[0], 0);
    endpoint_zero("b0", data.b0.c1[last], last);
    endpoint_zero("b0", data.b0.c2[last], last);

    const vec2 wm = bdry.w_minus(0.0), wp = bdry.w_plus(0.0);
    if (data.w0.c1[0] != wm[0] || data.w0.c2[0] != wm[1])
        throw ValidationError("make_state: corner compatibility violation: field=w0 node=0");
    if (data.w0.c1[last] != wp[0] || data.w0.c2[last] != wp[1])
        throw ValidationError("make_state: corner compatibility violation: field=w0 node=" +
                              std::to_string(last));

    State s;
    s.t = 0.0;
    s.rho = data.rho0;
    s.u = data.u0;
    s.w = data.w0;
    s.b = data.b0;
    s.theta = data.theta0;
    return s;
}

} // namespace mhd1d
