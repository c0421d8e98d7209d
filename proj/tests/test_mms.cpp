#include <doctest.h>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "mhd1d/experiments.hpp"
#include "mhd1d/mms.hpp"

using namespace mhd1d;
using mhd1d::mms::MmsCase;

namespace {

// Finite differences of field VALUES only. The manufactured profiles are
// entire functions, so sampling outside [0,1] is fine.
constexpr double kFd = 1e-4;

using Field2 = std::function<double(double, double)>;

double fd_x(const Field2& f, double x, double t)
{
    return (f(x + kFd, t) - f(x - kFd, t)) / (2.0 * kFd);
}

double fd_xx(const Field2& f, double x, double t)
{
    return (f(x + kFd, t) - 2.0 * f(x, t) + f(x - kFd, t)) / (kFd * kFd);
}

double fd_t(const Field2& f, double x, double t)
{
    return (f(x, t + kFd) - f(x, t - kFd)) / (2.0 * kFd);
}

// Conservative-form residuals of the full system, assembled from FD
// derivatives: an independent route to the same source terms the cases
// carry in primitive form.
struct ConservativeResiduals {
    const MmsCase& c;

    double rho(double x, double t) const { return c.rho.val(x, t); }
    double u(double x, double t) const { return c.u.val(x, t); }
    double w1(double x, double t) const { return c.w1.val(x, t); }
    double w2(double x, double t) const { return c.w2.val(x, t); }
    double b1(double x, double t) const { return c.b1.val(x, t); }
    double b2(double x, double t) const { return c.b2.val(x, t); }
    double theta(double x, double t) const { return c.theta.val(x, t); }

    double r_rho(double x, double t) const
    {
        const Field2 m = [&](double xx, double tt) { return rho(xx, tt) * u(xx, tt); };
        const Field2 r = [&](double xx, double tt) { return rho(xx, tt); };
        return fd_t(r, x, t) + fd_x(m, x, t);
    }

    double r_u(double x, double t) const
    {
        const Field2 mom = [&](double xx, double tt) { return rho(xx, tt) * u(xx, tt); };
        const Field2 flux = [&](double xx, double tt) {
            const double b2n = b1(xx, tt) * b1(xx, tt) + b2(xx, tt) * b2(xx, tt);
            return rho(xx, tt) * u(xx, tt) * u(xx, tt)
                 + c.params.gamma * rho(xx, tt) * theta(xx, tt) + 0.5 * b2n;
        };
        const Field2 uu = [&](double xx, double tt) { return u(xx, tt); };
        return fd_t(mom, x, t) + fd_x(flux, x, t) - c.params.lambda * fd_xx(uu, x, t);
    }

    double r_w(double x, double t, int comp) const
    {
        const Field2 wc = comp == 0 ? Field2([&](double xx, double tt) { return w1(xx, tt); })
                                    : Field2([&](double xx, double tt) { return w2(xx, tt); });
        const Field2 bc = comp == 0 ? Field2([&](double xx, double tt) { return b1(xx, tt); })
                                    : Field2([&](double xx, double tt) { return b2(xx, tt); });
        const Field2 mom = [&](double xx, double tt) { return rho(xx, tt) * wc(xx, tt); };
        const Field2 flux = [&](double xx, double tt) {
            return rho(xx, tt) * u(xx, tt) * wc(xx, tt) - bc(xx, tt);
        };
        return fd_t(mom, x, t) + fd_x(flux, x, t) - c.params.mu * fd_xx(wc, x, t);
    }

    double r_b(double x, double t, int comp) const
    {
        const Field2 wc = comp == 0 ? Field2([&](double xx, double tt) { return w1(xx, tt); })
                                    : Field2([&](double xx, double tt) { return w2(xx, tt); });
        const Field2 bc = comp == 0 ? Field2([&](double xx, double tt) { return b1(xx, tt); })
                                    : Field2([&](double xx, double tt) { return b2(xx, tt); });
        const Field2 flux = [&](double xx, double tt) {
            return u(xx, tt) * bc(xx, tt) - wc(xx, tt);
        };
        return fd_t(bc, x, t) + fd_x(flux, x, t) - c.params.nu * fd_xx(bc, x, t);
    }

    double r_theta(double x, double t) const
    {
        const Field2 e = [&](double xx, double tt) { return rho(xx, tt) * theta(xx, tt); };
        const Field2 conv = [&](double xx, double tt) {
            return rho(xx, tt) * u(xx, tt) * theta(xx, tt);
        };
        const Field2 th = [&](double xx, double tt) { return theta(xx, tt); };
        const Field2 uu = [&](double xx, double tt) { return u(xx, tt); };
        const Field2 w1f = [&](double xx, double tt) { return w1(xx, tt); };
        const Field2 w2f = [&](double xx, double tt) { return w2(xx, tt); };
        const Field2 b1f = [&](double xx, double tt) { return b1(xx, tt); };
        const Field2 b2f = [&](double xx, double tt) { return b2(xx, tt); };

        const double thv = theta(x, t);
        const double thx = fd_x(th, x, t);
        const double thxx = fd_xx(th, x, t);
        const double eps = 1e-5;
        const double kp = (c.kappa(thv + eps) - c.kappa(thv - eps)) / (2.0 * eps);
        const double conduction = kp * thx * thx + c.kappa(thv) * thxx;

        const double ux = fd_x(uu, x, t);
        const double w1x = fd_x(w1f, x, t), w2x = fd_x(w2f, x, t);
        const double b1x = fd_x(b1f, x, t), b2x = fd_x(b2f, x, t);
        const double diss = c.params.lambda * ux * ux + c.params.mu * (w1x * w1x + w2x * w2x)
                          + c.params.nu * (b1x * b1x + b2x * b2x);
        return fd_t(e, x, t) + fd_x(conv, x, t) - conduction
             + c.params.gamma * rho(x, t) * thv * ux - diss;
    }
};

void check_case_sources(const std::string& name)
{
    const MmsCase c = mms::mms_case(name);
    const ConservativeResiduals res{c};
    const std::vector<double> xs = {0.07, 0.23, 0.41, 0.5, 0.58, 0.79, 0.95};
    const std::vector<double> ts = {0.03, 0.11, 0.2};

    auto tol = [](double expected) { return 1e-5 * (1.0 + std::abs(expected)); };

    for (double t : ts) {
        for (double x : xs) {
            const double rho = c.rho.val(x, t);
            const double f_rho = c.source_rho(x, t);
            // primitive sources mapped to conservative ones:
            //   g_rho = f_rho, g_u = rho f_u + u f_rho, g_w = rho f_w + w f_rho,
            //   g_b = f_b, g_theta = rho f_theta + theta f_rho
            CHECK(std::abs(res.r_rho(x, t) - f_rho) <= tol(f_rho));

            const double g_u = rho * c.source_u(x, t) + c.u.val(x, t) * f_rho;
            CHECK(std::abs(res.r_u(x, t) - g_u) <= tol(g_u));

            const vec2 f_w = c.source_w(x, t);
            const double g_w1 = rho * f_w[0] + c.w1.val(x, t) * f_rho;
            const double g_w2 = rho * f_w[1] + c.w2.val(x, t) * f_rho;
            CHECK(std::abs(res.r_w(x, t, 0) - g_w1) <= tol(g_w1));
            CHECK(std::abs(res.r_w(x, t, 1) - g_w2) <= tol(g_w2));

            const vec2 f_b = c.source_b(x, t);
            CHECK(std::abs(res.r_b(x, t, 0) - f_b[0]) <= tol(f_b[0]));
            CHECK(std::abs(res.r_b(x, t, 1) - f_b[1]) <= tol(f_b[1]));

            const double g_th = rho * c.source_theta(x, t) + c.theta.val(x, t) * f_rho;
            CHECK(std::abs(res.r_theta(x, t) - g_th) <= tol(g_th));
        }
    }
}

} // namespace

TEST_CASE("manufactured sources match finite-difference conservative residuals")
{
    for (const std::string& name : mms::mms_case_names())
        check_case_sources(name);
}

TEST_CASE("manufactured cases satisfy the boundary contract")
{
    for (const std::string& name : mms::mms_case_names()) {
        const MmsCase c = mms::mms_case(name);
        // u and b vanish at the walls at all times; w wall values are constant
        for (double t : {0.0, 0.1, 0.25}) {
            CHECK(std::abs(c.u.val(0.0, t)) < 1e-14);
            CHECK(std::abs(c.u.val(1.0, t)) < 1e-13);
            CHECK(std::abs(c.b1.val(0.0, t)) < 1e-14);
            CHECK(std::abs(c.b2.val(1.0, t)) < 1e-13);
            CHECK(c.w1.val(0.0, t) == doctest::Approx(c.w1.val(0.0, 0.0)).epsilon(1e-13));
        }
        // initial data passes make_state with the case's boundary data
        const Mesh mesh = Mesh::uniform(16);
        CHECK_NOTHROW(make_state(mesh, c.initial_data(mesh), c.boundary_data()));
    }
}

TEST_CASE("mms_verify: constant state reproduces exactly")
{
    const MmsCase c = mms::mms_case("rest");
    const MmsReport rep = mms_verify(c, {8, 16, 32}, 2.0);
    CHECK(rep.exact);
    for (const auto& e : rep.errors)
        CHECK(e.err_comp < 1e-12);
}

TEST_CASE("mms_verify: transverse diffusion shows second-order decay on small grids")
{
    const MmsCase c = mms::mms_case("transverse");
    const MmsReport rep = mms_verify(c, {32, 64, 128}, 2.0);
    CHECK(!rep.exact);
    CHECK(rep.monotone);
    CHECK(rep.order_w > 1.5);
}

TEST_CASE("mms_verify validates its resolution list")
{
    const MmsCase c = mms::mms_case("rest");
    CHECK_THROWS_AS(mms_verify(c, {16, 32}, 2.0), ValidationError);
    CHECK_THROWS_AS(mms_verify(c, {32, 16, 64}, 2.0), ValidationError);
}
