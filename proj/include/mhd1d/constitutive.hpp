#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "mhd1d/core.hpp"
#include "mhd1d/errors.hpp"

namespace mhd1d {

/// Heat conductivity law. power_law evaluates kappa1*theta^q exactly; a
/// custom law must dominate that floor at every sampled (rho,theta).
struct ConductivityLaw {
    enum class Kind { power_law, custom };
    Kind kind = Kind::power_law;
    double kappa1 = 1.0;
    double q = 1.0;
    std::function<double(double, double)> custom_eval;

    static ConductivityLaw power_law(double kappa1, double q)
    {
        ConductivityLaw law;
        law.kind = Kind::power_law;
        law.kappa1 = kappa1;
        law.q = q;
        return law;
    }

    static ConductivityLaw custom(double kappa1, double q, std::function<double(double, double)> f)
    {
        ConductivityLaw law;
        law.kind = Kind::custom;
        law.kappa1 = kappa1;
        law.q = q;
        law.custom_eval = std::move(f);
        return law;
    }
};

inline ConductivityLaw make_law(const PhysParams& params)
{
    if (params.conductivity_override)
        return ConductivityLaw::custom(params.kappa1, params.q, params.conductivity_override);
    return ConductivityLaw::power_law(params.kappa1, params.q);
}

/// p = gamma * rho * theta.
inline double pressure(double rho, double theta, double gamma)
{
    if (!(rho > 0.0) || !(theta > 0.0))
        throw std::domain_error("pressure: rho and theta must be positive");
    return gamma * rho * theta;
}

/// e = c_v * theta with c_v = 1.
inline double internal_energy(double theta)
{
    if (!(theta > 0.0))
        throw std::domain_error("internal_energy: theta must be positive");
    return theta;
}

/// Evaluate kappa(rho,theta). Custom laws are checked against the
/// kappa1*theta^q floor at every call; dipping below it raises
/// ConstitutiveViolation.
inline double conductivity(const ConductivityLaw& law, double rho, double theta)
{
    if (!(rho > 0.0) || !(theta > 0.0))
        throw std::domain_error("conductivity: rho and theta must be positive");
    const double floor = law.kappa1 * std::pow(theta, law.q);
    if (law.kind == ConductivityLaw::Kind::power_law)
        return floor;
    const double k = law.custom_eval(rho, theta);
    if (k < floor * (1.0 - 1e-12))
        throw ConstitutiveViolation("conductivity: custom law " + std::to_string(k) +
                                    " below floor " + std::to_string(floor));
    return k;
}

/// Total energy density: rho*[theta + (u^2+|w|^2)/2] + |b|^2/2.
inline double total_energy_density(double rho, double u, const vec2& w, const vec2& b, double theta)
{
    if (!(rho > 0.0) || !(theta > 0.0))
        throw std::domain_error("total_energy_density: rho and theta must be positive");
    return rho * (theta + 0.5 * (u * u + norm2(w))) + 0.5 * norm2(b);
}

/// Entropy density: ln(theta) - gamma*ln(rho).
inline double entropy_density(double rho, double theta, double gamma)
{
    if (!(rho > 0.0) || !(theta > 0.0))
        throw std::domain_error("entropy_density: rho and theta must be positive");
    return std::log(theta) - gamma * std::log(rho);
}

} // namespace mhd1d
