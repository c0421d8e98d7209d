#pragma once

#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mhd1d/core.hpp"
#include "mhd1d/errors.hpp"
#include "mhd1d/io.hpp"
#include "mhd1d/solver.hpp"

namespace mhd1d {

/// Everything a CLI run needs, parsed from a flat key=value document.
struct RunConfig {
    int n_cells = 200;
    PhysParams params;

    std::string init_preset = "rest"; // rest | smooth-shear | thermal-bump | custom
    std::string init_snapshot_file;

    std::string bdry_kind = "constant"; // constant | sinusoid
    vec2 bdry_wm{0.0, 0.0}, bdry_wp{0.0, 0.0};
    vec2 bdry_am{0.0, 0.0}, bdry_ap{0.0, 0.0};
    double bdry_freq = 1.0;

    SolverControls controls;
    std::string out_dir = "out";
    int jobs = 0;

    std::vector<double> sweep_mu = {1e-2, std::pow(10.0, -2.5), 1e-3, std::pow(10.0, -3.5), 1e-4};
    double bl_exponent = 0.4;
    bool grid_check = true;

    std::string bl_record_mu_dir, bl_record_0_dir;

    std::string mms_case = "coupled";
    std::vector<int> mms_resolutions = {100, 200, 400};
    double mms_dt_factor = 2.0;
};

namespace detail {

inline std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& v)
{
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw ValidationError("config: key " + key + ": not a number: '" + v + "'");
    return x;
}

inline int parse_int(const std::string& key, const std::string& v)
{
    const double x = parse_double(key, v);
    if (x != std::floor(x))
        throw ValidationError("config: key " + key + ": not an integer: '" + v + "'");
    return static_cast<int>(x);
}

inline bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "1" || v == "true" || v == "on") return true;
    if (v == "0" || v == "false" || v == "off") return false;
    throw ValidationError("config: key " + key + ": not a boolean: '" + v + "'");
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& v)
{
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_double(key, trim(item)));
    if (out.empty())
        throw ValidationError("config: key " + key + ": empty list");
    return out;
}

inline std::vector<int> parse_int_list(const std::string& key, const std::string& v)
{
    std::vector<int> out;
    for (double d : parse_double_list(key, v)) {
        if (d != std::floor(d))
            throw ValidationError("config: key " + key + ": not an integer list");
        out.push_back(static_cast<int>(d));
    }
    return out;
}

} // namespace detail

/// Documented keys and their defaults; also rendered into --help.
inline const std::vector<std::pair<std::string, std::string>>& config_key_docs()
{
    static const std::vector<std::pair<std::string, std::string>> docs = {
        {"mesh.n_cells", "cells of the uniform grid on [0,1] (default 200)"},
        {"params.lambda", "longitudinal viscosity > 0 (default 0.1)"},
        {"params.mu", "shear viscosity >= 0; 0 selects the limit system (default 0.001)"},
        {"params.nu", "magnetic diffusivity > 0 (default 0.1)"},
        {"params.gamma", "gas constant > 0 (default 1.6666666666666667)"},
        {"params.kappa1", "conductivity floor coefficient > 0 (default 0.1)"},
        {"params.q", "conductivity exponent > 0 (default 2)"},
        {"init.preset", "rest | smooth-shear | thermal-bump | custom (default rest)"},
        {"init.snapshot_file", "snapshot CSV for init.preset=custom"},
        {"bdry.kind", "constant | sinusoid (default constant)"},
        {"bdry.wm1", "w^-(t) component 1 base value (default 0)"},
        {"bdry.wm2", "w^-(t) component 2 base value (default 0)"},
        {"bdry.wp1", "w^+(t) component 1 base value (default 0)"},
        {"bdry.wp2", "w^+(t) component 2 base value (default 0)"},
        {"bdry.am1", "sinusoid amplitude, w^- component 1 (default 0)"},
        {"bdry.am2", "sinusoid amplitude, w^- component 2 (default 0)"},
        {"bdry.ap1", "sinusoid amplitude, w^+ component 1 (default 0)"},
        {"bdry.ap2", "sinusoid amplitude, w^+ component 2 (default 0)"},
        {"bdry.freq", "sinusoid frequency: base + amp*sin(2*pi*freq*t) (default 1)"},
        {"controls.cfl", "Courant number in (0,1] (default 0.4)"},
        {"controls.t_end", "horizon T > 0 (default 1)"},
        {"controls.dt_max", "time-step cap (default inf)"},
        {"controls.snapshot_every", "snapshot interval > 0 (default 0.1)"},
        {"controls.pos_floor", "positivity floor (default 1e-12)"},
        {"controls.max_halvings", "dt-halving retry budget (default 20)"},
        {"controls.theta_picard", "lagged-conductivity sweeps >= 1 (default 2)"},
        {"output.dir", "output directory (default out; --out overrides)"},
        {"jobs", "sweep worker pool size; 0 = all processors (default 0)"},
        {"sweep.mu_values", "comma list of mu > 0 (default 1e-2,10^-2.5,1e-3,10^-3.5,1e-4)"},
        {"sweep.bl_exponent", "BL thickness exponent a in (0,1/2); delta = mu^a (default 0.4)"},
        {"sweep.grid_check", "solve a half-resolution baseline and report grid error (default 1)"},
        {"bl.record_mu", "run directory of the mu > 0 case (bl command)"},
        {"bl.record_0", "run directory of the mu = 0 baseline (bl command)"},
        {"mms.case", "rest | continuity | momentum | transverse | magnetic | temperature | coupled"},
        {"mms.resolutions", "comma list of increasing n_cells (default 100,200,400)"},
        {"mms.dt_factor", "dt = factor*h^2 (default 2)"},
    };
    return docs;
}

/// Parse a flat key=value document (dotted keys, # comments). Unknown keys
/// are rejected by name; malformed lines report their line number; range
/// violations name the key.
inline RunConfig parse_config(const std::string& text)
{
    RunConfig cfg;
    std::set<std::string> known;
    for (const auto& [k, _] : config_key_docs())
        known.insert(k);

    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config: parse error at line " + std::to_string(lineno) +
                                  ": expected key=value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (!known.count(key))
            throw ValidationError("config: unknown key '" + key + "' at line " + std::to_string(lineno));
        if (!seen.insert(key).second)
            throw ValidationError("config: duplicate key '" + key + "' at line " + std::to_string(lineno));

        auto pos = [&](double v, const std::string& k) {
            if (!(v > 0.0))
                throw ValidationError("config: key " + k + ": must be > 0, got " + val);
            return v;
        };
        if (key == "mesh.n_cells") {
            cfg.n_cells = detail::parse_int(key, val);
            if (cfg.n_cells < 2)
                throw ValidationError("config: key mesh.n_cells: must be >= 2, got " + val);
        } else if (key == "params.lambda") cfg.params.lambda = pos(detail::parse_double(key, val), key);
        else if (key == "params.mu") {
            cfg.params.mu = detail::parse_double(key, val);
            if (cfg.params.mu < 0.0)
                throw ValidationError("config: key params.mu: must be >= 0, got " + val);
        }
        else if (key == "params.nu") cfg.params.nu = pos(detail::parse_double(key, val), key);
        else if (key == "params.gamma") cfg.params.gamma = pos(detail::parse_double(key, val), key);
        else if (key == "params.kappa1") cfg.params.kappa1 = pos(detail::parse_double(key, val), key);
        else if (key == "params.q") cfg.params.q = pos(detail::parse_double(key, val), key);
        else if (key == "init.preset") {
            if (val != "rest" && val != "smooth-shear" && val != "thermal-bump" && val != "custom")
                throw ValidationError("config: key init.preset: unknown preset '" + val + "'");
            cfg.init_preset = val;
        }
        else if (key == "init.snapshot_file") cfg.init_snapshot_file = val;
        else if (key == "bdry.kind") {
            if (val != "constant" && val != "sinusoid")
                throw ValidationError("config: key bdry.kind: unknown kind '" + val + "'");
            cfg.bdry_kind = val;
        }
        else if (key == "bdry.wm1") cfg.bdry_wm[0] = detail::parse_double(key, val);
        else if (key == "bdry.wm2") cfg.bdry_wm[1] = detail::parse_double(key, val);
        else if (key == "bdry.wp1") cfg.bdry_wp[0] = detail::parse_double(key, val);
        else if (key == "bdry.wp2") cfg.bdry_wp[1] = detail::parse_double(key, val);
        else if (key == "bdry.am1") cfg.bdry_am[0] = detail::parse_double(key, val);
        else if (key == "bdry.am2") cfg.bdry_am[1] = detail::parse_double(key, val);
        else if (key == "bdry.ap1") cfg.bdry_ap[0] = detail::parse_double(key, val);
        else if (key == "bdry.ap2") cfg.bdry_ap[1] = detail::parse_double(key, val);
        else if (key == "bdry.freq") cfg.bdry_freq = detail::parse_double(key, val);
        else if (key == "controls.cfl") {
            cfg.controls.cfl = detail::parse_double(key, val);
            if (!(cfg.controls.cfl > 0.0 && cfg.controls.cfl <= 1.0))
                throw ValidationError("config: key controls.cfl: must lie in (0,1], got " + val);
        }
        else if (key == "controls.t_end") cfg.controls.t_end = pos(detail::parse_double(key, val), key);
        else if (key == "controls.dt_max") cfg.controls.dt_max = pos(detail::parse_double(key, val), key);
        else if (key == "controls.snapshot_every")
            cfg.controls.snapshot_every = pos(detail::parse_double(key, val), key);
        else if (key == "controls.pos_floor") cfg.controls.pos_floor = pos(detail::parse_double(key, val), key);
        else if (key == "controls.max_halvings") {
            cfg.controls.max_halvings = detail::parse_int(key, val);
            if (cfg.controls.max_halvings < 0)
                throw ValidationError("config: key controls.max_halvings: must be >= 0, got " + val);
        }
        else if (key == "controls.theta_picard") {
            cfg.controls.theta_picard_iters = detail::parse_int(key, val);
            if (cfg.controls.theta_picard_iters < 1)
                throw ValidationError("config: key controls.theta_picard: must be >= 1, got " + val);
        }
        else if (key == "output.dir") cfg.out_dir = val;
        else if (key == "jobs") {
            cfg.jobs = detail::parse_int(key, val);
            if (cfg.jobs < 0)
                throw ValidationError("config: key jobs: must be >= 0, got " + val);
        }
        else if (key == "sweep.mu_values") {
            cfg.sweep_mu = detail::parse_double_list(key, val);
            for (double m : cfg.sweep_mu)
                if (!(m > 0.0))
                    throw ValidationError("config: key sweep.mu_values: entries must be > 0");
        }
        else if (key == "sweep.bl_exponent") {
            cfg.bl_exponent = detail::parse_double(key, val);
            if (!(cfg.bl_exponent > 0.0 && cfg.bl_exponent < 0.5))
                throw ValidationError("config: key sweep.bl_exponent: must lie in (0,1/2), got " + val);
        }
        else if (key == "sweep.grid_check") cfg.grid_check = detail::parse_bool(key, val);
        else if (key == "bl.record_mu") cfg.bl_record_mu_dir = val;
        else if (key == "bl.record_0") cfg.bl_record_0_dir = val;
        else if (key == "mms.case") cfg.mms_case = val;
        else if (key == "mms.resolutions") cfg.mms_resolutions = detail::parse_int_list(key, val);
        else if (key == "mms.dt_factor") cfg.mms_dt_factor = pos(detail::parse_double(key, val), key);
    }
    return cfg;
}

inline BoundaryData make_boundary(const RunConfig& cfg)
{
    if (cfg.bdry_kind == "sinusoid")
        return BoundaryData::sinusoid(cfg.bdry_wm, cfg.bdry_am, cfg.bdry_wp, cfg.bdry_ap, cfg.bdry_freq);
    return BoundaryData::constant(cfg.bdry_wm, cfg.bdry_wp);
}

/// Named initial-data presets. Transverse velocity interpolates the t = 0
/// boundary values with a smooth blend so corner compatibility holds for
/// any boundary selection.
inline InitialData make_initial(const RunConfig& cfg, const Mesh& mesh, const BoundaryData& bdry)
{
    const std::size_t n = mesh.n_nodes();
    InitialData d;
    d.rho0.assign(n, 1.0);
    d.u0.assign(n, 0.0);
    d.theta0.assign(n, 1.0);
    d.w0 = Vec2Field(n);
    d.b0 = Vec2Field(n);

    const vec2 wm = bdry.w_minus(0.0), wp = bdry.w_plus(0.0);
    auto blend_w = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            const double s = 0.5 * (1.0 - std::cos(M_PI * mesh.nodes[i]));
            d.w0.set(i, {wm[0] + (wp[0] - wm[0]) * s, wm[1] + (wp[1] - wm[1]) * s});
        }
    };

    if (cfg.init_preset == "rest") {
        // w0 stays identically zero; non-zero wall data fails corner
        // compatibility in make_state, which is the intended diagnosis.
    } else if (cfg.init_preset == "smooth-shear") {
        blend_w();
    } else if (cfg.init_preset == "thermal-bump") {
        blend_w();
        for (std::size_t i = 0; i < n; ++i) {
            const double x = mesh.nodes[i];
            d.theta0[i] = 1.0 + 0.5 * std::exp(-std::pow((x - 0.5) / 0.1, 2.0));
        }
    } else if (cfg.init_preset == "custom") {
        if (cfg.init_snapshot_file.empty())
            throw ValidationError("config: init.preset=custom requires init.snapshot_file");
        const Snapshot snap = read_snapshot(cfg.init_snapshot_file);
        if (snap.n_cells != mesh.n_cells)
            throw ValidationError("config: init.snapshot_file resolution " +
                                  std::to_string(snap.n_cells) + " does not match mesh.n_cells " +
                                  std::to_string(mesh.n_cells));
        d.rho0 = snap.state.rho;
        d.u0 = snap.state.u;
        d.w0 = snap.state.w;
        d.b0 = snap.state.b;
        d.theta0 = snap.state.theta;
    } else {
        throw ValidationError("config: unknown init.preset '" + cfg.init_preset + "'");
    }
    return d;
}

} // namespace mhd1d
