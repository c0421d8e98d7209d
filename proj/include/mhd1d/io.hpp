#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mhd1d/core.hpp"
#include "mhd1d/diagnostics.hpp"
#include "mhd1d/errors.hpp"
#include "mhd1d/experiments.hpp"
#include "mhd1d/solver.hpp"

namespace mhd1d {

/// Full-precision text form: 17 significant digits round-trips a double.
inline std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_snapshot(const std::string& path, const State& s, const Mesh& mesh)
{
    std::ofstream out(path);
    if (!out)
        throw ValidationError("write_snapshot: cannot open " + path);
    out << "# t=" << fmt17(s.t) << "\n";
    out << "x,rho,u,w1,w2,b1,b2,theta\n";
    for (std::size_t i = 0; i < mesh.n_nodes(); ++i) {
        out << fmt17(mesh.nodes[i]) << ',' << fmt17(s.rho[i]) << ',' << fmt17(s.u[i]) << ','
            << fmt17(s.w.c1[i]) << ',' << fmt17(s.w.c2[i]) << ',' << fmt17(s.b.c1[i]) << ','
            << fmt17(s.b.c2[i]) << ',' << fmt17(s.theta[i]) << "\n";
    }
}

struct Snapshot {
    State state;
    int n_cells = 0;
};

inline Snapshot read_snapshot(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("read_snapshot: cannot open " + path);
    Snapshot snap;
    std::string line;
    bool header_seen = false;
    std::vector<std::array<double, 8>> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            const auto pos = line.find("t=");
            if (pos != std::string::npos)
                snap.state.t = std::strtod(line.c_str() + pos + 2, nullptr);
            continue;
        }
        if (!header_seen) {
            if (line.rfind("x,", 0) != 0)
                throw ValidationError("read_snapshot: missing header in " + path);
            header_seen = true;
            continue;
        }
        std::array<double, 8> row{};
        const char* p = line.c_str();
        char* end = nullptr;
        for (int c = 0; c < 8; ++c) {
            row[static_cast<std::size_t>(c)] = std::strtod(p, &end);
            if (end == p)
                throw ValidationError("read_snapshot: malformed row in " + path);
            p = end;
            if (*p == ',')
                ++p;
        }
        rows.push_back(row);
    }
    if (rows.size() < 3)
        throw ValidationError("read_snapshot: too few rows in " + path);
    const std::size_t n = rows.size();
    snap.n_cells = static_cast<int>(n - 1);
    State& s = snap.state;
    s.rho.resize(n);
    s.u.resize(n);
    s.theta.resize(n);
    s.w = Vec2Field(n);
    s.b = Vec2Field(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.rho[i] = rows[i][1];
        s.u[i] = rows[i][2];
        s.w.c1[i] = rows[i][3];
        s.w.c2[i] = rows[i][4];
        s.b.c1[i] = rows[i][5];
        s.b.c2[i] = rows[i][6];
        s.theta[i] = rows[i][7];
    }
    return snap;
}

inline void write_diagnostics_csv(const std::string& path, const std::vector<StepDiag>& diag)
{
    std::ofstream out(path);
    if (!out)
        throw ValidationError("write_diagnostics_csv: cannot open " + path);
    out << "t,dt,mass,total_energy,entropy_prod,min_rho,min_theta,bflux\n";
    for (const auto& d : diag) {
        out << fmt17(d.t) << ',' << fmt17(d.dt) << ',' << fmt17(d.mass) << ','
            << fmt17(d.total_energy) << ',' << fmt17(d.entropy_prod) << ',' << fmt17(d.min_rho)
            << ',' << fmt17(d.min_theta) << ',' << fmt17(d.bflux) << "\n";
    }
}

inline void write_rate_csv(const std::string& path, const RateReport& report)
{
    std::ofstream out(path);
    if (!out)
        throw ValidationError("write_rate_csv: cannot open " + path);
    out << "mu,E,E_rho,E_u,E_w,E_b,E_theta\n";
    for (const auto& p : report.points) {
        if (p.failed)
            continue;
        out << fmt17(p.mu) << ',' << fmt17(p.E) << ',' << fmt17(p.E_rho) << ',' << fmt17(p.E_u)
            << ',' << fmt17(p.E_w) << ',' << fmt17(p.E_b) << ',' << fmt17(p.E_theta) << "\n";
    }
}

inline void write_bl_csv(const std::string& path, const BLReport& report)
{
    std::ofstream out(path);
    if (!out)
        throw ValidationError("write_bl_csv: cannot open " + path);
    out << "mu,delta,interior_sup,global_sup,mismatch\n";
    for (const auto& r : report.rows) {
        if (r.failed)
            continue;
        out << fmt17(r.mu) << ',' << fmt17(r.delta) << ',' << fmt17(r.interior_sup) << ','
            << fmt17(r.global_sup) << ',' << fmt17(r.mismatch) << "\n";
    }
}

inline void write_mms_csv(const std::string& path, const MmsReport& report)
{
    std::ofstream out(path);
    if (!out)
        throw ValidationError("write_mms_csv: cannot open " + path);
    out << "case,n_cells,h,err_rho,err_u,err_w,err_b,err_theta,err_comp\n";
    for (const auto& e : report.errors) {
        out << report.case_name << ',' << e.n_cells << ',' << fmt17(e.h) << ','
            << fmt17(e.err_rho) << ',' << fmt17(e.err_u) << ',' << fmt17(e.err_w) << ','
            << fmt17(e.err_b) << ',' << fmt17(e.err_theta) << ',' << fmt17(e.err_comp) << "\n";
    }
}

/// Flat key=value report block, written in insertion order so outputs are
/// byte-deterministic.
struct Summary {
    std::vector<std::pair<std::string, std::string>> entries;

    void add(const std::string& key, const std::string& value) { entries.emplace_back(key, value); }
    void add(const std::string& key, double value) { entries.emplace_back(key, fmt17(value)); }
    void add(const std::string& key, int value) { entries.emplace_back(key, std::to_string(value)); }

    void write(const std::string& path) const
    {
        std::ofstream out(path);
        if (!out)
            throw ValidationError("Summary: cannot open " + path);
        for (const auto& [k, v] : entries)
            out << k << '=' << v << "\n";
    }
};

inline std::map<std::string, std::string> read_summary(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("read_summary: cannot open " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            continue;
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

/// Write one run as a directory: indexed snapshots, per-step diagnostics,
/// and a summary naming every emitted file.
inline std::vector<std::string> write_run_dir(const std::string& dir, const RunRecord& rec)
{
    std::filesystem::create_directories(dir);
    std::vector<std::string> files;
    for (std::size_t k = 0; k < rec.snapshots.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%06zu.csv", k);
        write_snapshot(dir + "/" + name, rec.snapshots[k], rec.mesh);
        files.emplace_back(name);
    }
    write_diagnostics_csv(dir + "/diagnostics.csv", rec.diag_series);
    files.emplace_back("diagnostics.csv");

    Summary sm;
    sm.add("mesh.n_cells", rec.mesh.n_cells);
    sm.add("params.lambda", rec.params.lambda);
    sm.add("params.mu", rec.params.mu);
    sm.add("params.nu", rec.params.nu);
    sm.add("params.gamma", rec.params.gamma);
    sm.add("params.kappa1", rec.params.kappa1);
    sm.add("params.q", rec.params.q);
    sm.add("controls.t_end", rec.controls.t_end);
    sm.add("controls.snapshot_every", rec.controls.snapshot_every);
    sm.add("steps", static_cast<int>(rec.diag_series.size()));
    sm.add("final_t", rec.snapshots.empty() ? 0.0 : rec.snapshots.back().t);
    sm.add("bflux_integral", rec.bflux_integral);
    sm.add("min_rho_run", rec.min_rho_run);
    sm.add("min_theta_run", rec.min_theta_run);
    sm.add("max_rho_run", rec.max_rho_run);
    sm.add("max_theta_run", rec.max_theta_run);
    if (!rec.snapshots.empty()) {
        // soft monitors: initial-data curvature and the weighted wall norms
        // of the final transverse fields
        const State& first = rec.snapshots.front();
        double d2 = 0.0;
        for (std::size_t i = 1; i + 1 < first.u.size(); ++i)
            d2 = std::max(d2, std::abs(first.u[i + 1] - 2.0 * first.u[i] + first.u[i - 1]) /
                                  (rec.mesh.h * rec.mesh.h));
        sm.add("u0_max_second_diff", d2);
        const State& last = rec.snapshots.back();
        sm.add("final_sqrt_omega_wx_l2", weighted_grad_norm(last.w, rec.mesh, 0.5));
        sm.add("final_sqrt_omega_bx_l2", weighted_grad_norm(last.b, rec.mesh, 0.5));
    }
    std::string joined;
    for (std::size_t i = 0; i < files.size(); ++i)
        joined += (i ? "," : "") + files[i];
    joined += ",summary.txt";
    sm.add("files", joined);
    sm.write(dir + "/summary.txt");
    files.emplace_back("summary.txt");
    return files;
}

/// Load a run directory written by write_run_dir (snapshots, parameters,
/// mesh); enough to feed the boundary-layer profiler.
inline RunRecord load_run_dir(const std::string& dir)
{
    const auto kv = read_summary(dir + "/summary.txt");
    auto need = [&](const std::string& key) {
        const auto it = kv.find(key);
        if (it == kv.end())
            throw ValidationError("load_run_dir: summary missing key " + key);
        return it->second;
    };
    RunRecord rec;
    rec.mesh = Mesh::uniform(std::stoi(need("mesh.n_cells")));
    rec.params.lambda = std::stod(need("params.lambda"));
    rec.params.mu = std::stod(need("params.mu"));
    rec.params.nu = std::stod(need("params.nu"));
    rec.params.gamma = std::stod(need("params.gamma"));
    rec.params.kappa1 = std::stod(need("params.kappa1"));
    rec.params.q = std::stod(need("params.q"));
    rec.controls.t_end = std::stod(need("controls.t_end"));
    rec.controls.snapshot_every = std::stod(need("controls.snapshot_every"));

    std::stringstream files(need("files"));
    std::string name;
    while (std::getline(files, name, ',')) {
        if (name.rfind("snapshot_", 0) != 0)
            continue;
        const Snapshot snap = read_snapshot(dir + "/" + name);
        if (snap.n_cells != rec.mesh.n_cells)
            throw AlignmentError("load_run_dir: snapshot resolution differs from summary");
        rec.snapshots.push_back(snap.state);
    }
    if (rec.snapshots.empty())
        throw ValidationError("load_run_dir: no snapshots listed in " + dir);
    return rec;
}

} // namespace mhd1d
