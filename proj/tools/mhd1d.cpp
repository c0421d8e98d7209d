// Command-line front end: solve | sweep | bl | mms.
// Exit codes: 0 success, 2 validation failure, 3 solver failure.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mhd1d/config.hpp"
#include "mhd1d/core.hpp"
#include "mhd1d/experiments.hpp"
#include "mhd1d/io.hpp"
#include "mhd1d/mms.hpp"
#include "mhd1d/solver.hpp"

namespace {

using namespace mhd1d;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

bool g_quiet = false;

void note(const std::string& msg)
{
    if (!g_quiet)
        std::cout << msg << "\n";
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string help_footer()
{
    std::ostringstream os;
    os << "Config keys (flat key=value, # comments):\n";
    for (const auto& [key, doc] : config_key_docs())
        os << "  " << key << "\n      " << doc << "\n";
    return os.str();
}

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    int jobs = -1;
};

RunConfig load_config(const CommonOpts& opts)
{
    RunConfig cfg = parse_config(read_file(opts.config_path));
    if (!opts.out_dir.empty())
        cfg.out_dir = opts.out_dir;
    if (opts.jobs >= 0)
        cfg.jobs = opts.jobs;
    return cfg;
}

int cmd_solve(const CommonOpts& opts)
{
    const RunConfig cfg = load_config(opts);
    const Mesh mesh = Mesh::uniform(cfg.n_cells);
    const BoundaryData bdry = make_boundary(cfg);
    const InitialData init = make_initial(cfg, mesh, bdry);
    const ConductivityLaw law = make_law(cfg.params);

    std::filesystem::create_directories(cfg.out_dir);
    RunRecord rec;
    try {
        rec = solve(init, cfg.params, bdry, law, cfg.controls, mesh);
    } catch (const SolverFailure& f) {
        if (f.last_state)
            write_snapshot(cfg.out_dir + "/last_good.csv", *f.last_state, mesh);
        throw;
    }
    write_run_dir(cfg.out_dir, rec);
    note("solve: " + std::to_string(rec.diag_series.size()) + " steps to t=" +
         fmt17(rec.snapshots.back().t) + ", outputs in " + cfg.out_dir);
    return kExitOk;
}

int cmd_sweep(const CommonOpts& opts)
{
    const RunConfig cfg = load_config(opts);
    if (cfg.sweep_mu.size() < 3)
        throw ValidationError("sweep: rate fit requires >= 3 mu values, got " +
                              std::to_string(cfg.sweep_mu.size()));
    const Mesh mesh = Mesh::uniform(cfg.n_cells);
    const BoundaryData bdry = make_boundary(cfg);

    SweepPlan plan;
    plan.mu_values = cfg.sweep_mu;
    plan.include_limit = true;
    plan.mesh = mesh;
    plan.params = cfg.params;
    plan.init = make_initial(cfg, mesh, bdry);
    plan.bdry = bdry;
    plan.bl_exponent = cfg.bl_exponent;
    plan.grid_check = cfg.grid_check;
    plan.jobs = cfg.jobs;

    const SweepResult res = run_sweep(plan, cfg.controls);

    std::filesystem::create_directories(cfg.out_dir);
    write_rate_csv(cfg.out_dir + "/rate_report.csv", res.rate);
    write_bl_csv(cfg.out_dir + "/bl_report.csv", res.bl);
    write_run_dir(cfg.out_dir + "/baseline", res.baseline);
    std::vector<std::string> files = {"rate_report.csv", "bl_report.csv", "summary.txt",
                                      "baseline/"};
    for (std::size_t i = 0; i < res.rate.points.size(); ++i) {
        if (res.rate.points[i].failed)
            continue;
        std::ostringstream dir;
        dir << "case_mu_" << fmt17(res.rate.points[i].mu);
        write_run_dir(cfg.out_dir + "/" + dir.str(), res.case_records[i]);
        files.push_back(dir.str() + "/");
    }

    Summary sm;
    sm.add("command", std::string("sweep"));
    sm.add("fit_ok", res.rate.fit_ok ? 1 : 0);
    if (res.rate.fit_ok) {
        sm.add("slope", res.rate.fit.slope);
        sm.add("intercept", res.rate.fit.intercept);
        sm.add("residual", res.rate.fit.residual);
    } else {
        sm.add("fit_note", res.rate.fit_note);
    }
    int failed = 0;
    for (const auto& p : res.rate.points)
        failed += p.failed ? 1 : 0;
    sm.add("cases_failed", failed);
    sm.add("bl_exponent", res.bl.exponent);
    if (plan.grid_check) {
        sm.add("grid_check_e", res.grid_check_e);
        sm.add("grid_check_threshold", res.grid_check_threshold);
        sm.add("grid_check_ok", res.grid_check_ok ? 1 : 0);
    }
    std::string joined;
    for (std::size_t i = 0; i < files.size(); ++i)
        joined += (i ? "," : "") + files[i];
    sm.add("files", joined);
    sm.write(cfg.out_dir + "/summary.txt");

    if (!res.rate.fit_ok)
        throw ValidationError("sweep: " + res.rate.fit_note);
    note("sweep: slope=" + fmt17(res.rate.fit.slope) + " residual=" + fmt17(res.rate.fit.residual) +
         ", outputs in " + cfg.out_dir);
    return kExitOk;
}

int cmd_bl(const CommonOpts& opts)
{
    const RunConfig cfg = load_config(opts);
    if (cfg.bl_record_mu_dir.empty() || cfg.bl_record_0_dir.empty())
        throw ValidationError("bl: config must set bl.record_mu and bl.record_0");
    const RunRecord rec_mu = load_run_dir(cfg.bl_record_mu_dir);
    const RunRecord rec_0 = load_run_dir(cfg.bl_record_0_dir);

    BLReport report;
    report.exponent = cfg.bl_exponent;
    report.rows.push_back(bl_profile(rec_mu, rec_0, cfg.bl_exponent));

    std::filesystem::create_directories(cfg.out_dir);
    write_bl_csv(cfg.out_dir + "/bl_report.csv", report);
    Summary sm;
    sm.add("command", std::string("bl"));
    sm.add("mu", report.rows[0].mu);
    sm.add("delta", report.rows[0].delta);
    sm.add("interior_sup", report.rows[0].interior_sup);
    sm.add("global_sup", report.rows[0].global_sup);
    sm.add("mismatch", report.rows[0].mismatch);
    sm.add("files", std::string("bl_report.csv,summary.txt"));
    sm.write(cfg.out_dir + "/summary.txt");
    note("bl: interior_sup=" + fmt17(report.rows[0].interior_sup) + " global_sup=" +
         fmt17(report.rows[0].global_sup) + ", outputs in " + cfg.out_dir);
    return kExitOk;
}

int cmd_mms(const CommonOpts& opts)
{
    const RunConfig cfg = load_config(opts);
    const mms::MmsCase mcase = mms::mms_case(cfg.mms_case);
    const MmsReport report = mms_verify(mcase, cfg.mms_resolutions, cfg.mms_dt_factor);

    std::filesystem::create_directories(cfg.out_dir);
    write_mms_csv(cfg.out_dir + "/mms_report.csv", report);
    Summary sm;
    sm.add("command", std::string("mms"));
    sm.add("case", report.case_name);
    sm.add("gated_field", report.gated_field);
    sm.add("exact", report.exact ? 1 : 0);
    sm.add("monotone", report.monotone ? 1 : 0);
    sm.add("order_rho", report.order_rho);
    sm.add("order_u", report.order_u);
    sm.add("order_w", report.order_w);
    sm.add("order_b", report.order_b);
    sm.add("order_theta", report.order_theta);
    sm.add("order_comp", report.order_comp);
    sm.add("gated_order", report.gated_order);
    sm.add("files", std::string("mms_report.csv,summary.txt"));
    sm.write(cfg.out_dir + "/summary.txt");
    note("mms: case=" + report.case_name +
         (report.exact ? " exact" : " gated_order=" + fmt17(report.gated_order)) +
         ", outputs in " + cfg.out_dir);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"1D planar MHD laboratory: semi-implicit solver, vanishing shear "
                 "viscosity sweeps, boundary-layer profiling, manufactured-solution "
                 "verification"};
    app.footer(help_footer());
    app.require_subcommand(1);

    CommonOpts opts;
    int which = 0;
    for (auto [name, desc, id] : {std::tuple<const char*, const char*, int>
             {"solve", "integrate one configuration; write snapshots + diagnostics", 1},
             {"sweep", "mu-sweep vs the mu=0 baseline; rate and BL reports", 2},
             {"bl", "boundary-layer profile of two existing run directories", 3},
             {"mms", "manufactured-solution order verification", 4}}) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", opts.config_path, "key=value config file")->required();
        sub->add_option("--out", opts.out_dir, "output directory (overrides output.dir)");
        sub->add_option("--jobs", opts.jobs, "worker pool size (overrides jobs)");
        sub->add_flag("--quiet", g_quiet, "suppress progress output");
        sub->callback([&which, id] { which = id; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        switch (which) {
        case 1: return cmd_solve(opts);
        case 2: return cmd_sweep(opts);
        case 3: return cmd_bl(opts);
        case 4: return cmd_mms(opts);
        }
        return kExitValidation;
    } catch (const SolverFailure& e) {
        std::cerr << "error: solver: " << e.what() << " t=" << e.t_fail << " field=" << e.field
                  << "\n";
        return kExitSolver;
    } catch (const ValidationError& e) {
        std::cerr << "error: validation: " << e.what() << "\n";
        return kExitValidation;
    } catch (const FitError& e) {
        std::cerr << "error: validation: " << e.what() << "\n";
        return kExitValidation;
    } catch (const AlignmentError& e) {
        std::cerr << "error: validation: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "error: validation: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: solver: " << e.what() << "\n";
        return kExitSolver;
    }
}
