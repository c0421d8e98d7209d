#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>

#include "mhd1d/config.hpp"
#include "mhd1d/io.hpp"

using namespace mhd1d;

namespace {

std::string temp_dir()
{
    static int counter = 0;
    const std::string dir =
        (std::filesystem::temp_directory_path() / ("mhd1d_test_" + std::to_string(counter++))).string();
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("snapshot round-trip is bit-exact for random fields")
{
    const Mesh mesh = Mesh::uniform(37);
    std::mt19937 gen(23);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    State s;
    s.t = 0.31830988618379067;
    const std::size_t n = mesh.n_nodes();
    s.rho.resize(n);
    s.u.resize(n);
    s.theta.resize(n);
    s.w = Vec2Field(n);
    s.b = Vec2Field(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.rho[i] = 0.5 + std::abs(dist(gen));
        s.u[i] = dist(gen);
        s.w.set(i, {dist(gen), dist(gen)});
        s.b.set(i, {dist(gen), dist(gen)});
        s.theta[i] = 0.5 + std::abs(dist(gen));
    }
    const std::string path = temp_dir() + "/snap.csv";
    write_snapshot(path, s, mesh);
    const Snapshot back = read_snapshot(path);
    CHECK(back.n_cells == mesh.n_cells);
    CHECK(back.state == s);
}

TEST_CASE("run directory round-trips through write_run_dir/load_run_dir")
{
    const Mesh mesh = Mesh::uniform(20);
    RunRecord rec;
    rec.mesh = mesh;
    rec.params.mu = 2.5e-3;
    rec.controls.t_end = 0.2;
    rec.controls.snapshot_every = 0.1;
    for (double t : {0.0, 0.1, 0.2}) {
        State s;
        s.t = t;
        const std::size_t n = mesh.n_nodes();
        s.rho.assign(n, 1.0 + t);
        s.u.assign(n, 0.0);
        s.theta.assign(n, 1.0);
        s.w = Vec2Field(n);
        s.b = Vec2Field(n);
        rec.snapshots.push_back(s);
    }
    StepDiag d;
    d.t = 0.1;
    d.dt = 0.1;
    d.mass = 1.1;
    rec.diag_series.push_back(d);

    const std::string dir = temp_dir();
    write_run_dir(dir, rec);
    const RunRecord back = load_run_dir(dir);
    CHECK(back.params.mu == rec.params.mu);
    CHECK(back.mesh.n_cells == rec.mesh.n_cells);
    REQUIRE(back.snapshots.size() == rec.snapshots.size());
    for (std::size_t k = 0; k < back.snapshots.size(); ++k)
        CHECK(back.snapshots[k] == rec.snapshots[k]);
}

TEST_CASE("parse_config: minimal document gets documented defaults")
{
    const RunConfig cfg = parse_config("mesh.n_cells = 100\ninit.preset = rest\n");
    CHECK(cfg.n_cells == 100);
    CHECK(cfg.init_preset == "rest");
    CHECK(cfg.params.lambda == 0.1);
    CHECK(cfg.params.mu == 1e-3);
    CHECK(cfg.controls.cfl == 0.4);
    CHECK(cfg.controls.pos_floor == 1e-12);
    CHECK(cfg.sweep_mu.size() == 5);
    CHECK(cfg.bl_exponent == 0.4);
}

TEST_CASE("parse_config: rejections name the key or line")
{
    CHECK_THROWS_WITH_AS(parse_config("params.mu = -1\n"),
                         doctest::Contains("params.mu"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config("viscocity = 1\n"),
                         doctest::Contains("viscocity"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config("params.lambda 0.5\n"),
                         doctest::Contains("line 1"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config("controls.cfl = 1.5\n"),
                         doctest::Contains("controls.cfl"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config("mesh.n_cells = 100\nmesh.n_cells = 50\n"),
                         doctest::Contains("duplicate"), ValidationError);
}

TEST_CASE("parse_config: comments, blank lines, and lists")
{
    const std::string text =
        "# experiment configuration\n"
        "\n"
        "mesh.n_cells = 64   # inline comment\n"
        "sweep.mu_values = 1e-2, 1e-3, 1e-4\n"
        "mms.resolutions = 50,100,200\n";
    const RunConfig cfg = parse_config(text);
    CHECK(cfg.n_cells == 64);
    REQUIRE(cfg.sweep_mu.size() == 3);
    CHECK(cfg.sweep_mu[1] == 1e-3);
    REQUIRE(cfg.mms_resolutions.size() == 3);
    CHECK(cfg.mms_resolutions[2] == 200);
}

TEST_CASE("presets build valid states")
{
    const Mesh mesh = Mesh::uniform(48);
    RunConfig cfg;

    SUBCASE("rest")
    {
        const BoundaryData bdry = make_boundary(cfg);
        const InitialData d = make_initial(cfg, mesh, bdry);
        CHECK_NOTHROW(make_state(mesh, d, bdry));
    }
    SUBCASE("smooth-shear interpolates the walls")
    {
        cfg.init_preset = "smooth-shear";
        cfg.bdry_wm = {1.0, 0.0};
        cfg.bdry_wp = {-1.0, 0.0};
        const BoundaryData bdry = make_boundary(cfg);
        const InitialData d = make_initial(cfg, mesh, bdry);
        const State s = make_state(mesh, d, bdry);
        CHECK(s.w.c1[0] == 1.0);
        CHECK(s.w.c1[mesh.n_nodes() - 1] == -1.0);
        // profile is the cosine blend
        CHECK(s.w.c1[mesh.n_nodes() / 2] == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("thermal-bump is positive and compatible")
    {
        cfg.init_preset = "thermal-bump";
        const BoundaryData bdry = make_boundary(cfg);
        const InitialData d = make_initial(cfg, mesh, bdry);
        const State s = make_state(mesh, d, bdry);
        double max_theta = 0.0;
        for (double v : s.theta)
            max_theta = std::max(max_theta, v);
        CHECK(max_theta > 1.4);
    }
    SUBCASE("custom from snapshot")
    {
        cfg.init_preset = "smooth-shear";
        cfg.bdry_wm = {1.0, 0.0};
        cfg.bdry_wp = {-1.0, 0.0};
        const BoundaryData bdry = make_boundary(cfg);
        const InitialData d = make_initial(cfg, mesh, bdry);
        const State s = make_state(mesh, d, bdry);
        const std::string path = temp_dir() + "/init.csv";
        write_snapshot(path, s, mesh);

        RunConfig custom = cfg;
        custom.init_preset = "custom";
        custom.init_snapshot_file = path;
        const InitialData d2 = make_initial(custom, mesh, bdry);
        const State s2 = make_state(mesh, d2, bdry);
        CHECK(s2 == s);
    }
}

TEST_CASE("summary files are written in order and readable")
{
    Summary sm;
    sm.add("alpha", 1);
    sm.add("beta", 0.5);
    sm.add("name", std::string("value"));
    const std::string path = temp_dir() + "/summary.txt";
    sm.write(path);
    const auto kv = read_summary(path);
    CHECK(kv.at("alpha") == "1");
    CHECK(kv.at("beta") == "0.5");
    CHECK(kv.at("name") == "value");
}
