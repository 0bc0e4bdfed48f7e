#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ddetc/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace ddetc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Designed {
    PipelineConfig cfg;
    DataMatrices dm;
    DesignReport base;
};

const Designed& example(int k) {
    static std::map<int, Designed> cache;
    auto it = cache.find(k);
    if (it == cache.end()) {
        Designed d;
        d.cfg = example_pipeline(k, kDefaultExampleSeed);
        d.dm = cmd_acquire(d.cfg);
        d.base = cmd_design(d.cfg, d.dm);
        it = cache.emplace(k, std::move(d)).first;
    }
    return it->second;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("ddetc_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto kv = KeyValueConfig::parse(
        "# comment\n"
        "plant.A = [0 1; -2, -3]   # trailing comment\n"
        "plant.B = [0; 1]\n"
        "design.Omega = 4\n"
        "sim.x0 = [1 0]\n"
        "design.maximize = false\n");
    CHECK(kv.get_matrix("plant.A")(1, 1) == -3.0);
    CHECK(kv.get_matrix("plant.B").rows() == 2);
    CHECK(kv.get_matrix("design.Omega", 2).isApprox(4.0 * Matrix::Identity(2, 2)));
    CHECK(kv.get_vector("sim.x0").size() == 2);
    CHECK_FALSE(kv.get_bool("design.maximize", true));
    CHECK(kv.get_double("missing", 2.5) == 2.5);

    CHECK_THROWS_WITH_AS(KeyValueConfig::parse("a = 1\na = 2\n"), doctest::Contains("duplicate key"), Error);
    CHECK_THROWS_AS(KeyValueConfig::parse("just words\n"), Error);
    CHECK_THROWS_AS(parse_matrix_literal("[1 2; 3]"), Error);
    CHECK_THROWS_AS(KeyValueConfig::parse("x = abc").get_double("x", 0.0), Error);

    const Matrix M = parse_matrix_literal("[0.1 -2e-3; 1 7]");
    CHECK(parse_matrix_literal(format_matrix_literal(M)) == M);
}

TEST_CASE("pipeline configuration") {
    const auto cfg = pipeline_from_config(KeyValueConfig::parse("design.rule = mixed\ndisturbance.delta = 0.1\n"));
    CHECK(cfg.regime == Regime::Robust);
    CHECK(cfg.model().has_value());
    CHECK(std::abs(cfg.sim.x0.norm() - 1.0) < 1e-12);
    CHECK(cfg.omega().isApprox(10.0 * Matrix::Identity(2, 2)));

    CHECK_THROWS_WITH_AS(pipeline_from_config(KeyValueConfig::parse("bogus.key = 1\n")),
                         doctest::Contains("unknown config key"), Error);
    CHECK_THROWS_AS(pipeline_from_config(KeyValueConfig::parse("design.rule = mixed\n")), Error);
    CHECK_THROWS_AS(pipeline_from_config(KeyValueConfig::parse("design.rule = mixed\ndesign.regime = noisefree\n"
                                                               "disturbance.delta = 0.1\n")),
                    Error);
    CHECK_THROWS_AS(pipeline_from_config(KeyValueConfig::parse("design.rule = nope\n")), Error);

    const auto a = pipeline_from_config(KeyValueConfig::parse("seed = 5\n"));
    const auto b = pipeline_from_config(KeyValueConfig::parse("seed = 9\n"), 5);
    CHECK(a.sim.x0 == b.sim.x0);
    CHECK(a.experiment.seed == b.experiment.seed);
}

TEST_CASE("seed splitting gives distinct stage seeds") {
    const auto s = split_seed(3);
    CHECK(s.experiment != s.offline_disturbance);
    CHECK(s.online_disturbance != s.initial_state);
    CHECK(s.verification != s.experiment);
    CHECK(split_seed(3).experiment == s.experiment);
    CHECK(split_seed(4).experiment != s.experiment);
}

TEST_CASE("rule catalogue") {
    CHECK(all_rule_names().size() == 11);
    CHECK(regime_of_rule("lyap-threshold") == Regime::NoiseFree);
    CHECK(regime_of_rule("combined") == Regime::Robust);
    CHECK_THROWS_AS(regime_of_rule("periodic"), Error);
}

TEST_CASE("dataset csv round trip is bit exact") {
    const auto& ex = example(2);
    std::stringstream ss;
    write_dataset_csv(ss, ex.dm);
    const DataMatrices back = read_dataset_csv(ss);
    CHECK(back.U0 == ex.dm.U0);
    CHECK(back.X0 == ex.dm.X0);
    CHECK(back.X1 == ex.dm.X1);
    CHECK(back.Ts == ex.dm.Ts);
    CHECK(back.mode == ex.dm.mode);

    std::stringstream bad("# ddetc dataset\nk,u0_1\n0,abc\n");
    CHECK_THROWS_AS(read_dataset_csv(bad), Error);
    CHECK_THROWS_AS(load_dataset("/nonexistent/dataset.csv"), IoError);
}

TEST_CASE("every rule designs, verifies and survives a json round trip") {
    for (const auto& name : all_rule_names()) {
        CAPTURE(name);
        const auto& ex = example(regime_of_rule(name) == Regime::NoiseFree ? 1 : 2);
        DesignReport rep = ex.base;
        rep.params = ex.cfg.rule;
        rep.params.name = name;
        rep.rule = design_rule(rep.params, rep.cd, ex.dm, rep.model);
        CHECK(rep.rule.miet_bound > 0.0);
        CHECK(rule_name(rep.rule.spec) == name);

        const VerifyReport v = cmd_verify(rep, ex.dm, rep.model);
        if (!v.pass()) v.print(std::cout);
        CHECK(v.pass());

        const std::string json = design_report_json(rep);
        const DesignReport back = parse_design_report(json);
        CHECK(design_report_json(back) == json);
        CHECK(back.cd.K == rep.cd.K);
        CHECK(back.rule.miet_bound == rep.rule.miet_bound);
        CHECK(cmd_verify(back, ex.dm, back.model).pass());
    }
    CHECK_THROWS_WITH_AS(parse_design_report("{\"format\": 3}"), doctest::Contains("design report"), Error);
    CHECK_THROWS_WITH_AS(parse_design_report("{oops"), doctest::Contains("malformed design report"), Error);
}

TEST_CASE("verification catches a tampered gain") {
    const auto& ex = example(1);
    DesignReport rep = ex.base;
    rep.cd.K(0, 0) += 1e-3;
    const VerifyReport v = cmd_verify(rep, ex.dm, rep.model);
    CHECK_FALSE(v.pass());
    bool closure_failed = false;
    for (const auto& c : v.checks)
        if (c.name == "closure.K" && !c.pass) closure_failed = true;
    CHECK(closure_failed);
}

TEST_CASE("large disturbance level reports infeasibility") {
    PipelineConfig cfg = example_pipeline(2, kDefaultExampleSeed);
    cfg.delta = 50.0;
    const DataMatrices dm = cmd_acquire(cfg);
    try {
        cmd_design(cfg, dm);
        FAIL("expected an infeasible design");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("robust SDP infeasible") != std::string::npos);
        CHECK(is_infeasibility(e.what()));
    }
    CHECK_FALSE(is_infeasibility("cannot open config"));
}

TEST_CASE("reproduce writes identical artifacts for the same seed") {
    const fs::path a = fresh_dir("repro_a"), b = fresh_dir("repro_b");
    const auto ra = cmd_reproduce(2, kDefaultExampleSeed, a.string());
    const auto rb = cmd_reproduce(2, kDefaultExampleSeed, b.string());
    CHECK(ra.verify.pass());
    CHECK(ra.min_inter_event >= ra.design.rule.miet_bound - 1e-8);
    for (const char* f : {"dataset.csv", "design.json", "trajectory.csv", "events.csv", "verify.txt"}) {
        CAPTURE(f);
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    const DataMatrices dm = load_dataset((a / "dataset.csv").string());
    CHECK(dm.X1 == ra.dm.X1);
    const DesignReport d = load_design((a / "design.json").string());
    CHECK(d.cd.K == ra.design.cd.K);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("simulation settings follow the design") {
    const auto& ex = example(1);
    const SimConfig s = sim_config_for(ex.cfg, ex.base);
    CHECK(s.h == 1e-4);
    CHECK(s.S == ex.base.cd.S);
    const SimResult r = cmd_simulate(ex.cfg, ex.base);
    CHECK(r.event_times.size() >= 2);
}
