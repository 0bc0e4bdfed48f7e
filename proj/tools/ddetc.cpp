// Command-line front end: acquire, design, simulate, verify, reproduce.

#include "ddetc/pipeline.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

using namespace ddetc;
namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    int jobs = 1;
    std::string dataset;
    std::string design;
    std::vector<int> examples;
};

PipelineConfig load_pipeline(const Options& o) {
    KeyValueConfig kv;
    if (!o.config.empty()) {
        if (!fs::exists(o.config)) throw IoError("cannot open config '" + o.config + "'");
        kv = KeyValueConfig::load(o.config);
    }
    PipelineConfig cfg = pipeline_from_config(kv, o.seed);
    if (o.out) cfg.out_dir = *o.out;
    return cfg;
}

std::string in_out(const PipelineConfig& cfg, const std::string& given, const char* file) {
    if (!given.empty()) return given;
    return (fs::path(cfg.out_dir.empty() ? "." : cfg.out_dir) / file).string();
}

void print_sim_summary(const SimResult& r, const DesignReport& d) {
    const double mie = r.event_times.size() >= 2 ? min_inter_event(r) : 0.0;
    std::cout << "rule " << d.params.name << ": events=" << r.event_times.size() << " min_inter_event=" << mie
              << " bound(" << d.rule.bound_name << ")=" << d.rule.miet_bound << " eta_clips=" << r.eta_clips
              << "\n";
}

int run_acquire(const Options& o) {
    PipelineConfig cfg = load_pipeline(o);
    if (cfg.out_dir.empty()) cfg.out_dir = ".";
    const DataMatrices dm = cmd_acquire(cfg);
    const RichnessReport rich = check_richness(dm);
    std::cout << "acquired T=" << dm.T() << " samples, rank " << rich.rank << "/" << rich.required_rank << " -> "
              << (fs::path(cfg.out_dir) / "dataset.csv").string() << "\n";
    return kExitOk;
}

int run_design(const Options& o) {
    PipelineConfig cfg = load_pipeline(o);
    const DataMatrices dm = load_dataset(in_out(cfg, o.dataset, "dataset.csv"));
    if (cfg.out_dir.empty()) cfg.out_dir = ".";
    const DesignReport d = cmd_design(cfg, dm);
    std::cout << "designed " << d.params.name << " (" << to_string(d.cd.regime) << "): sigma=" << d.rule.result.sigma
              << " " << d.rule.bound_name << "=" << d.rule.miet_bound << " -> "
              << (fs::path(cfg.out_dir) / "design.json").string() << "\n";
    return kExitOk;
}

int run_simulate(const Options& o) {
    PipelineConfig cfg = load_pipeline(o);
    const DesignReport d = load_design(in_out(cfg, o.design, "design.json"));
    if (d.params.name != cfg.rule.name) cfg.rule = d.params;
    if (cfg.out_dir.empty()) cfg.out_dir = ".";
    const SimResult r = cmd_simulate(cfg, d);
    print_sim_summary(r, d);
    return kExitOk;
}

int run_verify(const Options& o) {
    PipelineConfig cfg = load_pipeline(o);
    const DesignReport d = load_design(in_out(cfg, o.design, "design.json"));
    const DataMatrices dm = load_dataset(in_out(cfg, o.dataset, "dataset.csv"));
    const VerifyReport v = cmd_verify(d, dm, d.model, cfg.verify_draws, split_seed(cfg.seed).verification);
    v.print(std::cout);
    if (!cfg.out_dir.empty()) {
        fs::create_directories(cfg.out_dir);
        std::ofstream out(fs::path(cfg.out_dir) / "verify.txt");
        if (!out) throw IoError("cannot write verify.txt");
        v.print(out);
    }
    return v.pass() ? kExitOk : kExitVerification;
}

int run_reproduce(const Options& o) {
    std::vector<int> examples = o.examples.empty() ? std::vector<int>{1, 2, 3} : o.examples;
    const std::uint64_t seed = o.seed.value_or(kDefaultExampleSeed);
    const std::string root = o.out.value_or("out");
    const bool nested = examples.size() > 1;

    std::vector<std::string> reports(examples.size());
    std::vector<int> codes(examples.size(), kExitOk);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < examples.size();) {
            std::ostringstream os;
            const int k = examples[i];
            const std::string dir = nested ? (fs::path(root) / ("example" + std::to_string(k))).string() : root;
            os << "== example " << k << " (seed " << seed << ") -> " << dir << "\n";
            try {
                const ReproduceResult r = cmd_reproduce(k, seed, dir);
                os << "sigma=" << r.design.rule.result.sigma << " " << r.design.rule.bound_name << "="
                   << r.design.rule.miet_bound << " events=" << r.sim.event_times.size()
                   << " min_inter_event=" << r.min_inter_event << "\n";
                r.verify.print(os);
                codes[i] = r.verify.pass() ? kExitOk : kExitVerification;
            } catch (const IoError& e) {
                os << "status=io_error reason=\"" << e.what() << "\"\n";
                codes[i] = kExitIo;
            } catch (const std::exception& e) {
                os << "status=" << (is_infeasibility(e.what()) ? "infeasible" : "error") << " reason=\"" << e.what()
                   << "\"\n";
                codes[i] = is_infeasibility(e.what()) ? kExitInfeasible : 1;
            }
            reports[i] = os.str();
        }
    };
    const int jobs = std::clamp(o.jobs, 1, static_cast<int>(examples.size()));
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (const auto& r : reports) std::cout << r;
    return *std::max_element(codes.begin(), codes.end());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Data-driven event-triggered control: acquisition, synthesis, simulation and verification"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "Configuration file (key = value lines)");
        sub->add_option("--seed", o.seed, "Root seed; overrides the config");
        sub->add_option("--out", o.out, "Output directory");
        sub->add_option("--jobs", o.jobs, "Worker threads for independent runs")->check(CLI::PositiveNumber);
    };

    auto* acquire = app.add_subcommand("acquire", "Run the open-loop experiment and write dataset.csv");
    common(acquire);
    auto* design = app.add_subcommand("design", "Design controller and triggering rule; write design.json");
    common(design);
    design->add_option("--dataset", o.dataset, "Dataset CSV (default <out>/dataset.csv)");
    auto* simulate = app.add_subcommand("simulate", "Simulate the closed loop; write trajectory.csv and events.csv");
    common(simulate);
    simulate->add_option("--design", o.design, "Design report (default <out>/design.json)");
    auto* verify = app.add_subcommand("verify", "Re-check every certificate of a design against its dataset");
    common(verify);
    verify->add_option("--design", o.design, "Design report (default <out>/design.json)");
    verify->add_option("--dataset", o.dataset, "Dataset CSV (default <out>/dataset.csv)");
    auto* reproduce = app.add_subcommand("reproduce", "Run the full pipeline for the examples");
    common(reproduce);
    reproduce->add_option("--example", o.examples, "Example numbers (1, 2, 3); all when omitted")
        ->check(CLI::Range(1, 3));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*acquire) return run_acquire(o);
        if (*design) return run_design(o);
        if (*simulate) return run_simulate(o);
        if (*verify) return run_verify(o);
        if (*reproduce) return run_reproduce(o);
    } catch (const IoError& e) {
        std::cerr << "status=io_error reason=\"" << e.what() << "\"\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "status=io_error reason=\"" << e.what() << "\"\n";
        return kExitIo;
    } catch (const std::exception& e) {
        const bool infeasible = is_infeasibility(e.what());
        std::cerr << "status=" << (infeasible ? "infeasible" : "error") << " reason=\"" << e.what() << "\"\n";
        return infeasible ? kExitInfeasible : 1;
    }
    return 1;
}
