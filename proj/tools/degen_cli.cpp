// Command-line front end: classify, run, sweep, dump-matrix.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "degen/error.hpp"
#include "degen/pipeline.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kAssertionFailure = 1;
constexpr int kConfigError = 2;

struct Common {
    std::string scenario;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 1;
    std::string tol_overrides;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--scenario", c.scenario, "scenario file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option_function<std::uint64_t>(
        "--seed",
        [&c](const std::uint64_t& s) {
            c.seed = s;
            c.seed_given = true;
        },
        "random seed, overrides the scenario");
    cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--tol-overrides", c.tol_overrides, "YAML map of tolerance overrides")->check(CLI::ExistingFile);
}

degen::RunOptions options_from(const Common& c) {
    degen::RunOptions o;
    if (!c.out.empty()) o.out_dir = c.out;
    if (c.seed_given) o.seed = c.seed;
    o.threads = c.threads;
    if (!c.tol_overrides.empty()) o.tol.override_from(c.tol_overrides);
    return o;
}

void print_summary(const degen::Json& report) {
    const auto& a = report["analyses"];
    if (a.contains("classify")) {
        const auto& c = a["classify"];
        if (c["status"] == "ok")
            std::cout << "case " << c["report"]["case"].get<std::string>() << ", unique submarkovian "
                      << (c["report"]["unique_submarkovian"].get<bool>() ? "yes" : "no") << '\n';
        else
            std::cout << "classify: " << c["error"].get<std::string>() << '\n';
    }
    for (const auto& [name, v] : a.items())
        if (name != "classify" && v.contains("error")) std::cout << name << ": " << v["error"].get<std::string>() << '\n';
    int failed = 0;
    for (const auto& as : report["assertions"])
        if (!as["pass"].get<bool>()) {
            ++failed;
            std::cout << "FAIL " << as["analysis"].get<std::string>() << '/' << as["name"].get<std::string>()
                      << " value=" << as["value"] << " tol=" << as["tolerance"] << '\n';
        }
    std::cout << report["assertions"].size() - failed << '/' << report["assertions"].size() << " assertions pass\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Degenerate diffusion operator toolkit"};
    app.require_subcommand(1);
    Common common;
    auto* classify = app.add_subcommand("classify", "classify the scenario coefficient");
    auto* run = app.add_subcommand("run", "run every requested analysis");
    auto* sweep = app.add_subcommand("sweep", "evaluate the scenario's parameter grid");
    auto* dump = app.add_subcommand("dump-matrix", "write the assembled operator in coordinate format");
    for (auto* cmd : {classify, run, sweep, dump}) add_common(cmd, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kPass : kConfigError;
    }

    try {
        degen::RunOptions opt = options_from(common);
        degen::Scenario sc = degen::load_scenario(common.scenario);
        if (*classify || *run) {
            degen::RunOutcome out = *classify ? degen::classify_only(sc, opt) : degen::run(sc, opt);
            if (!opt.out_dir) std::cout << out.report.dump(2) << '\n';
            print_summary(out.report);
            return out.passed ? kPass : kAssertionFailure;
        }
        if (*sweep) {
            if (!sc.sweep.present) throw degen::Error(degen::ErrorKind::config, "scenario has no sweep block");
            auto rows = degen::sweep(sc, opt);
            if (opt.out_dir) {
                std::filesystem::create_directories(*opt.out_dir);
                std::ofstream f(*opt.out_dir / "sweep.csv");
                degen::write_sweep_csv(rows, f);
            } else {
                degen::write_sweep_csv(rows, std::cout);
            }
            return kPass;
        }
        if (opt.out_dir) {
            std::filesystem::create_directories(*opt.out_dir);
            std::ofstream f(*opt.out_dir / "matrix.mtx");
            degen::dump_matrix(sc, f);
        } else {
            degen::dump_matrix(sc, std::cout);
        }
        return kPass;
    } catch (const degen::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == degen::ErrorKind::config ? kConfigError : kAssertionFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kAssertionFailure;
    }
}
