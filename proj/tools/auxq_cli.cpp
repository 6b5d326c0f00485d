#include "auxq/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace auxq;

namespace {

struct Flags {
    int N = 3, k = 1, M = 3, samples = 5, steps = 100, every = 20, sector = 0;
    std::string xi, zeta, lambda, convention, gradation, emit, out, config, check, report_case, gens;
    std::vector<std::string> z;
    std::uint64_t seed = 1;
    double tol = 1e-8, step_scale = 0.05;
};

void add_common(CLI::App* app, Flags& f) {
    app->add_option("--N", f.N, "order of the root of unity");
    app->add_option("--k", f.k, "q = exp(2 pi i k / N)");
    app->add_option("--M", f.M, "chain length");
    app->add_option("--xi", f.xi, "re,im");
    app->add_option("--zeta", f.zeta, "re,im");
    app->add_option("--lambda", f.lambda, "re,im");
    app->add_option("--z", f.z, "spectral parameter re,im (repeatable)");
    app->add_option("--samples", f.samples, "number of drawn z samples");
    app->add_option("--seed", f.seed);
    app->add_option("--tol", f.tol);
    app->add_option("--convention", f.convention)->check(CLI::IsMember({"phodd", "phiev", "phab"}));
    app->add_option("--gradation", f.gradation)->check(CLI::IsMember({"hom", "prin"}));
    app->add_option("--emit", f.emit)->check(CLI::IsMember({"json", "csv"}));
    app->add_option("--out", f.out, "output path, stdout if absent");
    app->add_option("--config", f.config, "JSON file mirroring the flags");
    app->add_option("--sector", f.sector, "2 S^z");
}

// file first, then every flag that was given
ScenarioConfig to_config(const std::string& command, CLI::App* app, const Flags& f) {
    ScenarioConfig c;
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        if (!in) throw Error("ConfigInvalid", "cannot open " + f.config);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw Error("ConfigInvalid", std::string("config file: ") + e.what());
        }
        apply_json(c, j);
    }
    c.command = command;
    auto given = [&](const char* name) { return app->count(name) > 0; };
    if (given("--N")) c.N = f.N;
    if (given("--k")) c.k = f.k;
    if (given("--M")) c.M = f.M;
    if (given("--xi")) c.xi = parse_complex(f.xi);
    if (given("--zeta")) c.zeta = parse_complex(f.zeta);
    if (given("--lambda")) c.lambda = parse_complex(f.lambda);
    if (given("--z")) {
        c.z.clear();
        for (auto& s : f.z) c.z.push_back(parse_complex(s));
    }
    if (given("--samples")) c.samples = f.samples;
    if (given("--seed")) c.seed = f.seed;
    if (given("--tol")) c.tol = f.tol;
    if (given("--convention")) c.convention = parse_convention(f.convention);
    if (given("--gradation")) c.gradation = f.gradation == "hom" ? Gradation::homogeneous : Gradation::principal;
    if (given("--emit")) c.emit = f.emit;
    if (given("--out")) c.out = f.out;
    if (given("--sector")) c.sector = f.sector;
    if (command == "verify" && given("--check")) c.check = f.check;
    if (command == "report" && given("--case")) c.report_case = f.report_case;
    if (command == "orbit") {
        if (given("--steps")) c.steps = f.steps;
        if (given("--every")) c.every = f.every;
        if (given("--gens")) c.gens = f.gens;
        if (given("--step-scale")) c.step_scale = f.step_scale;
    }
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"auxq: Q-operators for six-vertex chains at q^N = 1"};
    app.require_subcommand(1);
    Flags f;
    auto* verify = app.add_subcommand("verify", "residual checks");
    verify->add_option("--check", f.check)->check(CLI::IsMember({"tq", "intertwine", "ybe", "laws", "exact", "commute", "rst"}));
    auto* spectrum = app.add_subcommand("spectrum", "T and Q eigenvalues on the T eigenbasis");
    auto* bethe = app.add_subcommand("bethe", "Q eigenvalue curves, strings and Bethe roots");
    auto* orbit = app.add_subcommand("orbit", "quantum coadjoint orbit");
    orbit->add_option("--steps", f.steps);
    orbit->add_option("--every", f.every, "commutator sampling period");
    orbit->add_option("--gens", f.gens, "generator word in e, f");
    orbit->add_option("--step-scale", f.step_scale);
    auto* report = app.add_subcommand("report", "golden tables for N = 3, M = 3 or 4");
    report->add_option("--case", f.report_case)->check(CLI::IsMember({"m3", "m4"}));
    for (auto* s : {verify, spectrum, bethe, orbit, report}) add_common(s, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    CLI::App* sub = app.get_subcommands().front();
    ScenarioConfig cfg;
    cfg.command = sub->get_name();
    json result;
    int rc = 0;
    try {
        cfg = to_config(sub->get_name(), sub, f);
        result = run_scenario(cfg);
        rc = result["pass"].get<bool>() ? 0 : 1;
    } catch (const Error& e) {
        result = error_report(cfg, e);
        rc = exit_code_for(e);
    }
    std::ofstream file;
    if (!cfg.out.empty()) {
        file.open(cfg.out);
        if (!file) {
            std::cerr << "cannot write " << cfg.out << "\n";
            return 2;
        }
    }
    std::ostream& os = cfg.out.empty() ? std::cout : file;
    if (cfg.emit == "csv") write_csv(os, result);
    else os << result.dump(2) << "\n";
    if (rc != 0 && result.contains("error")) std::cerr << result["error"]["what"].get<std::string>() << "\n";
    return rc;
}
