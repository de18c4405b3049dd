#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "graphflow/cli_io.hpp"
#include "graphflow/errors.hpp"

namespace {

int load_config(const std::string& path, graphflow::RunConfig& cfg) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "cannot read config file '" << path << "'\n";
        return 2;
    }
    std::ostringstream text;
    text << in.rdbuf();
    try {
        cfg = graphflow::parse_config(text.str());
    } catch (const graphflow::ConfigError& e) {
        std::cerr << "config file '" << path << "' is invalid:\n";
        for (const std::string& v : e.violations())
            std::cerr << "  - " << v << "\n";
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mean curvature flow of map graphs between model surfaces"};
    app.set_version_flag("--version", graphflow::version_string());
    app.footer("The environment variable GRAPHFLOW_WORKERS caps the number "
               "of worker threads (default: hardware concurrency).");

    bool emit_default = false;
    app.add_flag("--emit-default-config", emit_default,
                 "print the default configuration and exit");

    std::string run_path, hyp_path, oracle_path;
    CLI::App* run = app.add_subcommand(
        "run", "flow a configured map and write series, plot, and verdict "
               "files");
    run->add_option("config", run_path, "path to a key = value config file")
        ->required();
    CLI::App* hyp = app.add_subcommand(
        "check-hypotheses",
        "evaluate the curvature inequality chain for the configured spaces");
    hyp->add_option("config", hyp_path, "path to a key = value config file")
        ->required();
    CLI::App* oracle = app.add_subcommand(
        "oracle", "run the reduced rotationally symmetric solver");
    oracle
        ->add_option("config", oracle_path,
                     "path to a key = value config file")
        ->required();

    CLI11_PARSE(app, argc, argv);

    if (emit_default) {
        std::cout << graphflow::emit_config(graphflow::default_config());
        return 0;
    }
    if (!run->parsed() && !hyp->parsed() && !oracle->parsed()) {
        std::cerr << app.help();
        return 2;
    }

    const std::string& path =
        run->parsed() ? run_path : hyp->parsed() ? hyp_path : oracle_path;
    graphflow::RunConfig cfg;
    if (int rc = load_config(path, cfg); rc != 0) return rc;

    try {
        if (run->parsed()) return graphflow::orchestrate(cfg, std::cout);
        if (hyp->parsed())
            return graphflow::run_hypothesis_check(cfg, std::cout);
        return graphflow::run_oracle(cfg, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
