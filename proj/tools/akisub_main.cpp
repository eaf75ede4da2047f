// Command-line front end for the pipeline stages.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "akisub/error.hpp"
#include "akisub/pipeline/config.hpp"
#include "akisub/pipeline/stages.hpp"

namespace {

int fail(const akisub::Error& e) {
    std::cerr << "error: " << akisub::category_name(e.category()) << ": " << e.what() << '\n';
    return akisub::exit_code(e.category());
}

}  // namespace

int main(int argc, char** argv) {
    using namespace akisub;
    CLI::App app{"AKI sub-phenotyping pipeline"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::optional<int> t1;
    bool force = false;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "master seed (overrides the config)");
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    app.add_option("--t1", t1, "observation window in hours")->check(CLI::IsMember({24, 48}));
    app.add_flag("--force", force, "rerun even when the manifest is current");

    std::vector<std::string> names = pipeline::stage_names();
    names.push_back("all");
    for (const auto& n : names) app.add_subcommand(n, n == "all" ? "run every stage in order" : "run the " + n + " stage");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(ArgumentError(e.what()));
    }

    try {
        pipeline::RunConfig config = config_path.empty() ? pipeline::RunConfig{} : pipeline::load_config(config_path);
        if (seed) pipeline::apply_seed(config, *seed);
        if (!out_dir.empty()) config.output_dir = out_dir;
        if (t1) pipeline::apply_t1(config, *t1);
        pipeline::validate(config);
        const std::string stage = app.get_subcommands().front()->get_name();
        if (stage == "all") {
            pipeline::run_all(config, &std::cout, force);
        } else {
            pipeline::run_stage(stage, config, &std::cout, force);
        }
    } catch (const Error& e) {
        return fail(e);
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
