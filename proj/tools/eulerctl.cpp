//==============================================================================
// eulerctl — reproducible experiment runner for the spectral Euler control
// toolkit.  Subcommands: simulate | saturate | synthesize | pressure | verify,
// each taking --config <path> and --out <dir>, with --override key=value for
// sweeps.  Exit codes: 0 pass, 1 assertion failure, 2 config error,
// 3 numerical guard tripped.
//==============================================================================
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "eulerctl/experiment.hpp"

namespace {

struct Args {
    std::string config;
    std::string out = "out";
    std::vector<std::string> overrides;
};

int run_kind(const std::string& kind, const Args& args) {
    using namespace eulerctl;
    try {
        TomlTable table = args.config.empty() ? TomlTable{} : parse_toml_file(args.config);
        for (const auto& ov : args.overrides) apply_override(table, ov);
        const ExperimentConfig cfg = load_experiment_config(table, kind, args.out);
        const RunResult res = run(cfg);
        for (const auto& f : res.failures) std::fprintf(stderr, "ASSERT FAILED: %s\n", f.c_str());
        if (res.exit_code == 0)
            std::printf("ok: %s -> %s\n", kind.c_str(), args.out.c_str());
        else
            std::printf("failed (%d): %s -> %s\n", res.exit_code, kind.c_str(),
                        args.out.c_str());
        return res.exit_code;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral-Galerkin simulator and control synthesis for 3D Euler on the torus"};
    app.require_subcommand(1);

    int exit_code = 0;
    for (const std::string kind : {"simulate", "saturate", "synthesize", "pressure", "verify"}) {
        auto args = std::make_shared<Args>();
        CLI::App* sub = app.add_subcommand(kind, kind + std::string(" experiment"));
        sub->add_option("--config", args->config, "TOML config file");
        sub->add_option("--out", args->out, "output directory");
        sub->add_option("--override", args->overrides, "section.key=value override")
            ->take_all();
        sub->callback([kind, args, &exit_code] { exit_code = run_kind(kind, *args); });
    }

    CLI11_PARSE(app, argc, argv);
    return exit_code;
}
