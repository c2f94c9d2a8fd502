// quanto: estimation, pricing and experiment driver.
//
//   quanto estimate   --config run.cfg [--seed N] [--out DIR] [--families ttn,ign]
//   quanto price      --config run.cfg --draws out/draws_ttn.csv [--paths N] [--mode static]
//   quanto experiment --config run.cfg
//   quanto diagnose   --draws out/draws_ttn.csv [--out DIR]
//
// Exit status: 0 success, 1 invalid input or configuration, 2 runtime failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "quanto/cli/commands.hpp"
#include "quanto/cli/config.hpp"

namespace {

std::string label_from_draws(const std::filesystem::path& draws) {
    auto stem = draws.stem().string();
    return stem.starts_with("draws_") ? stem.substr(6) : stem;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian estimation and posterior-predictive pricing of quanto options"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string families;
    std::optional<std::size_t> paths;
    std::string mode;
    std::string draws_path;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", config_path, "configuration file");
        if (needs_config) {
            c->required()->check(CLI::ExistingFile);
        }
        sub->add_option("--seed", seed, "master seed (overrides the config)");
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        sub->add_option("--families", families, "comma-separated list of ttn,tnn,ign,mnc,mle");
        sub->add_option("--paths", paths, "posterior draws used per price");
        sub->add_option("--mode", mode, "static or sequential")
            ->check(CLI::IsMember({"static", "sequential"}));
    };

    auto* estimate = app.add_subcommand("estimate", "posterior summaries and draws files");
    add_common(estimate, true);
    auto* price = app.add_subcommand("price", "price the option chain from a draws file");
    add_common(price, true);
    price->add_option("--draws", draws_path, "draws file from 'estimate'")->required();
    auto* experiment = app.add_subcommand("experiment", "full FX x window x family grid");
    add_common(experiment, true);
    auto* diagnose = app.add_subcommand("diagnose", "chain summary of a draws file");
    diagnose->add_option("--draws", draws_path, "draws file")->required();
    diagnose->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    using namespace quanto::cli;
    try {
        CommandOutcome outcome;
        if (diagnose->parsed()) {
            const std::filesystem::path out = out_dir.empty() ? "." : out_dir;
            outcome = cmd_diagnose(draws_path, out, label_from_draws(draws_path));
        } else {
            auto cfg = load_config(config_path);
            if (seed) {
                cfg.seed = *seed;
            }
            if (!out_dir.empty()) {
                cfg.out_dir = out_dir;
            }
            if (!families.empty()) {
                cfg.families = parse_family_list(families);
            }
            if (paths) {
                cfg.n_paths = *paths;
            }
            if (!mode.empty()) {
                cfg.mode = quanto::pricing_mode_from_string(mode);
            }
            if (estimate->parsed()) {
                outcome = cmd_estimate(cfg);
            } else if (price->parsed()) {
                outcome = cmd_price(cfg, draws_path, label_from_draws(draws_path));
            } else {
                outcome = cmd_experiment(cfg);
            }
        }
        for (const auto& w : outcome.warnings) {
            std::cerr << "warning: " << w << '\n';
        }
        for (const auto& f : outcome.files) {
            std::cout << f.generic_string() << '\n';
        }
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
