#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "flab/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"flab: discretized sum-product and Furstenberg experiments"};
    app.require_subcommand(1);
    std::string config_path, delta_list, out;
    std::optional<uint64_t> seed;
    for (const char* name : {"sumproduct", "furstenberg", "certificate", "projective"}) {
        CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
        sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--delta", delta_list, "comma-separated scales, e.g. 2^-10,2^-12");
        sub->add_option("--seed", seed, "64-bit generator seed");
        sub->add_option("--out", out, "output prefix for <prefix>.csv and <prefix>.report.json");
    }
    CLI11_PARSE(app, argc, argv);
    try {
        flab::ExperimentConfig cfg;
        if (!config_path.empty()) cfg = flab::load_config(config_path);
        cfg.experiment = app.get_subcommands().front()->get_name();
        if (!delta_list.empty()) cfg.delta_exps = flab::parse_delta_list(delta_list);
        if (seed) cfg.seed = *seed;
        if (!out.empty()) cfg.output = out;
        flab::validate_config(cfg);
        flab::ExperimentReport r = flab::run_experiment(cfg);
        flab::write_outputs(r, cfg.output);
        flab::write_csv(std::cout, r);
        for (const auto& f : r.fits)
            std::cout << "fit " << f.series << ": slope " << f.slope << " residual " << f.residual << "\n";
        for (const auto& f : r.failures) std::cerr << "failure: " << f << "\n";
        return r.failures.empty() ? 0 : 2;
    } catch (const flab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
