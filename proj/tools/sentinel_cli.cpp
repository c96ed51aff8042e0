#include <sentinel/pipeline.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Reconstruction-error misbehaviour prediction on synthetic drives"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::uint64_t seed = 0;
    double epsilon = 0.0;
    std::size_t ar_k = 0;
    std::vector<std::size_t> reaction_r;
    std::vector<double> thresholds;

    app.add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed, "global seed");
    auto* eps_opt = app.add_option("--epsilon", epsilon, "tail probability for the threshold");
    auto* ar_opt = app.add_option("--ar-k", ar_k, "AR smoothing order");
    auto* r_opt = app.add_option("--reaction-r", reaction_r, "reaction periods to sweep")->delimiter(',');
    auto* th_opt = app.add_option("--thresholds", thresholds, "explicit threshold grid")->delimiter(',');

    for (const char* name : {"simulate", "train", "fit", "detect", "label", "eval", "pipeline"})
        app.add_subcommand(name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    sentinel::Overrides ov;
    if (*seed_opt)
        ov.seed = seed;
    if (*eps_opt)
        ov.epsilon = epsilon;
    if (*ar_opt)
        ov.ar_k = ar_k;
    if (*r_opt)
        ov.reaction_r = reaction_r;
    if (*th_opt)
        ov.thresholds = thresholds;

    const auto command = app.get_subcommands().front()->get_name();
    try {
        const auto cfg = sentinel::load_config(config_path, ov);
        if (command == "simulate")
            sentinel::cmd_simulate(cfg);
        else if (command == "train")
            sentinel::cmd_train(cfg);
        else if (command == "fit")
            sentinel::cmd_fit(cfg);
        else if (command == "detect")
            sentinel::cmd_detect(cfg, ov);
        else if (command == "label")
            sentinel::cmd_label(cfg);
        else if (command == "eval")
            sentinel::cmd_eval(cfg, ov);
        else
            sentinel::cmd_pipeline(cfg, ov);
    } catch (const sentinel::NumericalError& e) {
        std::cerr << "sentinel " << command << ": numerical error: " << e.what() << "\n";
        return 3;
    } catch (const sentinel::FormatError& e) {
        std::cerr << "sentinel " << command << ": " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "sentinel " << command << ": " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "sentinel " << command << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "sentinel " << command << ": " << e.what() << "\n";
        return 1;
    }
    return 0;
}
