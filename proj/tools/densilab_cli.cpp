#include <iostream>

#include <CLI11.hpp>

#include <densilab/runner.hpp>

int main(int argc, char** argv) {
    CLI::App app{"densilab: weighted densities, dyadic sequences, and the counterexample shift"};
    app.require_subcommand(1);

    densilab::RunConfig cfg;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", cfg.out, "output artifact path");
        sub->add_option("--format", cfg.format, "artifact format: csv or json");
    };

    auto* density = app.add_subcommand("density", "density scan of a set under a weight family");
    density->add_option("--set", cfg.set, "naturals|multiples:m|squares|powers2|blocks4|nk:identity|nk:tower:s");
    density->add_option("--family", cfg.family, "cesaro|C:r|A:r|B:r|Btilde:s");
    density->add_option("--horizon", cfg.horizon, "scan horizon (terms for nk:* sets)");
    add_common(density);

    auto* sequence = app.add_subcommand("sequence", "emit (k, delta_k, n_k)");
    sequence->add_option("--f", cfg.f, "identity|tower:s");
    sequence->add_option("--kmax", cfg.kmax, "number of terms");
    add_common(sequence);

    auto* verify = app.add_subcommand("verify", "closed form vs recursion oracle");
    verify->add_option("--closed-form", cfg.closed_form, "identity|general");
    verify->add_option("--f", cfg.f, "identity|tower:s");
    verify->add_option("--kmax", cfg.kmax, "scan bound");
    add_common(verify);

    auto* separation = app.add_subcommand("separation", "n_j - n_i >= f(delta_i) + f(delta_j)");
    separation->add_option("--f", cfg.f, "identity|tower:s");
    separation->add_option("--kmax", cfg.kmax, "scan bound");
    add_common(separation);

    auto* regularity = app.add_subcommand("regularity", "Toeplitz condition report");
    regularity->add_option("--family", cfg.family, "cesaro|C:r|A:r|B:r|Btilde:s");
    regularity->add_option("--horizon", cfg.horizon, "matrix row");
    add_common(regularity);

    auto* shift_build = app.add_subcommand("shift-build", "derive/validate shift parameters");
    shift_build->add_option("--params", cfg.params, "default or a JSON parameter file");
    shift_build->add_option("--horizon", cfg.horizon, "horizon stored in the parameter file");
    add_common(shift_build);

    auto* shift_check = app.add_subcommand("shift-check", "characterization conditions (a)-(d)");
    shift_check->add_option("--params", cfg.params, "default or a JSON parameter file");
    shift_check->add_option("--horizon", cfg.horizon, "check horizon");
    shift_check->add_option("--pmax", cfg.pmax, "largest class checked");
    add_common(shift_check);

    auto* fp_decay = app.add_subcommand("fp-decay", "F_p density decay: analytic tail + proxy");
    fp_decay->add_option("--params", cfg.params, "default or a JSON parameter file");
    fp_decay->add_option("--r", cfg.r, "A(r) exponent, 0 < r < 1");
    fp_decay->add_option("--horizon", cfg.horizon, "empirical scan horizon");
    fp_decay->add_option("--pmax", cfg.pmax, "largest p for the empirical proxy");
    add_common(fp_decay);

    auto* exp = app.add_subcommand("export", "write the standard artifact bundle");
    exp->add_option("--out", cfg.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    cfg.command = app.get_subcommands().front()->get_name();
    try {
        return densilab::run_command(cfg, std::cerr);
    } catch (const densilab::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
