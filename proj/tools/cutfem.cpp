// Experiment runner: cutfem run <case> [options]
#include "cutfem/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Cut finite element experiments with discrete extension"};
    app.require_subcommand(1);
    auto* run = app.add_subcommand("run", "run a built-in convergence study");
    // options live on the top level so a flat config file can set them; they may follow the case name
    run->fallthrough();
    run->footer("Study options (--levels, --beta, --config, ...) are listed by cutfem --help and may follow the case.");

    std::string name;
    int levels = 0;
    double beta = 0.0, gamma = 0.0, eps = 0.0;
    int order = 0, depth = 0;
    bool check = false;
    std::string out = "out";

    run->add_option("case", name, "case name")->required()->check(CLI::IsMember(cutfem::study_names()));
    auto* o_levels = app.add_option("--levels", levels, "number of levels");
    auto* o_beta = app.add_option("--beta", beta, "Nitsche penalty");
    auto* o_gamma = app.add_option("--gamma", gamma, "secondary penalty");
    auto* o_order = app.add_option("--order", order, "polynomial order");
    auto* o_depth = app.add_option("--depth", depth, "quadtree depth for curved cut cells");
    auto* o_eps = app.add_option("--eps", eps, "smallest sliver offset");
    app.add_flag("--check", check, "exit 2 when an acceptance threshold fails");
    app.add_option("--out", out, "output directory");
    app.set_config("--config", "", "flat key = value file with the same keys", false);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return 1;
    }

    cutfem::StudyOptions options;
    if (o_levels->count())
    {
        options.levels = levels;
        if (levels < 2)
        {
            std::cerr << "error: need ≥ 2 levels\n";
            return 1;
        }
    }
    if (o_beta->count())
        options.beta = beta;
    if (o_gamma->count())
        options.gamma = gamma;
    if (o_order->count())
        options.order = order;
    if (o_depth->count())
        options.depth = depth;
    if (o_eps->count())
        options.eps = eps;

    try
    {
        const cutfem::Study study = cutfem::run_study(name, options);
        cutfem::write_artifacts(out, study);
        cutfem::write_csv(std::cout, study);
        bool ok = true;
        for (const auto& c : cutfem::check_study(study))
        {
            std::cout << (c.pass ? "PASS" : "FAIL") << " criterion " << c.id << " " << c.name << ": " << c.detail
                      << '\n';
            ok = ok && c.pass;
        }
        return check && !ok ? 2 : 0;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
