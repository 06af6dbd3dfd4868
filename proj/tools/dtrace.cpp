#include <iostream>

#include <CLI11.hpp>

#include "dtrace/cli.hpp"

int main(int argc, char** argv)
{
    dtrace::JobConfig cfg;
    CLI::App app{"Exact Hochschild, cyclic and group homology, Dennis trace and K_0 of small categories"};
    app.set_version_flag("--version", dtrace::dtrace_version);
    app.require_subcommand(1);

    std::string format = "table", ring;
    std::size_t bound = 0;
    std::string input;
    app.add_option("--max-degree", cfg.max_degree, "top degree")->capture_default_str();
    app.add_option("--ring", ring, "base ring override: Z, Q, Zmod:m or GF:p");
    app.add_option("--bound", bound, "size bound for built-in categories")->check(CLI::PositiveNumber);
    app.add_option("--format", format, "table or structured")
        ->check(CLI::IsMember({"table", "structured"}))
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "seed for the random property checks")->capture_default_str();

    for (const auto& [name, help] : dtrace::command_list()) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        if (name == "validate")
            sub->add_option("inputs", cfg.inputs, "JSON files or built-in names")->required();
        else if (name != "selftest")
            sub->add_option("input", input, "JSON file or built-in name")->required();
        if (name == "trace-k1")
            sub->add_option("matrix", cfg.matrix, "matrix literal, e.g. \"[[1+x]]\"")->required();
        if (name == "morita" || name == "trace-homology")
            sub->add_option("-n", cfg.n, "matrix size")->capture_default_str()->check(CLI::PositiveNumber);
        sub->callback([&cfg, sub] { cfg.command = sub->get_name(); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    cfg.format = format == "structured" ? dtrace::OutputFormat::structured : dtrace::OutputFormat::table;
    if (!input.empty())
        cfg.inputs = {input};
    if (!ring.empty())
        cfg.ring = ring;
    if (bound > 0)
        cfg.bound = bound;
    return dtrace::run(cfg, std::cout, std::cerr);
}
