// sharpcone <command> <scenario.json> [flags]
// sharpcone cone <member|order|classify|norm|square|corner> <scenario.json> <label>...
// sharpcone generate <profile> [--seed N]
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 input error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sharpcone/sharpcone.hpp"

namespace {

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_input = 2;

std::string read_input(const std::string& path)
{
    if (path == "-")
        return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw sharpcone::Error(sharpcone::ErrorKind::InvalidInput, "cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::optional<std::uint64_t> env_seed()
{
    const char* v = std::getenv("SHARPCONE_SEED");
    if (!v || !*v)
        return std::nullopt;
    try {
        std::size_t used = 0;
        const auto s = std::stoull(v, &used);
        if (used != std::string(v).size())
            throw std::invalid_argument(v);
        return s;
    } catch (const std::exception&) {
        throw sharpcone::Error(sharpcone::ErrorKind::InvalidInput, "SHARPCONE_SEED is not an unsigned integer");
    }
}

} // namespace

int main(int argc, char** argv)
{
    using namespace sharpcone;

    CLI::App app{"Finite-dimensional cone characterizations of von Neumann algebras"};
    std::string command;
    std::vector<std::string> args;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    int samples = 8;
    std::string format = "json";
    std::string projection;
    bool timings = false;

    std::string commands_help = "generate";
    for (const auto& c : commands())
        commands_help += ", " + c;
    app.add_option("command", command, commands_help)->required();
    app.add_option("args", args, "scenario file (or profile for generate), cone subcommand and vector labels");
    app.add_option("--seed", seed, "seed for sampled checks; overrides SHARPCONE_SEED and the scenario seed");
    app.add_option("--tol", tol, "relative equality tolerance")->check(CLI::PositiveNumber);
    app.add_option("--samples", samples, "number of random samples per sampled check")->check(CLI::PositiveNumber);
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--projection", projection, "projection name, or an inline constructor as JSON");
    app.add_flag("--timings", timings, "include wall-clock timings in the report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_input;
    }

    try {
        if (command == "generate") {
            if (args.size() != 1)
                throw Error(ErrorKind::InvalidInput, "usage: sharpcone generate <profile> [--seed N]");
            const std::uint64_t s = seed ? *seed : env_seed().value_or(0);
            std::cout << serialize(generate(args[0], s));
            return exit_pass;
        }
        RunOptions opts;
        std::string path;
        if (command == "cone") {
            if (args.size() < 2)
                throw Error(ErrorKind::InvalidInput,
                            "usage: sharpcone cone <subcommand> <scenario.json> <label>...");
            opts.subcommand = args[0];
            path = args[1];
            opts.operands.assign(args.begin() + 2, args.end());
        } else {
            if (args.size() != 1)
                throw Error(ErrorKind::InvalidInput, "usage: sharpcone " + command + " <scenario.json> [flags]");
            path = args[0];
        }
        Scenario scn = parse(read_input(path));
        if (tol) {
            scn.tol.eq_rel = *tol;
            scn.tol.psd_rel = std::min(scn.tol.psd_rel, *tol / 10.0);
            scn.tol.validate();
        }
        if (seed)
            opts.seed = *seed;
        else
            opts.seed = env_seed().value_or(scn.seed);
        opts.samples = samples;
        opts.projection = projection;
        opts.timings = timings;

        const Report report = run(command, scn, opts);
        if (format == "json")
            std::cout << report.to_json().dump(2) << "\n";
        else
            std::cout << report.to_text();
        return report.pass() ? exit_pass : exit_fail;
    } catch (const Error& e) {
        std::cerr << "sharpcone: " << e.what() << "\n";
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "sharpcone: " << e.what() << "\n";
        return exit_input;
    }
}
