// The subcommands of the command-line tool. Each one reads its parameters from a Params store and returns a
// JSON document, optionally with a CSV rendering of its main table.
#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "config.hpp"
#include "json.hpp"

namespace lacunary::cli {

struct RunContext {
    int jobs = 0;
    std::filesystem::path cache_dir;  // empty: no coefficient cache
};

struct CommandOutput {
    nlohmann::ordered_json json;
    std::string csv;           // empty when the command has no tabular form
    bool ok = true;            // false: a checked identity or tolerance failed (exit status 3)
    std::string summary;       // one line for the terminal
};

struct ParamDoc {
    std::string key;
    std::string help;
};

struct Command {
    std::string name;
    std::string description;
    std::string default_format;  // "json" or "csv"
    std::vector<ParamDoc> params;
    std::function<CommandOutput(const Params&, const RunContext&)> run;
};

const std::vector<Command>& commands();
const Command* find_command(const std::string& name);

}  // namespace lacunary::cli
