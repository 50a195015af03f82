// lacunary: command-line front end. Every run writes its output file plus `<output>.manifest.json`, which records
// the command, the parameters in effect, the tool version and SHA-256 digests; `--verify` replays a manifest.
#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "lacunary/common.hpp"

#ifndef LACUNARY_VERSION
#define LACUNARY_VERSION "0.1.0"
#endif

namespace {

using namespace lacunary;
using namespace lacunary::cli;
using json = nlohmann::ordered_json;

constexpr const char* kVersion = LACUNARY_VERSION;

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << data;
    if (!out.flush()) throw ConfigError("write failed for " + path.string());
}

// Everything that determines the output bytes. Jobs, paths and the cache are excluded on purpose:
// they may differ between runs that must agree.
std::string input_hash(const std::string& command, const std::string& format, const ParamMap& inputs) {
    std::string canon = "command=" + command + "\nformat=" + format + "\n";
    for (const auto& [k, v] : inputs) canon += k + "=" + v + "\n";
    return sha256_hex(canon);
}

struct Rendered {
    std::string bytes;
    ParamMap inputs;
    std::string hash;
    bool ok = true;
    std::string summary;
};

Rendered run_and_render(const Command& cmd, const ParamMap& values, const std::string& format, const RunContext& ctx) {
    for (const auto& [k, v] : values) {
        bool known = false;
        for (const auto& d : cmd.params) known = known || d.key == k;
        if (!known) throw ConfigError("unknown parameter '" + k + "' for " + cmd.name);
    }
    const Params params(values);
    CommandOutput out = cmd.run(params, ctx);
    params.reject_unused();

    Rendered r;
    r.inputs = params.effective();
    r.hash = input_hash(cmd.name, format, r.inputs);
    r.ok = out.ok;
    r.summary = out.summary;
    if (format == "csv") {
        if (out.csv.empty()) throw ConfigError("command " + cmd.name + " has no CSV form; use --format json");
        r.bytes = "# lacunary " + cmd.name + " input_hash=" + r.hash + "\n" + out.csv;
    } else {
        json doc;
        doc["command"] = cmd.name;
        doc["version"] = kVersion;
        doc["input_hash"] = r.hash;
        doc["inputs"] = r.inputs;
        for (auto it = out.json.begin(); it != out.json.end(); ++it) doc[it.key()] = it.value();
        r.bytes = doc.dump(2) + "\n";
    }
    return r;
}

std::string manifest_text(const std::string& command, const std::string& format, const Rendered& r,
                          const std::filesystem::path& output) {
    json m;
    m["tool"] = "lacunary";
    m["version"] = kVersion;
    m["command"] = command;
    m["format"] = format;
    m["inputs"] = r.inputs;
    m["input_hash"] = r.hash;
    m["output"] = {{"file", output.filename().string()}, {"sha256", sha256_hex(r.bytes)}, {"bytes", r.bytes.size()}};
    m["status"] = r.ok ? "ok" : "check_failed";
    return m.dump(2) + "\n";
}

int verify(const std::filesystem::path& manifest_path, const RunContext& ctx) {
    json m;
    try {
        m = json::parse(read_file(manifest_path));
    } catch (const json::exception& e) {
        throw ConfigError("malformed manifest " + manifest_path.string() + ": " + e.what());
    }
    const std::string name = m.value("command", "");
    const Command* cmd = find_command(name);
    if (!cmd) throw ConfigError("manifest names an unknown command '" + name + "'");
    ParamMap inputs;
    for (auto it = m["inputs"].begin(); it != m["inputs"].end(); ++it) inputs[it.key()] = it.value().get<std::string>();
    const std::string format = m.value("format", cmd->default_format);
    const std::string expected = m["output"]["sha256"].get<std::string>();

    const Rendered r = run_and_render(*cmd, inputs, format, ctx);
    int status = 0;
    if (r.hash != m.value("input_hash", "")) {
        std::cerr << "verify: input hash differs from the manifest\n";
        status = 3;
    }
    if (sha256_hex(r.bytes) != expected) {
        std::cerr << "verify: recomputed output differs from the manifest digest\n";
        status = 3;
    }
    const auto recorded = manifest_path.parent_path() / m["output"]["file"].get<std::string>();
    if (std::filesystem::exists(recorded) && sha256_hex(read_file(recorded)) != expected) {
        std::cerr << "verify: " << recorded.string() << " does not match the manifest digest\n";
        status = 3;
    }
    if (status == 0) std::cout << "verified " << name << " (" << expected << ")\n";
    return status;
}

int run(int argc, char** argv) {
    CLI::App app{"Desk-scale checks for mollified L-function moments of imaginary quadratic fields", "lacunary"};
    app.set_version_flag("--version", kVersion);
    std::string config_path, output_path, format, cache_dir, verify_path;
    int jobs = 0;
    app.add_option("--config", config_path, "key = value parameter file; flags override it");
    app.add_option("--output,-o", output_path, "output file (default <command>.<format>)");
    app.add_option("--format", format, "json or csv (default per command)")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--jobs,-j", jobs, "worker threads, 0 = hardware concurrency")->check(CLI::NonNegativeNumber);
    app.add_option("--cache-dir", cache_dir, "coefficient table cache directory");
    app.add_option("--verify", verify_path, "re-run a manifest and compare digests");
    app.require_subcommand(0, 1);
    app.fallthrough();

    std::map<std::string, std::map<std::string, std::string>> flag_values;
    std::map<std::string, CLI::App*> subs;
    for (const auto& cmd : commands()) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.description);
        for (const auto& p : cmd.params) {
            std::string flag = "--" + p.key;
            for (char& c : flag)
                if (c == '_') c = '-';
            sub->add_option(flag, flag_values[cmd.name][p.key], p.help)->allow_extra_args(false);
        }
        subs[cmd.name] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    RunContext ctx{jobs, cache_dir};
    if (!verify_path.empty()) return verify(verify_path, ctx);

    const Command* cmd = nullptr;
    for (const auto& c : commands())
        if (subs[c.name]->parsed()) cmd = &c;
    if (!cmd) {
        std::cerr << app.help();
        return 2;
    }

    ParamMap values;
    if (!config_path.empty()) values = load_config_file(config_path);
    for (const auto& p : cmd->params) {
        std::string flag = "--" + p.key;
        for (char& c : flag)
            if (c == '_') c = '-';
        if (subs[cmd->name]->count(flag) > 0) values[p.key] = flag_values[cmd->name][p.key];
    }
    if (format.empty()) format = cmd->default_format;
    const std::filesystem::path output = output_path.empty() ? cmd->name + "." + format : output_path;

    const Rendered r = run_and_render(*cmd, values, format, ctx);
    write_file(output, r.bytes);
    write_file(output.string() + ".manifest.json", manifest_text(cmd->name, format, r, output));
    std::cout << r.summary << "\nwrote " << output.string() << " (input_hash " << r.hash << ")\n";
    if (!r.ok) {
        std::cerr << cmd->name << ": a checked tolerance failed\n";
        return 3;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 2;
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << '\n';
        return 4;
    } catch (const IdentityFailure& e) {
        std::cerr << "identity failure: " << e.what() << '\n';
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
