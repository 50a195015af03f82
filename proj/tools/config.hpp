// Run parameters: `key = value` config files merged with command-line flags, typed lookups and the
// canonical form that feeds the manifest hash.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace lacunary::cli {

// Invalid configuration of any kind; the tool exits with status 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using ParamMap = std::map<std::string, std::string>;

// Lines of `key = value`; `#` starts a comment, blank lines are ignored, later keys override earlier ones.
ParamMap parse_config_text(const std::string& text, const std::string& origin = "config");
ParamMap load_config_file(const std::filesystem::path& path);

class Params {
public:
    explicit Params(ParamMap values) : values_(std::move(values)) {}

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string str(const std::string& key, const std::string& fallback) const;
    double real(const std::string& key, double fallback) const;
    std::int64_t integer(const std::string& key, std::int64_t fallback) const;
    std::vector<std::int64_t> integers(const std::string& key, const std::vector<std::int64_t>& fallback) const;
    std::vector<double> reals(const std::string& key, const std::vector<double>& fallback) const;
    // `lo..hi`
    std::pair<std::int64_t, std::int64_t> range(const std::string& key, std::pair<std::int64_t, std::int64_t> fallback) const;

    // Rejects keys that no lookup touched, so a misspelt key cannot be silently ignored.
    void reject_unused() const;
    // Every key that was looked up, with the value in effect (explicit or default), sorted.
    const ParamMap& effective() const { return effective_; }

private:
    const std::string* lookup(const std::string& key) const;
    void record(const std::string& key, const std::string& value) const;

    ParamMap values_;
    mutable std::set<std::string> used_;
    mutable ParamMap effective_;
};

// Numbers are parsed and printed without locale; doubles are written with 17 significant digits.
double parse_real(const std::string& s, const std::string& key);
std::int64_t parse_integer(const std::string& s, const std::string& key);
std::string format_real(double x);

// Range guard shared by the commands: ConfigError unless lo <= x <= hi.
void require_range(const std::string& key, double x, double lo, double hi);

}  // namespace lacunary::cli
