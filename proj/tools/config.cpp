#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lacunary::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(trim(item));
    return out;
}

}  // namespace

ParamMap parse_config_text(const std::string& text, const std::string& origin) {
    ParamMap out;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected `key = value`");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        for (char& c : key)
            if (c == '-') c = '_';
        out[key] = value;
    }
    return out;
}

ParamMap load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string());
}

double parse_real(const std::string& s, const std::string& key) {
    double x = 0.0;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, x);
    if (ec != std::errc() || ptr != end || !std::isfinite(x))
        throw ConfigError("parameter " + key + ": not a finite number: '" + s + "'");
    return x;
}

std::int64_t parse_integer(const std::string& s, const std::string& key) {
    std::int64_t x = 0;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, x);
    if (ec == std::errc() && ptr == end) return x;
    // Accept integral values written in floating notation, such as 1e4.
    const double d = parse_real(s, key);
    if (d != std::floor(d) || std::abs(d) > 9e15) throw ConfigError("parameter " + key + ": not an integer: '" + s + "'");
    return static_cast<std::int64_t>(d);
}

std::string format_real(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

void require_range(const std::string& key, double x, double lo, double hi) {
    if (!(x >= lo && x <= hi))
        throw ConfigError("parameter " + key + " = " + format_real(x) + " outside [" + format_real(lo) + ", " +
                          format_real(hi) + "]");
}

const std::string* Params::lookup(const std::string& key) const {
    used_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
}

void Params::record(const std::string& key, const std::string& value) const { effective_[key] = value; }

std::string Params::str(const std::string& key, const std::string& fallback) const {
    const std::string* v = lookup(key);
    const std::string out = v ? *v : fallback;
    record(key, out);
    return out;
}

double Params::real(const std::string& key, double fallback) const {
    const std::string* v = lookup(key);
    const double out = v ? parse_real(*v, key) : fallback;
    record(key, format_real(out));
    return out;
}

std::int64_t Params::integer(const std::string& key, std::int64_t fallback) const {
    const std::string* v = lookup(key);
    const std::int64_t out = v ? parse_integer(*v, key) : fallback;
    record(key, std::to_string(out));
    return out;
}

std::vector<std::int64_t> Params::integers(const std::string& key, const std::vector<std::int64_t>& fallback) const {
    const std::string* v = lookup(key);
    std::vector<std::int64_t> out;
    if (v) {
        for (const auto& item : split(*v, ',')) out.push_back(parse_integer(item, key));
        if (out.empty()) throw ConfigError("parameter " + key + ": empty list");
    } else {
        out = fallback;
    }
    std::string canon;
    for (std::size_t i = 0; i < out.size(); ++i) canon += (i ? "," : "") + std::to_string(out[i]);
    record(key, canon);
    return out;
}

std::vector<double> Params::reals(const std::string& key, const std::vector<double>& fallback) const {
    const std::string* v = lookup(key);
    std::vector<double> out;
    if (v) {
        for (const auto& item : split(*v, ',')) out.push_back(parse_real(item, key));
        if (out.empty()) throw ConfigError("parameter " + key + ": empty list");
    } else {
        out = fallback;
    }
    std::string canon;
    for (std::size_t i = 0; i < out.size(); ++i) canon += (i ? "," : "") + format_real(out[i]);
    record(key, canon);
    return out;
}

std::pair<std::int64_t, std::int64_t> Params::range(const std::string& key,
                                                    std::pair<std::int64_t, std::int64_t> fallback) const {
    const std::string* v = lookup(key);
    auto out = fallback;
    if (v) {
        const auto dots = v->find("..");
        if (dots == std::string::npos) throw ConfigError("parameter " + key + ": expected lo..hi");
        out = {parse_integer(trim(v->substr(0, dots)), key), parse_integer(trim(v->substr(dots + 2)), key)};
        if (out.first > out.second) throw ConfigError("parameter " + key + ": lo exceeds hi");
    }
    record(key, std::to_string(out.first) + ".." + std::to_string(out.second));
    return out;
}

void Params::reject_unused() const {
    for (const auto& [k, v] : values_)
        if (!used_.count(k)) throw ConfigError("unknown parameter '" + k + "' for this command");
}

}  // namespace lacunary::cli
