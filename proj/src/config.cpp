#include "sncse/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "sncse/errors.hpp"

namespace fs = std::filesystem;

namespace sncse::cli {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::map<std::string, std::string> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
        out[key] = value;
    }
    return out;
}

Settings::Settings(const std::string& config_path) {
    values_ = load_config_file(config_path);
    config_dir_ = fs::absolute(fs::path(config_path)).parent_path().string();
}

void Settings::override_value(const std::string& key, const std::string& value) {
    values_[key] = value;
}

bool Settings::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Settings::get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Settings::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (...) {
        throw ConfigError("config key '" + key + "': '" + it->second + "' is not a number");
    }
}

int Settings::get_int(const std::string& key, int fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stoi(it->second);
    } catch (...) {
        throw ConfigError("config key '" + key + "': '" + it->second + "' is not an integer");
    }
}

uint64_t Settings::get_u64(const std::string& key, uint64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stoull(it->second);
    } catch (...) {
        throw ConfigError("config key '" + key + "': '" + it->second + "' is not an integer");
    }
}

bool Settings::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
    if (it->second == "false" || it->second == "0" || it->second == "no") return false;
    throw ConfigError("config key '" + key + "': '" + it->second + "' is not a boolean");
}

std::string Settings::resolve_path(const std::string& path) const {
    if (path.empty()) return path;
    fs::path p(path);
    if (p.is_absolute()) return path;
    if (const char* root = std::getenv("SNCSE_DATA_DIR"); root && *root)
        return (fs::path(root) / p).string();
    if (!config_dir_.empty()) return (fs::path(config_dir_) / p).string();
    return path;
}

std::string Settings::get_path(const std::string& key, const std::string& fallback) const {
    return resolve_path(get(key, fallback));
}

}  // namespace sncse::cli
