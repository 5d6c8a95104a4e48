#pragma once

#include <map>
#include <string>

namespace sncse::cli {

// Flat `key = value` files with '#' comments.
std::map<std::string, std::string> load_config_file(const std::string& path);

// Layered lookup: CLI flag > config file > default. Relative paths resolve
// against SNCSE_DATA_DIR when set, else against the config file's directory.
class Settings {
public:
    Settings() = default;
    explicit Settings(const std::string& config_path);

    void override_value(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    uint64_t get_u64(const std::string& key, uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    // Empty input stays empty; absolute paths pass through.
    std::string resolve_path(const std::string& path) const;
    std::string get_path(const std::string& key, const std::string& fallback) const;

private:
    std::map<std::string, std::string> values_;
    std::string config_dir_;
};

}  // namespace sncse::cli
