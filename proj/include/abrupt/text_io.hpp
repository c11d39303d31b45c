#pragma once

// Small helpers shared by the file readers/writers: number parsing with
// diagnostics, shortest round-trip formatting, and key=value documents.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace abrupt::text {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

// Whole-string parses; throw std::invalid_argument naming `what` on failure.
double parse_double(std::string_view s, std::string_view what);
std::int64_t parse_int(std::string_view s, std::string_view what);

// Shortest representation that parses back to the same double.
std::string format_double(double v);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// Ordered key=value document; '#' lines are comments.
class KeyValues {
public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, std::int64_t value);

    bool contains(const std::string& key) const;
    const std::string& get(const std::string& key) const;

    std::string serialize() const;
    static KeyValues parse(std::string_view contents, const std::string& source = "<memory>");

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace abrupt::text
