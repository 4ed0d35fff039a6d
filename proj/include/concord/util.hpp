#pragma once

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace concord {

/// Input data failed schema or invariant validation.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration file or option is unusable.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-fatal diagnostics accumulated by pipeline operations.
using WarningSink = std::vector<std::string>;

std::string sha256_hex(std::string_view data);

std::string read_text_file(const std::filesystem::path& path);

/// Write-temp-then-rename so readers never observe partial files.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
bool starts_with_ci(std::string_view text, std::string_view prefix);

/// 1234567 -> "1,234,567"
std::string format_thousands(long long value);
/// Fixed-point with the given number of decimals ("%.*f").
std::string format_fixed(double value, int decimals);

std::string iso8601_now();

/// Runs fn(0..count-1) on up to `workers` threads. The first exception thrown by fn
/// is rethrown on the calling thread after all workers join.
void parallel_for(size_t count, int workers, const std::function<void(size_t)>& fn);

}  // namespace concord
