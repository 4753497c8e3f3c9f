#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace qgraph::cli {

/// "%.12e"
[[nodiscard]] std::string format_double(double x);

/// x rounded to the precision of format_double, so JSON numbers are stable.
[[nodiscard]] double rounded(double x);

/// 64-bit FNV-1a.
[[nodiscard]] std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Hash of the compact canonical config followed by the input file bytes, as 16 hex digits.
[[nodiscard]] std::string config_hash(const nlohmann::json& config, std::string_view input_bytes);

/// Comma-separated table with a leading "# config_hash=..." line and a header row.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& hash, const std::vector<std::string>& header);

    CsvWriter& operator<<(double x);
    CsvWriter& operator<<(int x);
    CsvWriter& operator<<(std::size_t x);
    CsvWriter& operator<<(const std::string& s);
    void end_row();
    [[nodiscard]] std::size_t rows() const { return rows_; }

private:
    void separator();

    std::ofstream out_;
    std::filesystem::path path_;
    bool row_started_ = false;
    std::size_t rows_ = 0;
};

/// Pretty-printed (2 spaces, sorted keys) with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace qgraph::cli
