#include "output.hpp"

#include <cstdio>
#include <cstdlib>
#include <cmath>

#include "qgraph/error.hpp"

namespace qgraph::cli {

std::string format_double(double x) {
    if (x == 0.0) x = 0.0;  // drop the sign of -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12e", x);
    return buf;
}

double rounded(double x) {
    if (!std::isfinite(x)) return x;
    return std::strtod(format_double(x).c_str(), nullptr);
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const nlohmann::json& config, std::string_view input_bytes) {
    const std::uint64_t h = fnv1a(input_bytes, fnv1a(config.dump()));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& hash,
                     const std::vector<std::string>& header)
    : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw InputError("cannot write " + path.string());
    out_ << "# config_hash=" << hash << '\n';
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::separator() {
    if (row_started_) out_ << ',';
    row_started_ = true;
}

CsvWriter& CsvWriter::operator<<(double x) {
    separator();
    out_ << format_double(x);
    return *this;
}

CsvWriter& CsvWriter::operator<<(int x) {
    separator();
    out_ << x;
    return *this;
}

CsvWriter& CsvWriter::operator<<(std::size_t x) {
    separator();
    out_ << x;
    return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& s) {
    separator();
    if (s.find_first_of(",\"\n") == std::string::npos) {
        out_ << s;
    } else {
        out_ << '"';
        for (char c : s) {
            if (c == '"') out_ << '"';
            out_ << c;
        }
        out_ << '"';
    }
    return *this;
}

void CsvWriter::end_row() {
    out_ << '\n';
    row_started_ = false;
    ++rows_;
    if (!out_) throw InputError("write failed: " + path_.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace qgraph::cli
