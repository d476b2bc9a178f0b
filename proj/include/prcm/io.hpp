#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace prcm {

inline constexpr const char* kVersion = "plaquette-rcm 0.1.0";

// Locale-independent shortest round-trip formatting (std::to_chars), so CSV
// and JSON output is byte-stable across platforms and reruns.
std::string format_double(double v);
std::string format_int(int64_t v);

// RFC-4180 CSV with a mandatory header row; run metadata rides in front as
// '#'-prefixed comment lines.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}
    void comment(const std::string& text);
    void row(const std::vector<std::string>& fields);

private:
    std::ostream& out_;
};

std::string csv_quote(const std::string& field);

} // namespace prcm
