#pragma once

#include "pathwise/rational.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace pathwise::cli {

// Decimal with 12 significant digits (report values).
std::string format_value(double x);

// Shortest round-trip representation (config echoes).
std::string format_exact_double(double x);

// Table writer with a fixed column header. CSV: `# config: <json>` first,
// then the header, LF endings. JSON: {"config":..., "rows":[...]}.
class ReportWriter {
public:
    ReportWriter(std::ostream& out, bool json_mode, nlohmann::json config,
                 std::vector<std::string> columns);
    ~ReportWriter();

    void add_row(const std::vector<std::string>& cells);
    void finish();

private:
    std::ostream& out_;
    bool json_mode_;
    bool finished_ = false;
    nlohmann::json config_;
    std::vector<std::string> columns_;
    nlohmann::json rows_ = nlohmann::json::array();
};

} // namespace pathwise::cli
