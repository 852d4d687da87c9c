#include "pathwise/cli/report.hpp"

#include <charconv>
#include <cstdio>

namespace pathwise::cli {

std::string format_value(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::string format_exact_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

ReportWriter::ReportWriter(std::ostream& out, bool json_mode, nlohmann::json config,
                           std::vector<std::string> columns)
    : out_(out), json_mode_(json_mode), config_(std::move(config)), columns_(std::move(columns)) {
    if (!json_mode_) {
        out_ << "# config: " << config_.dump() << "\n";
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (i > 0) out_ << ',';
            out_ << columns_[i];
        }
        out_ << "\n";
    }
}

ReportWriter::~ReportWriter() {
    finish();
}

void ReportWriter::add_row(const std::vector<std::string>& cells) {
    if (json_mode_) {
        nlohmann::json row;
        for (std::size_t i = 0; i < columns_.size() && i < cells.size(); ++i) {
            row[columns_[i]] = cells[i];
        }
        rows_.push_back(std::move(row));
        return;
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out_ << ',';
        out_ << cells[i];
    }
    out_ << "\n";
}

void ReportWriter::finish() {
    if (finished_) return;
    finished_ = true;
    if (json_mode_) {
        nlohmann::json doc;
        doc["config"] = config_;
        doc["rows"] = rows_;
        out_ << doc.dump(2) << "\n";
    }
    out_.flush();
}

} // namespace pathwise::cli
