#pragma once

#include <string>
#include <vector>

#include "gwi/config.hpp"
#include "gwi/verify.hpp"

namespace gwi {

/// check_id,statistic,estimate,stderr,target,tolerance,pass,seconds; numbers
/// with 12 significant digits, pass as true/false.
std::string report_to_csv(const VerificationReport& report);
/// {"entries": [{...}, ...]} with the CSV column names; non-finite numbers
/// become null.
std::string report_to_json(const VerificationReport& report);
VerificationReport report_from_json(const std::string& text);

std::string format_number(double value);

/// Throws unwritable_path when the file cannot be created.
void write_text_file(const std::string& path, const std::string& content);
void write_report(const VerificationReport& report, ReportFormat format, const std::string& path);

/// Plain CSV table with a header row, numbers via format_number.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string to_csv() const;
};

}  // namespace gwi
