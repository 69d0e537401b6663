#include "gwi/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "gwi/error.hpp"

namespace gwi {

namespace {

constexpr const char* kColumns[] = {"check_id", "statistic", "estimate", "stderr",
                                    "target",   "tolerance", "pass",     "seconds"};

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::json json_number(double value) {
  if (!std::isfinite(value)) return nullptr;
  // round to 12 significant digits; the shortest repr then has at most 12
  return std::stod(format_number(value));
}

double number_from_json(const nlohmann::json& v) {
  return v.is_null() ? std::nan("") : v.get<double>();
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string report_to_csv(const VerificationReport& report) {
  std::string out;
  for (std::size_t i = 0; i < std::size(kColumns); ++i) {
    if (i) out += ",";
    out += kColumns[i];
  }
  out += "\n";
  for (const auto& e : report.entries) {
    out += csv_field(e.check_id) + "," + csv_field(e.statistic) + "," +
           format_number(e.estimate) + "," + format_number(e.std_error) + "," +
           format_number(e.target) + "," + format_number(e.tolerance) + "," +
           (e.pass ? "true" : "false") + "," + format_number(e.seconds) + "\n";
  }
  return out;
}

std::string report_to_json(const VerificationReport& report) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : report.entries) {
    entries.push_back({
        {"check_id", e.check_id},
        {"statistic", e.statistic},
        {"estimate", json_number(e.estimate)},
        {"stderr", json_number(e.std_error)},
        {"target", json_number(e.target)},
        {"tolerance", json_number(e.tolerance)},
        {"pass", e.pass},
        {"seconds", json_number(e.seconds)},
    });
  }
  nlohmann::json doc;
  doc["entries"] = entries;
  return doc.dump(2) + "\n";
}

VerificationReport report_from_json(const std::string& text) {
  VerificationReport report;
  const auto doc = nlohmann::json::parse(text);
  for (const auto& row : doc.at("entries")) {
    ReportEntry e;
    e.check_id = row.at("check_id").get<std::string>();
    e.statistic = row.at("statistic").get<std::string>();
    e.estimate = number_from_json(row.at("estimate"));
    e.std_error = number_from_json(row.at("stderr"));
    e.target = number_from_json(row.at("target"));
    e.tolerance = number_from_json(row.at("tolerance"));
    e.pass = row.at("pass").get<bool>();
    e.seconds = number_from_json(row.at("seconds"));
    report.add(std::move(e));
  }
  return report;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::unwritable_path, "cannot write '" + path + "'");
  out << content;
  out.flush();
  if (!out) fail(ErrorKind::unwritable_path, "failed while writing '" + path + "'");
}

void write_report(const VerificationReport& report, ReportFormat format, const std::string& path) {
  write_text_file(path, format == ReportFormat::csv ? report_to_csv(report)
                                                    : report_to_json(report));
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ",";
    out += csv_field(header[i]);
  }
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += format_number(row[i]);
    }
    out += "\n";
  }
  return out;
}

}  // namespace gwi
