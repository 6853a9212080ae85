#include "chamber/output.hpp"

#include <cstdio>
#include <stdexcept>

namespace chamber {

std::string fmt12(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return std::string(buf);
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& columns)
    : out_(path), columns_(columns.size()) {
  if (!out_) throw std::runtime_error("cannot open output file: " + path);
  for (std::size_t i = 0; i < columns.size(); ++i)
    out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_)
    throw std::invalid_argument("csv row width does not match the header");
  for (std::size_t i = 0; i < values.size(); ++i)
    out_ << (i ? "," : "") << fmt12(values[i]);
  out_ << "\n";
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_)
    throw std::invalid_argument("csv row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i)
    out_ << (i ? "," : "") << cells[i];
  out_ << "\n";
}

NdjsonWriter::NdjsonWriter(const std::string& path) : out_(path) {
  if (!out_) throw std::runtime_error("cannot open output file: " + path);
}

NdjsonWriter::Line& NdjsonWriter::Line::field(const std::string& key,
                                              double value) {
  body_ += body_.empty() ? "{" : ",";
  body_ += "\"" + key + "\":" + fmt12(value);
  return *this;
}

NdjsonWriter::Line& NdjsonWriter::Line::field(const std::string& key,
                                              long value) {
  body_ += body_.empty() ? "{" : ",";
  body_ += "\"" + key + "\":" + std::to_string(value);
  return *this;
}

NdjsonWriter::Line& NdjsonWriter::Line::field(const std::string& key,
                                              const std::string& value) {
  body_ += body_.empty() ? "{" : ",";
  body_ += "\"" + key + "\":\"" + value + "\"";
  return *this;
}

void NdjsonWriter::Line::done() { writer_.out_ << body_ << "}\n"; }

std::string RunManifest::to_json() const {
  std::string files_json = "[";
  for (std::size_t i = 0; i < files.size(); ++i)
    files_json += (i ? ",\"" : "\"") + files[i] + "\"";
  files_json += "]";
  return "{\"version\":\"" + version + "\",\"subcommand\":\"" + subcommand +
         "\",\"seed\":" + std::to_string(seed) + ",\"out_dir\":\"" + out_dir +
         "\",\"files\":" + files_json + ",\"config\":" + config_json + "}\n";
}

}  // namespace chamber
