#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace chamber {

/// Decimal rendering with 12 significant digits; all file output goes through
/// this so reruns are byte-identical.
std::string fmt12(double value);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void raw_row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

/// One JSON object per line; fields keep insertion order.
class NdjsonWriter {
 public:
  explicit NdjsonWriter(const std::string& path);

  class Line {
   public:
    explicit Line(NdjsonWriter& writer) : writer_(writer) {}
    Line& field(const std::string& key, double value);
    Line& field(const std::string& key, long value);
    Line& field(const std::string& key, const std::string& value);
    void done();

   private:
    NdjsonWriter& writer_;
    std::string body_;
  };

  Line line() { return Line(*this); }

 private:
  friend class Line;
  std::ofstream out_;
};

struct RunManifest {
  std::string version;
  std::string subcommand;
  std::uint64_t seed;
  std::string out_dir;
  std::vector<std::string> files;
  std::string config_json;  // snapshot of all resolved parameters

  std::string to_json() const;
};

inline constexpr const char* kToolkitVersion = "1.0.0";

}  // namespace chamber
