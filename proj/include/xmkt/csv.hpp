#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace xmkt {

// Buffered CSV writer. All formatting goes through std::snprintf with fixed
// precision so identical runs produce byte-identical files.
class CsvWriter {
 public:
  CsvWriter() = default;
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;
  CsvWriter(CsvWriter&& other) noexcept : file_(other.file_) { other.file_ = nullptr; }
  ~CsvWriter() { close(); }

  bool open(const std::string& path, const std::string& header);
  void close();
  bool is_open() const { return file_ != nullptr; }

#if defined(__GNUC__) || defined(__clang__)
  __attribute__((format(printf, 2, 3)))
#endif
  void writef(const char* fmt, ...);

 private:
  std::FILE* file_ = nullptr;
};

struct CsvError : std::runtime_error {
  CsvError(const std::string& msg, std::size_t line_number)
      : std::runtime_error(msg + " (line " + std::to_string(line_number) + ")"), line(line_number) {}
  std::size_t line;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // index of a header column, -1 if absent
  int column(const std::string& name) const;
};

// Reads a whole CSV file; throws CsvError naming the offending line on
// missing file, empty file, or ragged rows.
CsvTable read_csv(const std::string& path);

// Numeric cell access with line-numbered diagnostics.
double csv_number(const CsvTable& table, std::size_t row, int col);

}  // namespace xmkt
