#include "xmkt/csv.hpp"

#include <cstdarg>
#include <cstring>
#include <fstream>
#include <sstream>

namespace xmkt {

bool CsvWriter::open(const std::string& path, const std::string& header) {
  close();
  file_ = std::fopen(path.c_str(), "wb");
  if (!file_) return false;
  std::fputs(header.c_str(), file_);
  std::fputc('\n', file_);
  return true;
}

void CsvWriter::close() {
  if (file_) {
    std::fclose(file_);
    file_ = nullptr;
  }
}

void CsvWriter::writef(const char* fmt, ...) {
  if (!file_) return;
  std::va_list args;
  va_start(args, fmt);
  std::vfprintf(file_, fmt, args);
  va_end(args);
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

static std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open '" + path + "'", 0);
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (line_no == 1) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size())
      throw CsvError("row has " + std::to_string(cells.size()) + " cells, expected " +
                         std::to_string(table.header.size()),
                     line_no);
    table.rows.push_back(std::move(cells));
  }
  if (table.header.empty()) throw CsvError("no header row in '" + path + "'", 1);
  return table;
}

double csv_number(const CsvTable& table, std::size_t row, int col) {
  const std::string& cell = table.rows[row][static_cast<std::size_t>(col)];
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0')
    throw CsvError("cell '" + cell + "' is not a number", row + 2);
  return v;
}

}  // namespace xmkt
