#include "copulaboost/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cpb {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string trimmed(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return s.substr(a, b - a);
}

double parse_field(const std::string& raw, int row, int col) {
  const std::string s = trimmed(raw);
  if (s.empty())
    throw std::runtime_error("csv parse error: missing value at row " + std::to_string(row) +
                             ", column " + std::to_string(col));
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::runtime_error("csv parse error: bad numeric field '" + s + "' at row " +
                             std::to_string(row) + ", column " + std::to_string(col));
  return value;
}

}  // namespace

Dataset Dataset::rows(const std::vector<int>& idx) const {
  Dataset out;
  const int m = static_cast<int>(idx.size());
  out.y1.resize(m);
  out.y2.resize(m);
  out.X.resize(m, X.cols());
  out.names = names;
  for (int i = 0; i < m; ++i) {
    const int r = idx[i];
    out.y1[i] = y1[r];
    out.y2[i] = y2[r];
    out.X.row(i) = X.row(r);
  }
  return out;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("csv parse error: empty file: " + path);
  auto header = split_line(line);
  for (auto& h : header) h = trimmed(h);
  if (header.size() < 2 || header[0] != "y1" || header[1] != "y2")
    throw std::runtime_error("csv parse error: header must start with 'y1,y2' in " + path);

  const int ncol = static_cast<int>(header.size());
  Dataset d;
  d.names.assign(header.begin() + 2, header.end());

  std::vector<double> buf;
  int nrow = 0;
  int row = 1;  // header was row 1
  while (std::getline(in, line)) {
    ++row;
    if (trimmed(line).empty()) continue;
    const auto fields = split_line(line);
    if (static_cast<int>(fields.size()) != ncol)
      throw std::runtime_error("csv parse error: row " + std::to_string(row) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(ncol));
    for (int c = 0; c < ncol; ++c) buf.push_back(parse_field(fields[c], row, c + 1));
    ++nrow;
  }
  if (nrow == 0) throw std::runtime_error("csv parse error: no data rows in " + path);

  d.y1.resize(nrow);
  d.y2.resize(nrow);
  d.X.resize(nrow, ncol - 2);
  for (int i = 0; i < nrow; ++i) {
    d.y1[i] = buf[static_cast<std::size_t>(i) * ncol + 0];
    d.y2[i] = buf[static_cast<std::size_t>(i) * ncol + 1];
    for (int j = 0; j < ncol - 2; ++j) d.X(i, j) = buf[static_cast<std::size_t>(i) * ncol + 2 + j];
  }
  return d;
}

void save_dataset(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  out << "y1,y2";
  for (const auto& nm : d.names) out << ',' << nm;
  out << '\n';
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (int i = 0; i < d.n(); ++i) {
    put(d.y1[i]);
    out << ',';
    put(d.y2[i]);
    for (int j = 0; j < d.p(); ++j) {
      out << ',';
      put(d.X(i, j));
    }
    out << '\n';
  }
}

}  // namespace cpb
