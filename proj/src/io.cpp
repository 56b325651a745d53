#include "signal_lab/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

namespace signal_lab {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

double parse_cell(std::string_view cell, std::size_t file_row) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw DataError("row " + std::to_string(file_row) + ": cannot parse '" +
                    std::string(cell) + "' as a real number");
  }
  if (!std::isfinite(value)) {
    throw DataError("row " + std::to_string(file_row) + ": non-finite value '" +
                    std::string(cell) + "'");
  }
  return value;
}

void append_shortest(std::string& out, double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, ptr);
}

void append_g6(std::string& out, double value) {
  char buf[48];
  const int len = std::snprintf(buf, sizeof buf, "%.6g", value);
  out.append(buf, buf + len);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  if (!out) throw IoError("failed while writing '" + path + "'");
}

}  // namespace

LabeledSample ingest_csv(const std::string& path) {
  const std::string text = read_file(path);
  const auto lines = split_lines(text);
  if (lines.empty()) throw DataError("'" + path + "' is empty");

  const auto header = split_cells(lines[0]);
  if (header.size() < 2 || header[0] != "y") {
    throw DataError("row 1: header must be y,x1,...,xp");
  }
  const Index p = static_cast<Index>(header.size()) - 1;
  for (Index j = 0; j < p; ++j) {
    if (header[static_cast<std::size_t>(j) + 1] != "x" + std::to_string(j + 1)) {
      throw DataError("row 1: header must be y,x1,...,xp (bad column " +
                      std::to_string(j + 2) + ")");
    }
  }
  const Index n = static_cast<Index>(lines.size()) - 1;
  if (n < 2) throw DataError("row " + std::to_string(lines.size()) +
                             ": need at least 2 observations");
  LabeledSample sample;
  sample.x.resize(n, p);
  sample.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    const std::size_t file_row = static_cast<std::size_t>(i) + 2;
    const auto cells = split_cells(lines[static_cast<std::size_t>(i) + 1]);
    if (static_cast<Index>(cells.size()) != p + 1) {
      throw DataError("row " + std::to_string(file_row) + ": expected " +
                      std::to_string(p + 1) + " cells, got " +
                      std::to_string(cells.size()));
    }
    sample.y[i] = parse_cell(cells[0], file_row);
    for (Index j = 0; j < p; ++j) {
      sample.x(i, j) = parse_cell(cells[static_cast<std::size_t>(j) + 1], file_row);
    }
  }
  return sample;
}

void write_sample_csv(const LabeledSample& sample, const std::string& path) {
  std::string out;
  out.reserve(static_cast<std::size_t>(sample.n()) *
              static_cast<std::size_t>(sample.p() + 1) * 12);
  out += "y";
  for (Index j = 0; j < sample.p(); ++j) out += ",x" + std::to_string(j + 1);
  out += '\n';
  for (Index i = 0; i < sample.n(); ++i) {
    append_shortest(out, sample.y[i]);
    for (Index j = 0; j < sample.p(); ++j) {
      out += ',';
      append_shortest(out, sample.x(i, j));
    }
    out += '\n';
  }
  write_file(path, out);
}

Vector read_vector_csv(const std::string& path) {
  const std::string text = read_file(path);
  const auto lines = split_lines(text);
  if (lines.size() != 1) {
    throw DataError("'" + path + "' must hold a single CSV row of values");
  }
  const auto cells = split_cells(lines[0]);
  Vector v(static_cast<Index>(cells.size()));
  for (std::size_t j = 0; j < cells.size(); ++j) {
    v[static_cast<Index>(j)] = parse_cell(cells[j], 1);
  }
  return v;
}

Matrix read_matrix_csv(const std::string& path) {
  const std::string text = read_file(path);
  const auto lines = split_lines(text);
  if (lines.empty()) throw DataError("'" + path + "' is empty");
  const Index rows = static_cast<Index>(lines.size());
  const Index cols = static_cast<Index>(split_cells(lines[0]).size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto cells = split_cells(lines[static_cast<std::size_t>(i)]);
    if (static_cast<Index>(cells.size()) != cols) {
      throw DataError("row " + std::to_string(i + 1) + ": ragged matrix row");
    }
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = parse_cell(cells[static_cast<std::size_t>(j)],
                           static_cast<std::size_t>(i) + 1);
    }
  }
  return m;
}

std::string render_results(const std::vector<TableRow>& rows) {
  if (rows.empty()) throw DataError("no result rows to emit");
  std::string out = "eta,tau_sq,estimator,bias,se,rmse,pct_change,sigma_rmse_hat\n";
  for (const TableRow& r : rows) {
    append_g6(out, r.eta);
    out += ',';
    append_g6(out, r.tau_sq);
    out += ',';
    out += r.row.estimator;
    out += ',';
    append_g6(out, r.row.bias);
    out += ',';
    append_g6(out, r.row.se);
    out += ',';
    append_g6(out, r.row.rmse);
    out += ',';
    append_g6(out, r.row.pct_change);
    out += ',';
    append_g6(out, r.row.sigma_rmse_hat);
    out += '\n';
  }
  return out;
}

void emit_results(const std::vector<TableRow>& rows, const std::string& path) {
  write_file(path, render_results(rows));
}

}  // namespace signal_lab
