#include "wbic/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "wbic/error.hpp"

namespace wbic {

Dataset::Dataset(std::vector<std::string> column_names,
                 std::vector<double> values)
    : column_names_(std::move(column_names)), values_(std::move(values)) {
  if (column_names_.empty()) {
    throw Error(ErrorKind::Data, "dataset needs at least one column");
  }
  if (values_.size() % column_names_.size() != 0) {
    throw Error(ErrorKind::DimensionMismatch,
                "value count is not a multiple of the column count");
  }
  n_ = values_.size() / column_names_.size();
  if (n_ < 2) {
    throw Error(ErrorKind::Data,
                "dataset needs n >= 2 observations (1/log n is undefined at n = 1)");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::NonFinite, "dataset entries must be finite");
    }
  }
}

std::size_t Dataset::column_index(std::string_view name) const {
  auto it = std::find(column_names_.begin(), column_names_.end(), name);
  if (it == column_names_.end()) {
    throw Error(ErrorKind::Data, "no column named '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - column_names_.begin());
}

std::vector<double> Dataset::column(std::size_t j) const {
  if (j >= width()) throw Error(ErrorKind::DimensionMismatch, "column out of range");
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = values_[i * width() + j];
  return out;
}

Dataset Dataset::select(const std::vector<std::string>& names) const {
  std::vector<std::size_t> idx;
  for (const auto& nm : names) idx.push_back(column_index(nm));
  std::vector<double> out;
  out.reserve(n_ * idx.size());
  for (std::size_t i = 0; i < n_; ++i) {
    for (auto j : idx) out.push_back(values_[i * width() + j]);
  }
  return Dataset(names, std::move(out));
}

Dataset single_column(std::string name, std::vector<double> xs) {
  return Dataset({std::move(name)}, std::move(xs));
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_real(std::string_view tok, std::size_t line_no) {
  auto fail = [&](const char* why) {
    std::ostringstream msg;
    msg << "line " << line_no << ": " << why << " '" << tok << "'";
    throw Error(ErrorKind::Parse, msg.str());
  };
  if (tok.empty()) fail("empty field");
  // from_chars accepts nan/inf spellings; only plain decimal reals are allowed.
  for (char c : tok) {
    bool ok = (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '+' ||
              c == 'e' || c == 'E';
    if (!ok) fail("not a decimal real");
  }
  std::string_view body = tok;
  if (body.front() == '+') body.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
  if (ec != std::errc() || ptr != body.data() + body.size()) fail("malformed real");
  if (!std::isfinite(v)) fail("non-finite real");
  return v;
}

}  // namespace

Dataset parse_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> names;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw Error(ErrorKind::Parse, "missing header row");
  for (auto tok : split(line)) {
    if (tok.empty()) throw Error(ErrorKind::Parse, "empty column name in header");
    names.emplace_back(tok);
  }
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto toks = split(line);
    if (toks.size() != names.size()) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(names.size()) + " fields, got " +
                                        std::to_string(toks.size()));
    }
    for (auto tok : toks) values.push_back(parse_real(tok, line_no));
  }
  return Dataset(std::move(names), std::move(values));
}

Dataset read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Data, "cannot open " + path.string());
  return parse_csv(in);
}

void write_csv(std::ostream& out, const Dataset& data) {
  const auto& names = data.column_names();
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < data.n(); ++i) {
    auto r = data.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << r[j];
    out << '\n';
  }
}

}  // namespace wbic
