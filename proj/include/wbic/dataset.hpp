#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wbic {

/// Non-owning view over a row-major block of observations.
class RowView {
 public:
  RowView() = default;
  RowView(const double* data, std::size_t n, std::size_t width)
      : data_(data), n_(n), width_(width) {}

  std::size_t size() const { return n_; }
  std::size_t width() const { return width_; }
  std::span<const double> operator[](std::size_t i) const {
    return {data_ + i * width_, width_};
  }

 private:
  const double* data_ = nullptr;
  std::size_t n_ = 0;
  std::size_t width_ = 0;
};

/// n observations of fixed width h. Always holds n >= 2 finite rows.
class Dataset {
 public:
  Dataset(std::vector<std::string> column_names, std::vector<double> values);

  std::size_t n() const { return n_; }
  std::size_t width() const { return column_names_.size(); }
  const std::vector<std::string>& column_names() const { return column_names_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * width(), width()};
  }
  RowView rows() const { return {values_.data(), n_, width()}; }

  std::size_t column_index(std::string_view name) const;
  std::vector<double> column(std::size_t j) const;

  /// New dataset holding the named columns in the given order.
  Dataset select(const std::vector<std::string>& names) const;

 private:
  std::vector<std::string> column_names_;
  std::vector<double> values_;
  std::size_t n_ = 0;
};

Dataset single_column(std::string name, std::vector<double> xs);

/// Strict CSV: header line, then one observation per line. Tokens must be
/// finite decimal reals; nan/inf and trailing garbage are rejected.
Dataset parse_csv(std::istream& in);
Dataset read_csv(const std::filesystem::path& path);
void write_csv(std::ostream& out, const Dataset& data);

}  // namespace wbic
