#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mubcert {

/// Detection counts indexed by (i, j, y, outcome). Indices are 0-based in
/// memory: i, j, outcome in [0, dim), y in {0, 1}. The CSV form is 1-based.
class CountsTable {
 public:
  CountsTable() = default;
  explicit CountsTable(int dim);

  int dim() const noexcept { return dim_; }

  std::uint64_t& at(int i, int j, int y, int outcome);
  std::uint64_t at(int i, int j, int y, int outcome) const;

  std::uint64_t setting_total(int i, int j, int y) const;
  std::uint64_t total() const;

  CountsTable& operator+=(const CountsTable& other);
  bool operator==(const CountsTable& other) const { return dim_ == other.dim_ && cells_ == other.cells_; }

  // Provenance carried alongside the counts; not part of equality.
  std::uint64_t seed = 0;
  std::string config_json;

 private:
  std::size_t index(int i, int j, int y, int outcome) const;

  int dim_ = 0;
  std::vector<std::uint64_t> cells_;
};

/// Writes `i,j,y,outcome,count` with one row per cell, 1-based indices.
void write_counts_csv(std::ostream& out, const CountsTable& counts);
std::string counts_to_csv(const CountsTable& counts);

/// Parses the CSV format above. The dimension is inferred from the largest
/// index. Missing cells read as zero; duplicated cells are rejected.
CountsTable read_counts_csv(std::istream& in);
CountsTable parse_counts_csv(const std::string& text);

}  // namespace mubcert
