#include "mubcert/counts.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string_view>
#include <tuple>

#include "mubcert/error.hpp"

namespace mubcert {

CountsTable::CountsTable(int dim) : dim_(dim) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "CountsTable: dim must be positive");
  cells_.assign(static_cast<std::size_t>(dim) * dim * 2 * dim, 0);
}

std::size_t CountsTable::index(int i, int j, int y, int outcome) const {
  if (i < 0 || i >= dim_ || j < 0 || j >= dim_ || y < 0 || y > 1 || outcome < 0 || outcome >= dim_) {
    throw Error(ErrorKind::OutOfRange, "CountsTable: cell index out of range");
  }
  return ((static_cast<std::size_t>(i) * dim_ + j) * 2 + y) * dim_ + outcome;
}

std::uint64_t& CountsTable::at(int i, int j, int y, int outcome) {
  return cells_[index(i, j, y, outcome)];
}

std::uint64_t CountsTable::at(int i, int j, int y, int outcome) const {
  return cells_[index(i, j, y, outcome)];
}

std::uint64_t CountsTable::setting_total(int i, int j, int y) const {
  std::uint64_t sum = 0;
  for (int b = 0; b < dim_; ++b) sum += at(i, j, y, b);
  return sum;
}

std::uint64_t CountsTable::total() const {
  std::uint64_t sum = 0;
  for (auto c : cells_) sum += c;
  return sum;
}

CountsTable& CountsTable::operator+=(const CountsTable& other) {
  if (other.dim_ != dim_) throw Error(ErrorKind::DimensionMismatch, "CountsTable: merge of different dims");
  for (std::size_t k = 0; k < cells_.size(); ++k) cells_[k] += other.cells_[k];
  return *this;
}

void write_counts_csv(std::ostream& out, const CountsTable& counts) {
  out << "i,j,y,outcome,count\n";
  const int d = counts.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int y = 0; y < 2; ++y)
        for (int b = 0; b < d; ++b)
          out << i + 1 << ',' << j + 1 << ',' << y + 1 << ',' << b + 1 << ','
              << counts.at(i, j, y, b) << '\n';
}

std::string counts_to_csv(const CountsTable& counts) {
  std::ostringstream os;
  write_counts_csv(os, counts);
  return os.str();
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_field(std::string_view field, std::size_t line_no) {
  field = trim(field);
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw Error(ErrorKind::ParseError, "counts line " + std::to_string(line_no) + ": bad field '" +
                                           std::string(field) + "'");
  }
  return value;
}

struct Row {
  long i, j, y, outcome;
  std::uint64_t count;
};

}  // namespace

CountsTable read_counts_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    if (!header_seen) {
      if (view != "i,j,y,outcome,count") {
        throw Error(ErrorKind::ParseError, "counts CSV must start with header 'i,j,y,outcome,count'");
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = view.find(',', start);
      fields.push_back(view.substr(start, comma == std::string_view::npos ? comma : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 5) {
      throw Error(ErrorKind::ParseError, "counts line " + std::to_string(line_no) + ": expected 5 fields");
    }
    rows.push_back({parse_field<long>(fields[0], line_no), parse_field<long>(fields[1], line_no),
                    parse_field<long>(fields[2], line_no), parse_field<long>(fields[3], line_no),
                    parse_field<std::uint64_t>(fields[4], line_no)});
  }
  if (!header_seen) throw Error(ErrorKind::ParseError, "counts CSV is empty");
  if (rows.empty()) throw Error(ErrorKind::ParseError, "counts CSV has no rows");

  long dim = 0;
  for (const auto& r : rows) {
    if (r.i < 1 || r.j < 1 || r.outcome < 1 || r.y < 1 || r.y > 2) {
      throw Error(ErrorKind::ParseError, "counts CSV: indices are 1-based and y must be 1 or 2");
    }
    dim = std::max({dim, r.i, r.j, r.outcome});
  }
  if (dim > 64) throw Error(ErrorKind::ParseError, "counts CSV: dimension too large");

  CountsTable table(static_cast<int>(dim));
  std::set<std::tuple<long, long, long, long>> seen;
  for (const auto& r : rows) {
    if (!seen.emplace(r.i, r.j, r.y, r.outcome).second) {
      throw Error(ErrorKind::ParseError, "counts CSV: duplicate cell (" + std::to_string(r.i) + "," +
                                             std::to_string(r.j) + "," + std::to_string(r.y) + "," +
                                             std::to_string(r.outcome) + ")");
    }
    table.at(r.i - 1, r.j - 1, r.y - 1, r.outcome - 1) = r.count;
  }
  return table;
}

CountsTable parse_counts_csv(const std::string& text) {
  std::istringstream is(text);
  return read_counts_csv(is);
}

}  // namespace mubcert
