#include "imcorrect/io.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "imcorrect/errors.hpp"

namespace imc {

namespace {

constexpr char kMappingMagic[4] = {'I', 'M', 'C', 'W'};
constexpr char kDenseMagic[4] = {'I', 'M', 'C', 'D'};

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

void write_u32(std::ofstream& out, std::uint32_t v) {
  static_assert(std::endian::native == std::endian::little,
                "serialization assumes a little-endian host");
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::ifstream& in, const std::filesystem::path& path) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(v))) {
    throw IoError("truncated file: " + path.string());
  }
  return v;
}

struct MmHeader {
  std::string object, format, field, symmetry;
  std::vector<std::string> comments;
  std::size_t rows = 0, cols = 0, entries = 0;
  std::size_t body_start_line = 0;
};

MmHeader read_mm_header(std::istream& in, const std::filesystem::path& path) {
  MmHeader h;
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw ParseError("empty file: " + path.string(), 1);
  ++lineno;
  {
    std::istringstream ss(line);
    std::string banner;
    ss >> banner >> h.object >> h.format >> h.field >> h.symmetry;
    if (banner != "%%MatrixMarket" || h.object != "matrix") {
      throw ParseError("not a MatrixMarket matrix file: " + path.string(),
                       lineno);
    }
  }
  // Comment lines, then the size line.
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '%') {
      h.comments.push_back(line);
      continue;
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    if (!(ss >> h.rows >> h.cols >> h.entries)) {
      throw ParseError("malformed size line in " + path.string(), lineno);
    }
    h.body_start_line = lineno;
    return h;
  }
  throw ParseError("missing size line in " + path.string(), lineno);
}

InteractionMatrix read_interaction_body(std::istream& in, const MmHeader& h,
                                        const std::filesystem::path& path) {
  if (h.format != "coordinate" ||
      (h.field != "integer" && h.field != "pattern" && h.field != "real")) {
    throw ParseError("unsupported MatrixMarket flavor for interactions in " +
                         path.string() + ": " + h.format + " " + h.field,
                     1);
  }
  std::vector<Cell> cells;
  cells.reserve(h.entries);
  std::string line;
  std::size_t lineno = h.body_start_line;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    long long u = 0, i = 0;
    if (!(ss >> u >> i)) {
      throw ParseError("malformed entry in " + path.string(), lineno);
    }
    if (u < 1 || i < 1 || static_cast<std::size_t>(u) > h.rows ||
        static_cast<std::size_t>(i) > h.cols) {
      throw ParseError("index out of range in " + path.string() + ": (" +
                           std::to_string(u) + ", " + std::to_string(i) + ")",
                       lineno);
    }
    cells.push_back({static_cast<Index>(u - 1), static_cast<Index>(i - 1)});
  }
  if (cells.size() != h.entries) {
    throw ParseError("entry count mismatch in " + path.string() +
                         ": header says " + std::to_string(h.entries) +
                         ", found " + std::to_string(cells.size()),
                     lineno);
  }
  return InteractionMatrix::from_cells(static_cast<Index>(h.rows),
                                       static_cast<Index>(h.cols),
                                       std::move(cells));
}

}  // namespace

void write_interactions(const std::filesystem::path& path,
                        const InteractionMatrix& r) {
  auto out = open_out(path, false);
  out << "%%MatrixMarket matrix coordinate integer general\n";
  out << r.num_users() << ' ' << r.num_items() << ' ' << r.nnz() << '\n';
  for (Index u = 0; u < r.num_users(); ++u) {
    for (Index i : r.row(u)) {
      out << (u + 1) << ' ' << (i + 1) << " 1\n";
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

InteractionMatrix read_interactions(const std::filesystem::path& path) {
  auto in = open_in(path, false);
  const MmHeader h = read_mm_header(in, path);
  return read_interaction_body(in, h, path);
}

void write_flip_set(const std::filesystem::path& path, const FlipSet& f) {
  auto out = open_out(path, false);
  out << "%%MatrixMarket matrix coordinate integer general\n";
  out << "%direction: " << to_string(f.direction) << '\n';
  out << f.cells.num_users() << ' ' << f.cells.num_items() << ' '
      << f.cells.nnz() << '\n';
  for (Index u = 0; u < f.cells.num_users(); ++u) {
    for (Index i : f.cells.row(u)) {
      out << (u + 1) << ' ' << (i + 1) << " 1\n";
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

FlipSet read_flip_set(const std::filesystem::path& path,
                      std::optional<Direction> override_direction) {
  auto in = open_in(path, false);
  const MmHeader h = read_mm_header(in, path);

  std::optional<Direction> header_direction;
  for (const std::string& c : h.comments) {
    auto pos = c.find("direction:");
    if (pos == std::string::npos) continue;
    std::string v = c.substr(pos + 10);
    const auto first = v.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = v.find_last_not_of(" \t\r");
    v = v.substr(first, last - first + 1);
    if (v == "negative") {
      header_direction = Direction::Negative;
    } else if (v == "positive") {
      header_direction = Direction::Positive;
    } else {
      throw ParseError("bad %direction value '" + v + "' in " + path.string(),
                       2);
    }
  }
  if (override_direction && header_direction &&
      *override_direction != *header_direction) {
    throw ValidationError("flip direction flag (" +
                          std::string(to_string(*override_direction)) +
                          ") conflicts with file header (" +
                          to_string(*header_direction) + ") in " +
                          path.string());
  }
  const std::optional<Direction> dir =
      override_direction ? override_direction : header_direction;
  if (!dir) {
    throw ValidationError("flip file " + path.string() +
                          " has no %direction header and no direction given");
  }
  return {*dir, read_interaction_body(in, h, path)};
}

void write_mapping(const std::filesystem::path& path, const MappingMatrix& w) {
  if (w.storage() == MappingMatrix::Storage::Sparse) {
    auto out = open_out(path, false);
    out << "%%MatrixMarket matrix coordinate real general\n";
    const auto& s = w.sparse_values();
    out << w.dim() << ' ' << w.dim() << ' ' << s.nonZeros() << '\n';
    out.precision(17);
    for (Index j = 0; j < w.dim(); ++j) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(s, j); it; ++it) {
        out << (it.row() + 1) << ' ' << (j + 1) << ' ' << it.value() << '\n';
      }
    }
    if (!out) throw IoError("write failed: " + path.string());
    return;
  }
  auto out = open_out(path, true);
  out.write(kMappingMagic, 4);
  write_u32(out, w.dim());
  const auto& d = w.dense_values();
  out.write(reinterpret_cast<const char*>(d.data()),
            static_cast<std::streamsize>(sizeof(double) * d.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

MappingMatrix read_mapping(const std::filesystem::path& path) {
  {
    auto probe = open_in(path, true);
    std::array<char, 4> magic{};
    if (probe.read(magic.data(), 4) &&
        std::memcmp(magic.data(), kMappingMagic, 4) == 0) {
      const std::uint32_t dim = read_u32(probe, path);
      DenseRowMajor values(dim, dim);
      if (!probe.read(reinterpret_cast<char*>(values.data()),
                      static_cast<std::streamsize>(sizeof(double) *
                                                   values.size()))) {
        throw IoError("truncated mapping file: " + path.string());
      }
      return MappingMatrix::from_dense(values);
    }
  }
  auto in = open_in(path, false);
  const MmHeader h = read_mm_header(in, path);
  if (h.format != "coordinate" || h.field != "real" || h.rows != h.cols) {
    throw ParseError("expected a square coordinate real matrix in " +
                         path.string(),
                     1);
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(h.entries);
  std::string line;
  std::size_t lineno = h.body_start_line;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    long long i = 0, j = 0;
    double v = 0.0;
    if (!(ss >> i >> j >> v)) {
      throw ParseError("malformed entry in " + path.string(), lineno);
    }
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > h.rows ||
        static_cast<std::size_t>(j) > h.cols) {
      throw ParseError("index out of range in " + path.string(), lineno);
    }
    triplets.emplace_back(static_cast<Index>(i - 1), static_cast<Index>(j - 1),
                          v);
  }
  return MappingMatrix::from_triplets(static_cast<Index>(h.rows), triplets);
}

void write_dense_matrix(const std::filesystem::path& path,
                        const Eigen::MatrixXd& m) {
  auto out = open_out(path, true);
  out.write(kDenseMagic, 4);
  write_u32(out, static_cast<std::uint32_t>(m.rows()));
  write_u32(out, static_cast<std::uint32_t>(m.cols()));
  // Row-major on disk regardless of in-memory layout.
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Eigen::MatrixXd read_dense_matrix(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), 4) ||
      std::memcmp(magic.data(), kDenseMagic, 4) != 0) {
    throw IoError("not a dense matrix file: " + path.string());
  }
  const std::uint32_t rows = read_u32(in, path);
  const std::uint32_t cols = read_u32(in, path);
  Eigen::MatrixXd m(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < cols; ++j) {
      double v = 0.0;
      if (!in.read(reinterpret_cast<char*>(&v), sizeof(v))) {
        throw IoError("truncated file: " + path.string());
      }
      m(i, j) = v;
    }
  }
  return m;
}

void write_metadata(const std::filesystem::path& path, const Metadata& meta) {
  auto out = open_out(path, false);
  for (const auto& [k, v] : meta) out << k << '=' << v << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

Metadata read_metadata(const std::filesystem::path& path) {
  auto in = open_in(path, false);
  Metadata meta;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected key=value in " + path.string(), lineno);
    }
    meta.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  return meta;
}

std::optional<std::string> metadata_get(const Metadata& meta,
                                        const std::string& key) {
  for (const auto& [k, v] : meta) {
    if (k == key) return v;
  }
  return std::nullopt;
}

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_mix(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

}  // namespace

std::uint64_t content_hash(const InteractionMatrix& r) {
  std::uint64_t h = kFnvOffset;
  const Index dims[2] = {r.num_users(), r.num_items()};
  fnv_mix(h, dims, sizeof(dims));
  const auto offsets = r.row_offsets();
  fnv_mix(h, offsets.data(), offsets.size_bytes());
  const auto cols = r.column_indices();
  fnv_mix(h, cols.data(), cols.size_bytes());
  return h;
}

std::uint64_t file_hash(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  std::uint64_t h = kFnvOffset;
  std::array<char, 65536> buf;
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    fnv_mix(h, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace imc
