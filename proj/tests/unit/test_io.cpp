#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "imcorrect/errors.hpp"
#include "imcorrect/io.hpp"
#include "imcorrect/rng.hpp"

using namespace imc;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "imc_io_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("interaction matrices round trip through MatrixMarket") {
  const auto r = InteractionMatrix::from_cells(
      4, 3, {{0, 0}, {0, 2}, {2, 1}, {3, 0}});
  const fs::path path = temp_dir() / "r.mtx";
  write_interactions(path, r);
  CHECK(read_interactions(path) == r);

  // Header shape: 1-based integer coordinate format.
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "%%MatrixMarket matrix coordinate integer general");
  std::getline(in, line);
  CHECK(line == "4 3 4");
  std::getline(in, line);
  CHECK(line == "1 1 1");
}

TEST_CASE("flip files carry their direction") {
  const FlipSet f{Direction::Positive,
                  InteractionMatrix::from_cells(2, 2, {{1, 0}})};
  const fs::path path = temp_dir() / "flips.mtx";
  write_flip_set(path, f);

  const FlipSet back = read_flip_set(path);
  CHECK(back.direction == Direction::Positive);
  CHECK(back.cells == f.cells);

  // A matching override is fine; a conflicting one is an error.
  CHECK(read_flip_set(path, Direction::Positive).direction ==
        Direction::Positive);
  CHECK_THROWS_AS(read_flip_set(path, Direction::Negative), ValidationError);
}

TEST_CASE("flip files without a direction need the flag") {
  const auto r = InteractionMatrix::from_cells(2, 2, {{0, 1}});
  const fs::path path = temp_dir() / "plain.mtx";
  write_interactions(path, r);
  CHECK_THROWS_AS(read_flip_set(path), ValidationError);
  const FlipSet f = read_flip_set(path, Direction::Negative);
  CHECK(f.direction == Direction::Negative);
  CHECK(f.cells == r);
}

TEST_CASE("dense mappings round trip through the binary format") {
  Rng rng(21);
  DenseRowMajor w(6, 6);
  for (Index i = 0; i < 6; ++i) {
    for (Index j = 0; j < 6; ++j) w(i, j) = rng.next_double();
  }
  const auto mapping = MappingMatrix::from_dense(w);
  REQUIRE(mapping.storage() == MappingMatrix::Storage::Dense);

  const fs::path path = temp_dir() / "w.imcw";
  write_mapping(path, mapping);
  const auto back = read_mapping(path);
  CHECK(back.equals_bitwise(mapping));

  // Magic bytes then little-endian u32 dim.
  std::ifstream in(path, std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  CHECK(std::string(magic, 4) == "IMCW");
  std::uint32_t dim = 0;
  in.read(reinterpret_cast<char*>(&dim), 4);
  CHECK(dim == 6);
}

TEST_CASE("sparse mappings round trip through MatrixMarket") {
  const auto mapping = MappingMatrix::from_triplets(
      12, {{0, 3, 0.125}, {7, 2, -2.5}, {11, 11, 1.0}});
  REQUIRE(mapping.storage() == MappingMatrix::Storage::Sparse);

  const fs::path path = temp_dir() / "w.mtx";
  write_mapping(path, mapping);
  const auto back = read_mapping(path);
  CHECK(back.equals_bitwise(mapping));
}

TEST_CASE("rectangular dense matrices round trip") {
  Rng rng(33);
  Eigen::MatrixXd m(5, 3);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 3; ++j) m(i, j) = rng.next_gaussian();
  }
  const fs::path path = temp_dir() / "p.imcd";
  write_dense_matrix(path, m);
  const Eigen::MatrixXd back = read_dense_matrix(path);
  CHECK(back.rows() == 5);
  CHECK(back.cols() == 3);
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("metadata keeps order and reports bad lines") {
  const fs::path path = temp_dir() / "meta.txt";
  const Metadata meta{{"backbone", "slim"}, {"l1", "1"}, {"seed", "2024"}};
  write_metadata(path, meta);
  CHECK(read_metadata(path) == meta);
  CHECK(*metadata_get(meta, "backbone") == "slim");
  CHECK_FALSE(metadata_get(meta, "missing").has_value());

  std::ofstream bad(path);
  bad << "key=ok\nno separator here\n";
  bad.close();
  try {
    read_metadata(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("malformed MatrixMarket input names the line") {
  const fs::path path = temp_dir() / "bad.mtx";
  std::ofstream out(path);
  out << "%%MatrixMarket matrix coordinate integer general\n";
  out << "2 2 2\n";
  out << "1 1 1\n";
  out << "zzz\n";
  out.close();
  try {
    read_interactions(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 4);
  }
}

TEST_CASE("content hashes separate different matrices") {
  const auto a = InteractionMatrix::from_cells(3, 3, {{0, 0}});
  const auto b = InteractionMatrix::from_cells(3, 3, {{0, 1}});
  CHECK(content_hash(a) != content_hash(b));
  CHECK(content_hash(a) == content_hash(a));
}
