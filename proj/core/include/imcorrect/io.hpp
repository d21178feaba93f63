#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "imcorrect/interaction_matrix.hpp"
#include "imcorrect/mapping_matrix.hpp"

namespace imc {

// Interaction matrices travel as MatrixMarket coordinate files
// (`%%MatrixMarket matrix coordinate integer general`, 1-based indices).
void write_interactions(const std::filesystem::path& path,
                        const InteractionMatrix& r);
InteractionMatrix read_interactions(const std::filesystem::path& path);

// Flip files are the same format plus a `%direction: negative|positive`
// comment line. On read, `override_direction` wins over the header; it is
// an error if neither is present.
void write_flip_set(const std::filesystem::path& path, const FlipSet& f);
FlipSet read_flip_set(const std::filesystem::path& path,
                      std::optional<Direction> override_direction = {});

// Mapping matrices: sparse storage serializes as MatrixMarket coordinate
// real; dense storage as a binary file with magic "IMCW", a u32
// little-endian dim, then dim^2 little-endian doubles in row-major order.
// read_mapping sniffs the leading bytes to pick the decoder.
void write_mapping(const std::filesystem::path& path, const MappingMatrix& w);
MappingMatrix read_mapping(const std::filesystem::path& path);

// Rectangular dense matrices (embeddings): magic "IMCD", u32 rows,
// u32 cols, row-major little-endian doubles.
void write_dense_matrix(const std::filesystem::path& path,
                        const Eigen::MatrixXd& m);
Eigen::MatrixXd read_dense_matrix(const std::filesystem::path& path);

// Ordered key=value metadata sidecars.
using Metadata = std::vector<std::pair<std::string, std::string>>;

void write_metadata(const std::filesystem::path& path, const Metadata& meta);
Metadata read_metadata(const std::filesystem::path& path);
std::optional<std::string> metadata_get(const Metadata& meta,
                                        const std::string& key);

// FNV-1a content hashes, used for provenance records.
std::uint64_t content_hash(const InteractionMatrix& r);
std::uint64_t file_hash(const std::filesystem::path& path);
std::string hash_hex(std::uint64_t h);

}  // namespace imc
