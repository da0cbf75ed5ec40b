#pragma once

// SRDE: binary container for (token length, embedding) records.
//
//   "SRDE"                      4 bytes magic
//   version      u32 LE         = 1
//   count n      u64 LE
//   dimension m  u32 LE
//   n records:   u32 LE token length, then m IEEE-754 binary32 LE values
//
// No padding anywhere.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace srd {

class SrdeError : public std::runtime_error {
 public:
  SrdeError(const std::string& what, std::uint64_t offset);
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

inline constexpr std::uint32_t kSrdeVersion = 1;

/// n records of token length plus an m-dimensional float vector, stored
/// row-major.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  EmbeddingSet(std::size_t dimension, std::vector<std::uint32_t> lengths,
               std::vector<float> values);

  std::size_t size() const { return lengths_.size(); }
  std::size_t dimension() const { return dimension_; }
  const std::vector<std::uint32_t>& lengths() const { return lengths_; }
  const std::vector<float>& values() const { return values_; }
  std::span<const float> vector(std::size_t i) const {
    return {values_.data() + i * dimension_, dimension_};
  }

  bool operator==(const EmbeddingSet&) const = default;

 private:
  std::size_t dimension_ = 0;
  std::vector<std::uint32_t> lengths_;
  std::vector<float> values_;
};

std::vector<std::uint8_t> encode_srde(const EmbeddingSet& set);
EmbeddingSet decode_srde(std::span<const std::uint8_t> bytes);

void write_embeddings(const std::filesystem::path& path, const EmbeddingSet& set);
EmbeddingSet read_embeddings(const std::filesystem::path& path);

}  // namespace srd
