#include "srd/srde.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace srd {

namespace {

constexpr std::uint8_t kMagic[4] = {'S', 'R', 'D', 'E'};
constexpr std::size_t kHeaderSize = 4 + 4 + 8 + 4;

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(bytes[offset + i]) << (8 * i);
  return v;
}

std::string describe(const std::string& what, std::uint64_t offset) {
  std::ostringstream os;
  os << "SRDE: " << what << " at byte offset " << offset;
  return os.str();
}

}  // namespace

SrdeError::SrdeError(const std::string& what, std::uint64_t offset)
    : std::runtime_error(describe(what, offset)), offset_(offset) {}

EmbeddingSet::EmbeddingSet(std::size_t dimension, std::vector<std::uint32_t> lengths,
                           std::vector<float> values)
    : dimension_(dimension), lengths_(std::move(lengths)), values_(std::move(values)) {
  if (dimension_ == 0) throw std::invalid_argument("embedding dimension must be positive");
  if (values_.size() != lengths_.size() * dimension_)
    throw std::invalid_argument("embedding payload does not match count x dimension");
  for (auto len : lengths_)
    if (len == 0) throw std::invalid_argument("token lengths must be at least 1");
  for (float v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("embeddings must be finite");
}

std::vector<std::uint8_t> encode_srde(const EmbeddingSet& set) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.reserve(kHeaderSize + set.size() * (4 + 4 * set.dimension()));
  put_le<std::uint32_t>(out, kSrdeVersion);
  put_le<std::uint64_t>(out, set.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(set.dimension()));
  for (std::size_t i = 0; i < set.size(); ++i) {
    put_le<std::uint32_t>(out, set.lengths()[i]);
    for (float v : set.vector(i)) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

EmbeddingSet decode_srde(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) throw SrdeError("truncated header", bytes.size());
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw SrdeError("bad magic", 0);
  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != kSrdeVersion)
    throw SrdeError("unsupported version " + std::to_string(version), 4);
  const auto count = get_le<std::uint64_t>(bytes, 8);
  const auto dim = get_le<std::uint32_t>(bytes, 16);
  if (dim == 0) throw SrdeError("zero dimension", 16);

  const std::uint64_t record = 4 + 4ull * dim;
  const std::uint64_t available = (bytes.size() - kHeaderSize) / record;
  if (count > available) {
    std::ostringstream os;
    os << "truncated payload: header declares " << count << " records, found " << available;
    throw SrdeError(os.str(), kHeaderSize + available * record);
  }
  if (kHeaderSize + count * record != bytes.size())
    throw SrdeError("trailing bytes after last record", kHeaderSize + count * record);

  std::vector<std::uint32_t> lengths(count);
  std::vector<float> values(count * dim);
  std::size_t pos = kHeaderSize;
  for (std::uint64_t i = 0; i < count; ++i) {
    lengths[i] = get_le<std::uint32_t>(bytes, pos);
    if (lengths[i] == 0) throw SrdeError("zero token length", pos);
    pos += 4;
    for (std::uint32_t j = 0; j < dim; ++j, pos += 4) {
      const float v = std::bit_cast<float>(get_le<std::uint32_t>(bytes, pos));
      if (!std::isfinite(v)) throw SrdeError("non-finite value", pos);
      values[i * dim + j] = v;
    }
  }
  return EmbeddingSet(dim, std::move(lengths), std::move(values));
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingSet& set) {
  const auto bytes = encode_srde(set);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

EmbeddingSet read_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_srde(bytes);
}

}  // namespace srd
