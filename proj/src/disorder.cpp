#include "pspin/disorder.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <limits>
#include <string>

#include "pspin/rng.hpp"

namespace pspin {

namespace {

constexpr std::array<char, 4> kMagic{'P', 'S', 'P', 'N'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void put_le(std::ostream& os, T value) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) os.put(static_cast<char>((u >> (8 * i)) & 0xff));
}

template <typename U>
U get_le(std::istream& is) {
  U u = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) throw std::runtime_error("unexpected end of disorder file");
    u |= static_cast<U>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return u;
}

}  // namespace

std::uint64_t tensor_entries(int n, int p, std::uint64_t max_entries) {
  if (n < 1 || p < 1) throw std::invalid_argument("tensor dimensions must be positive");
  std::uint64_t count = 1;
  bool overflow = false;
  for (int i = 0; i < p; ++i) {
    if (count > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(n)) {
      overflow = true;
      break;
    }
    count *= static_cast<std::uint64_t>(n);
  }
  if (overflow || count > max_entries) {
    const std::uint64_t bytes =
        overflow ? std::numeric_limits<std::uint64_t>::max() : count * sizeof(double);
    throw SizeError(bytes, "disorder tensor N=" + std::to_string(n) + ", p=" + std::to_string(p) + " needs " +
                               (overflow ? std::string("more than 2^64") : std::to_string(bytes)) +
                               " bytes, above the budget of " + std::to_string(max_entries * sizeof(double)) +
                               " bytes");
  }
  return count;
}

DisorderTensor::DisorderTensor(int n, int p, std::vector<double> entries, std::uint64_t seed)
    : n_(n), p_(p), seed_(seed), entries_(std::move(entries)) {
  if (n < 1 || p < 1) throw std::invalid_argument("DisorderTensor: n and p must be positive");
  if (entries_.size() != tensor_entries(n, p, std::numeric_limits<std::uint64_t>::max()))
    throw std::invalid_argument("DisorderTensor: entry count must equal n^p");
}

DisorderTensor DisorderTensor::zeros(int n, int p) {
  return DisorderTensor(n, p, std::vector<double>(tensor_entries(n, p), 0.0));
}

std::size_t DisorderTensor::offset(std::span<const int> index) const {
  if (static_cast<int>(index.size()) != p_) throw std::invalid_argument("index rank must equal p");
  std::size_t off = 0;
  for (int i : index) {
    if (i < 0 || i >= n_) throw std::out_of_range("tensor index out of range");
    off = off * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
  }
  return off;
}

DisorderTensor sample_disorder(int n, int p, std::uint64_t seed, std::uint64_t max_entries) {
  if (n < 2 || p < 2) throw std::invalid_argument("sample_disorder: n and p must be >= 2");
  const std::uint64_t count = tensor_entries(n, p, max_entries);
  std::vector<double> entries(count);
  Engine rng = make_stream(seed, 0);
  std::normal_distribution<double> normal;
  for (double& x : entries) x = normal(rng);
  return DisorderTensor(n, p, std::move(entries), seed);
}

void write_disorder(const std::filesystem::path& path, const DisorderTensor& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write(kMagic.data(), kMagic.size());
  put_le<std::uint16_t>(os, kVersion);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(j.n()));
  put_le<std::uint16_t>(os, static_cast<std::uint16_t>(j.p()));
  put_le<std::uint32_t>(os, 0);
  for (double x : j.entries()) put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(x));
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

DisorderTensor read_disorder(const std::filesystem::path& path, std::uint64_t max_entries) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw std::runtime_error(path.string() + ": not a PSPN disorder file");
  const auto version = get_le<std::uint16_t>(is);
  if (version != kVersion) throw std::runtime_error(path.string() + ": unsupported version " + std::to_string(version));
  const auto n = static_cast<int>(get_le<std::uint32_t>(is));
  const auto p = static_cast<int>(get_le<std::uint16_t>(is));
  (void)get_le<std::uint32_t>(is);
  const std::uint64_t count = tensor_entries(n, p, max_entries);
  std::vector<double> entries(count);
  for (double& x : entries) x = std::bit_cast<double>(get_le<std::uint64_t>(is));
  return DisorderTensor(n, p, std::move(entries));
}

}  // namespace pspin
