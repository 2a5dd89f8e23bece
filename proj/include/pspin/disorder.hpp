#pragma once

// i.i.d. standard normal couplings J_{i_1...i_p}, stored unsymmetrised in
// row-major index order (last index fastest).

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

namespace pspin {

inline constexpr std::uint64_t kDefaultEntryBudget = std::uint64_t{1} << 31;

class SizeError : public std::length_error {
public:
  SizeError(std::uint64_t requested_bytes, const std::string& what)
      : std::length_error(what), requested_bytes_(requested_bytes) {}
  std::uint64_t requested_bytes() const { return requested_bytes_; }

private:
  std::uint64_t requested_bytes_;
};

/// n^p, or throws SizeError when it exceeds max_entries.
std::uint64_t tensor_entries(int n, int p, std::uint64_t max_entries = kDefaultEntryBudget);

class DisorderTensor {
public:
  DisorderTensor(int n, int p, std::vector<double> entries, std::uint64_t seed = 0);

  /// All couplings zero.
  static DisorderTensor zeros(int n, int p);

  int n() const { return n_; }
  int p() const { return p_; }
  std::uint64_t seed() const { return seed_; }
  std::span<const double> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// Flat row-major offset of a zero-based index tuple.
  std::size_t offset(std::span<const int> index) const;

  friend bool operator==(const DisorderTensor&, const DisorderTensor&) = default;

private:
  int n_;
  int p_;
  std::uint64_t seed_;
  std::vector<double> entries_;
};

DisorderTensor sample_disorder(int n, int p, std::uint64_t seed,
                               std::uint64_t max_entries = kDefaultEntryBudget);

/// Binary layout: "PSPN", u16 version, u32 N, u16 p, u32 reserved (all
/// little-endian, 16 bytes), then N^p little-endian f64.
void write_disorder(const std::filesystem::path& path, const DisorderTensor& j);
DisorderTensor read_disorder(const std::filesystem::path& path,
                             std::uint64_t max_entries = kDefaultEntryBudget);

}  // namespace pspin
