#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace h8 {

/// μ²(n) as one bit and ω(n) as one byte for 1 <= n <= limit.
class SieveTable {
public:
    static constexpr std::uint64_t kDefaultBudget = std::uint64_t{1} << 31;
    static constexpr std::uint32_t kCacheVersion = 1;

    SieveTable() = default;

    /// @throws CapacityError if the table would exceed budget_bytes.
    static SieveTable build(std::uint64_t X, std::uint64_t budget_bytes = kDefaultBudget);

    /// Bytes needed for a table of the given limit.
    static std::uint64_t bytes_for(std::uint64_t X);

    std::uint64_t limit() const { return limit_; }
    bool squarefree(std::uint64_t n) const {
        return (sqfree_[n >> 6] >> (n & 63)) & 1U;
    }
    int omega(std::uint64_t n) const { return omega_[n]; }

    /// Binary cache: "H8SV", u32 version, u64 X, μ² bitset, ω bytes; all
    /// little-endian.
    void save(const std::string& path) const;
    /// @throws std::runtime_error on bad magic, version or truncation.
    static SieveTable load(const std::string& path);

    /// SHA-256 over the serialized table, hex.
    std::string fingerprint() const;

    friend bool operator==(const SieveTable&, const SieveTable&) = default;

private:
    std::vector<std::uint8_t> serialize() const;

    std::uint64_t limit_ = 0;
    std::vector<std::uint64_t> sqfree_;
    std::vector<std::uint8_t> omega_;
};

/// Loads the cache at path when it exists and covers X, otherwise builds and
/// (if path is non-empty) writes it.
SieveTable load_or_build_sieve(std::uint64_t X, const std::string& path,
                               std::uint64_t budget_bytes = SieveTable::kDefaultBudget);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const void* data, std::size_t len);

}  // namespace h8
