#include "h8/sieve.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "h8/errors.hpp"

namespace h8 {

namespace {

constexpr char kMagic[4] = {'H', '8', 'S', 'V'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <typename T>
T get_le(const std::uint8_t* p) {
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(p[i]) << (8 * i);
    return v;
}

std::size_t bitset_bytes(std::uint64_t X) { return static_cast<std::size_t>((X + 1 + 7) / 8); }

}  // namespace

std::uint64_t SieveTable::bytes_for(std::uint64_t X) {
    return (X + 1) + ((X + 64) / 64) * 8;
}

SieveTable SieveTable::build(std::uint64_t X, std::uint64_t budget_bytes) {
    if (X < 2) throw ValidationError("sieve limit must be at least 2");
    if (bytes_for(X) > budget_bytes) {
        throw CapacityError("sieve to " + std::to_string(X) + " needs " + std::to_string(bytes_for(X)) +
                            " bytes, budget is " + std::to_string(budget_bytes));
    }
    SieveTable t;
    t.limit_ = X;
    t.omega_.assign(X + 1, 0);
    t.sqfree_.assign((X + 64) / 64, ~std::uint64_t{0});
    t.sqfree_[0] &= ~std::uint64_t{1};  // n = 0 is not a valid entry
    // Bits past X are cleared so that equality and serialization are canonical.
    if ((X + 1) % 64) t.sqfree_.back() &= (std::uint64_t{1} << ((X + 1) % 64)) - 1;

    for (std::uint64_t p = 2; p <= X; ++p) {
        if (t.omega_[p] != 0) continue;
        for (std::uint64_t m = p; m <= X; m += p) ++t.omega_[m];
        if (p <= X / p) {
            const std::uint64_t q = p * p;
            for (std::uint64_t m = q; m <= X; m += q) t.sqfree_[m >> 6] &= ~(std::uint64_t{1} << (m & 63));
        }
    }
    return t;
}

std::vector<std::uint8_t> SieveTable::serialize() const {
    std::vector<std::uint8_t> out;
    out.reserve(16 + bitset_bytes(limit_) + omega_.size());
    out.insert(out.end(), kMagic, kMagic + 4);
    put_le<std::uint32_t>(out, kCacheVersion);
    put_le<std::uint64_t>(out, limit_);
    const std::size_t nb = bitset_bytes(limit_);
    for (std::size_t i = 0; i < nb; ++i) out.push_back(static_cast<std::uint8_t>(sqfree_[i / 8] >> (8 * (i % 8))));
    out.insert(out.end(), omega_.begin(), omega_.end());
    return out;
}

void SieveTable::save(const std::string& path) const {
    const auto bytes = serialize();
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write sieve cache " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("short write on sieve cache " + path);
}

SieveTable SieveTable::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open sieve cache " + path);
    std::array<std::uint8_t, 16> head{};
    f.read(reinterpret_cast<char*>(head.data()), head.size());
    if (f.gcount() != 16) throw std::runtime_error("sieve cache truncated: " + path);
    if (std::memcmp(head.data(), kMagic, 4) != 0) throw std::runtime_error("bad sieve cache magic: " + path);
    auto version = get_le<std::uint32_t>(head.data() + 4);
    if (version != kCacheVersion) {
        throw std::runtime_error("unsupported sieve cache version " + std::to_string(version));
    }
    SieveTable t;
    t.limit_ = get_le<std::uint64_t>(head.data() + 8);
    if (t.limit_ < 2 || t.limit_ > (std::uint64_t{1} << 40)) throw std::runtime_error("bad sieve cache limit");
    const std::size_t nb = bitset_bytes(t.limit_);
    std::vector<std::uint8_t> bits(nb);
    f.read(reinterpret_cast<char*>(bits.data()), static_cast<std::streamsize>(nb));
    t.omega_.resize(t.limit_ + 1);
    f.read(reinterpret_cast<char*>(t.omega_.data()), static_cast<std::streamsize>(t.omega_.size()));
    if (!f) throw std::runtime_error("sieve cache truncated: " + path);
    t.sqfree_.assign((t.limit_ + 64) / 64, 0);
    for (std::size_t i = 0; i < nb; ++i) t.sqfree_[i / 8] |= static_cast<std::uint64_t>(bits[i]) << (8 * (i % 8));
    return t;
}

std::string sha256_hex(const void* data, std::size_t len) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int mdlen = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data, len) != 1 || EVP_DigestFinal_ex(ctx.get(), md, &mdlen) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned i = 0; i < mdlen; ++i) {
        s.push_back(hex[md[i] >> 4]);
        s.push_back(hex[md[i] & 15]);
    }
    return s;
}

std::string SieveTable::fingerprint() const {
    const auto bytes = serialize();
    return sha256_hex(bytes.data(), bytes.size());
}

SieveTable load_or_build_sieve(std::uint64_t X, const std::string& path, std::uint64_t budget_bytes) {
    if (!path.empty() && std::filesystem::exists(path)) {
        try {
            SieveTable t = SieveTable::load(path);
            if (t.limit() >= X) return t;
        } catch (const std::runtime_error&) {
            // unreadable cache: fall through and overwrite it
        }
    }
    SieveTable t = SieveTable::build(X, budget_bytes);
    if (!path.empty()) t.save(path);
    return t;
}

}  // namespace h8
