/// @file moments.hpp
/// Moment sweeps of the extension counts over fundamental discriminants.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "h8/arith.hpp"
#include "h8/sieve.hpp"

namespace h8 {

enum class MomentVariant { Tilde, Everywhere, D4, Surj };

std::string to_string(MomentVariant v);
MomentVariant parse_variant(const std::string& s);

struct SweepConfig {
    std::uint64_t X = 0;
    Sign sign = Sign::Negative;
    std::vector<CongClass> classes{CongClass::Odd1Mod4};
    int k = 1;
    mpq_class a{1, 3};
    MomentVariant variant = MomentVariant::Tilde;
    unsigned threads = 1;
    /// Ascending checkpoints, the last equal to X. Empty: X·2^{-j} while
    /// X·2^{-j} >= 1000, at most 12 points.
    std::vector<std::uint64_t> checkpoints;
};

struct Checkpoint {
    std::uint64_t X = 0;
    std::uint64_t count = 0;  ///< discriminants with |d| < X in the sweep
    mpq_class empirical;      ///< Σ (a^ω · count(d))^k
    mpq_class main_term;      ///< Σ C_class · (3a)^{kω}; for D4, Σ (4a)^{kω}
    double ratio() const;
};

struct MomentReport {
    SweepConfig config;
    std::vector<Checkpoint> grid;
    /// Shared constant of the selected classes, when they share one.
    std::optional<mpq_class> target_constant;
    bool empty = false;
    std::vector<std::string> notes;
};

/// Main-term constant of one class.
mpq_class class_constant(Sign sign, CongClass cls, int k, const mpq_class& a);

/// The default geometric grid for X.
std::vector<std::uint64_t> default_checkpoints(std::uint64_t X);

/// @throws ValidationError on a < 1/3, k < 1, bad checkpoints or a sieve
/// that does not cover X - 1.
MomentReport sweep(const SieveTable& sieve, const SweepConfig& config);

struct PointMassReport {
    std::uint64_t X = 0;
    Sign sign = Sign::Negative;
    std::uint64_t count = 0;             ///< odd discriminants
    mpq_class target;                    ///< 1/32 or 1/192
    std::vector<mpq_class> moments;      ///< E((f/g)^k), k = 1..k_max, odd d
    std::vector<double> distance;        ///< |moment_k − target^k|
    std::uint64_t mixed_count = 0;       ///< all three classes
    std::vector<mpq_class> mixed_moments;
    std::map<mpq_class, std::uint64_t> histogram;  ///< f/g over odd d
};

PointMassReport point_mass_estimate(const SieveTable& sieve, std::uint64_t X, Sign sign, int k_max,
                                    unsigned threads = 1);

/// Σ surj_count(d)^k over odd d against (1/4 or 1/24)^k · Σ 3^{kω(d)}.
MomentReport surj_sweep(const SieveTable& sieve, std::uint64_t X, Sign sign, int k = 1, unsigned threads = 1,
                        std::vector<std::uint64_t> checkpoints = {});

/// (1/4)^ω · count_d4(d) over all classes; main_term is the number of d,
/// so ratio() is the mean.
MomentReport d4_heuristic_sweep(const SieveTable& sieve, std::uint64_t X, Sign sign, int k = 1,
                                unsigned threads = 1, std::vector<std::uint64_t> checkpoints = {});

}  // namespace h8
