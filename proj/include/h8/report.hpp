/// @file report.hpp
/// JSON and CSV rendering of results, with the run manifest envelope.
#pragma once

#include <gmpxx.h>

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "h8/dyadic.hpp"
#include "h8/f2linalg.hpp"
#include "h8/moments.hpp"

namespace h8 {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

/// "num/den", or "num" for integers.
std::string rational_str(const mpq_class& q);
/// @throws ValidationError on malformed input or a zero denominator.
mpq_class parse_rational(const std::string& s);
Dyadic parse_dyadic(const std::string& s);

struct RunManifest {
    std::string command;
    json params = json::object();
    std::string cache_fingerprint;
    std::string version = kToolVersion;
    double wall_time_s = 0;
    std::string result_digest;
};

/// SHA-256 of result.dump(); object keys are sorted, so this is canonical.
std::string result_digest(const json& result);

/// {"schema", "manifest", "result"}; fills manifest.result_digest.
json make_envelope(RunManifest manifest, const json& result);
/// @throws ValidationError on a schema or digest mismatch.
json open_envelope(const json& envelope);

json to_json(const MomentReport& r);
MomentReport moment_report_from_json(const json& j);

json to_json(const PointMassReport& r);
PointMassReport point_mass_from_json(const json& j);

json to_json(const GammaResult& r);
GammaResult gamma_result_from_json(const json& j);

std::string classes_str(const std::vector<CongClass>& classes);
std::vector<CongClass> parse_classes(const std::string& s);

/// Columns: X, class, k, a_num, a_den, empirical_num, empirical_den,
/// mainterm_num, mainterm_den, ratio_decimal.
void write_moment_csv(std::ostream& os, const MomentReport& r);

struct MomentCsvRow {
    std::uint64_t X = 0;
    std::string cls;
    int k = 0;
    mpq_class a, empirical, main_term;
    double ratio = 0;
};
std::vector<MomentCsvRow> read_moment_csv(std::istream& is);

}  // namespace h8
