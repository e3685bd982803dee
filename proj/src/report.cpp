#include "h8/report.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "h8/errors.hpp"
#include "h8/sieve.hpp"

namespace h8 {

std::string rational_str(const mpq_class& q) {
    mpq_class c = q;
    c.canonicalize();
    if (c.get_den() == 1) return c.get_num().get_str();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

mpq_class parse_rational(const std::string& s) {
    const auto slash = s.find('/');
    mpz_class num, den = 1;
    auto parse_int = [&](const std::string& t, mpz_class& out) {
        if (t.empty() || out.set_str(t, 10) != 0) throw ValidationError("malformed rational '" + s + "'");
    };
    if (slash == std::string::npos) {
        parse_int(s, num);
    } else {
        parse_int(s.substr(0, slash), num);
        parse_int(s.substr(slash + 1), den);
    }
    if (den == 0) throw ValidationError("zero denominator in '" + s + "'");
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

Dyadic parse_dyadic(const std::string& s) {
    const mpq_class q = parse_rational(s);
    const mpz_class den = q.get_den();
    const auto shift = mpz_sizeinbase(den.get_mpz_t(), 2) - 1;
    if (den != (mpz_class(1) << shift)) throw ValidationError("'" + s + "' is not dyadic");
    return Dyadic(q.get_num(), static_cast<unsigned>(shift));
}

std::string result_digest(const json& result) {
    const std::string s = result.dump();
    return sha256_hex(s.data(), s.size());
}

json make_envelope(RunManifest m, const json& result) {
    m.result_digest = result_digest(result);
    json j;
    j["schema"] = kSchemaVersion;
    j["manifest"] = {{"command", m.command},
                     {"params", m.params},
                     {"cache_fingerprint", m.cache_fingerprint},
                     {"version", m.version},
                     {"wall_time_s", m.wall_time_s},
                     {"result_digest", m.result_digest}};
    j["result"] = result;
    return j;
}

json open_envelope(const json& env) {
    if (!env.contains("schema") || env["schema"] != kSchemaVersion) {
        throw ValidationError("unsupported report schema");
    }
    const json& res = env.at("result");
    if (env.at("manifest").at("result_digest").get<std::string>() != result_digest(res)) {
        throw ValidationError("result digest mismatch");
    }
    return res;
}

std::string classes_str(const std::vector<CongClass>& classes) {
    std::string s;
    for (auto c : classes) {
        if (!s.empty()) s += '+';
        s += to_string(c);
    }
    return s;
}

std::vector<CongClass> parse_classes(const std::string& s) {
    if (s == "all") return {CongClass::Odd1Mod4, CongClass::FourMod8, CongClass::ZeroMod8};
    std::vector<CongClass> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, '+')) {
        if (tok == "1mod4") out.push_back(CongClass::Odd1Mod4);
        else if (tok == "4mod8") out.push_back(CongClass::FourMod8);
        else if (tok == "0mod8") out.push_back(CongClass::ZeroMod8);
        else throw ValidationError("unknown class '" + tok + "'");
    }
    if (out.empty()) throw ValidationError("empty class list");
    return out;
}

namespace {

Sign parse_sign(const std::string& s) {
    if (s == "neg") return Sign::Negative;
    if (s == "pos") return Sign::Positive;
    throw ValidationError("unknown sign '" + s + "'");
}

json ratio_json(double r) { return std::isfinite(r) ? json(r) : json(nullptr); }

}  // namespace

json to_json(const MomentReport& r) {
    json j;
    j["X"] = r.config.X;
    j["sign"] = to_string(r.config.sign);
    j["classes"] = classes_str(r.config.classes);
    j["k"] = r.config.k;
    j["a"] = rational_str(r.config.a);
    j["variant"] = to_string(r.config.variant);
    j["target_constant"] = r.target_constant ? json(rational_str(*r.target_constant)) : json(nullptr);
    j["empty"] = r.empty;
    j["notes"] = r.notes;
    json grid = json::array();
    for (const auto& c : r.grid) {
        grid.push_back({{"X", c.X},
                        {"count", c.count},
                        {"empirical", rational_str(c.empirical)},
                        {"main_term", rational_str(c.main_term)},
                        {"ratio", ratio_json(c.ratio())}});
    }
    j["grid"] = grid;
    return j;
}

MomentReport moment_report_from_json(const json& j) {
    MomentReport r;
    r.config.X = j.at("X").get<std::uint64_t>();
    r.config.sign = parse_sign(j.at("sign").get<std::string>());
    r.config.classes = parse_classes(j.at("classes").get<std::string>());
    r.config.k = j.at("k").get<int>();
    r.config.a = parse_rational(j.at("a").get<std::string>());
    r.config.variant = parse_variant(j.at("variant").get<std::string>());
    if (!j.at("target_constant").is_null()) r.target_constant = parse_rational(j["target_constant"].get<std::string>());
    r.empty = j.at("empty").get<bool>();
    r.notes = j.at("notes").get<std::vector<std::string>>();
    for (const auto& g : j.at("grid")) {
        Checkpoint c;
        c.X = g.at("X").get<std::uint64_t>();
        c.count = g.at("count").get<std::uint64_t>();
        c.empirical = parse_rational(g.at("empirical").get<std::string>());
        c.main_term = parse_rational(g.at("main_term").get<std::string>());
        r.config.checkpoints.push_back(c.X);
        r.grid.push_back(std::move(c));
    }
    return r;
}

json to_json(const PointMassReport& r) {
    json j;
    j["X"] = r.X;
    j["sign"] = to_string(r.sign);
    j["count"] = r.count;
    j["target"] = rational_str(r.target);
    json m = json::array(), mm = json::array(), dist = json::array();
    for (const auto& q : r.moments) m.push_back(rational_str(q));
    for (const auto& q : r.mixed_moments) mm.push_back(rational_str(q));
    for (double d : r.distance) dist.push_back(d);
    j["moments"] = m;
    j["distance"] = dist;
    j["mixed_count"] = r.mixed_count;
    j["mixed_moments"] = mm;
    json h = json::array();
    for (const auto& [v, n] : r.histogram) h.push_back({{"value", rational_str(v)}, {"count", n}});
    j["histogram"] = h;
    return j;
}

PointMassReport point_mass_from_json(const json& j) {
    PointMassReport r;
    r.X = j.at("X").get<std::uint64_t>();
    r.sign = parse_sign(j.at("sign").get<std::string>());
    r.count = j.at("count").get<std::uint64_t>();
    r.target = parse_rational(j.at("target").get<std::string>());
    for (const auto& s : j.at("moments")) r.moments.push_back(parse_rational(s.get<std::string>()));
    for (const auto& d : j.at("distance")) r.distance.push_back(d.get<double>());
    r.mixed_count = j.at("mixed_count").get<std::uint64_t>();
    for (const auto& s : j.at("mixed_moments")) r.mixed_moments.push_back(parse_rational(s.get<std::string>()));
    for (const auto& e : j.at("histogram"))
        r.histogram[parse_rational(e.at("value").get<std::string>())] = e.at("count").get<std::uint64_t>();
    return r;
}

json to_json(const GammaResult& r) {
    json per = json::object();
    for (const auto& [w, v] : r.per_U) per[w] = v.str();
    return {{"per_U", per}, {"total", r.total.str()}, {"states", r.states}};
}

GammaResult gamma_result_from_json(const json& j) {
    GammaResult r;
    for (const auto& [w, v] : j.at("per_U").items()) r.per_U[w] = parse_dyadic(v.get<std::string>());
    r.total = parse_dyadic(j.at("total").get<std::string>());
    r.states = j.at("states").get<std::uint64_t>();
    return r;
}

void write_moment_csv(std::ostream& os, const MomentReport& r) {
    os << "X,class,k,a_num,a_den,empirical_num,empirical_den,mainterm_num,mainterm_den,ratio_decimal\n";
    const std::string cls = classes_str(r.config.classes);
    for (const auto& c : r.grid) {
        os << c.X << ',' << cls << ',' << r.config.k << ',' << r.config.a.get_num() << ',' << r.config.a.get_den()
           << ',' << c.empirical.get_num() << ',' << c.empirical.get_den() << ',' << c.main_term.get_num() << ','
           << c.main_term.get_den() << ',' << std::setprecision(17) << c.ratio() << '\n';
    }
}

std::vector<MomentCsvRow> read_moment_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("empty CSV");
    std::vector<MomentCsvRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        if (f.size() != 10) throw ValidationError("CSV row has " + std::to_string(f.size()) + " fields");
        MomentCsvRow r;
        r.X = std::stoull(f[0]);
        r.cls = f[1];
        r.k = std::stoi(f[2]);
        r.a = parse_rational(f[3] + "/" + f[4]);
        r.empirical = parse_rational(f[5] + "/" + f[6]);
        r.main_term = parse_rational(f[7] + "/" + f[8]);
        r.ratio = f[9] == "nan" ? std::nan("") : std::stod(f[9]);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace h8
