#include "h8/cli.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "h8/arith.hpp"
#include "h8/errors.hpp"
#include "h8/f2linalg.hpp"
#include "h8/h8count.hpp"
#include "h8/linking.hpp"
#include "h8/moments.hpp"
#include "h8/report.hpp"
#include "h8/sieve.hpp"

namespace h8::cli {

namespace {

struct Common {
    unsigned threads = 1;
    std::string cache;
    std::string out_path;
    std::string format = "json";
};

struct Artifact {
    std::string command;
    json params = json::object();
    std::string fingerprint;
    json result;
    const MomentReport* moments = nullptr;  // enables CSV
};

Sign parse_sign(const std::string& s) {
    if (s == "neg") return Sign::Negative;
    if (s == "pos") return Sign::Positive;
    throw ValidationError("--sign must be pos or neg");
}

void write_artifact(const Common& c, const Artifact& a, double wall) {
    if (c.out_path.empty()) return;
    std::ofstream f(c.out_path);
    if (!f) throw ValidationError("cannot open " + c.out_path + " for writing");
    if (c.format == "csv") {
        if (!a.moments) throw ValidationError("--format csv is only available for sweep reports");
        write_moment_csv(f, *a.moments);
        return;
    }
    RunManifest m;
    m.command = a.command;
    m.params = a.params;
    m.cache_fingerprint = a.fingerprint;
    m.wall_time_s = wall;
    f << make_envelope(m, a.result).dump(2) << '\n';
}

std::string fmt_factorization(const TriFactorization& t) {
    std::ostringstream os;
    os << '{' << t.d[0] << ',' << t.d[1] << ',' << t.d[2] << '}';
    return os.str();
}

void print_grid(std::ostream& out, const MomentReport& r) {
    out << "sign " << to_string(r.config.sign) << ", classes " << classes_str(r.config.classes) << ", k "
        << r.config.k << ", a " << rational_str(r.config.a) << ", variant " << to_string(r.config.variant) << '\n';
    if (r.target_constant) out << "target constant " << rational_str(*r.target_constant) << '\n';
    out << std::setw(12) << "X" << std::setw(12) << "count" << std::setw(16) << "ratio" << '\n';
    for (const auto& c : r.grid)
        out << std::setw(12) << c.X << std::setw(12) << c.count << std::setw(16) << std::setprecision(8)
            << c.ratio() << '\n';
    for (const auto& n : r.notes) out << "note: " << n << '\n';
    if (r.empty) out << "no discriminants in range\n";
}

// One PASS/FAIL line per check; findings are printed but never fail.
struct Suite {
    std::ostream& out;
    int failures = 0;
    void check(const std::string& name, bool ok, const std::string& detail = "") {
        out << (ok ? "PASS " : "FAIL ") << name;
        if (!detail.empty()) out << " (" << detail << ')';
        out << '\n';
        if (!ok) ++failures;
    }
    void finding(const std::string& text) { out << "FINDING " << text << '\n'; }
};

int verify_all(std::ostream& out, bool quick, std::uint64_t bound) {
    Suite s{out};
    {
        std::uint64_t n = 0, bad = 0, vanish_bad = 0;
        for (std::int64_t a = 3; a <= static_cast<std::int64_t>(bound); ++a) {
            for (std::int64_t d : {a, -a}) {
                if (!is_fundamental(d)) continue;
                const auto D = make_discriminant(d);
                ++n;
                const Dyadic ft = f_tilde(D);
                if (ft != f_via_character_sum(D)) ++bad;
                if (D.omega <= 2 && ft != Dyadic(0)) ++vanish_bad;
            }
        }
        s.check("character sum equals f~ for 3 <= |d| <= " + std::to_string(bound), bad == 0,
                std::to_string(n) + " discriminants, " + std::to_string(bad) + " mismatches");
        s.check("f~ vanishes when omega <= 2", vanish_bad == 0);
    }
    {
        const auto r = make_discriminant(-120);
        s.check("f~(-120) = 1", f_tilde(r) == Dyadic(1));
        s.check("f~(-84) = 0", f_tilde(make_discriminant(-84)) == Dyadic(0));
    }
    {
        struct G {
            CaseTag tag;
            int k;
        };
        std::vector<G> claims = {{CaseTag::NegOdd, 1}, {CaseTag::NegOdd, 2},   {CaseTag::PosOdd, 1},
                                 {CaseTag::PosOdd, 2}, {CaseTag::Neg4Mod8, 1}, {CaseTag::Neg0Mod8, 1},
                                 {CaseTag::Pos4Mod8, 1}};
        if (!quick) {
            claims.push_back({CaseTag::NegOdd, 3});
            claims.push_back({CaseTag::PosOdd, 3});
            claims.push_back({CaseTag::Neg4Mod8, 2});
            claims.push_back({CaseTag::Pos4Mod8, 2});
        }
        for (const auto& g : claims) {
            const auto res = gamma_sum_bruteforce(g.tag, g.k);
            const auto cf = closed_form_value(g.tag, g.k);
            s.check("gamma " + to_string(g.tag) + " k=" + std::to_string(g.k) + " = " +
                        congruence_case(g.tag).closed_form,
                    res.total == cf, res.total.str() + " vs " + cf.str());
        }
        for (int k = 1; k <= (quick ? 2 : 3); ++k) {
            const auto res = gamma_sum_bruteforce(CaseTag::NegOdd, k);
            const auto ker = rank_and_kernel(build_Mk(k));
            s.check("gamma neg-1mod4 k=" + std::to_string(k) + " = 2^(k + dim ker M_k)",
                    res.total == Dyadic::pow2(k + static_cast<int>(ker.basis.size())));
        }
        std::vector<G> open = {{CaseTag::Pos0Mod8, 1}};
        if (!quick) {
            open.push_back({CaseTag::Neg0Mod8, 2});
            open.push_back({CaseTag::Pos0Mod8, 2});
        }
        for (const auto& g : open) {
            const auto res = gamma_sum_bruteforce(g.tag, g.k);
            const auto cf = closed_form_value(g.tag, g.k);
            std::ostringstream os;
            os << "gamma " << to_string(g.tag) << " k=" << g.k << ": brute force " << res.total << ", closed form "
               << congruence_case(g.tag).closed_form << " = " << cf << (res.total == cf ? " (agree)" : " (differ)");
            s.finding(os.str());
        }
    }
    {
        bool ok = true;
        std::string detail;
        for (int k = 1; k <= (quick ? 8 : 10); ++k) {
            const auto r = rank_and_kernel(build_Mk(k));
            long p3 = 1;
            for (int i = 0; i < k; ++i) p3 *= 3;
            if (r.rank != static_cast<std::size_t>(2 * k + 1) ||
                r.basis.size() != static_cast<std::size_t>(p3 - 2 * k - 1)) {
                ok = false;
                detail += "k=" + std::to_string(k) + " ";
            }
        }
        s.check(std::string("dim ker M_k = 3^k - 2k - 1 for k <= ") + (quick ? "8" : "10"), ok, detail);
        const auto m2 = F2Matrix::from_rows({"111000000", "000111000", "000000111", "100100100", "010010010",
                                             "001001001"});
        s.check("M_2 matches the displayed matrix", build_Mk(2) == m2);
    }
    {
        const auto g1 = max_unlinked_exhaustive(1, 0);
        bool g1_ok = g1.max_size == 3 && g1.maximum_sets.size() == 2;
        if (g1_ok) {
            std::vector<std::vector<int>> got;
            for (const auto& st : g1.maximum_sets) {
                std::vector<int> v;
                for (const auto& m : st.members) v.push_back(m.coords[0]);
                got.push_back(v);
            }
            std::sort(got.begin(), got.end());
            g1_ok = got == std::vector<std::vector<int>>{{0, 2, 4}, {1, 3, 5}};
        }
        s.check("G_1 maximum unlinked sets are {0,2,4} and {1,3,5}", g1_ok);
        const auto g2 = max_unlinked_exhaustive(2, 0);
        bool types = g2.max_size == 9 && g2.maximum_sets.size() == 4;
        if (types) {
            for (auto a : {TypeLetter::A, TypeLetter::B})
                for (auto b : {TypeLetter::A, TypeLetter::B}) {
                    auto t = type_set({a, b}).members;
                    std::sort(t.begin(), t.end());
                    bool found = false;
                    for (const auto& st : g2.maximum_sets) found = found || st.members == t;
                    types = types && found;
                }
        }
        s.check("G_2 maximum size 9 with exactly the 4 type sets", types);
        const auto y2 = max_unlinked_exhaustive(0, 1);
        s.check("Y_2 maximum size 2 with 4 maximum sets", y2.max_size == 2 && y2.maximum_sets.size() == 4);
        const auto mixed = max_unlinked_exhaustive(1, 1);
        s.check("(j1,j2) = (1,1) maximum size 6", mixed.max_size == 6);
        for (auto [j1, j2] : std::vector<std::pair<int, int>>{{3, 0}, {1, 1}, {2, 2}, {1, 3}}) {
            const auto rep = verify_type_structure(j1, j2);
            s.check("type structure (" + std::to_string(j1) + "," + std::to_string(j2) + ")", rep.ok(),
                    std::to_string(rep.candidate_count) + " candidates of size " + std::to_string(rep.candidate_size));
            for (const auto& n : rep.notes) s.finding("(" + std::to_string(j1) + "," + std::to_string(j2) + ") " + n);
        }
    }
    out << (s.failures ? "verify-all: " + std::to_string(s.failures) + " failure(s)" : std::string("verify-all: ok"))
        << '\n';
    return s.failures ? kExitVerify : kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Counts and moment statistics of unramified H8 extensions of quadratic fields", "h8tool"};
    app.require_subcommand(1);
    Common com;
    auto add_common = [&](CLI::App* sub, bool with_threads) {
        if (with_threads) sub->add_option("--threads", com.threads, "Worker threads")->check(CLI::Range(1, 256));
        sub->add_option("--cache", com.cache, "Sieve cache file");
        sub->add_option("--out", com.out_path, "Artifact path");
        sub->add_option("--format", com.format, "Artifact format")->check(CLI::IsMember({"json", "csv"}));
    };

    std::uint64_t X = 0;
    std::string sign = "neg", cls = "1mod4", a_str = "1/3", variant = "tilde", case_name;
    int k = 1, kmax = 3, j1 = 0, j2 = 0;
    std::int64_t d = 0;
    bool quick = false, ordered = false, free0 = false;
    std::uint64_t bound = 0;

    auto* s_sieve = app.add_subcommand("sieve", "Build or load the squarefree/omega sieve");
    s_sieve->add_option("--X", X, "Limit")->required();
    add_common(s_sieve, false);

    auto* s_count = app.add_subcommand("count", "Extension counts for one discriminant");
    s_count->add_option("--d", d, "Fundamental discriminant")->required();
    add_common(s_count, false);

    auto* s_mom = app.add_subcommand("moments", "Moment sweep against the main-term constants");
    s_mom->add_option("--X", X, "Sweep bound (exclusive)")->required();
    s_mom->add_option("--sign", sign)->check(CLI::IsMember({"pos", "neg"}));
    s_mom->add_option("--class", cls, "1mod4, 4mod8, 0mod8, all, or a '+'-joined list");
    s_mom->add_option("--k", k)->check(CLI::PositiveNumber);
    s_mom->add_option("--a", a_str, "NUM/DEN");
    s_mom->add_option("--variant", variant)->check(CLI::IsMember({"tilde", "everywhere", "d4", "surj"}));
    add_common(s_mom, true);

    auto* s_pm = app.add_subcommand("pointmass", "Moments of f/g over odd discriminants");
    s_pm->add_option("--X", X)->required();
    s_pm->add_option("--sign", sign)->check(CLI::IsMember({"pos", "neg"}));
    s_pm->add_option("--kmax", kmax)->check(CLI::PositiveNumber);
    add_common(s_pm, true);

    auto* s_surj = app.add_subcommand("surj", "Surjection counts against 1/4 and 1/24");
    s_surj->add_option("--X", X)->required();
    s_surj->add_option("--sign", sign)->check(CLI::IsMember({"pos", "neg"}));
    s_surj->add_option("--k", k)->check(CLI::PositiveNumber);
    add_common(s_surj, true);

    auto* s_gamma = app.add_subcommand("gamma", "Brute-force gamma sum for one congruence case");
    s_gamma->add_option("--case", case_name)->required();
    s_gamma->add_option("--k", k)->check(CLI::PositiveNumber);
    s_gamma->add_flag("--ordered-pairs", ordered, "Quadratic exponent over ordered pairs");
    s_gamma->add_flag("--zero-mod8-free", free0, "Pair-0 products free per coordinate");
    add_common(s_gamma, false);

    auto* s_ker = app.add_subcommand("kernel", "Rank and kernel dimension of M_k");
    s_ker->add_option("--k", k)->required();
    add_common(s_ker, false);

    auto* s_unl = app.add_subcommand("unlinked", "Maximum unlinked sets of Y1^j1 x Y2^j2");
    s_unl->add_option("--j1", j1)->check(CLI::NonNegativeNumber);
    s_unl->add_option("--j2", j2)->check(CLI::NonNegativeNumber);
    add_common(s_unl, false);

    auto* s_ver = app.add_subcommand("verify-all", "Run the invariant suite");
    s_ver->add_flag("--quick", quick, "Smaller bounds");
    s_ver->add_option("--bound", bound, "Oracle-equivalence bound on |d|");
    add_common(s_ver, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const auto t0 = std::chrono::steady_clock::now();
    auto wall = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
    try {
        Artifact art;
        if (*s_sieve) {
            const auto sv = load_or_build_sieve(X, com.cache);
            art = {"sieve", {{"X", X}}, sv.fingerprint(), {{"limit", sv.limit()}}};
            out << "sieve limit " << sv.limit() << ", fingerprint " << sv.fingerprint() << '\n';
        } else if (*s_count) {
            const auto D = make_discriminant(d);
            const auto ev = f_everywhere(D);
            const auto sj = surj_count(D);
            json facs = json::array();
            out << "d = " << d << ", omega = " << D.omega << ", class " << to_string(D.cong_class) << '\n';
            out << "f~ = " << f_tilde(D) << '\n';
            out << "finite-count = " << count_finite_unramified(D) << '\n';
            out << "f = " << ev.value << (ev.beta_ambiguous ? " (beta ambiguous, f~ reported)" : "") << '\n';
            out << "surj = " << sj.value << '\n';
            out << "d4 = " << count_d4(D) << '\n';
            for (const auto& t : admissible_factorizations(D)) {
                out << "admissible factorization " << fmt_factorization(t) << '\n';
                facs.push_back({t.d[0], t.d[1], t.d[2]});
            }
            json cs = nullptr;
            if (std::llabs(d) > 2) {
                const auto p = character_sum_parts(D);
                out << "character sum: F1 = " << p.F1 << ", F2 = " << p.F2 << ", total = " << p.total << '\n';
                cs = {{"F1", p.F1}, {"F2", p.F2}, {"f1", rational_str(p.f1)}, {"f2", rational_str(p.f2)},
                      {"correction", p.correction.str()}, {"total", p.total.str()}};
            }
            if (nontrivial_readings_diverge(D)) {
                out << "note: the looser reading of nontrivial gives f~ = " << f_tilde_loose(D) << '\n';
            }
            art = {"count",
                   {{"d", d}},
                   "",
                   {{"d", d},
                    {"omega", D.omega},
                    {"f_tilde", f_tilde(D).str()},
                    {"finite_count", count_finite_unramified(D)},
                    {"f_everywhere", ev.value.str()},
                    {"beta_ambiguous", ev.beta_ambiguous},
                    {"surj", sj.value.str()},
                    {"d4", count_d4(D).str()},
                    {"f_tilde_loose", f_tilde_loose(D).str()},
                    {"admissible", facs},
                    {"character_sum", cs}}};
        } else if (*s_mom || *s_surj) {
            const auto sv = load_or_build_sieve(X > 0 ? X - 1 : 0, com.cache);
            MomentReport rep;
            json params = {{"X", X}, {"sign", sign}, {"k", k}, {"threads", com.threads}};
            if (*s_surj) {
                rep = surj_sweep(sv, X, parse_sign(sign), k, com.threads);
                art.command = "surj";
            } else if (variant == "d4") {
                rep = d4_heuristic_sweep(sv, X, parse_sign(sign), k, com.threads);
                art.command = "moments";
                params["variant"] = variant;
            } else {
                SweepConfig cfg;
                cfg.X = X;
                cfg.sign = parse_sign(sign);
                cfg.classes = parse_classes(cls);
                cfg.k = k;
                cfg.a = parse_rational(a_str);
                cfg.variant = parse_variant(variant);
                cfg.threads = com.threads;
                rep = sweep(sv, cfg);
                art.command = "moments";
                params["class"] = cls;
                params["a"] = a_str;
                params["variant"] = variant;
            }
            print_grid(out, rep);
            art.params = params;
            art.fingerprint = sv.fingerprint();
            art.result = to_json(rep);
            write_artifact(com, Artifact{art.command, art.params, art.fingerprint, art.result, &rep}, wall());
            return kExitOk;
        } else if (*s_pm) {
            const auto sv = load_or_build_sieve(X > 0 ? X - 1 : 0, com.cache);
            const auto rep = point_mass_estimate(sv, X, parse_sign(sign), kmax, com.threads);
            out << "odd discriminants " << rep.count << ", target " << rational_str(rep.target) << '\n';
            for (int i = 0; i < kmax; ++i) {
                out << "k=" << i + 1 << " moment " << std::setprecision(8) << rep.moments[i].get_d() << ", distance "
                    << rep.distance[i] << ", mixed-class moment " << rep.mixed_moments[i].get_d() << '\n';
            }
            art = {"pointmass", {{"X", X}, {"sign", sign}, {"kmax", kmax}}, sv.fingerprint(), to_json(rep)};
        } else if (*s_gamma) {
            const CaseTag tag = parse_case(case_name);
            GammaOptions opt;
            opt.ordered_pairs = ordered;
            opt.zero_mod8_free = free0;
            const auto res = gamma_sum_bruteforce(tag, k, opt);
            for (const auto& [w, v] : res.per_U) out << "gamma(U_" << w << ") = " << v << '\n';
            const auto cf = closed_form_value(tag, k);
            out << "total " << res.total << '\n';
            out << "closed form " << congruence_case(tag).closed_form << " = " << cf
                << (res.total == cf ? " (agrees)" : " (differs)") << '\n';
            art = {"gamma",
                   {{"case", case_name}, {"k", k}, {"ordered_pairs", ordered}, {"zero_mod8_free", free0}},
                   "",
                   to_json(res)};
        } else if (*s_ker) {
            const auto r = rank_and_kernel(build_Mk(k));
            out << "rank " << r.rank << ", kernel dim " << r.basis.size() << '\n';
            art = {"kernel", {{"k", k}}, "", {{"rank", r.rank}, {"kernel_dim", r.basis.size()}}};
        } else if (*s_unl) {
            json res = json::object();
            std::size_t n = 1;
            for (int i = 0; i < j1 && n <= 64; ++i) n *= 6;
            for (int i = 0; i < j2 && n <= 64; ++i) n *= 4;
            if (n <= 64) {
                const auto ex = max_unlinked_exhaustive(j1, j2);
                out << "exhaustive: maximum size " << ex.max_size << ", " << ex.maximum_sets.size()
                    << " maximum sets\n";
                json sets = json::array();
                for (const auto& st : ex.maximum_sets) {
                    json m = json::array();
                    std::string line;
                    for (const auto& t : st.members) {
                        m.push_back(to_string(t));
                        line += to_string(t) + ' ';
                    }
                    out << "  " << line << '\n';
                    sets.push_back(m);
                }
                res["exhaustive"] = {{"max_size", ex.max_size}, {"maximum_sets", sets}};
            }
            if (j1 <= 6 && j2 <= 6) {
                const auto rep = verify_type_structure(j1, j2);
                out << "type structure: " << rep.candidate_count << " candidates of size " << rep.candidate_size
                    << ", expected " << rep.expected_count << " of size " << rep.expected_size << ", "
                    << (rep.ok() ? "ok" : "MISMATCH") << '\n';
                for (const auto& note : rep.notes) out << "note: " << note << '\n';
                res["type_structure"] = {{"candidate_count", rep.candidate_count},
                                         {"candidate_size", rep.candidate_size},
                                         {"expected_count", rep.expected_count},
                                         {"expected_size", rep.expected_size},
                                         {"all_unlinked", rep.all_unlinked},
                                         {"all_maximal", rep.all_maximal},
                                         {"ok", rep.ok()},
                                         {"notes", rep.notes}};
            }
            if (res.empty()) throw CapacityError("shape too large for both the exhaustive and constructive checks");
            art = {"unlinked", {{"j1", j1}, {"j2", j2}}, "", res};
        } else if (*s_ver) {
            if (bound == 0) bound = quick ? 10'000 : 100'000;
            std::ostringstream buf;
            const int code = verify_all(buf, quick, bound);
            out << buf.str();
            json lines = json::array();
            std::istringstream is(buf.str());
            for (std::string l; std::getline(is, l);) lines.push_back(l);
            art = {"verify-all", {{"quick", quick}, {"bound", bound}}, "", {{"lines", lines}, {"exit", code}}};
            write_artifact(com, art, wall());
            return code;
        }
        write_artifact(com, art, wall());
        return kExitOk;
    } catch (const CapacityError& e) {
        err << "capacity error: " << e.what() << '\n';
        return kExitCapacity;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace h8::cli
