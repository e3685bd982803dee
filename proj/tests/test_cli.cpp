#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "h8/cli.hpp"
#include "h8/errors.hpp"
#include "h8/report.hpp"

using namespace h8;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "h8tool");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path tmp(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("h8cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

json read_json(const fs::path& p) {
    std::ifstream f(p);
    return json::parse(f);
}

}  // namespace

TEST(Cli, CountExample) {
    const auto r = run({"count", "--d", "-120"});
    EXPECT_EQ(r.code, cli::kExitOk);
    EXPECT_NE(r.out.find("f~ = 1\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("admissible factorization"), std::string::npos);
}

TEST(Cli, CountRejectsNonFundamental) {
    const auto r = run({"count", "--d", "-16"});
    EXPECT_EQ(r.code, cli::kExitUsage);
    EXPECT_FALSE(r.err.empty());
}

TEST(Cli, KernelExample) {
    const auto r = run({"kernel", "--k", "4"});
    EXPECT_EQ(r.code, cli::kExitOk);
    EXPECT_NE(r.out.find("rank 9, kernel dim 72"), std::string::npos) << r.out;
}

TEST(Cli, GammaExampleAndArtifact) {
    const auto path = tmp("gamma.json");
    const auto r = run({"gamma", "--case", "neg-1mod4", "--k", "1", "--out", path.string()});
    EXPECT_EQ(r.code, cli::kExitOk);
    EXPECT_NE(r.out.find("total 2\n"), std::string::npos) << r.out;
    const auto env = read_json(path);
    const auto res = open_envelope(env);
    EXPECT_EQ(gamma_result_from_json(res).total, Dyadic(2));
    EXPECT_EQ(env["manifest"]["command"], "gamma");
}

TEST(Cli, DigestMismatchIsRejected) {
    const auto path = tmp("gamma2.json");
    ASSERT_EQ(run({"gamma", "--case", "pos-1mod4", "--k", "1", "--out", path.string()}).code, cli::kExitOk);
    auto env = read_json(path);
    EXPECT_NO_THROW(open_envelope(env));
    env["result"]["total"] = "3";
    EXPECT_THROW(open_envelope(env), ValidationError);
    env = read_json(path);
    env["schema"] = 99;
    EXPECT_THROW(open_envelope(env), ValidationError);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({"gamma", "--case", "neg-1mod4", "--k", "x"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"kernel"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"moments", "--X", "1000", "--sign", "sideways"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"gamma", "--case", "neg-7mod8"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"bogus"}).code, cli::kExitUsage);
}

TEST(Cli, CapacityErrors) {
    EXPECT_EQ(run({"kernel", "--k", "13"}).code, cli::kExitCapacity);
    EXPECT_EQ(run({"gamma", "--case", "neg-1mod4", "--k", "4"}).code, cli::kExitCapacity);
    const auto r = run({"unlinked", "--j1", "7", "--j2", "0"});
    EXPECT_NE(r.code, cli::kExitOk);
}

TEST(Cli, UnlinkedExample) {
    const auto r = run({"unlinked", "--j1", "2", "--j2", "0"});
    EXPECT_EQ(r.code, cli::kExitOk);
    EXPECT_NE(r.out.find("maximum size 9, 4"), std::string::npos) << r.out;
}

TEST(Cli, MomentsJsonAndCsvRoundTrip) {
    const auto cache = tmp("sieve.bin");
    const auto jpath = tmp("m.json");
    const auto cpath = tmp("m.csv");
    const std::vector<std::string> base{"moments", "--X", "20000", "--sign", "neg", "--class", "1mod4",
                                        "--k", "2", "--cache", cache.string()};
    auto a = base;
    a.insert(a.end(), {"--out", jpath.string()});
    ASSERT_EQ(run(a).code, cli::kExitOk);
    EXPECT_TRUE(fs::exists(cache));
    const auto rep = moment_report_from_json(open_envelope(read_json(jpath)));
    EXPECT_EQ(rep.config.k, 2);
    EXPECT_EQ(*rep.target_constant, mpq_class(1, 1024));

    auto b = base;
    b.insert(b.end(), {"--out", cpath.string(), "--format", "csv"});
    ASSERT_EQ(run(b).code, cli::kExitOk);
    std::ifstream f(cpath);
    const auto rows = read_moment_csv(f);
    ASSERT_EQ(rows.size(), rep.grid.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].X, rep.grid[i].X);
        EXPECT_EQ(rows[i].empirical, rep.grid[i].empirical);
        EXPECT_EQ(rows[i].main_term, rep.grid[i].main_term);
        EXPECT_EQ(rows[i].a, mpq_class(1, 3));
        EXPECT_EQ(rows[i].k, 2);
    }
}

TEST(Cli, CsvOnlyForSweeps) {
    const auto r = run({"kernel", "--k", "2", "--out", tmp("k.csv").string(), "--format", "csv"});
    EXPECT_EQ(r.code, cli::kExitUsage);
}

TEST(Cli, VerifyAllQuick) {
    const auto r = run({"verify-all", "--quick", "--bound", "3000"});
    EXPECT_NE(r.out.find("PASS"), std::string::npos);
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
    EXPECT_EQ(r.code, cli::kExitOk);
}

TEST(Report, RationalParsing) {
    EXPECT_EQ(parse_rational("3/6"), mpq_class(1, 2));
    EXPECT_EQ(rational_str(mpq_class(4, 2)), "2");
    EXPECT_THROW(parse_rational("1/0"), ValidationError);
    EXPECT_THROW(parse_rational("abc"), ValidationError);
    EXPECT_EQ(parse_classes("all").size(), 3u);
    EXPECT_EQ(classes_str(parse_classes("1mod4+4mod8")), "1mod4+4mod8");
}
