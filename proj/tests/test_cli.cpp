#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include <bethe3/cli.hpp>

using namespace bethe3;
using namespace bethe3::cli;
using nlohmann::json;

namespace {

RunConfig parse(std::vector<const char*> args)
{
    args.insert(args.begin(), "bethe3");
    return parse_args(static_cast<int>(args.size()), args.data());
}

std::vector<std::string> lines_of(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

std::pair<int, std::string> run_args(std::vector<const char*> args)
{
    const RunConfig cfg = parse(std::move(args));
    std::ostringstream os;
    const int rc = run(cfg, os);
    return {rc, os.str()};
}

int significant_digits(const std::string& field)
{
    int n = 0;
    bool lead = true;
    for (char ch : field) {
        if (ch == 'e' || ch == 'E') break;
        if (!std::isdigit(static_cast<unsigned char>(ch))) continue;
        if (lead && ch == '0') continue;
        lead = false;
        ++n;
    }
    return n;
}

} // namespace

TEST(Parse, Labels)
{
    EXPECT_EQ(parse_label("1,2"), (QuantumLabel{1, 2}));
    EXPECT_EQ(parse_label("-1,-3"), (QuantumLabel{-1, -3}));
    EXPECT_THROW(parse_label("1;2"), UsageError);
    EXPECT_THROW(parse_label("1,2,3"), UsageError);
}

TEST(Parse, Ranges)
{
    EXPECT_EQ(parse_range("-10..2"), (std::pair{-10.0, 2.0}));
    EXPECT_EQ(parse_range("-3.5"), (std::pair{-3.5, -3.5}));
    EXPECT_EQ(parse_int_range("1..6"), (std::pair{1, 6}));
    EXPECT_THROW(parse_range("a..b"), UsageError);
}

TEST(Parse, NegativeValuesAfterFlags)
{
    const RunConfig cfg = parse({"trace", "--label", "0,0", "--c-range", "-10..2", "--step", "0.05"});
    EXPECT_EQ(cfg.command, Command::Trace);
    ASSERT_TRUE(cfg.c_range);
    EXPECT_EQ(cfg.c_range->first, -10);
    EXPECT_EQ(cfg.c_range->second, 2);
    EXPECT_EQ(cfg.labels.size(), 1u);
    const RunConfig d = parse({"density", "--label", "0,2", "--c", "-9", "--resolution", "16", "--format", "csv"});
    EXPECT_EQ(*d.c, -9);
    EXPECT_EQ(d.format, Format::Csv);
}

TEST(Parse, UsageErrors)
{
    EXPECT_THROW(parse({"trace", "--label", "0,0"}), UsageError);
    EXPECT_THROW(parse({"trace", "--label", "0,0", "--c-range", "2..-1"}), UsageError);
    EXPECT_THROW(parse({"trace", "--label", "1,-2", "--c", "1"}), UsageError);
    EXPECT_THROW(parse({"trace", "--label", "1,2", "--c", "1", "--step", "0"}), UsageError);
    EXPECT_THROW(parse({"density", "--label", "0,0", "--c", "-1", "--resolution", "4"}), UsageError);
    EXPECT_THROW(parse({"verify", "--suite", "bogus"}), UsageError);
    EXPECT_THROW(parse({"frobnicate"}), UsageError);
    EXPECT_THROW(parse({"critical", "--format", "xml"}), UsageError);
    const char* argv[] = {"bethe3", "critical", "--n2", "0..3"};
    std::ostringstream err;
    EXPECT_EQ(cli::main(4, argv, err), exit_code::usage);
    EXPECT_FALSE(err.str().empty());
}

TEST(Parse, ToleranceFromEnvironment)
{
    ::setenv("BETHE3_TOL", "1e-11", 1);
    EXPECT_EQ(parse({"critical"}).residual_tol, 1e-11);
    ::setenv("BETHE3_TOL", "abc", 1);
    EXPECT_THROW(parse({"critical"}), UsageError);
    ::unsetenv("BETHE3_TOL");
    EXPECT_EQ(parse({"critical"}).residual_tol, tol::residual);
}

TEST(Run, CriticalTable)
{
    const auto [rc, out] = run_args({"critical", "--n2", "1..6"});
    EXPECT_EQ(rc, 0);
    const auto lines = lines_of(out);
    ASSERT_EQ(lines.size(), 6u);
    const json first = json::parse(lines[0]), second = json::parse(lines[1]);
    EXPECT_EQ(first["n2"], 1);
    EXPECT_EQ(first["C"].get<double>(), -6.0);
    EXPECT_NEAR(second["C"].get<double>(), -4.163, 5e-4);
}

TEST(Run, TraceRecordsFlipBranchAtZero)
{
    const auto [rc, out] = run_args({"trace", "--label", "0,0", "--c-range", "-10..2", "--step", "0.05"});
    EXPECT_EQ(rc, 0);
    const auto lines = lines_of(out);
    ASSERT_EQ(lines.size(), 241u);
    double prev = -1e300;
    for (const auto& l : lines) {
        const json j = json::parse(l);
        const double c = j["c"].get<double>();
        EXPECT_GT(c, prev);
        prev = c;
        EXPECT_EQ(j["branch"].get<std::string>(), c < 0 ? "complex" : "real");
        EXPECT_EQ(j["k"].size(), 3u);
        EXPECT_TRUE(j.contains("E"));
    }
}

TEST(Run, CsvDigitsAndHeader)
{
    const auto [rc, out] = run_args({"trace", "--labels", "1,2", "2,1", "--c-range", "-1..1", "--step", "0.25", "--format", "csv"});
    EXPECT_EQ(rc, 0);
    const auto lines = lines_of(out);
    EXPECT_EQ(lines[0], "n1,n2,np,c,branch,x1,x2,p,k1_re,k1_im,k2_re,k2_im,k3_re,k3_im,E,norm,V");
    ASSERT_EQ(lines.size(), 1u + 2 * 9);
    // ordered by label, then c
    EXPECT_EQ(lines[1].substr(0, 4), "1,2,");
    EXPECT_EQ(lines[10].substr(0, 4), "2,1,");
    std::istringstream row(lines[2]);
    std::vector<std::string> f;
    for (std::string x; std::getline(row, x, ',');) f.push_back(x);
    ASSERT_EQ(f.size(), 17u);
    EXPECT_GE(significant_digits(f[14]), 12) << f[14];
}

TEST(Run, DensityCsv)
{
    const auto [rc, out] = run_args({"density", "--label", "0,0", "--c", "-9", "--resolution", "8", "--format", "csv"});
    EXPECT_EQ(rc, 0);
    const auto lines = lines_of(out);
    EXPECT_EQ(lines[0], "r12,r23,r31,density");
    EXPECT_EQ(lines.size(), 65u);
}

TEST(Run, SpectrumSorted)
{
    const auto [rc, out] = run_args({"spectrum", "--labels", "2,2", "0,0", "1,1", "--c", "-3"});
    EXPECT_EQ(rc, 0);
    double prev = -1e300;
    for (const auto& l : lines_of(out)) {
        const json j = json::parse(l);
        EXPECT_GE(j["E"].get<double>(), prev);
        prev = j["E"].get<double>();
        const double e = j["E"].get<double>();
        // 15+ significant digits survive the round trip
        EXPECT_EQ(json::parse(json(e).dump()).get<double>(), e);
    }
}

TEST(Run, SolverFailureWritesTrailer)
{
    RunConfig cfg = parse({"trace", "--label", "1,2", "--c-range", "-5..0", "--step", "0.5"});
    cfg.residual_tol = 1e-300;
    std::ostringstream os;
    EXPECT_EQ(run(cfg, os), exit_code::solver);
    const auto lines = lines_of(os.str());
    ASSERT_FALSE(lines.empty());
    const json last = json::parse(lines.back());
    EXPECT_EQ(last["record"], "error");
}

TEST(Run, Deterministic)
{
    const auto a = run_args({"trace", "--label", "0,3", "--c-range", "-2..2", "--step", "0.1"});
    const auto b = run_args({"trace", "--label", "0,3", "--c-range", "-2..2", "--step", "0.1"});
    EXPECT_EQ(a.second, b.second);
}

TEST(Run, VerifySuite)
{
    const auto [rc, out] = run_args({"verify", "--suite", "core"});
    EXPECT_EQ(rc, 0);
    for (const auto& l : lines_of(out)) EXPECT_TRUE(json::parse(l)["pass"].get<bool>()) << l;
}
