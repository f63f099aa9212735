#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "substoch/cli.hpp"

using namespace substoch;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(const std::vector<std::string>& args)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class Workspace {
public:
    Workspace()
        : dir_(fs::temp_directory_path() / ("substoch_cli_test_" + std::to_string(::getpid())))
    {
        fs::create_directories(dir_);
    }
    ~Workspace() { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) const
    {
        const fs::path p = dir_ / name;
        std::ofstream(p, std::ios::binary) << text;
        return p.string();
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

private:
    fs::path dir_;
};

report::Json json_of(const Result& r)
{
    return report::Json::parse(r.out);
}

} // namespace

TEST_CASE("check", "[cli]")
{
    Workspace ws;
    const auto half = ws.write("half.json", R"([[0,"1/2"],["1/2",0]])");
    auto r = run_cli({"check", half});
    CHECK(r.code == 0);
    CHECK(r.out.find("det(I - P^T) = 3/4") != std::string::npos);

    r = run_cli({"check", ws.write("perm.json", "[[0,1],[1,0]]")});
    CHECK(r.code == 1);
    CHECK(r.out.find("SpectralRadiusNotLessThanOne") != std::string::npos);

    r = run_cli({"check", ws.write("over.csv", "0.5,0.6\n0.1,0.2")});
    CHECK(r.code == 1);
    CHECK(r.out.find("RowSumExceedsOne(1)") != std::string::npos);

    r = run_cli({"check", ws.write("broken.json", "[[0, 1],\n [1 0]]")});
    CHECK(r.code == 3);
    CHECK(r.err.find("line 2") != std::string::npos);

    CHECK(run_cli({"check", ws.path("missing.json")}).code == 3);
    CHECK(run_cli({"check"}).code == 2);
    CHECK(run_cli({"bogus"}).code == 2);
    CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("check --json carries every report field", "[cli]")
{
    Workspace ws;
    const auto half = ws.write("half.json", R"([[0,"1/2"],["1/2",0]])");
    const auto j = json_of(run_cli({"check", half, "--json"}));
    for (const char* key : {"command", "input_digest", "backend", "reports", "passed", "wall_time_ms"}) {
        CHECK(j.contains(key));
    }
    CHECK(j["backend"] == "exact");
    CHECK(j["passed"] == true);
    CHECK(j["wall_time_ms"].is_null());
    CHECK(j["reports"][0]["det_I_minus_Pt"] == "3/4");
    CHECK(j["input_digest"].get<std::string>().rfind("fnv1a64:", 0) == 0);

    const auto timed = json_of(run_cli({"check", half, "--json", "--timing"}));
    CHECK(timed["wall_time_ms"].is_number());

    const auto fl = json_of(run_cli({"check", half, "--json", "--backend", "float"}));
    CHECK(fl["backend"] == "float");
    CHECK(fl["reports"][0]["det_I_minus_Pt"] == Catch::Approx(0.75));
}

TEST_CASE("verify", "[cli]")
{
    Workspace ws;
    const auto id3 = ws.write("id3.json", "[[1,0,0],[0,1,0],[0,0,1]]");
    auto r = run_cli({"verify", id3});
    CHECK(r.code == 0);
    CHECK(r.out.find("identities checked: 27") != std::string::npos);

    const auto chain = ws.write("chain.json", R"({"n": 2, "entries": [["1/2","1/4"],["1/3","1/3"]]})");
    const auto j = json_of(run_cli({"verify", chain, "--json"}));
    CHECK(j["passed"] == true);
    bool saw_maximality = false;
    int thm2 = 0;
    for (const auto& rep : j["reports"]) {
        if (rep["kind"] == "maximality") {
            saw_maximality = true;
            CHECK(rep["passed"] == true);
            CHECK(rep["fundamental_transposed"][0][0] == "8/3");
        } else if (rep["identity"] == "thm2_first" || rep["identity"] == "thm2_second") {
            ++thm2;
            CHECK(rep["residual"] == "0");
        }
    }
    CHECK(saw_maximality);
    CHECK(thm2 == 4);

    r = run_cli({"verify", id3, "--identity", "thm2"});
    CHECK(r.code == 2);
    CHECK(r.err.find("CertificationError") != std::string::npos);

    const auto restricted = json_of(run_cli({"verify", id3, "--identity", "eq20", "--m", "1", "--l", "2", "--json"}));
    CHECK(restricted["reports"].size() == 1);

    // det(B(1|1)) = 0: general certification fails
    CHECK(run_cli({"verify", ws.write("sing.json", "[[1,1],[1,0]]"), "--mode", "general"}).code == 2);

    const auto csv = ws.write("chain.csv", "0.2,0.3,0.1\n0.0,0.5,0.25\n0.4,0.1,0.1\n");
    CHECK(run_cli({"verify", csv}).code == 0);
    CHECK(run_cli({"verify", csv, "--backend", "exact"}).code == 0);
}

TEST_CASE("falsify", "[cli]")
{
    auto r = run_cli({"falsify", "--identity", "thm1", "--n", "2..5", "--count", "40", "--seed", "42"});
    CHECK(r.code == 0);
    CHECK(r.out.find("counterexamples: 0") != std::string::npos);

    const std::vector<std::string> args{"falsify", "--identity", "eq13", "--count", "30", "--seed", "9", "--json"};
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    const auto j = json_of(a);
    CHECK(j["passed"] == true);
    CHECK(j["command"].get<std::string>().find("falsify") != std::string::npos);

    CHECK(run_cli({"falsify", "--identity", "all", "--n", "2..4", "--count", "10", "--seed", "1"}).code == 0);
    CHECK(run_cli({"falsify", "--count", "10"}).code == 2); // --seed is required
    CHECK(run_cli({"falsify", "--seed", "1", "--n", "5..2"}).code == 2);
}

TEST_CASE("simulate", "[cli]")
{
    Workspace ws;
    auto r = run_cli({"simulate", ws.write("zero.json", "[[0,0],[0,0]]"), "--trials", "100", "--seed", "1"});
    CHECK(r.code == 0);
    CHECK(r.out.find("flags: 0") != std::string::npos);

    const auto half = ws.write("half.json", R"([[0,"1/2"],["1/2",0]])");
    const auto j = json_of(run_cli({"simulate", half, "--trials", "100000", "--seed", "3", "--json"}));
    CHECK(j["passed"] == true);
    CHECK(j["reports"][0]["flags"].empty());

    CHECK(run_cli({"simulate", half, "--trials", "0", "--seed", "3"}).code == 2);
    CHECK(run_cli({"simulate", half, "--trials", "10"}).code == 2);
    CHECK(run_cli({"simulate", ws.write("perm.json", "[[0,1],[1,0]]"), "--seed", "3"}).code == 2);
}

TEST_CASE("gen", "[cli]")
{
    Workspace ws;
    const auto a = ws.path("a.json");
    const auto b = ws.path("b.json");
    REQUIRE(run_cli({"gen", "--kind", "substochastic", "--n", "5", "--seed", "8", "-o", a}).code == 0);
    REQUIRE(run_cli({"gen", "--kind", "substochastic", "--n", "5", "--seed", "8", "-o", b}).code == 0);
    const auto text_a = io::read_file(a);
    CHECK(text_a == io::read_file(b));

    // round trip: the written matrix is what the generator produced
    GenSpec spec;
    spec.n = 5;
    spec.seed = 8;
    CHECK(io::parse_json_exact(text_a).exact == gen_substochastic(spec).matrix());
    CHECK(run_cli({"check", a}).code == 0);

    const auto g = run_cli({"gen", "--kind", "general", "--n", "4", "--seed", "2"});
    CHECK(g.code == 0);
    CHECK(run_cli({"verify", ws.write("g.json", g.out), "--mode", "general"}).code == 0);

    CHECK(run_cli({"gen", "--kind", "substochastic", "--n", "3"}).code == 2);
    CHECK(run_cli({"gen", "--kind", "bogus", "--n", "3", "--seed", "1"}).code == 2);
    CHECK(run_cli({"gen", "--n", "3", "--seed", "1", "-o", "/nonexistent/dir/x.json"}).code == 3);
}
