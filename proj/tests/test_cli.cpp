/* End-to-end checks of the command-line surface: invoked with the binary
 * path as argv[1]; exercises exit codes, the JSON schema, and determinism of
 * the result section. */
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "json.hpp"

using json = nlohmann::json;

static int failures = 0;

#define CHECK(cond)                                                                          \
    do {                                                                                     \
        if (!(cond)) {                                                                       \
            std::cout << "FAIL " << __FILE__ << ":" << __LINE__ << "  " #cond "\n";          \
            failures++;                                                                      \
        }                                                                                    \
    } while (0)

struct RunResult {
    int exit_code;
    std::string output;
};

static RunResult run_cmd(std::string const& cmd)
{
    std::string full = cmd + " 2>/dev/null";
    FILE* p = popen(full.c_str(), "r");
    if (!p)
        return {-1, ""};
    std::string out;
    char buf[4096];
    size_t nr;
    while ((nr = fread(buf, 1, sizeof buf, p)) > 0)
        out.append(buf, nr);
    int st = pclose(p);
    int code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return {code, out};
}

int main(int argc, char** argv)
{
    if (argc < 2) {
        std::cout << "usage: test_cli <selquat-binary>\n";
        return 1;
    }
    std::string bin = argv[1];

    /* ramify on (-1,-1 | Q) */
    {
        auto r = run_cmd(bin + " ramify --field 1 --algebra -1,-1");
        CHECK(r.exit_code == 0);
        json j = json::parse(r.output);
        CHECK(j["result"]["places"] == json::array({"2", "infty_0"}));
        CHECK(j["result"]["eichler"] == false);
        CHECK(j.contains("timing_ms"));
        CHECK(j.contains("query"));
        CHECK(j.contains("provenance"));
    }

    /* select on the selective instance */
    {
        auto r = run_cmd(bin +
                         " select --field 10 --algebra 1,1 --delta 2 --conductor 1");
        CHECK(r.exit_code == 0);
        json j = json::parse(r.output);
        CHECK(j["result"]["outcome"] == "half");
        CHECK(j["result"]["admitting"].size() == 1);
        CHECK(j["result"]["admitting"][0] == "gamma=0");
        CHECK(j["provenance"] == json::array({"Theorem 5.2"}));
    }

    /* select with a square delta: split algebra, all classes admit */
    {
        auto r = run_cmd(bin + " select --field 1 --algebra 1,1 --delta 9");
        CHECK(r.exit_code == 0);
        json j = json::parse(r.output);
        CHECK(j["result"]["outcome"] == "all");
        CHECK(j["provenance"] == json::array({"Proposition 5.4"}));
    }

    /* optimal decision coincides on the maximal order */
    {
        auto r = run_cmd(bin + " select --field 10 --algebra 1,1 --delta 2 --optimal");
        CHECK(r.exit_code == 0);
        json j = json::parse(r.output);
        CHECK(j["result"]["outcome"] == "half");
        CHECK(j["provenance"] == json::array({"Theorem 6.4"}));
    }

    /* genus over Q(sqrt(10)) */
    {
        auto r = run_cmd(bin + " genus --field 10 --algebra 1,1");
        CHECK(r.exit_code == 0);
        json j = json::parse(r.output);
        CHECK(j["result"]["rank"] == 1);
        CHECK(j["result"]["type_number"] == "2");
    }

    /* classfield trace */
    {
        auto r = run_cmd(bin + " classfield --field 10 --algebra 1,1 --delta 2");
        CHECK(r.exit_code == 0);
        json j = json::parse(r.output);
        CHECK(j["result"]["contains"] == true);
        CHECK(j["result"]["trace"].is_array());
    }

    /* embeds: ABHN obstruction */
    {
        auto r = run_cmd(bin + " embeds --field 1 --algebra -1,-1 --delta 5");
        CHECK(r.exit_code == 0);
        json j = json::parse(r.output);
        CHECK(j["result"]["embeds"] == false);
        CHECK(j["result"]["obstruction_place"] == "infty_0");
    }

    /* exit code 1 on input errors */
    {
        CHECK(run_cmd(bin + " select --field 12 --algebra 1,1 --delta 2").exit_code == 1);
        CHECK(run_cmd(bin + " select --field 1 --algebra 1,1").exit_code == 1);
        CHECK(run_cmd(bin + " bogus --field 1").exit_code == 1);
        CHECK(run_cmd(bin + " select --field 1 --algebra 0,1 --delta 2").exit_code == 1);
    }

    /* exit code 2 when the decision theorems are silent */
    {
        auto r = run_cmd(bin + " select --field 10 --algebra 1,1 --level 7:2 --delta 2 "
                               "--conductor 7");
        CHECK(r.exit_code == 2);
        json j = json::parse(r.output);
        CHECK(j["error"] == "assumptions-not-met");
        CHECK(j["coprime_disc_level"] == false);
    }

    /* determinism: identical configs give byte-identical result sections */
    {
        auto r1 = run_cmd(bin + " select --field 10 --algebra 1,1 --delta 2");
        auto r2 = run_cmd(bin + " select --field 10 --algebra 1,1 --delta 2");
        json j1 = json::parse(r1.output), j2 = json::parse(r2.output);
        CHECK(j1["result"].dump() == j2["result"].dump());
        CHECK(j1["query"].dump() == j2["query"].dump());
    }

    /* config file plus override */
    {
        std::string cfg = "/tmp/selquat_test_config.txt";
        {
            std::ofstream f(cfg);
            f << "field 10\nalgebra 1,1\ndelta 2\nconductor 1\n";
        }
        auto r = run_cmd(bin + " select --config " + cfg);
        CHECK(r.exit_code == 0);
        json j = json::parse(r.output);
        CHECK(j["result"]["outcome"] == "half");
        /* override the conductor to the inert-in-L split prime above 3 */
        auto r2 = run_cmd(bin + " select --config " + cfg + " --conductor 3.0");
        CHECK(r2.exit_code == 0);
        json j2 = json::parse(r2.output);
        CHECK(j2["result"]["outcome"] == "all");
        /* bad config key is a diagnosed input error */
        {
            std::ofstream f(cfg);
            f << "fiield 10\n";
        }
        CHECK(run_cmd(bin + " select --config " + cfg).exit_code == 1);
    }

    /* json-out writes the same document to a file */
    {
        std::string path = "/tmp/selquat_test_out.json";
        auto r = run_cmd(bin + " ramify --field 1 --algebra -1,-1 --json-out " + path);
        CHECK(r.exit_code == 0);
        std::ifstream f(path);
        json j = json::parse(f);
        CHECK(j["result"]["places"].size() == 2);
    }

    /* verify subcommand on a small oracle run */
    {
        auto r = run_cmd(bin + " verify --field 1 --algebra 1,1 --delta -1 --oracle-bound 8");
        CHECK(r.exit_code == 0);
        json j = json::parse(r.output);
        CHECK(j["result"]["consistent"] == true);
        CHECK(j["result"]["orders"].size() == 1);
    }

    if (failures == 0) {
        std::cout << "test_cli: all checks passed\n";
        return 0;
    }
    std::cout << "test_cli: " << failures << " failures\n";
    return 1;
}
