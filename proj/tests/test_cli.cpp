#include "tnvote/cli.hpp"
#include "tnvote/sim.hpp"
#include "tnvote/verify.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace tnvote;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path()
               / ("tnvote-test-" + std::to_string(::getpid()) + "-"
                  + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter()
    {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path);
    out << content;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

nlohmann::json honest_config()
{
    return {
        {"group", "test"}, {"n", 3},   {"m", 2},   {"t", 2},
        {"x", 2},          {"z", 1},   {"t1", 50}, {"t2", 80},
        {"seed", "ab12"},  {"votes", {{"1", 1}, {"2", 1}, {"3", 2}}},
    };
}

} // namespace

TEST_CASE("cmd_run writes a transcript and exits 0 on a decided run")
{
    TempDir dir;
    write_file(dir.file("config.json"), honest_config().dump());
    int code = cli::cmd_run(dir.file("config.json"), dir.file("out.json"));
    CHECK(code == 0);
    CHECK(fs::exists(dir.file("out.json")));

    auto doc = nlohmann::json::parse(read_file(dir.file("out.json")));
    CHECK(doc.at("outcome").at("type") == "winner");
}

TEST_CASE("cmd_run exits 2 on protocol abort")
{
    TempDir dir;
    auto cfg = honest_config();
    cfg["adversary"] = {{"kind", "tamper-last-shuffler"}};
    write_file(dir.file("config.json"), cfg.dump());
    CHECK(cli::cmd_run(dir.file("config.json"), dir.file("out.json")) == 2);
}

TEST_CASE("cmd_run exits 1 on config errors, naming the field")
{
    TempDir dir;
    auto cfg = honest_config();
    cfg["votes"].erase("2"); // missing votes entry
    write_file(dir.file("config.json"), cfg.dump());
    CHECK(cli::cmd_run(dir.file("config.json"), dir.file("out.json")) == 1);

    write_file(dir.file("garbage.json"), "{not json");
    CHECK(cli::cmd_run(dir.file("garbage.json"), dir.file("out.json")) == 1);

    CHECK(cli::cmd_run(dir.file("does-not-exist.json"), dir.file("out.json")) == 1);

    // bad seed override
    write_file(dir.file("config.json"), honest_config().dump());
    CHECK(cli::cmd_run(dir.file("config.json"), dir.file("out.json"), "xyz") == 1);
}

TEST_CASE("cmd_verify passes a fresh transcript and fails a doctored one")
{
    TempDir dir;
    write_file(dir.file("config.json"), honest_config().dump());
    REQUIRE(cli::cmd_run(dir.file("config.json"), dir.file("out.json")) == 0);
    CHECK(cli::cmd_verify(dir.file("out.json")) == 0);

    auto doc = nlohmann::json::parse(read_file(dir.file("out.json")));

    SUBCASE("edited balance breaks conservation")
    {
        doc["final_balances"]["voter-1"] =
            doc["final_balances"]["voter-1"].get<std::uint64_t>() + 1;
        write_file(dir.file("bad.json"), doc.dump());
        CHECK(cli::cmd_verify(dir.file("bad.json")) == 1);
    }

    SUBCASE("edited claim preimage breaks reveal binding")
    {
        for (auto& event : doc["events"]) {
            if (event.value("event", "") == "tx-accepted"
                && event.value("kind", "") == "claim") {
                std::string hex = event["tx"]["inputs"][0]["witness"]["inner"]["bytes"];
                hex[0] = hex[0] == '0' ? '1' : '0';
                event["tx"]["inputs"][0]["witness"]["inner"]["bytes"] = hex;
                break;
            }
        }
        write_file(dir.file("bad.json"), doc.dump());
        CHECK(cli::cmd_verify(dir.file("bad.json")) == 1);
    }

    SUBCASE("edited outcome breaks the tally check")
    {
        doc["outcome"]["candidate"] = 2;
        write_file(dir.file("bad.json"), doc.dump());
        CHECK(cli::cmd_verify(dir.file("bad.json")) == 1);
    }

    SUBCASE("truncated transcript fails structurally")
    {
        doc.erase("final_balances");
        write_file(dir.file("bad.json"), doc.dump());
        CHECK(cli::cmd_verify(dir.file("bad.json")) == 1);
    }
}

TEST_CASE("cmd_census summarizes any transcript")
{
    TempDir dir;
    write_file(dir.file("config.json"), honest_config().dump());
    REQUIRE(cli::cmd_run(dir.file("config.json"), dir.file("out.json")) == 0);
    CHECK(cli::cmd_census(dir.file("out.json")) == 0);
    CHECK(cli::cmd_census(dir.file("missing.json")) == 1);

    // aborted runs census cleanly with zero transactions
    auto cfg = honest_config();
    cfg["adversary"] = {{"kind", "tamper-last-shuffler"}};
    write_file(dir.file("abort-config.json"), cfg.dump());
    REQUIRE(cli::cmd_run(dir.file("abort-config.json"), dir.file("abort.json")) == 2);
    CHECK(cli::cmd_census(dir.file("abort.json")) == 0);
    auto doc = nlohmann::json::parse(read_file(dir.file("abort.json")));
    CHECK(doc.at("accepted_count") == 0);
    // a fresh abort transcript also passes verification
    CHECK(cli::cmd_verify(dir.file("abort.json")) == 0);
}

TEST_CASE("deposit z defaults to the stake x when omitted")
{
    auto cfg = honest_config();
    cfg.erase("z");
    cfg["x"] = 5;
    auto parsed = sim::ScenarioConfig::from_json(cfg);
    CHECK(parsed.z == 5);
}

TEST_CASE("verify_transcript round-trips for every adversary")
{
    for (const char* adversary :
         {"none", "double-claim", "garbage-vote", "withhold-reveal"}) {
        auto cfg_json = honest_config();
        cfg_json["n"] = 4;
        cfg_json["t"] = 2;
        cfg_json["votes"] = {{"1", 1}, {"2", 1}, {"3", 2}, {"4", 2}};
        if (std::string(adversary) != "none")
            cfg_json["adversary"] = {{"kind", adversary}, {"voter", 3}};
        auto cfg = sim::ScenarioConfig::from_json(cfg_json);
        auto transcript = sim::run_scenario(cfg);
        auto results = audit::verify_transcript(transcript.doc);
        for (const auto& r : results) {
            INFO(adversary, " / ", r.name, ": ", r.detail);
            CHECK(r.ok);
        }
    }
}
