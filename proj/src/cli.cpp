#include "tnvote/cli.hpp"

#include "tnvote/sim.hpp"
#include "tnvote/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace tnvote::cli {

namespace {

std::optional<nlohmann::json> read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot read " << path << "\n";
        return std::nullopt;
    }
    try {
        nlohmann::json doc;
        in >> doc;
        return doc;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << path << " is not valid JSON: " << e.what() << "\n";
        return std::nullopt;
    }
}

} // namespace

int cmd_run(const std::string& config_path, const std::string& out_path,
            const std::string& seed_override_hex)
{
    auto doc = read_json(config_path);
    if (!doc)
        return 1;

    sim::ScenarioConfig config;
    try {
        config = sim::ScenarioConfig::from_json(*doc);
        if (!seed_override_hex.empty())
            config.master_seed = from_hex(seed_override_hex);
        config.validate();
    } catch (const sim::ConfigError& e) {
        std::cerr << "config error: field '" << e.field << "': " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: field 'seed': " << e.what() << "\n";
        return 1;
    }

    sim::Transcript transcript = sim::run_scenario(config);

    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return 1;
    }
    out << transcript.dump();
    out.close();

    const auto& outcome = transcript.doc.at("outcome");
    std::cout << "# transcript " << out_path << "\n";
    std::cout << "# accepted " << transcript.accepted_count() << "\n";
    if (outcome.at("type") == "winner")
        std::cout << "# outcome winner candidate=" << outcome.at("candidate") << "\n";
    else if (outcome.at("type") == "refunded")
        std::cout << "# outcome refunded\n";
    else
        std::cout << "# outcome aborted reason=" << outcome.at("reason").get<std::string>()
                  << "\n";

    return transcript.outcome_type() == "aborted" ? 2 : 0;
}

int cmd_verify(const std::string& transcript_path)
{
    auto doc = read_json(transcript_path);
    if (!doc)
        return 1;

    std::vector<audit::CheckResult> results = audit::verify_transcript(*doc);
    std::cout << "# verify " << transcript_path << "\n";
    bool ok = true;
    for (const audit::CheckResult& r : results) {
        if (r.ok) {
            std::cout << "ok   " << r.name << "\n";
        } else {
            std::cout << "FAIL " << r.name << ": " << r.detail << "\n";
            ok = false;
        }
    }
    return ok ? 0 : 1;
}

int cmd_census(const std::string& transcript_path)
{
    auto doc = read_json(transcript_path);
    if (!doc)
        return 1;

    try {
        const auto& config = doc->at("config");
        std::cout << "# census " << transcript_path << "\n";
        std::cout << "n " << config.at("n") << "\n";
        std::cout << "m " << config.at("m") << "\n";
        std::cout << "t " << config.at("t") << "\n";
        std::cout << "accepted " << doc->at("accepted_count") << "\n";
        const auto& outcome = doc->at("outcome");
        if (outcome.at("type") == "winner")
            std::cout << "outcome winner candidate=" << outcome.at("candidate") << "\n";
        else if (outcome.at("type") == "refunded")
            std::cout << "outcome refunded\n";
        else
            std::cout << "outcome aborted reason="
                      << outcome.at("reason").get<std::string>() << "\n";

        std::cout << "identity delta\n";
        const auto& initial = doc->at("initial_balances");
        const auto& final_b = doc->at("final_balances");
        for (const auto& [name, before] : initial.items()) {
            std::int64_t delta = static_cast<std::int64_t>(
                                     final_b.value(name, std::uint64_t{0}))
                                 - static_cast<std::int64_t>(before.get<std::uint64_t>());
            std::cout << name << " " << (delta >= 0 ? "+" : "") << delta << "\n";
        }
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed transcript: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int main_entry(int argc, char** argv)
{
    CLI::App app{"t-of-n Bitcoin-style voting protocol simulator"};
    app.require_subcommand(1);

    std::string config_path, out_path, transcript_path, seed_hex;

    CLI::App* run = app.add_subcommand("run", "execute a scenario config");
    run->add_option("--config", config_path, "scenario config (JSON)")->required();
    run->add_option("--out", out_path, "transcript output path")->required();
    run->add_option("--seed", seed_hex, "master seed override (hex)");

    CLI::App* verify = app.add_subcommand("verify", "audit a transcript");
    verify->add_option("--transcript", transcript_path, "transcript path")->required();

    CLI::App* census = app.add_subcommand("census", "summarize a transcript");
    census->add_option("--transcript", transcript_path, "transcript path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (run->parsed())
        return cmd_run(config_path, out_path, seed_hex);
    if (verify->parsed())
        return cmd_verify(transcript_path);
    return cmd_census(transcript_path);
}

} // namespace tnvote::cli
