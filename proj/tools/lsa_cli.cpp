// Command-line front end. Talks to the simulator through the C API only.
#include <lsa/lsa.h>

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct Common {
    std::string config;
    std::string profile;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    std::string out;
    bool resume = false;
    // isolation
    std::string eve_max;
    std::string threshold;
    std::string source;
};

void add_common(CLI::App* cmd, Common& c, bool run_flags = true) {
    cmd->add_option("--config", c.config, "JSON config or manifest.json of an earlier run");
    cmd->add_option("--profile", c.profile, "default set: ci (desk scale) or paper")->check(CLI::IsMember({"ci", "paper"}));
    if (!run_flags)
        return;
    cmd->add_option("--seed", c.seed, "master seed (overrides the config)");
    cmd->add_option("--jobs", c.jobs, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
    cmd->add_option("--out", c.out, "parent directory of run directories");
    cmd->add_flag("--resume", c.resume, "skip sweep cells completed by an interrupted run");
}

void progress(const char* line, void*) {
    std::cerr << "[lsa] " << line << '\n';
}

int report(lsa_status s) {
    std::cerr << "error: " << lsa_last_error() << '\n';
    return lsa_exit_code(s);
}

int run(const std::string& scenario, const Common& c, bool validate_only) {
    lsa_run* r = nullptr;
    if (auto s = lsa_run_create(&r); s != LSA_OK)
        return report(s);
    struct Cleanup {
        lsa_run* r;
        ~Cleanup() { lsa_run_destroy(r); }
    } cleanup{r};

    auto set = [&](const char* key, const std::string& value) { return lsa_run_set_option(r, key, value.c_str()); };
    lsa_status s = LSA_OK;
    if (!c.profile.empty() && (s = set("profile", c.profile)) != LSA_OK)
        return report(s);
    if (!c.config.empty() && (s = lsa_run_load_config(r, c.config.c_str())) != LSA_OK)
        return report(s);
    if (!validate_only && (s = set("scenario", scenario)) != LSA_OK)
        return report(s);
    if (c.seed && (s = set("seed", std::to_string(*c.seed))) != LSA_OK)
        return report(s);
    if (!c.out.empty() && (s = set("out", c.out)) != LSA_OK)
        return report(s);
    if ((s = set("jobs", std::to_string(c.jobs))) != LSA_OK)
        return report(s);
    if ((s = set("resume", c.resume ? "1" : "0")) != LSA_OK)
        return report(s);
    if (!c.source.empty() && (s = set("source", c.source)) != LSA_OK)
        return report(s);
    if (!c.eve_max.empty() && (s = set("eve_max", c.eve_max)) != LSA_OK)
        return report(s);
    if (!c.threshold.empty() && (s = set("threshold", c.threshold)) != LSA_OK)
        return report(s);

    if (validate_only) {
        std::cout << "config ok\n"
                  << "digest: " << lsa_run_digest(r) << '\n'
                  << lsa_run_config_json(r) << '\n';
        return 0;
    }

    lsa_run_set_progress(r, progress, nullptr);
    if ((s = lsa_run_execute(r)) != LSA_OK)
        return report(s);
    std::cout << lsa_run_summary_text(r) << "run directory: " << lsa_run_directory(r) << '\n'
              << "digest: " << lsa_run_digest(r) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gain-switched laser seeding-attack simulator"};
    app.set_version_flag("--version", std::string(lsa_version()));
    app.require_subcommand(1);

    Common c;
    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {
        {"simulate", "integrate one drive train and export the trace and per-pulse metrics"},
        {"sweep-current", "energy-increase heatmap over on/off drive currents"},
        {"sweep-power", "pulse energy, delay and shape versus injected power"},
        {"correlate", "Alice-Eve interferometer correlation envelope versus injected power"},
        {"isolation", "optical isolation needed to keep the attacker below the attack threshold"},
    };
    std::vector<std::pair<std::string, CLI::App*>> cmds;
    for (const auto& s : subs) {
        auto* cmd = app.add_subcommand(s.name, s.help);
        add_common(cmd, c);
        cmds.emplace_back(s.name, cmd);
    }
    auto* iso = cmds.back().second;
    iso->add_option("--eve-max", c.eve_max, "attacker's deliverable power, e.g. 55kW");
    iso->add_option("--threshold", c.threshold, "attack-onset power at the laser, e.g. 1nW");
    iso->add_option("--source", c.source, "preset bound: lidt, fuse, power_limiter, custom");

    auto* validate = app.add_subcommand("validate-config", "check a config and print its effective form and digest");
    add_common(validate, c, false);
    validate->get_option("--config")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (validate->parsed())
        return run("", c, true);
    for (const auto& [name, cmd] : cmds)
        if (cmd->parsed())
            return run(name, c, false);
    return 2;
}
