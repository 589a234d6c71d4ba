#include "caresim/config.h"
#include "caresim/engine.h"
#include "caresim/policy.h"
#include "caresim/rate_tables.h"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace caresim;

namespace {

std::string sha256_hex(const std::string &data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 failed");
    }
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) {
        out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return out.str();
}

std::string read_file(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + p.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// tables.dir is taken relative to the directory holding the config file.
fs::path tables_path(const ScenarioConfig &c, const fs::path &config_path) {
    fs::path dir(c.tables_dir);
    if (dir.is_relative()) {
        dir = config_path.parent_path() / dir;
    }
    return dir.lexically_normal();
}

struct Loaded {
    ScenarioConfig config;
    fs::path tables_dir;
    std::shared_ptr<const RateTables> tables;
};

Loaded load_all(const fs::path &config_path) {
    Loaded l;
    l.config = load_config(config_path);
    const auto report = validate_config(l.config);
    if (!report.ok()) {
        throw ConfigError(report.to_string());
    }
    l.tables_dir = tables_path(l.config, config_path);
    auto tables = std::make_shared<RateTables>(RateTables::load(l.tables_dir));
    tables->validate(l.config);
    l.tables = std::move(tables);
    return l;
}

std::string tables_digest(const fs::path &dir) {
    std::string all;
    for (const char *f : RateTables::kFiles) {
        all += f;
        all += '\n';
        all += read_file(dir / f);
    }
    return sha256_hex(all);
}

void write_manifest(const fs::path &out, const std::string &command, const ScenarioConfig &c,
                    const fs::path &tables_dir, const std::vector<std::uint64_t> &seeds,
                    const std::vector<std::string> &policies) {
    const std::string canonical = dump_config(c);
    nlohmann::json m;
    m["command"] = command;
    m["version"] = CARESIM_VERSION;
    m["config_sha256"] = sha256_hex(canonical);
    m["tables_sha256"] = tables_digest(tables_dir);
    m["tables_dir"] = fs::absolute(tables_dir).string();
    m["seeds"] = seeds;
    m["policies"] = policies;
    m["config"] = canonical;
    std::ofstream f(out / "manifest.json", std::ios::binary);
    f << m.dump(2) << '\n';
}

std::vector<std::string> split_list(const std::string &s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string &s) {
    std::vector<std::uint64_t> out;
    for (const auto &item : split_list(s)) {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(item, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used != item.size() || item.empty() || item[0] == '-') {
            throw ConfigError("invalid seed '" + item + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw ConfigError("no seeds given");
    }
    return out;
}

std::vector<Policy> parse_policies(const std::string &s) {
    std::vector<Policy> out;
    for (const auto &item : split_list(s)) {
        auto p = parse_policy(item);
        if (!p) {
            throw ConfigError("unknown policy '" + item + "' (expected none, tax or direct)");
        }
        out.push_back(*p);
    }
    if (out.empty()) {
        throw ConfigError("no policies given");
    }
    return out;
}

int worker_count() {
    if (const char *env = std::getenv("CARESIM_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) {
            return n;
        }
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void run_single(const ScenarioConfig &c, std::shared_ptr<const RateTables> tables, const fs::path &out,
                bool events) {
    ScenarioConfig cfg = c;
    cfg.log_events = cfg.log_events || events;
    auto state = initialize(cfg, std::move(tables));
    const auto rows = run_until(state, cfg.end_year);
    fs::create_directories(out);
    {
        std::ofstream f(out / "metrics.csv", std::ios::binary);
        write_metrics_csv(f, rows);
    }
    if (cfg.log_events) {
        std::ofstream f(out / "events.ndjson", std::ios::binary);
        for (const auto &e : state.events) {
            f << e << '\n';
        }
    }
}

void run_compare(const ScenarioConfig &c, std::shared_ptr<const RateTables> tables,
                 const std::vector<Policy> &policies, const std::vector<std::uint64_t> &seeds,
                 const fs::path &out, int workers) {
    const auto report = run_scenario_set(policy_scenarios(c, policies), seeds, std::move(tables), workers);
    write_report(report, out);
}

std::vector<std::string> policy_names(const std::vector<Policy> &ps) {
    std::vector<std::string> out;
    for (Policy p : ps) {
        out.push_back(scenario_name(p));
    }
    return out;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Agent-based simulation of social care supply and demand"};
    app.set_version_flag("--version", CARESIM_VERSION);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool have_seed = false;
    bool events = false;
    std::string policies = "none,tax,direct";
    std::string seeds = "1,2,3,4,5";
    int workers = 0;
    std::string manifest_path;

    auto *run = app.add_subcommand("run", "Run one scenario and write metrics.csv");
    run->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Master seed (default: sim.seed from the config)")
        ->each([&](const std::string &) { have_seed = true; });
    run->add_option("--out", out_dir, "Output directory")->required();
    run->add_flag("--events", events, "Also write events.ndjson");

    auto *cmp = app.add_subcommand("compare", "Run policy scenarios under common seeds");
    cmp->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    cmp->add_option("--policies", policies, "Comma-separated: none,tax,direct")->capture_default_str();
    cmp->add_option("--seeds", seeds, "Comma-separated seeds")->capture_default_str();
    cmp->add_option("--out", out_dir, "Output directory")->required();
    cmp->add_option("--workers", workers, "Parallel runs (default: CARESIM_WORKERS or CPU count)");

    auto *val = app.add_subcommand("validate", "Check a config and its rate tables");
    val->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);

    auto *tab = app.add_subcommand("tables", "Write the synthetic rate tables");
    tab->add_option("--config", config_path, "Config supplying the year span")->check(CLI::ExistingFile);
    tab->add_option("--out", out_dir, "Output directory")->required();

    auto *rep = app.add_subcommand("replay", "Re-run the command recorded in a manifest.json");
    rep->add_option("--manifest", manifest_path, "manifest.json")->required()->check(CLI::ExistingFile);
    rep->add_option("--out", out_dir, "Output directory")->required();
    rep->add_option("--workers", workers, "Parallel runs for compare manifests");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*val) {
            load_all(config_path);
            std::cout << "ok: " << config_path << '\n';
            return 0;
        }
        if (*tab) {
            const ScenarioConfig c = config_path.empty() ? ScenarioConfig::defaults() : load_config(config_path);
            synthetic_rate_tables(c).write(out_dir);
            return 0;
        }
        if (*run) {
            auto l = load_all(config_path);
            if (have_seed) {
                l.config.seed = seed;
            }
            run_single(l.config, l.tables, out_dir, events);
            write_manifest(out_dir, "run", l.config, l.tables_dir, {l.config.seed}, {});
            return 0;
        }
        if (*cmp) {
            const auto l = load_all(config_path);
            const auto ps = parse_policies(policies);
            const auto ss = parse_seeds(seeds);
            fs::create_directories(out_dir);
            run_compare(l.config, l.tables, ps, ss, out_dir, workers > 0 ? workers : worker_count());
            write_manifest(out_dir, "compare", l.config, l.tables_dir, ss, policy_names(ps));
            return 0;
        }
        if (*rep) {
            const auto m = nlohmann::json::parse(read_file(manifest_path));
            const ScenarioConfig c = parse_config(m.at("config").get<std::string>());
            const fs::path tdir = m.at("tables_dir").get<std::string>();
            if (tables_digest(tdir) != m.at("tables_sha256").get<std::string>()) {
                throw ConfigError("rate tables in " + tdir.string() + " changed since the manifest was written");
            }
            auto tables = std::make_shared<RateTables>(RateTables::load(tdir));
            tables->validate(c);
            const auto ss = m.at("seeds").get<std::vector<std::uint64_t>>();
            if (m.at("command") == "run") {
                run_single(c, std::move(tables), out_dir, false);
                write_manifest(out_dir, "run", c, tdir, ss, {});
            } else {
                std::string joined;
                for (const auto &p : m.at("policies").get<std::vector<std::string>>()) {
                    joined += (joined.empty() ? "" : ",") + p;
                }
                const auto ps = parse_policies(joined);
                fs::create_directories(out_dir);
                run_compare(c, std::move(tables), ps, ss, out_dir, workers > 0 ? workers : worker_count());
                write_manifest(out_dir, "compare", c, tdir, ss, policy_names(ps));
            }
            return 0;
        }
    } catch (const ConfigError &e) {
        std::cerr << "caresim: invalid configuration:\n" << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "caresim: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
