#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "akisub/error.hpp"

namespace fs = std::filesystem;
using akisub::ErrorCategory;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run cli(const std::string& args) {
    static int counter = 0;
    const fs::path log = fs::temp_directory_path() / ("akisub_cli_" + std::to_string(counter++) + ".log");
    const std::string cmd = std::string("\"") + AKISUB_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::ostringstream s;
    s << in.rdbuf();
    r.out = s.str();
    fs::remove(log);
    return r;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("akisub_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const std::string& body) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << body;
    return p;
}

const char* kTiny = R"({"schema_version": 1, "cohort": {"n_stays": 60, "case_fraction": 0.35}})";

}  // namespace

TEST_CASE("cli help and argument errors") {
    const auto help = cli("--help");
    CHECK(help.code == 0);
    CHECK(help.out.find("synth") != std::string::npos);
    CHECK(help.out.find("evaluate") != std::string::npos);

    const int arg = akisub::exit_code(ErrorCategory::argument);
    CHECK(arg == 11);
    CHECK(cli("").code == arg);
    CHECK(cli("bogus").code == arg);
    CHECK(cli("synth --t1 30").code == arg);
    CHECK(cli("synth --config /nonexistent/config.json").code == arg);
    const auto r = cli("synth --seed notanumber");
    CHECK(r.code == arg);
    CHECK(r.out.find("argument_error") != std::string::npos);
}

TEST_CASE("cli config errors") {
    const auto dir = scratch("config");
    const auto bad = write_config(dir, R"({"schema_version": 1, "surprise": true})");
    const auto r = cli("synth --config \"" + bad.string() + "\"");
    CHECK(r.code == akisub::exit_code(ErrorCategory::config));
    CHECK(r.out.find("config_error") != std::string::npos);
}

TEST_CASE("cli stages") {
    const auto dir = scratch("stages");
    const auto cfg = write_config(dir, kTiny);
    const std::string base = "--config \"" + cfg.string() + "\" --out \"" + (dir / "out").string() + "\" ";

    const auto missing = cli("cluster " + base);
    CHECK(missing.code == akisub::exit_code(ErrorCategory::dependency));
    CHECK(missing.out.find("stage_dependency_error") != std::string::npos);

    CHECK(cli("synth " + base).code == 0);
    CHECK(fs::exists(dir / "out" / "manifests" / "synth.json"));
    const auto again = cli("synth " + base);
    CHECK(again.code == 0);
    CHECK(again.out.find("skipped") != std::string::npos);
    CHECK(cli("synth --force " + base).out.find("skipped") == std::string::npos);
    CHECK(cli("label " + base).code == 0);
}
