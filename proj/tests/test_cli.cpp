#include <doctest.h>

#include <nlohmann/json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(LATSEC_CLI_PATH) + " " + args + " 2>/dev/null";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        r.out.append(buf.data(), got);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

}  // namespace

TEST_CASE("gain subcommand") {
    const auto exact = run_cli("gain --extremal 24 --exact");
    CHECK(exact.exit_code == 0);
    const auto doc = nlohmann::json::parse(exact.out);
    CHECK(doc.at("schema") == "latsec-report/1");
    CHECK(doc.at("outputs").at("gain_exact") == "256/63");
    CHECK(doc.at("outputs").at("method") == "exact_at_one");

    const auto d4 = run_cli("gain --lattice D4 --numeric");
    CHECK(d4.exit_code == 0);
    const auto d4doc = nlohmann::json::parse(d4.out);
    const double peak_db = d4doc.at("outputs").at("y_star_db").get<double>();
    CHECK(std::abs(peak_db + 1.50515) < 0.05);

    const auto flat = run_cli("gain --lattice Zn:4 --numeric");
    CHECK(flat.exit_code == 0);
    CHECK(std::abs(nlohmann::json::parse(flat.out).at("outputs").at("gain").get<double>() -
                   1.0) < 1e-9);

    CHECK(run_cli("gain --lattice Nope").exit_code == 2);
    CHECK(run_cli("gain").exit_code == 2);
    CHECK(run_cli("gain --lattice D4 --exact").exit_code == 2);
    CHECK(run_cli("no-such-command").exit_code == 2);
    CHECK(run_cli("wiretap simulate --trials 10").exit_code == 2);  // missing required

    // numeric mode still reports the exact rational when one exists
    const auto numeric24 = run_cli("gain --extremal 24 --numeric");
    CHECK(numeric24.exit_code == 0);
    CHECK(nlohmann::json::parse(numeric24.out).at("outputs").at("gain_exact_at_y1") ==
          "256/63");
}

TEST_CASE("curve subcommand emits deterministic CSV") {
    const std::string path1 = "/tmp/latsec_test_curve1.csv";
    const std::string path2 = "/tmp/latsec_test_curve2.csv";
    const std::string args = "curve --lattice E8 --min-db -6 --max-db 6 --steps 21 --out ";
    CHECK(run_cli(args + path1).exit_code == 0);
    CHECK(run_cli(args + path2).exit_code == 0);

    std::ifstream f1(path1), f2(path2);
    const std::string c1((std::istreambuf_iterator<char>(f1)), {});
    const std::string c2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(c1 == c2);
    CHECK(c1.rfind("y_db,xi\n", 0) == 0);
    CHECK(c1.find("\r") == std::string::npos);
    CHECK(c1.find("1.3333333333333") != std::string::npos);  // peak row at 0 dB

    CHECK(run_cli("curve --lattice E8 --out /nonexistent-dir/x.csv").exit_code == 1);
    std::remove(path1.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("bound subcommand") {
    const auto r = run_cli("bound --n-min 8 --n-max 24 --step 8 --asymptotic");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("n,siegel_weil,asymptotic,extremal_gain\n", 0) == 0);
    CHECK(r.out.find("\n8,1.3333333333333") != std::string::npos);
    // n = 16 has no extremal lattice stored: trailing cell stays empty
    CHECK(r.out.find("\n16,") != std::string::npos);

    // off-grid dimensions are skipped, not emitted
    const auto skipped = run_cli("bound --n-min 8 --n-max 16 --step 4");
    CHECK(skipped.exit_code == 0);
    CHECK(skipped.out.find("\n12,") == std::string::npos);
    CHECK(skipped.out.find("\n16,") != std::string::npos);
}

TEST_CASE("relative output paths honour LATSEC_OUTPUT_DIR") {
    const std::string cmd =
        std::string("LATSEC_OUTPUT_DIR=/tmp ") + LATSEC_CLI_PATH +
        " curve --lattice Zn:2 --steps 3 --out latsec_envdir_test.csv 2>/dev/null";
    CHECK(std::system(cmd.c_str()) == 0);
    std::ifstream f("/tmp/latsec_envdir_test.csv");
    CHECK(f.good());
    std::remove("/tmp/latsec_envdir_test.csv");
}

TEST_CASE("gain accepts a JSON lattice document") {
    const std::string path = "/tmp/latsec_test_lat.json";
    {
        std::ofstream f(path);
        f << R"json({"name": "Z2scaled", "dim": 2, "gram": [["4", 0], [0, "4"]]})json";
    }
    const auto r = run_cli("gain --json " + path + " --numeric");
    CHECK(r.exit_code == 0);
    // a scaled copy of Z^2 has the same secrecy function as Z^2 itself
    CHECK(std::abs(nlohmann::json::parse(r.out).at("outputs").at("gain").get<double>() -
                   1.0) < 1e-9);
    std::remove(path.c_str());
}

TEST_CASE("wiretap subcommands") {
    const auto op = run_cli("wiretap op-point --R 3 --Rs 3 --gamma-db 7.9818");
    CHECK(op.exit_code == 0);
    CHECK(std::abs(nlohmann::json::parse(op.out).at("outputs").at("y").get<double>() -
                   1.0) < 1e-4);

    const auto rate = run_cli("wiretap rate --R 3 --gamma 12.566370614359172");
    CHECK(rate.exit_code == 0);
    const auto rdoc = nlohmann::json::parse(rate.out);
    CHECK(std::abs(rdoc.at("outputs").at("R_s").get<double>() - 2.0) < 1e-12);

    const std::string cfg_path = "/tmp/latsec_test_cfg.json";
    {
        std::ofstream cfg(cfg_path);
        cfg << R"json({"n": 1, "sigma_e": 0.8, "R": 6.0, "R_s": 4.0,
                   "lattice_b": "Zn(1)",
                   "lattice_e": {"name": "4Z", "dim": 1, "gram": [[16]]}})json";
    }
    const auto sim = run_cli("wiretap simulate --config " + cfg_path +
                             " --trials 5000 --seed 7");
    CHECK(sim.exit_code == 0);
    const auto sdoc = nlohmann::json::parse(sim.out);
    CHECK(sdoc.at("outputs").contains("p_hat"));
    CHECK(sdoc.at("outputs").contains("ci95"));
    CHECK(sdoc.at("outputs").contains("formula_value"));
    CHECK(sdoc.at("outputs").contains("regime_flag"));

    // sigma_e <= sigma_b violates the positive-secrecy-capacity assumption
    const std::string bad_path = "/tmp/latsec_test_bad.json";
    {
        std::ofstream cfg(bad_path);
        cfg << R"json({"n": 1, "sigma_e": 0.5, "sigma_b": 0.8, "R": 6.0, "R_s": 4.0,
                   "lattice_b": "Zn(1)",
                   "lattice_e": {"name": "4Z", "dim": 1, "gram": [[16]]}})json";
    }
    CHECK(run_cli("wiretap simulate --config " + bad_path + " --trials 1000 --seed 1")
              .exit_code == 2);
    std::remove(cfg_path.c_str());
    std::remove(bad_path.c_str());
}
