#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef MERO_CLI_BIN
#error "MERO_CLI_BIN must point at the built binary"
#endif
#ifndef MERO_PROBLEM_DIR
#error "MERO_PROBLEM_DIR must point at the sample problems"
#endif

namespace {

using nlohmann::json;

std::string problem(const std::string& name) {
    return std::string(MERO_PROBLEM_DIR) + "/" + name;
}

int run_cli(const std::string& args, const std::string& out_file) {
    std::string cmd = std::string(MERO_CLI_BIN) + " " + args + " > " +
                      out_file + " 2>&1";
    int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

json slurp_json(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    return json::parse(in);
}

std::string tmp_path(const std::string& stem) {
    return std::string("cli_") + stem + ".json";
}

}  // namespace

TEST_CASE("reduce subcommand prints q against the pi-pair problem") {
    std::string out = tmp_path("reduce");
    int code = run_cli("reduce " + problem("quartic_pi_pair.json"), out);
    CHECK(code == 0);
    json rep = slurp_json(out);
    auto q = rep.at("q").at("coeffs").get<std::vector<double>>();
    REQUIRE(q.size() == 5);
    CHECK(q[4] == doctest::Approx(1.0));
    CHECK(q[2] == doctest::Approx(6.0 * M_PI + 4.0).epsilon(1e-12));
    CHECK(q[0] ==
          doctest::Approx(4.0 * M_PI * M_PI + 26.0 * M_PI + 1.0).epsilon(1e-12));
    CHECK(rep.at("per_monomial").size() == 5);
    std::remove(out.c_str());
}

TEST_CASE("reduce in exact mode prints rational strings") {
    std::string out = tmp_path("reduce_exact");
    int code = run_cli("reduce " + problem("exact_two_pole.json"), out);
    CHECK(code == 0);
    json rep = slurp_json(out);
    CHECK(rep.at("mode") == "exact");
    auto q = rep.at("q").at("coeffs");
    REQUIRE(q.size() == 3);
    CHECK(q[0].get<std::string>() == "1");
    CHECK(q[1].get<std::string>() == "0");
    CHECK(q[2].get<std::string>() == "1");
    CHECK(rep.at("q").at("pretty").get<std::string>() == "x^2 + 1");
    std::remove(out.c_str());
}

TEST_CASE("verify subcommand passes on the smoke problem and exits 0") {
    std::string out = tmp_path("verify");
    int code = run_cli("verify " + problem("reciprocal_gaussian.json"), out);
    CHECK(code == 0);
    json rep = slurp_json(out);
    CHECK(rep.at("pass").get<bool>());
    CHECK(rep.at("lhs").at("value").get<double>() ==
          doctest::Approx(std::sqrt(M_PI)).epsilon(1e-8));
    CHECK(rep.at("problem").at("transform").at("poles").size() == 1);
    std::remove(out.c_str());
}

TEST_CASE("verify handles csch with principal values") {
    std::string out = tmp_path("verify_csch");
    int code = run_cli("verify " + problem("csch_reciprocal.json"), out);
    CHECK(code == 0);
    json rep = slurp_json(out);
    CHECK(rep.at("pass").get<bool>());
    CHECK(rep.at("lhs").at("pv_points").size() == 2);
    CHECK(rep.at("lhs").at("value").get<double>() ==
          doctest::Approx(M_PI * M_PI / 2.0).epsilon(1e-6));
    std::remove(out.c_str());
}

TEST_CASE("exit code contract") {
    std::string out = tmp_path("exit");
    // spec error: malformed file
    std::ofstream bad("cli_bad_spec.json");
    bad << "{ not json";
    bad.close();
    CHECK(run_cli("verify cli_bad_spec.json", out) == 1);
    std::remove("cli_bad_spec.json");

    // spec error: missing file
    CHECK(run_cli("verify cli_no_such_file.json", out) == 1);

    // spec error: unknown fixture
    CHECK(run_cli("fixture bogus", out) == 1);

    // quadrature failure: non-decaying F with a depth cap
    std::ofstream diverge("cli_diverge.json");
    diverge << R"({
      "transform": {"poles": [{"a": 1, "b": 0}]},
      "p": {"coeffs": [1]},
      "F": {"kind": "expr", "expr": "1 + 0*x", "poles": []},
      "quadrature": {"max_depth": 2}
    })";
    diverge.close();
    CHECK(run_cli("verify cli_diverge.json", out) == 2);
    std::remove("cli_diverge.json");

    // pass
    CHECK(run_cli("fixture iterate1", out) == 0);
    std::remove(out.c_str());
}

TEST_CASE("branches subcommand reports the root-sum check") {
    std::string out = tmp_path("branches");
    int code = run_cli(
        "branches " + problem("reciprocal_gaussian.json") + " --u 0", out);
    CHECK(code == 0);
    json rep = slurp_json(out);
    auto roots = rep.at("roots");
    REQUIRE(roots.size() == 2);
    CHECK(roots[0].at("root").get<double>() == doctest::Approx(-1.0));
    CHECK(roots[1].at("root").get<double>() == doctest::Approx(1.0));
    CHECK(rep.at("root_sum").at("abs_diff").get<double>() <= 1e-9);
    std::remove(out.c_str());
}

TEST_CASE("iterate subcommand composes and checks the identity") {
    std::string out = tmp_path("iterate");
    int code = run_cli("iterate " + problem("reciprocal_gaussian.json") +
                           " --times 2 --check",
                       out);
    CHECK(code == 0);
    json rep = slurp_json(out);
    auto poles = rep.at("poles");
    REQUIRE(poles.size() == 3);
    CHECK(poles[0].at("b").get<double>() == doctest::Approx(-1.0));
    CHECK(poles[1].at("b").get<double>() == doctest::Approx(0.0));
    CHECK(poles[2].at("b").get<double>() == doctest::Approx(1.0));
    CHECK(rep.at("check").at("pass").get<bool>());
    std::remove(out.c_str());
}

TEST_CASE("plot csv dump") {
    std::string out = tmp_path("plot_report");
    int code = run_cli("verify " + problem("reciprocal_gaussian.json") +
                           " --plot-csv cli_plot.csv",
                       out);
    CHECK(code == 0);
    std::ifstream csv("cli_plot.csv");
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header == "x,lhs_integrand,rhs_integrand");
    int lines = 0;
    for (std::string line; std::getline(csv, line);) ++lines;
    CHECK(lines > 1000);
    csv.close();
    std::remove("cli_plot.csv");
    std::remove(out.c_str());
}

TEST_CASE("MERO_MAX_DEPTH environment override is honored") {
    std::string out = tmp_path("env");
    std::string cmd = std::string("MERO_MAX_DEPTH=notanint ") +
                      MERO_CLI_BIN + " verify " +
                      problem("reciprocal_gaussian.json") + " > " + out +
                      " 2>&1";
    int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 1);  // spec error: bad env value
    std::remove(out.c_str());
}

TEST_CASE("MERO_MAX_DEPTH reaches the quadrature options") {
    std::string out = tmp_path("env_depth");
    std::string cmd = std::string("MERO_MAX_DEPTH=3 ") + MERO_CLI_BIN +
                      " verify " + problem("reciprocal_gaussian.json") +
                      " > " + out + " 2>&1";
    int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 0);
    json rep = slurp_json(out);
    CHECK(rep.at("problem").at("quadrature").at("max_depth").get<int>() == 3);
    std::remove(out.c_str());
}

TEST_CASE("fixture subcommand runs the two-pole example") {
    std::string out = tmp_path("fixture_i1");
    int code = run_cli("fixture I1 --a 2 --b 1", out);
    CHECK(code == 0);
    json rep = slurp_json(out);
    CHECK(rep.at("pass").get<bool>());
    CHECK(rep.at("lhs").at("value").get<double>() ==
          doctest::Approx(2.6586807763).epsilon(1e-8));
    CHECK(rep.at("closed_form").at("value").get<double>() ==
          doctest::Approx(1.5 * std::sqrt(M_PI)).epsilon(1e-12));
    std::remove(out.c_str());
}
