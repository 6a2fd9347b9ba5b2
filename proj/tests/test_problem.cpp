#include <doctest.h>

#include <cmath>

#include "mero/problem.hpp"

using namespace mero;

TEST_CASE("float problem parsing with pi-valued scalars") {
    json doc = json::parse(R"({
      "transform": {"poles": [{"a": "pi", "b": 3}, {"a": "pi", "b": -3}]},
      "p": {"expr": "x^4 + 4*x^2 + 1"},
      "F": {"kind": "gaussian", "alpha": 2},
      "quadrature": {"tol": 1e-9, "max_depth": 20},
      "threshold": 1e-7
    })");
    ProblemSpec spec = parse_problem(doc);
    CHECK(!spec.exact);
    REQUIRE(spec.transform.poles.size() == 2);
    CHECK(spec.transform.poles.term(0).a == doctest::Approx(M_PI));
    CHECK(spec.transform.poles.term(0).b == -3.0);
    CHECK(spec.p == Poly<double>{1, 0, 4, 0, 1});
    REQUIRE(spec.integrand.has_value());
    CHECK(spec.integrand->kind() == "gaussian");
    CHECK(spec.integrand->alpha() == 2.0);
    CHECK(spec.quad.tol == 1e-9);
    CHECK(spec.quad.max_depth == 20);
    CHECK(spec.threshold == 1e-7);
}

TEST_CASE("exact problem parsing keeps rational data exact") {
    json doc = json::parse(R"({
      "mode": "exact",
      "transform": {"poles": [{"a": "1/2", "b": 1}, {"a": "1/2", "b": -1}]},
      "p": {"coeffs": [0, 0, 1]}
    })");
    ProblemSpec spec = parse_problem(doc);
    CHECK(spec.exact);
    REQUIRE(spec.exact_poles.has_value());
    CHECK(spec.exact_poles->term(0).a == Rat(1, 2));
    CHECK(spec.exact_poles->term(0).b == Rat(-1));
    REQUIRE(spec.exact_p.has_value());
    Reduction<Rat> red = reduce_poly(*spec.exact_poles, *spec.exact_p);
    CHECK(red.q == Poly<Rat>{Rat(1), Rat(0), Rat(1)});
}

TEST_CASE("echo round trip is a fixed point of the parser") {
    for (const char* text : {
             R"({"transform": {"poles": [{"a": 1, "b": 0}]},
                 "p": {"coeffs": [0, 1]}, "F": {"kind": "csch"}})",
             R"({"transform": {"cot_truncation": 3},
                 "p": {"coeffs": [0, 1]}, "F": {"kind": "csch"}})",
             R"({"transform": {"compose": [{"poles": [{"a": 1, "b": 0}]},
                                            {"poles": [{"a": 1, "b": 0}]}]},
                 "p": {"coeffs": [1]}, "F": {"kind": "gaussian", "alpha": 1}})",
             R"({"mode": "exact",
                 "transform": {"poles": [{"a": "2/3", "b": "-1/2"}]},
                 "p": {"coeffs": [0, "1/4"]}})",
         }) {
        ProblemSpec first = parse_problem(json::parse(text));
        ProblemSpec second = parse_problem(first.echo);
        CHECK(first.echo == second.echo);
        CHECK(first.transform.poles == second.transform.poles);
        CHECK(first.p == second.p);
    }
}

TEST_CASE("spec validation errors name the field") {
    auto expect_error = [](const char* text, const char* needle) {
        try {
            parse_problem(json::parse(text));
            FAIL_CHECK("expected SpecError for: " << text);
        } catch (const SpecError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_error(R"({"p": {"coeffs": [1]}})", "transform");
    expect_error(R"({"transform": {"poles": []}, "p": {"coeffs": []}})", "p");
    expect_error(
        R"({"transform": {"poles": [{"a": -1, "b": 0}]}, "p": {"coeffs": [1]}})",
        "positive");
    expect_error(
        R"({"transform": {"poles": [{"a": 1, "b": 0}], "cot_truncation": 2},
            "p": {"coeffs": [1]}})",
        "exactly one");
    expect_error(
        R"({"transform": {"poles": [{"a": 1, "b": 0}]},
            "p": {"coeffs": [1]}, "F": {"kind": "nope"}})",
        "F.kind");
    expect_error(
        R"({"transform": {"poles": [{"a": 1, "b": 0}]},
            "p": {"coeffs": ["pi*x"]}})",
        "may not depend on x");
    expect_error(
        R"({"mode": "exact", "transform": {"poles": [{"a": 0.25, "b": 0}]},
            "p": {"coeffs": [1]}})",
        "exact mode");
    expect_error(
        R"({"mode": "exact", "transform": {"poles": [{"a": "pi", "b": 0}]},
            "p": {"coeffs": [1]}})",
        "transform");
}

TEST_CASE("expr integrand with declared poles") {
    json doc = json::parse(R"({
      "transform": {"poles": [{"a": 1, "b": 0}]},
      "p": {"coeffs": [0, 1]},
      "F": {"kind": "expr", "expr": "x*csch(x)/x", "poles": [0]}
    })");
    ProblemSpec spec = parse_problem(doc);
    REQUIRE(spec.integrand.has_value());
    CHECK(spec.integrand->singularities() == std::vector<double>{0.0});
    CHECK(spec.integrand->eval(1.0) ==
          doctest::Approx(1.0 / std::sinh(1.0)).epsilon(1e-14));
}

TEST_CASE("composed transform from a problem file") {
    json doc = json::parse(R"({
      "transform": {"compose": [{"poles": [{"a": 1, "b": 0}]},
                                 {"poles": [{"a": 1, "b": 0}]}]},
      "p": {"coeffs": [1]}
    })");
    ProblemSpec spec = parse_problem(doc);
    REQUIRE(spec.transform.poles.size() == 3);
    CHECK(spec.transform.poles.term(1).a == doctest::Approx(1.0));
    CHECK(spec.transform.poles.term(0).a == doctest::Approx(0.5));
}

TEST_CASE("no poles means u = x and q = p") {
    json doc = json::parse(R"({
      "transform": {"poles": []},
      "p": {"coeffs": [3, 1, 4]}
    })");
    ProblemSpec spec = parse_problem(doc);
    CHECK(spec.transform.poles.empty());
    Reduction<double> red = reduce_poly(spec.transform.poles, spec.p);
    CHECK(red.q == spec.p);
}

TEST_CASE("exact cot truncation parses and reduces") {
    json doc = json::parse(R"({
      "mode": "exact",
      "transform": {"cot_truncation": 2},
      "p": {"coeffs": [0, 1]}
    })");
    ProblemSpec spec = parse_problem(doc);
    REQUIRE(spec.exact_poles.has_value());
    CHECK(spec.exact_poles->size() == 5);
    CHECK(reduce_poly(*spec.exact_poles, *spec.exact_p).q ==
          Poly<Rat>::identity());
}
