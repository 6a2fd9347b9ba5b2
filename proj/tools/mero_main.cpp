// Command-line front end: reduce problem files symbolically, verify the
// integral identities numerically, run the named fixtures, inspect branch
// inverses, and iterate transforms by composition.
//
// Exit codes: 0 = pass, 1 = problem-spec error, 2 = quadrature or
// verification failure.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "mero/problem.hpp"

namespace {

using mero::json;

constexpr int kExitPass = 0;
constexpr int kExitSpecError = 1;
constexpr int kExitNumericFailure = 2;

struct CommonFlags {
    std::optional<double> tol;
    std::optional<double> threshold;
    std::optional<std::string> mode;
    std::string output;
    std::string plot_csv;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--tol", flags.tol, "quadrature tolerance override");
    cmd->add_option("--threshold", flags.threshold,
                    "verification threshold override");
    cmd->add_option("--mode", flags.mode, "exact|float (overrides the file)")
        ->check(CLI::IsMember({"exact", "float"}));
    cmd->add_option("--output", flags.output, "write the report here");
    cmd->add_option("--plot-csv", flags.plot_csv,
                    "dump (x, p*F(u), q*F) samples for plotting");
}

mero::ProblemSpec load_with_overrides(const std::string& path,
                                      const CommonFlags& flags) {
    std::ifstream in(path);
    if (!in) throw mero::SpecError("cannot open problem file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw mero::SpecError("problem file " + path + ": " + e.what());
    }
    if (flags.mode) doc["mode"] = *flags.mode;
    mero::ProblemSpec spec = mero::parse_problem(doc);
    if (flags.tol) {
        if (!(*flags.tol > 0)) throw mero::SpecError("--tol must be > 0");
        spec.quad.tol = *flags.tol;
    }
    if (flags.threshold) {
        if (!(*flags.threshold > 0))
            throw mero::SpecError("--threshold must be > 0");
        spec.threshold = *flags.threshold;
    }
    return spec;
}

void emit(const json& report, const std::string& output) {
    if (output.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::ofstream out(output);
        if (!out)
            throw mero::SpecError("cannot write report to: " + output);
        out << report.dump(2) << "\n";
    }
}

void dump_plot_csv(const std::string& path, const mero::ProblemSpec& spec,
                   const mero::Poly<double>& q) {
    if (!spec.integrand)
        throw mero::SpecError("--plot-csv needs an F in the problem file");
    std::ofstream out(path);
    if (!out) throw mero::SpecError("cannot write plot data to: " + path);
    const auto& poles = spec.transform.poles;
    double lo = -8.0, hi = 8.0;
    if (!poles.empty()) {
        lo = poles.term(0).b - 5.0;
        hi = poles.term(poles.size() - 1).b + 5.0;
    }
    out << "x,lhs_integrand,rhs_integrand\n";
    const int samples = 2000;
    for (int i = 0; i <= samples; ++i) {
        double x = lo + (hi - lo) * i / samples;
        bool near_pole = false;
        for (const auto& t : poles.terms())
            if (std::fabs(x - t.b) < 1e-6) near_pole = true;
        if (near_pole) continue;
        double u = mero::eval_u(spec.transform, x);
        double lhs = spec.p.eval(x) * spec.integrand->eval(u);
        double rhs = q.eval(x) * spec.integrand->eval(x);
        out << x << "," << lhs << "," << rhs << "\n";
    }
}

json reduction_to_json(const mero::ProblemSpec& spec) {
    json out;
    out["problem"] = spec.echo;
    out["mode"] = spec.exact ? "exact" : "float";
    if (spec.exact) {
        mero::Reduction<mero::Rat> red =
            mero::reduce_poly(*spec.exact_poles, *spec.exact_p);
        json qc = json::array();
        for (const auto& c : red.q.coeffs()) qc.push_back(c.str());
        out["q"] = {{"coeffs", qc},
                    {"pretty", mero::poly_to_string(red.q)}};
        json per = json::array();
        for (std::size_t m = 0; m < red.per_monomial.size(); ++m) {
            json cs = json::array();
            for (const auto& c : red.per_monomial[m].coeffs())
                cs.push_back(c.str());
            per.push_back({{"m", m},
                           {"coeffs", cs},
                           {"pretty",
                            mero::poly_to_string(red.per_monomial[m])}});
        }
        out["per_monomial"] = per;
    } else {
        mero::Reduction<double> red =
            mero::reduce_poly(spec.transform.poles, spec.p);
        out["q"] = {{"coeffs", red.q.coeffs()},
                    {"pretty", mero::poly_to_string(red.q)}};
        json per = json::array();
        for (std::size_t m = 0; m < red.per_monomial.size(); ++m)
            per.push_back({{"m", m},
                           {"coeffs", red.per_monomial[m].coeffs()},
                           {"pretty",
                            mero::poly_to_string(red.per_monomial[m])}});
        out["per_monomial"] = per;
    }
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{
        "mero: symbolic reduction and numeric certification of integrals "
        "of p(x) F(u(x)) with u(x) = x - sum a_k/(x - b_k)"};
    app.require_subcommand(1);

    CommonFlags rf, vf, ff, bf, itf;
    std::string reduce_path, verify_path, branches_path, iterate_path;
    std::string fixture_name;
    double fixture_a = 2.0, fixture_b = 1.0;
    int fixture_n = 8;
    double branch_u = 0.0;
    int iterate_times = 2;
    bool iterate_check = false;

    CLI::App* creduce =
        app.add_subcommand("reduce", "print q and the per-monomial images");
    creduce->add_option("spec", reduce_path, "problem file")->required();
    add_common(creduce, rf);

    CLI::App* cverify = app.add_subcommand(
        "verify", "integrate both sides of the identity and compare");
    cverify->add_option("spec", verify_path, "problem file")->required();
    add_common(cverify, vf);

    CLI::App* cfixture =
        app.add_subcommand("fixture", "run a named end-to-end fixture");
    cfixture
        ->add_option("name", fixture_name,
                     "one of I1, I2, I3, iterate1, iterate2")
        ->required();
    cfixture->add_option("--a", fixture_a, "I1 parameter a (default 2)");
    cfixture->add_option("--b", fixture_b, "I1 parameter b (default 1)");
    cfixture->add_option("--N", fixture_n,
                         "I2 cotangent truncation level (default 8)");
    add_common(cfixture, ff);

    CLI::App* cbranches = app.add_subcommand(
        "branches", "solve u(x) = u on every segment and check the root sum");
    cbranches->add_option("spec", branches_path, "problem file")->required();
    cbranches->add_option("--u", branch_u, "target u value")->required();
    add_common(cbranches, bf);

    CLI::App* citerate = app.add_subcommand(
        "iterate", "compose the transform with itself and report the poles");
    citerate->add_option("spec", iterate_path, "problem file")->required();
    citerate->add_option("--times", iterate_times,
                         "number of composition factors (default 2)");
    citerate->add_flag("--check", iterate_check,
                       "also verify the Gaussian identity for the iterate");
    add_common(citerate, itf);

    CLI11_PARSE(app, argc, argv);

    if (creduce->parsed()) {
        mero::ProblemSpec spec = load_with_overrides(reduce_path, rf);
        json report = reduction_to_json(spec);
        if (!rf.plot_csv.empty()) {
            mero::Reduction<double> red =
                mero::reduce_poly(spec.transform.poles, spec.p);
            dump_plot_csv(rf.plot_csv, spec, red.q);
        }
        emit(report, rf.output);
        return kExitPass;
    }

    if (cverify->parsed()) {
        mero::ProblemSpec spec = load_with_overrides(verify_path, vf);
        if (!spec.integrand)
            throw mero::SpecError("verify requires an F in the problem file");
        mero::VerificationReport rep =
            mero::verify_identity(spec.transform.poles, spec.p,
                                  *spec.integrand, spec.quad, spec.threshold);
        json report = mero::report_to_json(rep);
        report["problem"] = spec.echo;
        if (!vf.plot_csv.empty()) dump_plot_csv(vf.plot_csv, spec, rep.q);
        emit(report, vf.output);
        return rep.pass ? kExitPass : kExitNumericFailure;
    }

    if (cfixture->parsed()) {
        mero::FixtureOptions fo;
        fo.a = fixture_a;
        fo.b = fixture_b;
        fo.cot_terms = fixture_n;
        if (ff.tol) fo.quad.tol = *ff.tol;
        if (ff.threshold) fo.threshold = *ff.threshold;
        mero::VerificationReport rep;
        try {
            rep = mero::run_fixture(fixture_name, fo);
        } catch (const std::invalid_argument& e) {
            throw mero::SpecError(e.what());
        }
        emit(mero::report_to_json(rep), ff.output);
        return rep.pass ? kExitPass : kExitNumericFailure;
    }

    if (cbranches->parsed()) {
        mero::ProblemSpec spec = load_with_overrides(branches_path, bf);
        mero::BranchSet br = mero::branches(spec.transform, branch_u);
        double sum = 0.0;
        json roots = json::array();
        for (std::size_t k = 0; k < br.roots.size(); ++k) {
            double r = br.roots[k];
            sum += r;
            roots.push_back({{"segment", k},
                             {"root", r},
                             {"u_at_root", mero::eval_u(spec.transform, r)},
                             {"dx_du",
                              mero::branch_derivative(spec.transform, r)}});
        }
        double expected = branch_u + spec.transform.poles.beta1();
        json report;
        report["problem"] = spec.echo;
        report["u"] = branch_u;
        report["roots"] = roots;
        report["root_sum"] = {{"value", sum},
                              {"expected_u_plus_beta1", expected},
                              {"abs_diff", std::fabs(sum - expected)}};
        emit(report, bf.output);
        return kExitPass;
    }

    if (citerate->parsed()) {
        mero::ProblemSpec spec = load_with_overrides(iterate_path, itf);
        if (iterate_times < 1)
            throw mero::SpecError("--times must be >= 1");
        mero::MeroTransform<double> acc = spec.transform;
        for (int i = 1; i < iterate_times; ++i)
            acc = mero::compose(acc, spec.transform);
        json poles = json::array();
        for (const auto& t : acc.poles.terms())
            poles.push_back({{"a", t.a}, {"b", t.b}});
        json report;
        report["problem"] = spec.echo;
        report["times"] = iterate_times;
        report["poles"] = poles;
        report["rational"] = {
            {"num", mero::poly_to_string(acc.rational.num)},
            {"den", mero::poly_to_string(acc.rational.den)}};
        bool pass = true;
        if (iterate_check) {
            mero::VerificationReport rep = mero::verify_identity(
                acc.poles, mero::Poly<double>{1.0},
                mero::IntegrandSpec::gaussian(1.0), spec.quad,
                itf.threshold.value_or(1e-7));
            report["check"] = mero::report_to_json(rep);
            pass = rep.pass;
        }
        emit(report, itf.output);
        return pass ? kExitPass : kExitNumericFailure;
    }

    return kExitSpecError;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const mero::SpecError& e) {
        std::cerr << json{{"error", e.what()}}.dump(2) << "\n";
        return kExitSpecError;
    } catch (const mero::ParseError& e) {
        std::cerr << json{{"error", e.what()}}.dump(2) << "\n";
        return kExitSpecError;
    } catch (const mero::NotInClassError& e) {
        std::cerr << json{{"error", e.what()},
                          {"condition", e.condition()}}
                         .dump(2)
                  << "\n";
        return kExitSpecError;
    } catch (const std::invalid_argument& e) {
        std::cerr << json{{"error", e.what()}}.dump(2) << "\n";
        return kExitSpecError;
    } catch (const mero::QuadratureError& e) {
        std::cerr << json{{"error", e.what()},
                          {"best_value", e.best().value},
                          {"best_error_estimate",
                           e.best().abs_error_estimate}}
                         .dump(2)
                  << "\n";
        return kExitNumericFailure;
    } catch (const mero::EvalError& e) {
        std::cerr << json{{"error", e.what()}}.dump(2) << "\n";
        return kExitNumericFailure;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}}.dump(2) << "\n";
        return kExitNumericFailure;
    }
}
