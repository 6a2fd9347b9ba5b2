#pragma once

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mero/expr.hpp"
#include "mero/quad.hpp"
#include "mero/reduce.hpp"
#include "mero/transform.hpp"
#include "mero/verify.hpp"

namespace mero {

using json = nlohmann::json;

/// Problem-file validation error; the message names the offending field.
class SpecError : public std::runtime_error {
public:
    explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

/// A parsed problem document: transform + prefactor + kernel + quadrature
/// settings, materialized for floating-point work and, in exact mode, as
/// rational data for symbolic reduction as well.
struct ProblemSpec {
    bool exact = false;
    MeroTransform<double> transform;
    Poly<double> p;
    std::optional<IntegrandSpec> integrand;
    QuadOptions quad;
    double threshold = 1e-7;
    std::optional<PoleSet<Rat>> exact_poles;
    std::optional<Poly<Rat>> exact_p;
    json echo;  // normalized document; parsing it again reproduces the spec
};

namespace detail {

inline double scalar_from_json(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        Expr e = [&] {
            try {
                return parse_expression(v.get<std::string>());
            } catch (const ParseError& pe) {
                throw SpecError(where + ": " + pe.what());
            }
        }();
        if (e.uses_variable())
            throw SpecError(where + ": scalar may not depend on x");
        return e.eval(0.0);
    }
    throw SpecError(where + ": expected a number or a constant expression");
}

inline Rat rat_from_json(const json& v, const std::string& where) {
    if (v.is_number_integer()) return Rat(v.get<long long>());
    if (v.is_number())
        throw SpecError(where +
                        ": exact mode needs integers or \"p/q\" strings, not "
                        "floating literals");
    if (v.is_string()) {
        try {
            return rat_from_string(v.get<std::string>());
        } catch (const std::exception& e) {
            throw SpecError(where + ": " + e.what());
        }
    }
    throw SpecError(where + ": expected an integer or a rational string");
}

inline MeroTransform<double> float_transform_from_json(const json& t,
                                                       const std::string& where);

inline MeroTransform<Rat> exact_transform_from_json(const json& t,
                                                    const std::string& where) {
    if (!t.is_object() || t.size() != 1)
        throw SpecError(where +
                        ": transform must have exactly one of poles, "
                        "cot_truncation, compose");
    if (t.contains("poles")) {
        std::vector<PoleTerm<Rat>> terms;
        for (const auto& item : t.at("poles"))
            terms.push_back({rat_from_json(item.at("a"), where + ".poles.a"),
                             rat_from_json(item.at("b"), where + ".poles.b")});
        try {
            return MeroTransform<Rat>(PoleSet<Rat>(std::move(terms)));
        } catch (const std::invalid_argument& e) {
            throw SpecError(where + ": " + e.what());
        }
    }
    if (t.contains("cot_truncation")) {
        int n = t.at("cot_truncation").get<int>();
        if (n < 0) throw SpecError(where + ": cot_truncation must be >= 0");
        std::vector<PoleTerm<Rat>> terms;
        for (int k = -n; k <= n; ++k) terms.push_back({Rat(1), Rat(k)});
        return MeroTransform<Rat>(PoleSet<Rat>(std::move(terms)));
    }
    if (t.contains("compose")) {
        const auto& arr = t.at("compose");
        if (!arr.is_array() || arr.size() != 2)
            throw SpecError(where + ": compose expects [outer, inner]");
        return compose(exact_transform_from_json(arr[0], where + ".compose[0]"),
                       exact_transform_from_json(arr[1], where + ".compose[1]"));
    }
    throw SpecError(where + ": unknown transform form");
}

inline MeroTransform<double> float_transform_from_json(
    const json& t, const std::string& where) {
    if (!t.is_object() || t.size() != 1)
        throw SpecError(where +
                        ": transform must have exactly one of poles, "
                        "cot_truncation, compose");
    if (t.contains("poles")) {
        std::vector<PoleTerm<double>> terms;
        for (const auto& item : t.at("poles"))
            terms.push_back(
                {scalar_from_json(item.at("a"), where + ".poles.a"),
                 scalar_from_json(item.at("b"), where + ".poles.b")});
        try {
            return MeroTransform<double>(PoleSet<double>(std::move(terms)));
        } catch (const std::invalid_argument& e) {
            throw SpecError(where + ": " + e.what());
        }
    }
    if (t.contains("cot_truncation")) {
        int n = t.at("cot_truncation").get<int>();
        if (n < 0) throw SpecError(where + ": cot_truncation must be >= 0");
        return cot_truncation(n);
    }
    if (t.contains("compose")) {
        const auto& arr = t.at("compose");
        if (!arr.is_array() || arr.size() != 2)
            throw SpecError(where + ": compose expects [outer, inner]");
        return compose(float_transform_from_json(arr[0], where + ".compose[0]"),
                       float_transform_from_json(arr[1], where + ".compose[1]"));
    }
    throw SpecError(where + ": unknown transform form");
}

inline json normalize_transform(const json& t, bool exact) {
    json out;
    if (t.contains("poles")) {
        json arr = json::array();
        for (const auto& item : t.at("poles")) {
            json term;
            if (exact) {
                term["a"] = rat_from_json(item.at("a"), "transform").str();
                term["b"] = rat_from_json(item.at("b"), "transform").str();
            } else {
                term["a"] = scalar_from_json(item.at("a"), "transform");
                term["b"] = scalar_from_json(item.at("b"), "transform");
            }
            arr.push_back(term);
        }
        out["poles"] = arr;
    } else if (t.contains("cot_truncation")) {
        out["cot_truncation"] = t.at("cot_truncation").get<int>();
    } else if (t.contains("compose")) {
        out["compose"] = json::array({
            normalize_transform(t.at("compose")[0], exact),
            normalize_transform(t.at("compose")[1], exact),
        });
    }
    return out;
}

}  // namespace detail

inline ProblemSpec parse_problem(const json& doc) {
    if (!doc.is_object()) throw SpecError("problem document must be an object");
    ProblemSpec spec;
    spec.exact = doc.value("mode", "float") == std::string("exact");
    if (!doc.contains("transform")) throw SpecError("missing field: transform");

    spec.transform =
        detail::float_transform_from_json(doc.at("transform"), "transform");
    if (spec.exact) {
        MeroTransform<Rat> et =
            detail::exact_transform_from_json(doc.at("transform"), "transform");
        spec.exact_poles = et.poles;
        spec.transform = MeroTransform<double>(to_float_poles(et.poles));
    }

    if (!doc.contains("p")) throw SpecError("missing field: p");
    const json& pj = doc.at("p");
    if (pj.contains("coeffs")) {
        std::vector<double> cs;
        for (const auto& c : pj.at("coeffs"))
            cs.push_back(detail::scalar_from_json(c, "p.coeffs"));
        spec.p = Poly<double>(std::move(cs));
        if (spec.exact) {
            std::vector<Rat> rs;
            for (const auto& c : pj.at("coeffs"))
                rs.push_back(detail::rat_from_json(c, "p.coeffs"));
            spec.exact_p = Poly<Rat>(std::move(rs));
        }
    } else if (pj.contains("expr")) {
        if (spec.exact)
            throw SpecError("p.expr is float-only; exact mode needs p.coeffs");
        try {
            spec.p = expr_to_poly(parse_expression(pj.at("expr").get<std::string>()));
        } catch (const ParseError& e) {
            throw SpecError(std::string("p.expr: ") + e.what());
        } catch (const EvalError& e) {
            throw SpecError(std::string("p.expr: ") + e.what());
        }
    } else {
        throw SpecError("p must supply coeffs or expr");
    }
    if (spec.p.is_zero()) throw SpecError("p must be a nonzero polynomial");

    if (doc.contains("F")) {
        const json& fj = doc.at("F");
        std::string kind = fj.value("kind", fj.contains("expr")
                                                ? std::string("expr")
                                                : std::string(""));
        if (kind == "gaussian") {
            double alpha =
                fj.contains("alpha")
                    ? detail::scalar_from_json(fj.at("alpha"), "F.alpha")
                    : 1.0;
            if (!(alpha > 0)) throw SpecError("F.alpha must be > 0");
            spec.integrand = IntegrandSpec::gaussian(alpha);
        } else if (kind == "csch") {
            spec.integrand = IntegrandSpec::csch();
        } else if (kind == "sech") {
            spec.integrand = IntegrandSpec::sech();
        } else if (kind == "expr") {
            if (!fj.contains("expr"))
                throw SpecError("F.kind = expr needs an expr field");
            std::string src = fj.at("expr").get<std::string>();
            Expr e = [&] {
                try {
                    return parse_expression(src);
                } catch (const ParseError& pe) {
                    throw SpecError(std::string("F.expr: ") + pe.what());
                }
            }();
            std::vector<double> poles;
            if (fj.contains("poles"))
                for (const auto& s : fj.at("poles"))
                    poles.push_back(detail::scalar_from_json(s, "F.poles"));
            spec.integrand = IntegrandSpec::expression(
                [e](double y) { return e.eval(y); }, std::move(poles), src);
        } else {
            throw SpecError("F.kind must be gaussian, csch, sech, or expr");
        }
    }

    if (doc.contains("quadrature")) {
        const json& qj = doc.at("quadrature");
        if (qj.contains("tol")) {
            spec.quad.tol = detail::scalar_from_json(qj.at("tol"), "quadrature.tol");
            if (!(spec.quad.tol > 0))
                throw SpecError("quadrature.tol must be > 0");
        }
        if (qj.contains("max_depth")) {
            spec.quad.max_depth = qj.at("max_depth").get<int>();
            if (spec.quad.max_depth < 0)
                throw SpecError("quadrature.max_depth must be >= 0");
        }
    }
    if (const char* env = std::getenv("MERO_MAX_DEPTH")) {
        try {
            spec.quad.max_depth = std::stoi(env);
        } catch (const std::exception&) {
            throw SpecError("MERO_MAX_DEPTH must be an integer");
        }
    }
    if (doc.contains("threshold")) {
        spec.threshold =
            detail::scalar_from_json(doc.at("threshold"), "threshold");
        if (!(spec.threshold > 0)) throw SpecError("threshold must be > 0");
    }

    // normalized echo: a fixed point of this parser
    spec.echo["mode"] = spec.exact ? "exact" : "float";
    spec.echo["transform"] =
        detail::normalize_transform(doc.at("transform"), spec.exact);
    if (spec.exact) {
        json cs = json::array();
        for (const auto& c : spec.exact_p->coeffs()) cs.push_back(c.str());
        spec.echo["p"]["coeffs"] = cs;
    } else {
        spec.echo["p"]["coeffs"] = spec.p.coeffs();
    }
    if (spec.integrand) {
        json fj;
        fj["kind"] = spec.integrand->kind();
        if (spec.integrand->kind() == "gaussian")
            fj["alpha"] = spec.integrand->alpha();
        if (spec.integrand->kind() == "expr") {
            fj["expr"] = spec.integrand->display();
            fj["poles"] = spec.integrand->singularities();
        }
        spec.echo["F"] = fj;
    }
    spec.echo["quadrature"]["tol"] = spec.quad.tol;
    spec.echo["quadrature"]["max_depth"] = spec.quad.max_depth;
    spec.echo["threshold"] = spec.threshold;
    return spec;
}

inline ProblemSpec load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open problem file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SpecError("problem file " + path + ": " + e.what());
    }
    return parse_problem(doc);
}

inline json quad_result_to_json(const QuadResult& r) {
    return json{{"value", r.value},
                {"abs_error_estimate", r.abs_error_estimate},
                {"segments_used", r.segments_used},
                {"pv_points", r.pv_points}};
}

inline json report_to_json(const VerificationReport& rep) {
    json out;
    out["problem"] = rep.problem;
    out["lhs"] = quad_result_to_json(rep.lhs);
    out["rhs"] = quad_result_to_json(rep.rhs);
    out["q"] = {{"coeffs", rep.q.coeffs()},
                {"pretty", poly_to_string(rep.q)}};
    if (rep.closed_form) {
        out["closed_form"] = {{"value", *rep.closed_form},
                              {"note", rep.closed_form_note}};
    }
    if (rep.reference_value) {
        out["reference"] = {{"value", *rep.reference_value},
                            {"note", rep.reference_note}};
    }
    out["abs_diff"] = rep.abs_diff;
    out["rel_diff"] = rep.rel_diff;
    out["threshold"] = rep.threshold;
    out["pass"] = rep.pass;
    if (rep.errored) out["error"] = rep.error;
    out["elapsed_ms"] = rep.elapsed_ms;
    return out;
}

}  // namespace mero
