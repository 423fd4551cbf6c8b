#include "fiscids/system.hpp"

#include <fstream>
#include <sstream>

namespace fiscids {

const char* class_name(SystemClass c) {
    switch (c) {
        case SystemClass::General: return "general";
        case SystemClass::Rational: return "rational";
        case SystemClass::Polynomial: return "polynomial";
        case SystemClass::Quadratic: return "quadratic";
    }
    return "?";
}

SystemClass class_from_name(const std::string& name) {
    if (name == "general") return SystemClass::General;
    if (name == "rational") return SystemClass::Rational;
    if (name == "polynomial") return SystemClass::Polynomial;
    if (name == "quadratic") return SystemClass::Quadratic;
    throw Error("unknown system class '" + name + "'");
}

std::vector<VarId> FiscidsSystem::state_vars() const {
    std::vector<VarId> out;
    out.reserve(N);
    for (std::size_t i = 0; i < N; ++i)
        out.push_back({state_names[i], static_cast<int>(i)});
    return out;
}

std::vector<VarId> FiscidsSystem::input_vars() const {
    std::vector<VarId> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back({input_names[i], static_cast<int>(i)});
    return out;
}

std::vector<double> FiscidsSystem::z0_values() const {
    std::vector<double> out;
    out.reserve(z0.size());
    for (const Expr& e : z0) out.push_back(eval_constant(e));
    return out;
}

std::vector<double> FiscidsSystem::output_values(const std::vector<double>& state) const {
    if (has_opaque_output()) return opaque_output(state);
    std::vector<double> out;
    out.reserve(h.size());
    for (const RationalFn& entry : h) out.push_back(entry.eval(state));
    return out;
}

void check_system(const FiscidsSystem& sys) {
    if (sys.F.size() != sys.N) throw Error("F row count != N");
    for (const auto& row : sys.F) {
        if (row.size() != sys.n) throw Error("F column count != n");
        for (const auto& entry : row)
            if (entry.nvars() != sys.N) throw Error("F entry ambient != N");
    }
    if (!sys.has_opaque_output()) {
        if (sys.h.size() != sys.m) throw Error("h entry count != m");
        for (const auto& entry : sys.h)
            if (entry.nvars() != sys.N) throw Error("h entry ambient != N");
    }
    if (sys.z0.size() != sys.N) throw Error("z0 entry count != N");
    for (const Expr& e : sys.z0)
        if (!is_constant_expression(e)) throw Error("z0 entry has free variables");
    if (sys.state_names.size() != sys.N) throw Error("state name count != N");
    if (sys.input_names.size() != sys.n) throw Error("input name count != n");
    if (sys.base_point && sys.base_point->size() != sys.n)
        throw Error("base point length != n");
}

namespace {

void check_entry(const RationalFn& entry, const std::string& where, SystemClass target,
                 unsigned max_degree, ClassReport& report) {
    if (target == SystemClass::Rational) return;  // canonical entries are rational
    if (!entry.is_polynomial()) {
        report.diagnostics.push_back(
            {where, "nonpolynomial entry (denominator degree " +
                        std::to_string(entry.den.total_degree()) + ")"});
        return;
    }
    if (target == SystemClass::Quadratic && entry.num.total_degree() > max_degree)
        report.diagnostics.push_back(
            {where, "total degree " + std::to_string(entry.num.total_degree()) +
                        " exceeds " + std::to_string(max_degree)});
}

}  // namespace

ClassReport validate_class(const FiscidsSystem& sys, SystemClass target) {
    ClassReport report;
    if (target == SystemClass::General) {
        report.pass = true;
        return report;
    }
    if (sys.has_opaque_output()) {
        report.diagnostics.push_back({"h", "output map is opaque"});
        report.pass = false;
        return report;
    }
    for (std::size_t i = 0; i < sys.F.size(); ++i)
        for (std::size_t j = 0; j < sys.F[i].size(); ++j)
            check_entry(sys.F[i][j],
                        "F[" + std::to_string(i) + "][" + std::to_string(j) + "]", target, 2,
                        report);
    for (std::size_t i = 0; i < sys.h.size(); ++i)
        check_entry(sys.h[i], "h[" + std::to_string(i) + "]", target, 1, report);
    report.pass = report.diagnostics.empty();
    return report;
}

SystemClass strongest_class(const FiscidsSystem& sys) {
    for (SystemClass c :
         {SystemClass::Quadratic, SystemClass::Polynomial, SystemClass::Rational})
        if (validate_class(sys, c).pass) return c;
    return SystemClass::General;
}

FiscidsSystem with_class(FiscidsSystem sys, SystemClass cls) {
    if (!validate_class(sys, cls).pass)
        throw ClassError("system does not validate as " + std::string(class_name(cls)));
    sys.cls = cls;
    return sys;
}

FiscidsSystem TrivialRepresentation::to_system() const {
    FiscidsSystem sys;
    sys.n = n;
    sys.m = m;
    sys.N = n;
    sys.F.assign(n, std::vector<RationalFn>());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            sys.F[i].push_back(rat_constant(n, Rational(i == j ? 1 : 0)));
    sys.opaque_output = phi;
    sys.z0.assign(n, Expr::constant(0));
    sys.cls = SystemClass::General;
    for (std::size_t i = 0; i < n; ++i) {
        sys.input_names.push_back("xi" + std::to_string(i + 1));
        sys.state_names.push_back("z" + std::to_string(i + 1));
    }
    return sys;
}

TrivialRepresentation trivial_representation(OpaqueMap phi, std::size_t n) {
    TrivialRepresentation rep;
    rep.n = n;
    rep.phi = std::move(phi);
    rep.m = rep.phi(std::vector<double>(n, 0.0)).size();
    return rep;
}

namespace {

nlohmann::json poly_to_json(const Poly& p) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [mono, coeff] : p.terms()) {
        nlohmann::json term;
        term["coeff"] = rational_to_string(coeff);
        term["exponents"] = mono.exponents;
        terms.push_back(std::move(term));
    }
    return terms;
}

Poly poly_from_json(const nlohmann::json& j, std::size_t nvars, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path, "expected an array of terms");
    Poly p(nvars);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& term = j[i];
        std::string at = path + "/" + std::to_string(i);
        if (!term.is_object() || !term.contains("coeff") || !term.contains("exponents"))
            throw SchemaError(at, "term must have coeff and exponents");
        if (!term["coeff"].is_string()) throw SchemaError(at + "/coeff", "expected a string");
        if (!term["exponents"].is_array() || term["exponents"].size() != nvars)
            throw SchemaError(at + "/exponents", "expected " + std::to_string(nvars) +
                                                     " exponents");
        Monomial mono = Monomial::unit(nvars);
        for (std::size_t k = 0; k < nvars; ++k) {
            const auto& e = term["exponents"][k];
            if (!e.is_number_unsigned())
                throw SchemaError(at + "/exponents", "exponents must be nonnegative integers");
            mono.exponents[k] = e.get<unsigned>();
        }
        Rational c;
        try {
            c = rational_from_string(term["coeff"].get<std::string>());
        } catch (const Error& err) {
            throw SchemaError(at + "/coeff", err.what());
        }
        p.add_term(mono, c);
    }
    return p;
}

nlohmann::json entry_to_json(const RationalFn& entry, SystemClass cls) {
    if (cls == SystemClass::Rational) {
        nlohmann::json j;
        j["num"] = poly_to_json(entry.num);
        j["den"] = poly_to_json(entry.den);
        return j;
    }
    return poly_to_json(entry.to_polynomial());
}

RationalFn entry_from_json(const nlohmann::json& j, std::size_t nvars, SystemClass cls,
                           const std::string& path) {
    if (cls == SystemClass::Rational) {
        if (!j.is_object() || !j.contains("num") || !j.contains("den"))
            throw SchemaError(path, "rational entry must have num and den");
        Poly num = poly_from_json(j["num"], nvars, path + "/num");
        Poly den = poly_from_json(j["den"], nvars, path + "/den");
        if (den.is_zero()) throw SchemaError(path + "/den", "zero denominator");
        return normalize_rational(num, den);
    }
    return rat_from_poly(poly_from_json(j, nvars, path));
}

}  // namespace

nlohmann::json serialize(const FiscidsSystem& sys) {
    if (sys.has_opaque_output() || sys.cls == SystemClass::General)
        throw ClassError("general systems with opaque output maps are not serializable");
    check_system(sys);
    nlohmann::json doc;
    doc["version"] = 1;
    doc["class"] = class_name(sys.cls);
    doc["n"] = sys.n;
    doc["m"] = sys.m;
    doc["N"] = sys.N;
    doc["input_names"] = sys.input_names;
    doc["state_names"] = sys.state_names;
    nlohmann::json F = nlohmann::json::array();
    for (const auto& row : sys.F) {
        nlohmann::json jr = nlohmann::json::array();
        for (const auto& entry : row) jr.push_back(entry_to_json(entry, sys.cls));
        F.push_back(std::move(jr));
    }
    doc["F"] = std::move(F);
    nlohmann::json h = nlohmann::json::array();
    for (const auto& entry : sys.h) h.push_back(entry_to_json(entry, sys.cls));
    doc["h"] = std::move(h);
    nlohmann::json z0 = nlohmann::json::array();
    for (const Expr& e : sys.z0) z0.push_back(to_string(e));
    doc["z0"] = std::move(z0);
    if (sys.base_point) {
        nlohmann::json bp = nlohmann::json::array();
        for (const Rational& r : *sys.base_point) bp.push_back(rational_to_string(r));
        doc["base_point"] = std::move(bp);
    }
    return doc;
}

FiscidsSystem deserialize(const nlohmann::json& doc) {
    if (!doc.is_object()) throw SchemaError("/", "expected an object");
    auto require = [&](const char* key) -> const nlohmann::json& {
        if (!doc.contains(key)) throw SchemaError(std::string("/") + key, "missing field");
        return doc[key];
    };
    const auto& version = require("version");
    if (!version.is_number_integer() || version.get<int>() != 1)
        throw SchemaError("/version", "unsupported document version");

    FiscidsSystem sys;
    const auto& cls = require("class");
    if (!cls.is_string()) throw SchemaError("/class", "expected a string");
    try {
        sys.cls = class_from_name(cls.get<std::string>());
    } catch (const Error& e) {
        throw SchemaError("/class", e.what());
    }
    if (sys.cls == SystemClass::General)
        throw SchemaError("/class", "general systems are not serializable");

    auto get_size = [&](const char* key) -> std::size_t {
        const auto& v = require(key);
        if (!v.is_number_unsigned()) throw SchemaError(std::string("/") + key,
                                                       "expected a nonnegative integer");
        return v.get<std::size_t>();
    };
    sys.n = get_size("n");
    sys.m = get_size("m");
    sys.N = get_size("N");

    auto get_names = [&](const char* key, std::size_t count) {
        const auto& v = require(key);
        if (!v.is_array() || v.size() != count)
            throw SchemaError(std::string("/") + key,
                              "expected " + std::to_string(count) + " names");
        std::vector<std::string> out;
        for (const auto& s : v) {
            if (!s.is_string()) throw SchemaError(std::string("/") + key, "expected strings");
            out.push_back(s.get<std::string>());
        }
        return out;
    };
    sys.input_names = get_names("input_names", sys.n);
    sys.state_names = get_names("state_names", sys.N);

    const auto& F = require("F");
    if (!F.is_array() || F.size() != sys.N) throw SchemaError("/F", "expected N rows");
    for (std::size_t i = 0; i < sys.N; ++i) {
        if (!F[i].is_array() || F[i].size() != sys.n)
            throw SchemaError("/F/" + std::to_string(i), "expected n entries");
        std::vector<RationalFn> row;
        for (std::size_t j = 0; j < sys.n; ++j)
            row.push_back(entry_from_json(
                F[i][j], sys.N, sys.cls, "/F/" + std::to_string(i) + "/" + std::to_string(j)));
        sys.F.push_back(std::move(row));
    }

    const auto& h = require("h");
    if (!h.is_array() || h.size() != sys.m) throw SchemaError("/h", "expected m entries");
    for (std::size_t i = 0; i < sys.m; ++i)
        sys.h.push_back(entry_from_json(h[i], sys.N, sys.cls, "/h/" + std::to_string(i)));

    const auto& z0 = require("z0");
    if (!z0.is_array() || z0.size() != sys.N) throw SchemaError("/z0", "expected N entries");
    for (std::size_t i = 0; i < sys.N; ++i) {
        if (!z0[i].is_string()) throw SchemaError("/z0/" + std::to_string(i),
                                                  "expected an expression string");
        try {
            sys.z0.push_back(parse_expression(z0[i].get<std::string>(), {}));
        } catch (const Error& e) {
            throw SchemaError("/z0/" + std::to_string(i), e.what());
        }
    }

    if (doc.contains("base_point")) {
        const auto& bp = doc["base_point"];
        if (!bp.is_array() || bp.size() != sys.n)
            throw SchemaError("/base_point", "expected n entries");
        std::vector<Rational> base;
        for (std::size_t i = 0; i < sys.n; ++i) {
            if (!bp[i].is_string())
                throw SchemaError("/base_point/" + std::to_string(i), "expected a string");
            try {
                base.push_back(rational_from_string(bp[i].get<std::string>()));
            } catch (const Error& e) {
                throw SchemaError("/base_point/" + std::to_string(i), e.what());
            }
        }
        sys.base_point = std::move(base);
    }

    try {
        check_system(sys);
    } catch (const Error& e) {
        throw SchemaError("/", e.what());
    }
    if (!validate_class(sys, sys.cls).pass)
        throw SchemaError("/class", std::string("system does not validate as ") +
                                        class_name(sys.cls));
    return sys;
}

void save_system(const FiscidsSystem& sys, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << serialize(sys).dump(2) << "\n";
}

FiscidsSystem load_system(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("/", std::string("invalid JSON: ") + e.what());
    }
    return deserialize(doc);
}

}  // namespace fiscids
