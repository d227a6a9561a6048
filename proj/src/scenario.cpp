#include "safeprob/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace safeprob::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ValidationError, what); }

ordered_json parse_json(std::string_view text) {
    try {
        return ordered_json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // byte is 1-based and points just past the offending character.
        const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        std::size_t line = 1;
        std::size_t column = 1;
        for (std::size_t i = 0; i < upto; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::string what = e.what();
        if (const auto pos = what.find("syntax error"); pos != std::string::npos) {
            what = what.substr(pos);
        }
        throw ParseError(what, line, column);
    }
}

const ordered_json& field(const ordered_json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) {
        invalid(where + " must be an object");
    }
    const auto it = obj.find(key);
    if (it == obj.end()) {
        invalid(where + " is missing \"" + key + "\"");
    }
    return *it;
}

void check_header(const ordered_json& doc) {
    if (!doc.is_object()) {
        invalid("document must be an object");
    }
    const auto& f = field(doc, "format", "document");
    if (!f.is_number_integer() || f.get<long>() != kFormatVersion) {
        invalid("unsupported format (expected \"format\": " + std::to_string(kFormatVersion) + ")");
    }
}

Rational rational_of(const ordered_json& j, const std::string& where) {
    if (j.is_number_integer()) {
        return Rational(j.get<long>());
    }
    if (j.is_string()) {
        if (auto r = Rational::parse(j.get<std::string>())) {
            return *r;
        }
        invalid(where + ": \"" + j.get<std::string>() + "\" is not an exact number (use \"p/q\" or a finite decimal)");
    }
    if (j.is_number_float()) {
        invalid(where + ": floating-point literals are not exact; write the number as a string such as \"9/10\"");
    }
    invalid(where + ": expected a number");
}

Value value_of(const ordered_json& j, const std::string& where) {
    if (j.is_array()) {
        if (j.empty()) {
            invalid(where + ": empty tuple");
        }
        std::vector<Rational> xs;
        for (const auto& c : j) {
            xs.push_back(rational_of(c, where));
        }
        return Value::numeric(std::move(xs));
    }
    if (j.is_string()) {
        return parse_literal(j.get<std::string>());
    }
    if (j.is_number_integer() || j.is_number_float()) {
        return Value::numeric(rational_of(j, where));
    }
    invalid(where + ": expected a value literal");
}

ordered_json emit_value(const Value& v) {
    if (!v.is_numeric()) {
        return v.symbol_name();
    }
    if (v.arity() == 1) {
        return v.scalar().to_string();
    }
    ordered_json arr = ordered_json::array();
    for (const auto& c : v.components()) {
        arr.push_back(c.to_string());
    }
    return arr;
}

std::vector<Rational> weights_of(const ordered_json& j, const OutcomeSpace& space, const std::string& where) {
    if (!j.is_object()) {
        invalid(where + " must map atoms to probabilities");
    }
    std::vector<Rational> w(space.size());
    for (const auto& [atom, q] : j.items()) {
        const auto idx = space.index_of(atom);
        if (!idx) {
            invalid(where + " mentions unknown atom \"" + atom + "\"");
        }
        w[*idx] = rational_of(q, where + "[" + atom + "]");
    }
    return w;
}

Pmf pmf_of(const ordered_json& j, const OutcomeSpace& space, const std::string& where) {
    auto w = weights_of(j, space, where);
    Rational total;
    for (const auto& q : w) {
        if (q.sign() < 0) {
            invalid(where + " has a negative probability");
        }
        total += q;
    }
    if (total != Rational(1)) {
        invalid(where + " sums to " + total.to_string() + ", not 1");
    }
    return Pmf(std::move(w));
}

ordered_json emit_pmf(const Pmf& p, const OutcomeSpace& space) {
    ordered_json out = ordered_json::object();
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (!p[i].is_zero()) {
            out[space.atom(i)] = p[i].to_string();
        }
    }
    return out;
}

Relation relation_of(const ordered_json& j, const std::string& where) {
    const std::string r = j.is_string() ? j.get<std::string>() : "";
    if (r == "=" || r == "==") {
        return Relation::Equal;
    }
    if (r == "<=") {
        return Relation::LessEqual;
    }
    if (r == ">=") {
        return Relation::GreaterEqual;
    }
    invalid(where + ": relation must be one of \"=\", \"<=\", \">=\"");
}

const char* relation_name(Relation r) {
    switch (r) {
        case Relation::Equal: return "=";
        case Relation::LessEqual: return "<=";
        case Relation::GreaterEqual: return ">=";
    }
    return "=";
}

Distribution row_of(const ordered_json& j, const Rv& u, const std::string& where) {
    if (!j.is_object()) {
        invalid(where + " must map values of " + u.name() + " to probabilities");
    }
    Distribution row;
    for (const auto& uu : u.range()) {
        row[uu] = Rational(0);
    }
    Rational total;
    for (const auto& [key, q] : j.items()) {
        const Value uu = parse_literal(key);
        const auto it = row.find(uu);
        if (it == row.end()) {
            invalid(where + ": \"" + key + "\" is not a value of " + u.name());
        }
        it->second = rational_of(q, where + "[" + key + "]");
        if (it->second.sign() < 0) {
            invalid(where + " has a negative probability");
        }
        total += it->second;
    }
    if (total != Rational(1)) {
        invalid(where + " sums to " + total.to_string() + ", not 1");
    }
    return row;
}

// Joint with P~(U|V) = rows and uniform marginal over range(V); within a
// (u, v) cell the mass is split uniformly over the atoms realizing it.
Pmf complete(const ConditionalPragmatic& c, const Rv& u, const Rv& v) {
    const auto v_range = v.range();
    std::vector<Rational> w(u.size());
    for (const auto& vv : v_range) {
        const auto it = c.rows.find(vv);
        if (it == c.rows.end()) {
            invalid("pragmatic.conditional has no row for " + v.name() + "=" + vv.to_string());
        }
        for (const auto& [uu, q] : it->second) {
            if (q.is_zero()) {
                continue;
            }
            std::vector<std::size_t> atoms;
            for (std::size_t i = 0; i < u.size(); ++i) {
                if (u(i) == uu && v(i) == vv) {
                    atoms.push_back(i);
                }
            }
            if (atoms.empty()) {
                invalid("pragmatic.conditional row " + vv.to_string() + " gives mass to " + uu.to_string() +
                        ", which never occurs together with it");
            }
            const Rational share = q / Rational(static_cast<long>(v_range.size() * atoms.size()));
            for (const auto i : atoms) {
                w[i] += share;
            }
        }
    }
    return Pmf(std::move(w));
}

}  // namespace

Value parse_literal(const std::string& text) {
    if (auto r = Rational::parse(text)) {
        return Value::numeric(*r);
    }
    if (text.size() >= 2 && text.front() == '(' && text.back() == ')') {
        std::vector<Rational> xs;
        std::stringstream ss(text.substr(1, text.size() - 2));
        std::string part;
        bool ok = true;
        while (std::getline(ss, part, ',')) {
            auto r = Rational::parse(part);
            if (!r) {
                ok = false;
                break;
            }
            xs.push_back(*r);
        }
        if (ok && !xs.empty()) {
            return Value::numeric(std::move(xs));
        }
    }
    return Value::symbol(text);
}

const Rv& Scenario::rv(const std::string& name) const {
    for (const auto& r : rvs) {
        if (r.name() == name) {
            return r;
        }
    }
    invalid("unknown random variable \"" + name + "\"");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        invalid("cannot read \"" + path + "\"");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Scenario parse_scenario(std::string_view text, const ParseOptions& options) {
    const auto doc = parse_json(text);
    check_header(doc);
    if (doc.contains("kind") && doc["kind"] != "scenario") {
        invalid("document kind is " + doc["kind"].dump() + ", expected a scenario");
    }

    const auto& atoms_j = field(doc, "atoms", "document");
    if (!atoms_j.is_array() || atoms_j.empty()) {
        invalid("\"atoms\" must be a non-empty list");
    }
    std::vector<std::string> atoms;
    for (const auto& a : atoms_j) {
        if (!a.is_string()) {
            invalid("atom identifiers must be strings");
        }
        atoms.push_back(a.get<std::string>());
    }
    if (atoms.size() > options.atom_cap) {
        throw Error(ErrorCode::SizeLimit, std::to_string(atoms.size()) + " atoms exceed the cap of " +
                                              std::to_string(options.atom_cap));
    }
    std::set<std::string> unique(atoms.begin(), atoms.end());
    if (unique.size() != atoms.size()) {
        invalid("duplicate atom identifier");
    }
    OutcomeSpace space(atoms);

    const auto& rvs_j = field(doc, "rvs", "document");
    if (!rvs_j.is_object() || rvs_j.empty()) {
        invalid("\"rvs\" must be a non-empty object");
    }
    std::vector<Rv> rvs;
    for (const auto& [name, table_j] : rvs_j.items()) {
        if (!table_j.is_object()) {
            invalid("rvs." + name + " must map atoms to values");
        }
        std::vector<std::optional<Value>> table(space.size());
        for (const auto& [atom, val] : table_j.items()) {
            const auto idx = space.index_of(atom);
            if (!idx) {
                invalid("rvs." + name + " mentions unknown atom \"" + atom + "\"");
            }
            table[*idx] = value_of(val, "rvs." + name + "." + atom);
        }
        std::vector<Value> full;
        for (std::size_t i = 0; i < table.size(); ++i) {
            if (!table[i]) {
                invalid("rvs." + name + " has no value at atom \"" + space.atom(i) + "\"");
            }
            full.push_back(*table[i]);
        }
        try {
            rvs.emplace_back(name, std::move(full));
        } catch (const Error& e) {
            invalid("rvs." + name + ": " + e.what());
        }
    }

    const auto& credal_j = field(doc, "credal", "document");
    std::optional<CredalSet> credal;
    if (credal_j.is_object() && credal_j.contains("vertices")) {
        const auto& vs = credal_j["vertices"];
        if (!vs.is_array() || vs.empty()) {
            invalid("credal.vertices must be a non-empty list");
        }
        std::vector<Pmf> vertices;
        for (std::size_t k = 0; k < vs.size(); ++k) {
            vertices.push_back(pmf_of(vs[k], space, "credal.vertices[" + std::to_string(k) + "]"));
        }
        try {
            credal = CredalSet::from_vertices(std::move(vertices));
        } catch (const Error& e) {
            invalid(std::string("credal.vertices: ") + e.what());
        }
    } else if (credal_j.is_object() && credal_j.contains("constraints")) {
        const auto& cs = credal_j["constraints"];
        if (!cs.is_array()) {
            invalid("credal.constraints must be a list");
        }
        std::vector<LinearConstraint> constraints;
        for (std::size_t k = 0; k < cs.size(); ++k) {
            const std::string where = "credal.constraints[" + std::to_string(k) + "]";
            LinearConstraint c;
            c.coeffs = weights_of(field(cs[k], "coeffs", where), space, where + ".coeffs");
            c.relation = relation_of(field(cs[k], "rel", where), where);
            c.rhs = rational_of(field(cs[k], "rhs", where), where + ".rhs");
            if (std::all_of(c.coeffs.begin(), c.coeffs.end(), [](const Rational& q) { return q.is_zero(); })) {
                invalid(where + " has no nonzero coefficient");
            }
            constraints.push_back(std::move(c));
        }
        credal = CredalSet::from_constraints(space, std::move(constraints), options.atom_cap);
    } else {
        invalid("credal must contain \"vertices\" or \"constraints\"");
    }

    const auto& prag_j = field(doc, "pragmatic", "document");
    std::optional<ConditionalPragmatic> conditional;
    std::optional<Pmf> pragmatic;
    if (prag_j.is_object() && prag_j.contains("conditional")) {
        const auto& c = prag_j["conditional"];
        ConditionalPragmatic cp;
        const auto& u_j = field(c, "u", "pragmatic.conditional");
        const auto& v_j = field(c, "v", "pragmatic.conditional");
        if (!u_j.is_string() || !v_j.is_string()) {
            invalid("pragmatic.conditional.u and .v must name random variables");
        }
        cp.u = u_j.get<std::string>();
        cp.v = v_j.get<std::string>();
        auto find = [&](const std::string& name) -> const Rv& {
            for (const auto& r : rvs) {
                if (r.name() == name) {
                    return r;
                }
            }
            invalid("pragmatic.conditional refers to unknown random variable \"" + name + "\"");
        };
        const Rv& u = find(cp.u);
        const Rv& v = find(cp.v);
        const auto& rows_j = field(c, "rows", "pragmatic.conditional");
        if (!rows_j.is_object()) {
            invalid("pragmatic.conditional.rows must map values of " + cp.v + " to rows");
        }
        const auto v_range = v.range();
        for (const auto& [key, row_j] : rows_j.items()) {
            const Value vv = parse_literal(key);
            if (!std::binary_search(v_range.begin(), v_range.end(), vv)) {
                invalid("pragmatic.conditional.rows: \"" + key + "\" is not a value of " + cp.v);
            }
            cp.rows[vv] = row_of(row_j, u, "pragmatic.conditional.rows[" + key + "]");
        }
        pragmatic = complete(cp, u, v);
        conditional = std::move(cp);
    } else {
        pragmatic = pmf_of(prag_j, space, "pragmatic");
    }

    return Scenario{std::move(space), std::move(rvs), std::move(*credal), std::move(*pragmatic), std::move(conditional)};
}

Scenario load_scenario(const std::string& path, const ParseOptions& options) {
    return parse_scenario(read_file(path), options);
}

std::string emit_scenario(const Scenario& s) {
    ordered_json doc;
    doc["format"] = kFormatVersion;
    doc["atoms"] = s.space.atoms();
    ordered_json rvs = ordered_json::object();
    for (const auto& r : s.rvs) {
        ordered_json t = ordered_json::object();
        for (std::size_t i = 0; i < s.space.size(); ++i) {
            t[s.space.atom(i)] = emit_value(r(i));
        }
        rvs[r.name()] = std::move(t);
    }
    doc["rvs"] = std::move(rvs);

    ordered_json credal = ordered_json::object();
    if (s.credal.is_polytope()) {
        ordered_json cs = ordered_json::array();
        for (const auto& c : *s.credal.constraints()) {
            ordered_json coeffs = ordered_json::object();
            for (std::size_t i = 0; i < s.space.size(); ++i) {
                if (!c.coeffs[i].is_zero()) {
                    coeffs[s.space.atom(i)] = c.coeffs[i].to_string();
                }
            }
            ordered_json cj;
            cj["coeffs"] = std::move(coeffs);
            cj["rel"] = relation_name(c.relation);
            cj["rhs"] = c.rhs.to_string();
            cs.push_back(std::move(cj));
        }
        credal["constraints"] = std::move(cs);
    } else {
        ordered_json vs = ordered_json::array();
        for (const auto& p : s.credal.vertices()) {
            vs.push_back(emit_pmf(p, s.space));
        }
        credal["vertices"] = std::move(vs);
    }
    doc["credal"] = std::move(credal);

    if (s.conditional) {
        ordered_json rows = ordered_json::object();
        for (const auto& [vv, row] : s.conditional->rows) {
            ordered_json r = ordered_json::object();
            for (const auto& [uu, q] : row) {
                if (!q.is_zero()) {
                    r[uu.to_string()] = q.to_string();
                }
            }
            rows[vv.to_string()] = std::move(r);
        }
        ordered_json c;
        c["u"] = s.conditional->u;
        c["v"] = s.conditional->v;
        c["rows"] = std::move(rows);
        doc["pragmatic"]["conditional"] = std::move(c);
    } else {
        doc["pragmatic"] = emit_pmf(s.pragmatic, s.space);
    }
    return doc.dump(2) + "\n";
}

updates::EventScenario parse_events(std::string_view text) {
    const auto doc = parse_json(text);
    check_header(doc);
    const auto& kind = field(doc, "kind", "document");
    if (kind != "events") {
        invalid("document kind must be \"events\"");
    }
    updates::EventScenario ev;
    const auto& outcomes = field(doc, "outcomes", "document");
    if (!outcomes.is_array() || outcomes.empty()) {
        invalid("\"outcomes\" must be a non-empty list");
    }
    for (const auto& o : outcomes) {
        ev.outcomes.push_back(value_of(o, "outcomes"));
    }
    const auto& prior = field(doc, "prior", "document");
    if (!prior.is_object()) {
        invalid("\"prior\" must map outcomes to probabilities");
    }
    ev.prior.assign(ev.outcomes.size(), Rational(0));
    for (const auto& [key, q] : prior.items()) {
        const Value x = parse_literal(key);
        const auto it = std::find(ev.outcomes.begin(), ev.outcomes.end(), x);
        if (it == ev.outcomes.end()) {
            invalid("prior mentions unknown outcome \"" + key + "\"");
        }
        ev.prior[static_cast<std::size_t>(it - ev.outcomes.begin())] = rational_of(q, "prior[" + key + "]");
    }
    const auto& obs = field(doc, "observables", "document");
    if (!obs.is_array()) {
        invalid("\"observables\" must be a list of lists");
    }
    for (const auto& s : obs) {
        if (!s.is_array()) {
            invalid("each observable must be a list of outcomes");
        }
        std::vector<Value> set;
        for (const auto& x : s) {
            set.push_back(value_of(x, "observables"));
        }
        ev.observables.push_back(std::move(set));
    }
    return ev;
}

std::string emit_events(const updates::EventScenario& ev) {
    ordered_json doc;
    doc["format"] = kFormatVersion;
    doc["kind"] = "events";
    ordered_json outcomes = ordered_json::array();
    ordered_json prior = ordered_json::object();
    for (std::size_t k = 0; k < ev.outcomes.size(); ++k) {
        outcomes.push_back(emit_value(ev.outcomes[k]));
        prior[ev.outcomes[k].to_string()] = ev.prior.at(k).to_string();
    }
    doc["outcomes"] = std::move(outcomes);
    doc["prior"] = std::move(prior);
    ordered_json obs = ordered_json::array();
    for (const auto& s : ev.observables) {
        ordered_json set = ordered_json::array();
        for (const auto& x : s) {
            set.push_back(emit_value(x));
        }
        obs.push_back(std::move(set));
    }
    doc["observables"] = std::move(obs);
    return doc.dump(2) + "\n";
}

}  // namespace safeprob::cli
