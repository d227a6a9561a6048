#include "safeprob/report.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <iomanip>
#include <sstream>

namespace safeprob::cli {

Json number_json(const Number& x) {
    if (const auto* r = std::get_if<Rational>(&x)) {
        return r->to_string();
    }
    const double d = std::get<double>(x);
    if (std::isinf(d)) {
        return d > 0 ? "inf" : "-inf";
    }
    return d;
}

Json pmf_json(const Pmf& p, const OutcomeSpace* space) {
    Json out = Json::object();
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!p[i].is_zero()) {
            out[space != nullptr ? space->atom(i) : std::to_string(i)] = p[i].to_string();
        }
    }
    return out;
}

Json distribution_json(const Distribution& d) {
    Json out = Json::object();
    for (const auto& [x, q] : d) {
        out[x.to_string()] = q.to_string();
    }
    return out;
}

Json verdict_json(const Verdict& v, const OutcomeSpace* space) {
    Json out;
    out["holds"] = v.holds;
    if (v.counterexample) {
        const auto& c = *v.counterexample;
        Json cj;
        cj["vertex_index"] = c.vertex_index;
        cj["vertex"] = pmf_json(c.vertex, space);
        if (c.v) {
            cj["v"] = c.v->to_string();
        }
        if (c.w) {
            cj["w"] = c.w->to_string();
        }
        if (c.u) {
            cj["u"] = c.u->to_string();
        }
        if (c.component) {
            cj["component"] = *c.component;
        }
        cj["lhs"] = number_json(c.lhs);
        cj["rhs"] = number_json(c.rhs);
        out["counterexample"] = std::move(cj);
    }
    out["notes"] = v.notes;
    return out;
}

Json hierarchy_json(const safety::HierarchyReport& r, const OutcomeSpace* space) {
    Json notions = Json::object();
    for (const auto& n : r.notions) {
        notions[n.notion] = verdict_json(n.verdict, space);
    }
    Json out;
    out["verdicts"] = std::move(notions);
    out["diagnostics"] = r.diagnostics;
    return out;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::InvalidArgument, "SHA-256 computation failed");
    }
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) {
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return os.str();
}

namespace {

std::string scalar_text(const Json& j) {
    if (j.is_string()) {
        return j.get<std::string>();
    }
    if (j.is_number_float()) {
        std::ostringstream os;
        os << std::setprecision(10) << j.get<double>();
        return os.str();
    }
    return j.dump();
}

bool is_scalar(const Json& j) { return !j.is_object() && !j.is_array(); }

bool is_flat(const Json& j) {
    if (!j.is_array() && !j.is_object()) {
        return true;
    }
    for (const auto& x : j) {
        if (!is_scalar(x)) {
            return false;
        }
    }
    return true;
}

void render(const Json& j, int depth, std::ostringstream& os) {
    const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    if (j.is_object()) {
        for (const auto& [key, val] : j.items()) {
            if (is_scalar(val)) {
                os << pad << key << ": " << scalar_text(val) << "\n";
            } else if (val.empty()) {
                os << pad << key << ": " << (val.is_array() ? "[]" : "{}") << "\n";
            } else if (val.is_object() && is_flat(val) && val.size() <= 8) {
                os << pad << key << ": {";
                bool first = true;
                for (const auto& [k, x] : val.items()) {
                    os << (first ? "" : ", ") << k << ": " << scalar_text(x);
                    first = false;
                }
                os << "}\n";
            } else if (val.is_array() && is_flat(val)) {
                os << pad << key << ":\n";
                for (const auto& x : val) {
                    os << pad << "  - " << scalar_text(x) << "\n";
                }
            } else {
                os << pad << key << ":\n";
                render(val, depth + 1, os);
            }
        }
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (is_scalar(j[i])) {
                os << pad << "- " << scalar_text(j[i]) << "\n";
            } else {
                os << pad << "- [" << i << "]\n";
                render(j[i], depth + 1, os);
            }
        }
    } else {
        os << pad << scalar_text(j) << "\n";
    }
}

}  // namespace

std::string render_text(const Json& doc) {
    std::ostringstream os;
    render(doc, 0, os);
    return os.str();
}

}  // namespace safeprob::cli
