#include "safeprob/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <ostream>

#include "CLI11.hpp"
#include "safeprob/calibration.hpp"
#include "safeprob/confidence.hpp"
#include "safeprob/demos.hpp"
#include "safeprob/pivots.hpp"
#include "safeprob/report.hpp"
#include "safeprob/safety.hpp"
#include "safeprob/scenario.hpp"

namespace safeprob::cli {

namespace {

struct NotionSpec {
    const char* flag;
    safety::LeftMode left;
    safety::RightMode right;
};

// Safety notions addressable with --notion; calibrated and pivotal are handled separately.
constexpr NotionSpec kNotions[] = {
    {"valid", safety::LeftMode::Full, safety::RightMode::Plain},
    {"sqerr", safety::LeftMode::Average, safety::RightMode::Plain},
    {"unbiased", safety::LeftMode::Average, safety::RightMode::Angle},
    {"dist-unbiased", safety::LeftMode::Full, safety::RightMode::Angle},
    {"marginal", safety::LeftMode::Full, safety::RightMode::Square},
    {"marginal-mean", safety::LeftMode::Average, safety::RightMode::Square},
    {"range", safety::LeftMode::Average, safety::RightMode::DoubleSquare},
    {"hull", safety::LeftMode::Full, safety::RightMode::DoubleSquare},
};

std::size_t atom_cap_from_env() {
    const char* raw = std::getenv("SAFEPROB_SIZE_LIMIT");
    if (raw == nullptr || *raw == '\0') {
        return kDefaultAtomCap;
    }
    const std::string s(raw);
    if (!std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }) || s.size() > 6 ||
        std::stoul(s) == 0) {
        throw Error(ErrorCode::ValidationError, "SAFEPROB_SIZE_LIMIT must be a positive integer");
    }
    return std::stoul(s);
}

Json header(const std::string& command) {
    Json j;
    j["tool"] = kToolVersion;
    j["command"] = command;
    return j;
}

Json input_json(const std::string& path, const std::string& bytes) {
    return {{"path", path}, {"sha256", sha256_hex(bytes)}};
}

void collect_warnings(const Verdict& v, Json& warnings) {
    for (const auto& n : v.notes) {
        if (n.find("filled uniformly") != std::string::npos || n.find("tied") != std::string::npos) {
            if (std::find(warnings.begin(), warnings.end(), Json(n)) == warnings.end()) {
                warnings.push_back(n);
            }
        }
    }
}

void emit(const Json& doc, bool as_json, std::ostream& out) {
    if (as_json) {
        out << doc.dump(2) << "\n";
    } else {
        out << render_text(doc);
    }
}

struct Options {
    std::string file;
    std::string u;
    std::string v;
    std::string notion;
    std::string w;
    std::string pivot;
    bool json = false;

    std::string family;
    int n = 10;
    double theta0 = 0;
    double a = 0.025;
    double b = 0.975;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 1;

    std::string demo;
    std::string p = "9/10";
    std::string coin = "1/2";
    double theta_bar = -0.2;
    int gamble_n = 10;
    std::uint64_t gamble_samples = 1000000;
};

int cmd_check(const Options& o, std::ostream& out) {
    const std::string bytes = read_file(o.file);
    const Scenario s = parse_scenario(bytes, {atom_cap_from_env()});
    const Rv& u = s.rv(o.u);
    const Rv& v = s.rv(o.v);

    Json doc = header("check");
    doc["input"] = input_json(o.file, bytes);
    doc["query"] = nullptr;  // reserves the key position
    Json query{{"u", o.u}, {"v", o.v}, {"notion", o.notion}};
    if (!o.w.empty()) {
        query["w"] = o.w;
    }
    if (!o.pivot.empty()) {
        query["pivot"] = o.pivot;
    }

    Verdict verdict;
    if (o.notion == "calibrated") {
        if (!o.w.empty() || !o.pivot.empty()) {
            throw Error(ErrorCode::ValidationError, "--w and --pivot do not apply to calibrated");
        }
        verdict = calibration::check_calibrated_full(u, v, s.pragmatic, s.credal);
        query["notation"] = "calibrated " + o.u + "|" + o.v;
    } else if (o.notion == "pivotal") {
        const auto spec = o.pivot.empty() ? pivots::canonical_pivot(s.pragmatic, u, v)
                                          : pivots::PivotSpec::from_rv(u, v, s.rv(o.pivot));
        std::optional<Rv> w;
        if (!o.w.empty()) {
            w = s.rv(o.w);
        }
        const auto pv = pivots::check_pivot(spec, u, v, s.credal);
        doc["pivot"] = {{"name", spec.name()}, {"is_pivot", pv.is_pivot}, {"is_simple", pv.is_simple},
                        {"failure", pv.failure ? Json(*pv.failure) : Json(nullptr)}};
        verdict = pivots::check_pivotal_safety(s.pragmatic, u, v, spec, s.credal, w);
        query["notation"] = "pivotal " + o.u + "|" + o.v;
    } else {
        const auto it = std::find_if(std::begin(kNotions), std::end(kNotions),
                                     [&](const NotionSpec& n) { return o.notion == n.flag; });
        if (it == std::end(kNotions)) {
            throw Error(ErrorCode::ValidationError, "unknown notion \"" + o.notion + "\"");
        }
        if (!o.pivot.empty()) {
            throw Error(ErrorCode::ValidationError, "--pivot applies to the pivotal notion only");
        }
        safety::SafetyQuery q{u, it->left, v, it->right, std::nullopt};
        if (!o.w.empty()) {
            q.stratifier = s.rv(o.w);
        }
        query["notation"] = safety::notation(q);
        verdict = safety::check_safety(q, s.pragmatic, s.credal);
    }
    doc["query"] = std::move(query);
    doc["verdict"] = verdict_json(verdict, &s.space);
    Json warnings = Json::array();
    if (s.conditional) {
        warnings.push_back("pragmatic distribution given as P~(" + s.conditional->u + "|" + s.conditional->v +
                           "); completed with a uniform marginal over " + s.conditional->v);
    }
    collect_warnings(verdict, warnings);
    doc["warnings"] = std::move(warnings);
    emit(doc, o.json, out);
    return verdict.holds ? kExitHolds : kExitFails;
}

int cmd_report(const Options& o, std::ostream& out) {
    const std::string bytes = read_file(o.file);
    const Scenario s = parse_scenario(bytes, {atom_cap_from_env()});
    const Rv& u = s.rv(o.u);
    const Rv& v = s.rv(o.v);
    const auto r = safety::hierarchy_report(u, v, s.pragmatic, s.credal);

    Json doc = header("report");
    doc["input"] = input_json(o.file, bytes);
    doc["query"] = {{"u", o.u}, {"v", o.v}};
    const Json h = hierarchy_json(r, &s.space);
    doc["verdicts"] = h["verdicts"];
    doc["diagnostics"] = h["diagnostics"];
    Json warnings = Json::array();
    if (s.conditional) {
        warnings.push_back("pragmatic distribution given as P~(" + s.conditional->u + "|" + s.conditional->v +
                           "); completed with a uniform marginal over " + s.conditional->v);
    }
    for (const auto& n : r.notions) {
        collect_warnings(n.verdict, warnings);
    }
    doc["warnings"] = std::move(warnings);
    emit(doc, o.json, out);
    return r.diagnostics.empty() ? kExitHolds : kExitFails;
}

int cmd_events(const Options& o, std::ostream& out) {
    const std::string bytes = read_file(o.file);
    const auto ev = parse_events(bytes);
    const std::size_t cap = atom_cap_from_env();
    const auto built = updates::build_event_scenario(ev, cap);
    const auto check = updates::partition_check(ev, cap);

    Json doc = header("events");
    doc["input"] = input_json(o.file, bytes);
    doc["atoms"] = built.space.atoms();
    Json rows = Json::object();
    for (const auto& [vv, row] : built.naive.rows) {
        rows[vv.to_string()] = distribution_json(row);
    }
    doc["naive_rows"] = std::move(rows);
    Json vs = Json::array();
    for (const auto& p : built.credal.vertices()) {
        vs.push_back(pmf_json(p, &built.space));
    }
    doc["credal_vertices"] = std::move(vs);
    doc["is_partition"] = check.is_partition;
    doc["naive_valid"] = verdict_json(check.prop4_verdict, &built.space);
    emit(doc, o.json, out);
    return check.prop4_verdict.holds ? kExitHolds : kExitFails;
}

int cmd_coverage(const Options& o, std::ostream& out) {
    const auto family = o.family == "normal"    ? confidence::ParametricFamily1D::normal_location(o.n)
                        : o.family == "expmean" ? confidence::ParametricFamily1D::exponential_mean(o.n)
                                                : throw Error(ErrorCode::ValidationError,
                                                              "unknown family \"" + o.family + "\"");
    const auto est = confidence::coverage_estimate(family, o.theta0, o.a, o.b, o.samples, o.seed);
    const double target = o.b - o.a;
    const bool ok = std::abs(est.coverage - target) <= 3 * est.standard_error ||
                    (est.standard_error == 0 && est.coverage == target);

    Json doc = header("coverage");
    doc["query"] = {{"family", o.family}, {"n", o.n},           {"theta0", o.theta0},
                    {"a", o.a},           {"b", o.b},           {"samples", o.samples},
                    {"seed", o.seed}};
    doc["coverage"] = est.coverage;
    doc["standard_error"] = est.standard_error;
    doc["target"] = target;
    doc["endpoint_checks"] = est.endpoint_checks;
    doc["endpoint_mismatches"] = est.endpoint_mismatches;
    doc["within_3_standard_errors"] = ok;
    emit(doc, o.json, out);
    return ok && est.endpoint_mismatches == 0 ? kExitHolds : kExitFails;
}

Rational rational_flag(const std::string& text, const char* flag) {
    auto r = Rational::parse(text);
    if (!r) {
        throw Error(ErrorCode::ValidationError, std::string(flag) + " must be an exact number such as 9/10");
    }
    return *r;
}

int cmd_demo(const Options& o, std::ostream& out) {
    demos::DemoResult r;
    if (o.demo == "dilation") {
        r = demos::dilation_demo(rational_flag(o.p, "--p"));
    } else if (o.demo == "monty-hall") {
        demos::MontyParams params;
        params.coin = rational_flag(o.coin, "--coin");
        r = demos::monty_demo(params);
    } else if (o.demo == "gamble") {
        r = demos::gamble_demo(o.theta_bar, o.gamble_n, o.gamble_samples, o.seed);
    } else {
        throw Error(ErrorCode::ValidationError, "unknown demo \"" + o.demo + "\"");
    }
    Json doc = header("demo");
    for (const auto& [k, val] : r.report.items()) {
        doc[k] = val;
    }
    emit(doc, o.json, out);
    return r.assertions_hold ? kExitHolds : kExitFails;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Decide whether a pragmatic distribution is safe relative to a credal set", "safeprob"};
    app.require_subcommand(1);
    Options o;

    auto* check = app.add_subcommand("check", "Decide one safety notion");
    check->add_option("file", o.file, "Scenario file")->required();
    check->add_option("--u", o.u, "Target variable")->required();
    check->add_option("--v", o.v, "Conditioning variable")->required();
    check->add_option("--notion", o.notion, "Notion to decide")
        ->required()
        ->check(CLI::IsMember({"valid", "sqerr", "unbiased", "dist-unbiased", "marginal", "range", "calibrated",
                               "pivotal", "marginal-mean", "hull"}));
    check->add_option("--w", o.w, "Stratifying variable");
    check->add_option("--pivot", o.pivot, "Variable to use as pivot (default: the canonical pivot)");
    check->add_flag("--json", o.json, "Emit JSON");

    auto* report = app.add_subcommand("report", "Decide every notion of the hierarchy");
    report->add_option("file", o.file, "Scenario file")->required();
    report->add_option("--u", o.u, "Target variable")->required();
    report->add_option("--v", o.v, "Conditioning variable")->required();
    report->add_flag("--json", o.json, "Emit JSON");

    auto* events = app.add_subcommand("events", "Check naive conditioning on observed events");
    events->add_option("file", o.file, "Event scenario file")->required();
    events->add_flag("--json", o.json, "Emit JSON");

    auto* coverage = app.add_subcommand("coverage", "Estimate the coverage of confidence intervals");
    coverage->add_option("--family", o.family, "Model family")->required()->check(CLI::IsMember({"normal", "expmean"}));
    coverage->add_option("--n", o.n, "Sample size")->check(CLI::PositiveNumber);
    coverage->add_option("--theta0", o.theta0, "True parameter")->required();
    coverage->add_option("--a", o.a, "Lower credible level");
    coverage->add_option("--b", o.b, "Upper credible level");
    coverage->add_option("--samples", o.samples, "Monte Carlo draws")->check(CLI::PositiveNumber);
    coverage->add_option("--seed", o.seed, "Random seed");
    coverage->add_flag("--json", o.json, "Emit JSON");

    auto* demo = app.add_subcommand("demo", "Run a worked scenario");
    demo->add_option("name", o.demo, "dilation, monty-hall or gamble")
        ->required()
        ->check(CLI::IsMember({"dilation", "monty-hall", "gamble"}));
    demo->add_option("--p", o.p, "dilation: P(U=1)");
    demo->add_option("--coin", o.coin, "monty-hall: P~(host opens door 3 | car behind door 1)");
    demo->add_option("--theta-bar", o.theta_bar, "gamble: true mean");
    demo->add_option("--n", o.gamble_n, "gamble: sample size")->check(CLI::PositiveNumber);
    demo->add_option("--samples", o.gamble_samples, "gamble: Monte Carlo draws")->check(CLI::PositiveNumber);
    demo->add_option("--seed", o.seed, "gamble: random seed");
    demo->add_flag("--json", o.json, "Emit JSON");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitError;
    }

    try {
        if (check->parsed()) {
            return cmd_check(o, out);
        }
        if (report->parsed()) {
            return cmd_report(o, out);
        }
        if (events->parsed()) {
            return cmd_events(o, out);
        }
        if (coverage->parsed()) {
            return cmd_coverage(o, out);
        }
        return cmd_demo(o, out);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
    }
    return kExitError;
}

}  // namespace safeprob::cli
