// Command-line front end. Exit codes: 0 affirmative result, 1 negative or
// violation result, 2 usage or input error.

#include "bellkit/bellkit.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

using namespace bellkit;

namespace {

enum Exit { affirmative = 0, negative = 1, input_error = 2 };

struct RunConfig {
    std::string format = "text";
    std::string out;
    std::size_t cap = default_vertex_cap;
};

std::string show(const Rational& r) { return to_decimal(r, 6) + " (" + r.get_str() + ")"; }

/// "catalog:NAME" selects a built-in inequality, anything else is a file path.
BellFunctional load_bell(const std::string& arg) {
    const std::string prefix = "catalog:";
    if (arg.rfind(prefix, 0) == 0) {
        try {
            return cg_to_functional(catalog_entry(arg.substr(prefix.size())));
        } catch (const StructuralError& e) {
            throw ParseError(e.what());
        }
    }
    return read_bell_file(arg);
}

class Output {
public:
    explicit Output(const RunConfig& cfg) : cfg_(cfg) {}

    bool json() const { return cfg_.format == "json"; }
    std::ostream& text() { return text_; }

    void emit(const Json& report) {
        const std::string body = json() ? report.dump(2) + "\n" : text_.str();
        if (cfg_.out.empty()) {
            std::cout << body;
        } else {
            std::ofstream f(cfg_.out);
            if (!f) throw std::runtime_error(cfg_.out + ": cannot write file");
            f << body;
        }
    }

private:
    const RunConfig& cfg_;
    std::ostringstream text_;
};

int cmd_validate(const RunConfig& cfg, const std::string& path) {
    const Behavior b = read_behavior_file(path);
    const Json report = validate_report(b);
    Output out(cfg);
    if (report.at("ok").get<bool>()) {
        out.text() << "ok: normalization, positivity and nonsignaling all hold (" << b.scenario().describe() << ")\n";
    } else {
        for (const auto& v : report.at("violations"))
            out.text() << v.at("kind").get<std::string>() << " violation: " << v.at("message").get<std::string>() << '\n';
        for (const auto& row : report.at("signaling_rows")) out.text() << "signaling: " << row.get<std::string>() << '\n';
    }
    out.emit(report);
    return report.at("ok").get<bool>() ? affirmative : negative;
}

int cmd_localpart(const RunConfig& cfg, const std::string& path) {
    const Behavior b = read_behavior_file(path);
    const LocalityReport r = local_part(b, cfg.cap);
    const VertexMatrix v(b.scenario(), cfg.cap);
    const Json report = locality_report(b, r, v);
    Output out(cfg);
    out.text() << "local weight: " << show(r.weight) << '\n' << (r.local() ? "local" : "nonlocal") << '\n';
    out.text() << "decomposition (" << r.decomposition.size() << " vertices):\n";
    for (const auto& d : report.at("decomposition"))
        out.text() << "  vertex " << d.at("vertex") << " strategies " << d.at("strategies").dump() << " weight "
                   << show(parse_rational(d.at("weight").get<std::string>())) << '\n';
    if (r.separating) {
        out.text() << "separating Bell functional: local bound " << show(r.separating->bound()) << ", value on behavior "
                   << show(evaluate_unchecked(*r.separating, b)) << '\n';
        out.text() << "  coefficients:";
        for (const auto& c : r.separating->coeffs()) out.text() << ' ' << c.get_str();
        out.text() << '\n';
    }
    out.emit(report);
    return r.local() ? affirmative : negative;
}

int cmd_belleval(const RunConfig& cfg, const std::string& bell, const std::string& path) {
    const BellFunctional f = load_bell(bell);
    const Behavior b = read_behavior_file(path);
    const Rational value = evaluate(f, b);
    Output out(cfg);
    out.text() << f.name() << " value: " << show(value) << ", bound " << show(f.bound())
               << (value > f.bound() ? " (violated)" : " (satisfied)") << '\n';
    out.emit(belleval_report(f, b, value));
    return value > f.bound() ? negative : affirmative;
}

int cmd_bellmax(const RunConfig& cfg, const std::string& bell, const std::string& set) {
    const BellFunctional f = load_bell(bell);
    Output out(cfg);
    if (set == "local") {
        const VertexMatrix v(f.scenario(), cfg.cap);
        const LocalOptimum opt = max_bell_local_vertex(f, cfg.cap);
        out.text() << f.name() << " local maximum: " << show(opt.value) << " at vertex " << opt.vertex << ", stated bound "
                   << show(f.bound()) << '\n';
        out.emit(bellmax_local_report(f, opt, v));
        return opt.value > f.bound() ? negative : affirmative;
    }
    const BellOptimum opt = max_bell_ns(f);
    out.text() << f.name() << " nonsignaling maximum: " << show(opt.value) << ", local bound " << show(f.bound()) << '\n';
    out.emit(bellmax_ns_report(f, opt));
    return opt.value > f.bound() ? negative : affirmative;
}

int cmd_monogamy(const RunConfig& cfg, const std::string& bell) {
    const BellFunctional f = load_bell(bell);
    const Scenario s3 = chain_scenario(f.scenario(), f.scenario());
    const BellOptimum opt = monogamy_analysis(f, s3);
    Output out(cfg);
    const bool simultaneous = opt.value > 2 * f.bound();
    out.text() << f.name() << " AB+BC nonsignaling maximum: " << show(opt.value) << '\n'
               << (simultaneous ? "simultaneous violation possible" : "monogamous: no simultaneous violation") << '\n';
    out.emit(monogamy_report(f, opt));
    return simultaneous ? negative : affirmative;
}

void print_extension(std::ostream& os, const std::string& what, const ExtensionResult& r) {
    if (r.feasible()) os << what << ": " << show(r.value) << '\n';
    else os << what << ": " << to_string(r.status) << " (no nonsignaling extension of the marginals)\n";
}

int cmd_transitivity(const RunConfig& cfg, const std::string& ab, const std::string& bc, const std::string& ac,
                     const std::string& witness_path) {
    const BellFunctional f_ab = load_bell(ab), f_bc = load_bell(bc), f_ac = load_bell(ac);
    const TransitivityReport r = transitivity_search(f_ab, f_bc, f_ac, cfg.cap);
    write_json_file(witness_path, behavior_to_json(r.witness));
    Output out(cfg);
    auto& t = out.text();
    t << "stage 1 (nonsignaling):          " << show(r.stage1_value) << '\n';
    t << "stage 2 (AC marginal local):     " << show(r.stage2_value) << '\n';
    t << "witness written to " << witness_path << '\n';
    t << f_ab.name() << " on AB marginal: " << show(r.ab_value) << '\n';
    t << f_bc.name() << " on BC marginal: " << show(r.bc_value) << '\n';
    t << f_ac.name() << " on witness AC marginal: " << show(r.ac_witness_value) << '\n';
    print_extension(t, "min " + f_ac.name() + " over extensions", r.ac_min);
    print_extension(t, "max AC local weight over extensions", r.ac_local);
    t << (r.transitive() ? "transitive: stage 1 exceeds stage 2" : "not transitive: stage 1 equals stage 2") << '\n';
    if (r.ac_nonlocal_certified()) t << "every nonsignaling extension has a nonlocal AC marginal\n";
    Json report = transitivity_report(f_ab, f_bc, f_ac, r);
    report["witness_path"] = witness_path;
    out.emit(report);
    return r.transitive() ? affirmative : negative;
}

int cmd_extendmin(const RunConfig& cfg, const std::string& ab_path, const std::string& bc_path, const std::string& bell) {
    const Behavior ab = read_behavior_file(ab_path), bc = read_behavior_file(bc_path);
    const BellFunctional f = load_bell(bell);
    const ExtensionResult r = min_bell_extension(ab, bc, f);
    Output out(cfg);
    print_extension(out.text(), "min " + f.name() + " over extensions", r);
    const bool forced = r.feasible() && r.value > f.bound();
    if (forced) out.text() << "every extension violates " << f.name() << '\n';
    out.emit(extendmin_report(ab, bc, f, r));
    return forced ? affirmative : negative;
}

int cmd_extend_localpart(const RunConfig& cfg, const std::string& ab_path, const std::string& bc_path) {
    const Behavior ab = read_behavior_file(ab_path), bc = read_behavior_file(bc_path);
    const ExtensionResult r = max_ac_local_part(ab, bc, cfg.cap);
    Output out(cfg);
    print_extension(out.text(), "max AC local weight over extensions", r);
    const bool certified = r.feasible() && r.value < 1;
    if (certified) out.text() << "every extension has a nonlocal AC marginal\n";
    out.emit(extend_localpart_report(ab, bc, r));
    return certified ? affirmative : negative;
}

int cmd_vertices(const RunConfig& cfg, const std::vector<std::size_t>& inputs, const std::vector<std::size_t>& outputs,
                 bool columns) {
    const Scenario s(inputs, outputs);
    const VertexMatrix v(s, cfg.cap);
    Output out(cfg);
    out.text() << "vertices: " << v.size() << " (" << s.describe() << ")\n";
    if (columns)
        for (std::size_t k = 0; k < v.size(); ++k) {
            out.text() << "  " << k << ':';
            for (auto i : v.support(k)) out.text() << ' ' << i;
            out.text() << '\n';
        }
    out.emit(vertices_report(v, columns));
    return affirmative;
}

/// Writes a behavior file, whatever the report format.
int cmd_marginal(const RunConfig& cfg, const std::string& path, const std::vector<std::size_t>& parties) {
    const Behavior b = read_behavior_file(path);
    std::vector<std::size_t> zero_based;
    for (auto p : parties) {
        if (p < 1 || p > b.scenario().parties())
            throw ParseError("party " + std::to_string(p) + " out of range 1.." + std::to_string(b.scenario().parties()));
        zero_based.push_back(p - 1);
    }
    PartySubset subset;
    try {
        subset = PartySubset(zero_based);
    } catch (const StructuralError& e) {
        throw ParseError(std::string("--parties: ") + e.what());
    }
    const Behavior m = marginalize(b, subset);
    RunConfig as_json = cfg;
    as_json.format = "json";
    Output out(as_json);
    out.emit(behavior_to_json(m));
    return affirmative;
}

int cmd_catalog(const RunConfig& cfg, const std::string& name) {
    Output out(cfg);
    if (name.empty()) {
        Json all = Json::array();
        for (const auto& [key, table] : catalog()) {
            out.text() << key << '\n';
            all.push_back(cg_to_json(table));
        }
        out.emit(all);
        return affirmative;
    }
    const CgTable t = catalog_entry(name);
    out.text() << cg_to_json(t).dump(2) << '\n';
    out.emit(cg_to_json(t));
    return affirmative;
}

int cmd_recheck(const RunConfig& cfg, const std::string& path) {
    const RecheckResult r = recheck(read_json_file(path), cfg.cap);
    Output out(cfg);
    for (const auto& p : r.passed) out.text() << "pass: " << p << '\n';
    for (const auto& f : r.failed) out.text() << "FAIL: " << f << '\n';
    out.text() << (r.ok() ? "recheck passed" : "recheck failed") << '\n';
    out.emit({{"report", "recheck"}, {"source", path}, {"passed", r.passed}, {"failed", r.failed}, {"ok", r.ok()}});
    return r.ok() ? affirmative : negative;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact Bell-scenario analysis: locality, nonsignaling optima, transitivity of nonlocality"};
    app.require_subcommand(0, 1);
    RunConfig cfg;
    std::string recheck_path;
    app.add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"text", "json"}));
    app.add_option("--out", cfg.out, "Write the report to this file instead of standard output");
    app.add_option("--cap", cfg.cap, "Vertex enumeration cap")->check(CLI::PositiveNumber);
    app.add_option("--recheck", recheck_path, "Re-verify a JSON report from the file alone");

    std::string a, b, c, set = "ns", witness = "transitivity_witness.json", name;
    std::vector<std::size_t> inputs, outputs;
    bool columns = false;

    auto* validate_cmd = app.add_subcommand("validate", "Check normalization, positivity and nonsignaling");
    validate_cmd->add_option("behavior", a)->required();
    auto* localpart_cmd = app.add_subcommand("localpart", "Local weight, decomposition and separating functional");
    localpart_cmd->add_option("behavior", a)->required();
    auto* belleval_cmd = app.add_subcommand("belleval", "Evaluate a Bell functional on a behavior");
    belleval_cmd->add_option("bell", a)->required();
    belleval_cmd->add_option("behavior", b)->required();
    auto* bellmax_cmd = app.add_subcommand("bellmax", "Maximize a Bell functional over the NS or local set");
    bellmax_cmd->add_option("bell", a)->required();
    bellmax_cmd->add_option("--set", set)->check(CLI::IsMember({"ns", "local"}));
    auto* monogamy_cmd = app.add_subcommand("monogamy", "Maximize f(AB) + f(BC) over tripartite NS behaviors");
    monogamy_cmd->add_option("bell", a)->required();
    auto* trans_cmd = app.add_subcommand("transitivity", "Two-stage transitivity search");
    trans_cmd->add_option("bell_ab", a)->required();
    trans_cmd->add_option("bell_bc", b)->required();
    trans_cmd->add_option("bell_ac", c)->required();
    trans_cmd->add_option("--witness", witness, "Behavior file for the stage-1 witness");
    auto* extendmin_cmd = app.add_subcommand("extendmin", "Minimize an AC functional over NS extensions of AB, BC marginals");
    extendmin_cmd->add_option("marginal_ab", a)->required();
    extendmin_cmd->add_option("marginal_bc", b)->required();
    extendmin_cmd->add_option("bell_ac", c)->required();
    auto* extloc_cmd = app.add_subcommand("extend-localpart", "Maximize the AC local weight over NS extensions");
    extloc_cmd->add_option("marginal_ab", a)->required();
    extloc_cmd->add_option("marginal_bc", b)->required();
    auto* vertices_cmd = app.add_subcommand("vertices", "Count (and optionally list) local-deterministic vertices");
    vertices_cmd->add_option("--inputs", inputs, "Per-party input counts")->required()->delimiter(',');
    vertices_cmd->add_option("--outputs", outputs, "Per-party output counts")->required()->delimiter(',');
    vertices_cmd->add_flag("--columns", columns, "List the support of every column");
    auto* marginal_cmd = app.add_subcommand("marginal", "Write the marginal behavior of some parties");
    marginal_cmd->add_option("behavior", a)->required();
    marginal_cmd->add_option("--parties", inputs, "1-based parties to keep, ascending")->required()->delimiter(',');
    auto* catalog_cmd = app.add_subcommand("catalog", "Print built-in inequalities as Bell files");
    catalog_cmd->add_option("name", name);
    auto* recheck_cmd = app.add_subcommand("recheck", "Same as --recheck");
    recheck_cmd->add_option("report", recheck_path)->required();

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : input_error;
    }

    try {
        if (!recheck_path.empty()) return cmd_recheck(cfg, recheck_path);
        if (*validate_cmd) return cmd_validate(cfg, a);
        if (*localpart_cmd) return cmd_localpart(cfg, a);
        if (*belleval_cmd) return cmd_belleval(cfg, a, b);
        if (*bellmax_cmd) return cmd_bellmax(cfg, a, set);
        if (*monogamy_cmd) return cmd_monogamy(cfg, a);
        if (*trans_cmd) return cmd_transitivity(cfg, a, b, c, witness);
        if (*extendmin_cmd) return cmd_extendmin(cfg, a, b, c);
        if (*extloc_cmd) return cmd_extend_localpart(cfg, a, b);
        if (*vertices_cmd) return cmd_vertices(cfg, inputs, outputs, columns);
        if (*marginal_cmd) return cmd_marginal(cfg, a, inputs);
        if (*catalog_cmd) return cmd_catalog(cfg, name);
        std::cerr << app.help();
        return input_error;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
    } catch (const SignalingError& e) {
        std::cerr << "refused: " << e.what() << '\n';
    } catch (const SizeError& e) {
        std::cerr << "size error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return input_error;
}
