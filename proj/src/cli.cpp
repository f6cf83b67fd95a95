#include "lchpm/cli.hpp"

#include "lchpm/bounds.hpp"
#include "lchpm/catalog.hpp"
#include "lchpm/constructions.hpp"
#include "lchpm/filtered_lch.hpp"
#include "lchpm/io.hpp"
#include "lchpm/scenario.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <ostream>

namespace lchpm {

namespace {

struct Globals {
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::size_t budget = LCHOptions{}.basis_cap;
};

// A spec named on the command line: a file path, or a generator with params.
struct ResolvedSpec {
    DGASpec spec;
    std::pair<std::string, std::string> digest;
    GeneratorParams extra;  // rmax=, s= and similar, left for the command
};

ResolvedSpec resolve_spec(const std::vector<std::string>& tokens, const Globals& g,
                          std::initializer_list<std::string_view> command_keys) {
    if (tokens.empty()) throw UsageError("missing spec file or generator name");
    GeneratorParams params = parse_params({tokens.begin() + 1, tokens.end()});
    ResolvedSpec r;
    for (std::string_view k : command_keys) {
        auto it = params.find(std::string(k));
        if (it != params.end()) {
            r.extra.insert(*it);
            params.erase(it);
        }
    }
    const std::string& head = tokens.front();
    if (std::filesystem::is_regular_file(head)) {
        if (!params.empty()) throw UsageError("generator parameters given with a spec file");
        const std::string bytes = io::read_file(head);
        r.spec = io::parse_spec(bytes);
        r.digest = {std::filesystem::path(head).filename().string(), io::sha256_hex(bytes)};
    } else {
        const auto names = generator_names();
        if (std::find(names.begin(), names.end(), head) == names.end())
            throw UsageError("'" + head + "' is neither a file nor a generator");
        r.spec = generate_spec(head, params, g.seed);
        std::string label = "generated:" + head;
        for (const auto& [k, v] : params) label += "," + k + "=" + v;
        r.digest = {label, io::sha256_hex(io::spec_to_json(r.spec))};
    }
    return r;
}

std::optional<std::string> pick(const std::string& flag, const GeneratorParams& extra, const std::string& key) {
    std::optional<std::string> v;
    if (!flag.empty()) v = flag;
    if (auto it = extra.find(key); it != extra.end()) {
        if (v && *v != it->second) throw UsageError(key + " given twice with different values");
        v = it->second;
    }
    return v;
}

Action require_rmax(const std::string& flag, const GeneratorParams& extra) {
    auto v = pick(flag, extra, "rmax");
    if (!v) throw UsageError("missing --rmax");
    return parse_rational(*v);
}

void emit(const std::string& content, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) out << content;
    else io::write_file(out_path, content);
}

LCHResult compute_barcode(const DGASpec& spec, const Action& rmax, const Globals& g) {
    LCHOptions opts;
    opts.basis_cap = g.budget;
    return lch_barcode(spec, rmax, opts);
}

// ---- bounds parameter files -------------------------------------------------

using io::LocatedJson;

Rational field_rational(const LocatedJson& doc, const std::string& ptr) {
    const auto& v = doc.value.at(nlohmann::json::json_pointer(ptr));
    if (!v.is_string()) doc.fail(ptr, "expected a rational string");
    try {
        return parse_rational(v.get<std::string>());
    } catch (const RationalParseError& e) {
        doc.fail(ptr, e.what());
    }
}

ExtendedRational field_extended(const LocatedJson& doc, const std::string& ptr) {
    const auto& v = doc.value.at(nlohmann::json::json_pointer(ptr));
    if (!v.is_string()) doc.fail(ptr, "expected a rational string or \"inf\"");
    try {
        return parse_extended(v.get<std::string>());
    } catch (const RationalParseError& e) {
        doc.fail(ptr, e.what());
    }
}

struct InvariantSource {
    Barcode barcode;
};

std::optional<InvariantSource> invariant_of(const LocatedJson& doc, const std::string& ptr, const Globals& g) {
    if (!doc.value.contains(nlohmann::json::json_pointer(ptr + "/l_min_from"))) return std::nullopt;
    const std::string p = ptr + "/l_min_from";
    io::check_members(doc, p, {"generator", "rmax"}, {"params"});
    GeneratorParams params;
    const auto& obj = doc.value.at(nlohmann::json::json_pointer(p));
    if (obj.contains("params")) {
        if (!obj["params"].is_object()) doc.fail(p + "/params", "params must be a map");
        for (const auto& [k, v] : obj["params"].items()) {
            if (!v.is_string()) doc.fail(p + "/params/" + k, "parameter values are strings");
            params[k] = v.get<std::string>();
        }
    }
    if (!obj["generator"].is_string()) doc.fail(p + "/generator", "expected a generator name");
    const DGASpec spec = generate_spec(obj["generator"].get<std::string>(), params, g.seed);
    return InvariantSource{compute_barcode(spec, field_rational(doc, p + "/rmax"), g).barcode};
}

bounds::TaggedLMin tagged_l_min(const LocatedJson& doc, const std::string& ptr, const Rational& ratio,
                                const Globals& g) {
    if (auto inv = invariant_of(doc, ptr, g)) {
        const LMinResult r = l_min_s(inv->barcode, ratio);
        if (r.uncertain) doc.fail(ptr + "/l_min_from", "l_min is uncertain at this truncation; raise rmax");
        return {r.value, ratio};
    }
    return {field_extended(doc, ptr + "/l_min"), field_extended(doc, ptr + "/ratio")};
}

std::string bounds_table(std::string_view text, const Globals& g) {
    const LocatedJson doc = io::parse_json(text);
    io::check_members(doc, "", {"reports"}, {"name", "note"});
    const auto& list = doc.value["reports"];
    if (!list.is_array()) doc.fail("/reports", "reports must be a list");
    std::string out;
    for (std::size_t k = 0; k < list.size(); ++k) {
        const std::string ptr = "/reports/" + std::to_string(k);
        if (!list[k].is_object() || !list[k].contains("formula") || !list[k]["formula"].is_string())
            doc.fail(ptr, "each report needs a formula");
        const std::string f = list[k]["formula"].get<std::string>();
        auto R = [&](const char* key) { return field_rational(doc, ptr + "/" + key); };
        bounds::BoundReport rep;
        std::optional<Rational> plain;
        if (f == "delta_separation_value") {
            io::check_members(doc, ptr, {"formula", "inf_on_Y1", "sup_on_Y0"});
            plain = bounds::delta_separation_value(R("inf_on_Y1"), R("sup_on_Y0"));
        } else if (f == "chord_time_vs_pb") {
            io::check_members(doc, ptr, {"formula", "p", "delta"});
            plain = bounds::chord_time_vs_pb(R("p"), R("delta"));
        } else if (f == "pb_plus_lower_bound") {
            io::check_members(doc, ptr, {"formula", "s_minus", "s_plus"}, {"l_min", "ratio", "l_min_from"});
            const Rational sm = R("s_minus"), sp = R("s_plus");
            rep = bounds::pb_plus_lower_bound(tagged_l_min(doc, ptr, sp / sm, g), sm, sp);
        } else if (f == "chord_bound_autonomous") {
            io::check_members(doc, ptr, {"formula", "s_minus", "s_plus", "delta"},
                              {"l_min", "ratio", "l_min_from"});
            const Rational sm = R("s_minus"), sp = R("s_plus");
            rep = bounds::chord_bound_autonomous(tagged_l_min(doc, ptr, sp / sm, g), sm, sp, R("delta"));
        } else if (f == "chord_bound_timedep") {
            io::check_members(doc, ptr, {"formula", "s_minus", "s_plus", "delta", "e", "sup_dHdt"},
                              {"l_min", "ratio", "l_min_from"});
            const Rational sm = R("s_minus"), sp = R("s_plus");
            rep = bounds::chord_bound_timedep(tagged_l_min(doc, ptr, sp / sm, g), sm, sp, R("delta"), R("e"),
                                              R("sup_dHdt"));
        } else if (f == "cooperative_bound") {
            io::check_members(doc, ptr, {"formula", "inf_h", "C", "grid"},
                              {"l_min", "l_min_inf", "l_min_from"});
            std::vector<Rational> grid;
            const auto& gj = list[k]["grid"];
            if (!gj.is_array()) doc.fail(ptr + "/grid", "grid must be a list");
            for (std::size_t i = 0; i < gj.size(); ++i) grid.push_back(R(("grid/" + std::to_string(i)).c_str()));
            std::function<ExtendedRational(const Rational&)> fn;
            ExtendedRational l_inf;
            if (auto inv = invariant_of(doc, ptr, g)) {
                const Barcode bc = inv->barcode;
                fn = [bc](const Rational& s) {
                    const LMinResult r = l_min_s(bc, s);
                    return r.uncertain ? ExtendedRational::infinity() : r.value;
                };
                const LMinResult ri = l_min_s(bc, ExtendedRational::infinity());
                l_inf = ri.uncertain ? ExtendedRational::infinity() : ri.value;
            } else {
                const ExtendedRational constant = field_extended(doc, ptr + "/l_min");
                fn = [constant](const Rational&) { return constant; };
                l_inf = list[k].contains("l_min_inf") ? field_extended(doc, ptr + "/l_min_inf")
                                                      : ExtendedRational::infinity();
            }
            rep = bounds::cooperative_bound(fn, R("inf_h"), R("C"), l_inf, grid);
        } else if (f == "two_chords_bound") {
            io::check_members(doc, ptr, {"formula", "a", "A", "c", "C"});
            rep = bounds::two_chords_bound(R("a"), R("A"), R("c"), R("C"));
        } else {
            doc.fail(ptr + "/formula", "unknown formula '" + f + "'");
        }

        out += "report\t" + std::to_string(k + 1) + "\n";
        if (plain) {
            out += "formula_id\t" + f + "\nvalue\t" + to_string(*plain) + "\n";
            continue;
        }
        out += "formula_id\t" + rep.formula_id + "\n";
        out += "applicable\t" + std::string(rep.applicable ? "yes" : "no") + "\n";
        out += "value\t" + to_string(rep.value) + "\n";
        std::string violated;
        for (const auto& v : rep.violated_conditions) violated += (violated.empty() ? "" : "; ") + v;
        out += "violated\t" + (violated.empty() ? std::string("-") : violated) + "\n";
        for (const auto& [key, v] : rep.details) out += "detail." + key + "\t" + to_string(v) + "\n";
        if (!rep.note.empty()) out += "note\t" + rep.note + "\n";
    }
    return out;
}

// ---- dispatch ---------------------------------------------------------------

int classify(const std::exception& e) {
    if (dynamic_cast<const io::ParseError*>(&e) || dynamic_cast<const RationalParseError*>(&e) ||
        dynamic_cast<const nlohmann::json::exception*>(&e))
        return exit_parse;
    if (dynamic_cast<const BudgetExceeded*>(&e) || dynamic_cast<const dyn::NoConvergence*>(&e))
        return exit_budget;
    if (dynamic_cast<const UsageError*>(&e)) return exit_other;
    if (dynamic_cast<const ValidationFailed*>(&e) || dynamic_cast<const bounds::NotSeparating*>(&e) ||
        dynamic_cast<const bounds::DegenerateCobordism*>(&e) || dynamic_cast<const bounds::RatioMismatch*>(&e) ||
        dynamic_cast<const bounds::ParameterOutOfRange*>(&e) || dynamic_cast<const bounds::EmptyGrid*>(&e) ||
        dynamic_cast<const bounds::NonPositive*>(&e) || dynamic_cast<const OrderingViolation*>(&e) ||
        dynamic_cast<const NonzeroDifferential*>(&e) || dynamic_cast<const InvalidAlternation*>(&e) ||
        dynamic_cast<const NonAdmissibleValues*>(&e))
        return exit_validation;
    return exit_other;
}

std::string error_label(const std::exception& e) {
    if (dynamic_cast<const io::ParseError*>(&e)) return "ParseError";
    if (dynamic_cast<const RationalParseError*>(&e)) return "ParseError";
    if (dynamic_cast<const BudgetExceeded*>(&e)) return "BudgetExceeded";
    if (dynamic_cast<const ValidationFailed*>(&e)) return "ValidationFailed";
    if (dynamic_cast<const bounds::NotSeparating*>(&e)) return "NotSeparating";
    if (dynamic_cast<const bounds::DegenerateCobordism*>(&e)) return "DegenerateCobordism";
    if (dynamic_cast<const bounds::RatioMismatch*>(&e)) return "RatioMismatch";
    if (dynamic_cast<const bounds::EmptyGrid*>(&e)) return "EmptyGrid";
    if (dynamic_cast<const OrderingViolation*>(&e)) return "OrderingViolation";
    if (dynamic_cast<const NonzeroDifferential*>(&e)) return "NonzeroDifferential";
    if (dynamic_cast<const InvalidAlternation*>(&e)) return "InvalidAlternation";
    if (dynamic_cast<const NonAdmissibleValues*>(&e)) return "NonAdmissibleValues";
    if (dynamic_cast<const dyn::NoConvergence*>(&e)) return "NoConvergence";
    if (dynamic_cast<const UsageError*>(&e)) return "UsageError";
    return "error";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const auto started = std::chrono::steady_clock::now();
    CLI::App app{"Filtered Legendrian contact homology barcodes and chord-time bounds", "lchpm"};
    app.require_subcommand(1);
    Globals g;
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "Seed for randomized generators");
    app.add_option("--threads", g.threads, "Worker threads for chord search")->check(CLI::PositiveNumber);
    app.add_option("--budget", g.budget, "Basis-size cap for the truncated complex")->check(CLI::PositiveNumber);

    std::vector<std::string> source;
    std::string out_path, rmax_flag, s_flag, format = "text", title, file;

    auto* validate = app.add_subcommand("validate", "Check a spec file (or generated spec)");
    validate->add_option("source", source, "spec file, or generator name and key=value params")->required();

    auto* barcode = app.add_subcommand("barcode", "Barcode of the filtered 01-complex");
    barcode->add_option("source", source)->required();
    barcode->add_option("--rmax", rmax_flag, "Truncation bound r_max");
    barcode->add_option("--format", format)->check(CLI::IsMember({"text", "svg"}));
    barcode->add_option("--out", out_path);

    auto* lmin = app.add_subcommand("lmin", "Smallest birth among bars longer than ratio s");
    lmin->add_option("source", source)->required();
    lmin->add_option("--rmax", rmax_flag);
    lmin->add_option("--s", s_flag, "Ratio s > 1, or inf");

    auto* bonded = app.add_subcommand("bonded", "Whether an infinite bar exists");
    bonded->add_option("source", source)->required();
    bonded->add_option("--rmax", rmax_flag);
    bool stable = false;
    bonded->add_flag("--stable", stable, "Use the stabilized pair");

    auto* bnds = app.add_subcommand("bounds", "Evaluate a bounds parameter file");
    bnds->add_option("file", file)->required();
    bnds->add_option("--out", out_path);

    auto* generate = app.add_subcommand("generate", "Emit a generated spec file");
    generate->add_option("source", source, "generator name and key=value params")->required();
    generate->add_option("--out", out_path);

    auto* search = app.add_subcommand("chord-search", "Search for a chord in a scenario");
    search->add_option("file", file)->required();
    search->add_option("--out", out_path);

    auto* verify = app.add_subcommand("verify", "Compute the bound, search for a chord, compare");
    verify->add_option("file", file)->required();
    verify->add_option("--out", out_path);

    auto* render = app.add_subcommand("render", "Render a barcode file as SVG");
    render->add_option("file", file)->required();
    render->add_option("--out", out_path);
    render->add_option("--title", title);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_other;
    }
    if (*seed_opt) g.seed = seed_value;

    io::RunManifest manifest;
    auto param = [&](const std::string& k, const std::string& v) { manifest.parameters.emplace_back(k, v); };
    int code = exit_ok;
    try {
        if (*validate) {
            manifest.command = "validate";
            const ResolvedSpec r = resolve_spec(source, g, {});
            const ValidationReport report = lchpm::validate(r.spec);
            if (report.valid()) {
                out << "valid " << r.spec.name() << " (" << r.spec.size() << " chords)\n";
            } else {
                for (const Violation& v : report.violations)
                    out << "violation " << to_string(v.kind) << " " << v.generator << ": " << v.detail << "\n";
                code = exit_validation;
            }
        } else if (*barcode) {
            manifest.command = "barcode";
            const ResolvedSpec r = resolve_spec(source, g, {"rmax"});
            const Action rmax = require_rmax(rmax_flag, r.extra);
            manifest.inputs.push_back(r.digest);
            param("rmax", to_string(rmax));
            param("format", format);
            param("budget", std::to_string(g.budget));
            const LCHResult res = compute_barcode(r.spec, rmax, g);
            const std::vector<std::string> notes{
                "spec " + r.spec.name(), "basis_size " + std::to_string(res.basis_size),
                std::string("certified_infinite ") + (res.certified_infinite ? "yes" : "no")};
            if (format == "svg") {
                emit(io::render_svg(res.barcode, r.spec.name() + " (r_max = " + to_string(rmax) + ")", &manifest),
                     out_path, out);
            } else {
                emit(io::format_barcode(res.barcode, &manifest, notes), out_path, out);
            }
        } else if (*lmin) {
            manifest.command = "lmin";
            const ResolvedSpec r = resolve_spec(source, g, {"rmax", "s"});
            const Action rmax = require_rmax(rmax_flag, r.extra);
            const auto s = pick(s_flag, r.extra, "s");
            if (!s) throw UsageError("missing --s");
            const LMinResult res = l_min_s(compute_barcode(r.spec, rmax, g).barcode, parse_extended(*s));
            out << to_string(res.value) << (res.uncertain ? " uncertain" : "") << "\n";
        } else if (*bonded) {
            manifest.command = "bonded";
            const ResolvedSpec r = resolve_spec(source, g, {"rmax"});
            const Action rmax = require_rmax(rmax_flag, r.extra);
            if (stable) {
                LCHOptions opts;
                opts.basis_cap = g.budget;
                out << to_string(is_stably_homologically_bonded(r.spec, rmax, opts)) << "\n";
            } else {
                out << to_string(is_homologically_bonded(compute_barcode(r.spec, rmax, g).barcode)) << "\n";
            }
        } else if (*bnds) {
            manifest.command = "bounds";
            const std::string bytes = io::read_file(file);
            manifest.inputs.emplace_back(std::filesystem::path(file).filename().string(), io::sha256_hex(bytes));
            emit(manifest.lines("# ") + bounds_table(bytes, g), out_path, out);
        } else if (*generate) {
            manifest.command = "generate";
            if (source.empty()) throw UsageError("missing generator name");
            const GeneratorParams params = parse_params({source.begin() + 1, source.end()});
            const DGASpec spec = generate_spec(source.front(), params, g.seed);
            nlohmann::ordered_json j = nlohmann::ordered_json::parse(io::spec_to_json(spec));
            nlohmann::ordered_json m;
            m["tool"] = manifest.tool_version;
            m["command"] = "generate " + source.front();
            for (const auto& [k, v] : params) m["params"][k] = v;
            if (source.front() == "random" && !params.contains("seed") && g.seed)
                m["params"]["seed"] = std::to_string(*g.seed);
            j["manifest"] = m;
            emit(j.dump(2) + "\n", out_path, out);
        } else if (*search || *verify) {
            manifest.command = search->parsed() ? "chord-search" : "verify";
            const std::string bytes = io::read_file(file);
            manifest.inputs.emplace_back(std::filesystem::path(file).filename().string(), io::sha256_hex(bytes));
            param("threads", std::to_string(g.threads));
            const scenario::Scenario sc = scenario::parse_scenario(bytes);
            scenario::RunOptions ro;
            ro.threads = g.threads;
            ro.lch.basis_cap = g.budget;
            ro.search_only = search->parsed();
            const scenario::Outcome o = scenario::run_verify(sc, ro);
            emit(manifest.lines("# ") + scenario::format_outcome(o), out_path, out);
            if (!o.pass) code = exit_validation;
        } else if (*render) {
            manifest.command = "render";
            const std::string bytes = io::read_file(file);
            manifest.inputs.emplace_back(std::filesystem::path(file).filename().string(), io::sha256_hex(bytes));
            const Barcode b = io::parse_barcode(bytes);
            emit(io::render_svg(b, title.empty() ? std::filesystem::path(file).stem().string() : title, &manifest),
                 out_path, out);
        }
    } catch (const std::exception& e) {
        code = classify(e);
        err << error_label(e) << ": " << e.what() << "\n";
        if (const auto* v = dynamic_cast<const ValidationFailed*>(&e))
            for (const Violation& x : v->report().violations)
                err << "violation " << to_string(x.kind) << " " << x.generator << ": " << x.detail << "\n";
        if (const auto* b = dynamic_cast<const BudgetExceeded*>(&e)) err << "basis-size cap " << b->cap() << "\n";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    err << "wall_time_s " << secs << "\n";
    return code;
}

}  // namespace lchpm
