#include "lchpm/catalog.hpp"

#include "lchpm/constructions.hpp"
#include "lchpm/io.hpp"

#include <set>
#include <sstream>

namespace lchpm {

GeneratorParams parse_params(const std::vector<std::string>& tokens) {
    GeneratorParams out;
    for (const std::string& t : tokens) {
        const auto eq = t.find('=');
        if (eq == std::string::npos || eq == 0)
            throw UsageError("expected key=value, got '" + t + "'");
        if (!out.emplace(t.substr(0, eq), t.substr(eq + 1)).second)
            throw UsageError("parameter '" + t.substr(0, eq) + "' given twice");
    }
    return out;
}

std::vector<std::string> generator_names() {
    return {"two_fiber", "stabilized_two_fiber", "two_chord", "morse_circle", "stabilize", "random"};
}

namespace {

class Reader {
public:
    Reader(const std::string& gen, const GeneratorParams& p) : gen_(gen), params_(p) {}

    std::optional<std::string> optional(const std::string& key) {
        used_.insert(key);
        auto it = params_.find(key);
        if (it == params_.end()) return std::nullopt;
        return it->second;
    }
    std::string required(const std::string& key) {
        auto v = optional(key);
        if (!v) throw UsageError(gen_ + " needs parameter " + key + "=...");
        return *v;
    }
    Rational rational(const std::string& key) { return parse_rational(required(key)); }
    unsigned long long integer(const std::string& key, unsigned long long fallback) {
        auto v = optional(key);
        if (!v) return fallback;
        try {
            std::size_t used = 0;
            const auto n = std::stoull(*v, &used);
            if (used != v->size()) throw std::invalid_argument("");
            return n;
        } catch (const std::exception&) {
            throw UsageError(gen_ + ": " + key + " must be a non-negative integer");
        }
    }
    void finish() const {
        for (const auto& [k, v] : params_)
            if (!used_.contains(k)) throw UsageError(gen_ + " does not take parameter '" + k + "'");
    }

private:
    std::string gen_;
    const GeneratorParams& params_;
    std::set<std::string> used_;
};

CircleMorseData parse_circle_values(const std::string& text) {
    CircleMorseData data;
    std::istringstream in(text);
    for (std::string item; std::getline(in, item, ',');) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw UsageError("circle value '" + item + "' is not kind:value");
        const std::string kind = item.substr(0, colon);
        CriticalPoint p{CriticalKind::min, parse_rational(item.substr(colon + 1))};
        if (kind == "max") p.kind = CriticalKind::max;
        else if (kind != "min") throw UsageError("critical point kind must be min or max");
        data.points.push_back(std::move(p));
    }
    return data;
}

}  // namespace

DGASpec generate_spec(const std::string& name, const GeneratorParams& params,
                      std::optional<std::uint64_t> fallback_seed) {
    Reader r(name, params);
    DGASpec spec;
    if (name == "two_fiber") {
        spec = two_fiber_spec(r.rational("L"));
    } else if (name == "stabilized_two_fiber") {
        spec = stabilized_two_fiber_spec(r.rational("L"));
    } else if (name == "two_chord") {
        const Rational a = r.rational("a"), A = r.rational("A");
        const std::string which = r.required("case");
        if (which != "1" && which != "2") throw UsageError("two_chord case must be 1 or 2");
        spec = two_chord_spec(a, A, which == "1" ? TwoChordCase::dA_zero : TwoChordCase::dA_equals_a);
    } else if (name == "morse_circle") {
        const CircleMorseData data = parse_circle_values(r.required("values"));
        const auto offset = r.optional("offset");
        spec = morse_circle_spec(data, offset ? parse_rational(*offset) : Rational(0));
    } else if (name == "stabilize") {
        const DGASpec base = io::parse_spec(io::read_file(r.required("spec")));
        spec = stabilize_zero_diff(base, r.rational("delta"));
    } else if (name == "random") {
        std::optional<std::uint64_t> seed;
        if (r.optional("seed")) seed = r.integer("seed", 0);
        else seed = fallback_seed;
        if (!seed) throw UsageError("random needs seed=... or the global --seed");
        RandomSpecOptions opts;
        opts.max_chords = r.integer("chords", opts.max_chords);
        opts.duplicate_actions = r.integer("dup", 0) != 0;
        if (auto d = r.optional("density")) opts.differential_density = std::stod(*d);
        spec = random_valid_spec(*seed, opts);
    } else {
        throw UsageError("unknown generator '" + name + "'");
    }
    r.finish();
    return spec;
}

}  // namespace lchpm
