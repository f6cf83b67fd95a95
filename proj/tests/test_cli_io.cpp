#include "doctest.h"

#include "lchpm/catalog.hpp"
#include "lchpm/cli.hpp"
#include "lchpm/constructions.hpp"
#include "lchpm/filtered_lch.hpp"
#include "lchpm/io.hpp"
#include "lchpm/scenario.hpp"

#include <filesystem>
#include <sstream>

using namespace lchpm;
namespace fs = std::filesystem;

namespace {

const fs::path kData = LCHPM_DATA_DIR;

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

// Lines that are not comments.
std::vector<std::string> data_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line[0] != '#') out.push_back(line);
    return out;
}

std::size_t count(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
    return n;
}

fs::path temp_file(const std::string& name, const std::string& content) {
    const fs::path p = fs::temp_directory_path() / ("lchpm_test_" + name);
    io::write_file(p, content);
    return p;
}

Rational R(long p, long q = 1) { return Rational(p, q); }

}  // namespace

TEST_CASE("rational parsing") {
    CHECK(parse_rational("3/2") == R(3, 2));
    CHECK(parse_rational("-4/6") == R(-2, 3));
    CHECK(parse_rational("7") == 7);
    CHECK_THROWS_AS(parse_rational("1.5"), RationalParseError);
    CHECK_THROWS_AS(parse_rational("1/0"), RationalParseError);
    CHECK(parse_extended("inf").is_infinite());
    CHECK(to_string(R(4, 2)) == "2");
    CHECK(to_double_down(R(1, 3)) <= to_double_up(R(1, 3)));
    CHECK(from_double(0.5) == R(1, 2));
}

TEST_CASE("bundled specs and every generator validate") {
    for (const auto& entry : fs::directory_iterator(kData / "specs")) {
        auto r = run({"validate", entry.path().string()});
        CHECK_MESSAGE(r.code == exit_ok, entry.path());
    }
    const std::map<std::string, std::vector<std::string>> args{
        {"two_fiber", {"L=2"}},
        {"stabilized_two_fiber", {"L=2"}},
        {"two_chord", {"a=1", "A=3/2", "case=2"}},
        {"morse_circle", {"values=min:1,max:4,min:2,max:3"}},
        {"stabilize", {"spec=" + (kData / "specs" / "two_fiber.json").string(), "delta=1/10"}},
        {"random", {"seed=3"}},
    };
    for (const std::string& name : generator_names()) {
        REQUIRE_MESSAGE(args.contains(name), name);
        std::vector<std::string> a{"validate", name};
        a.insert(a.end(), args.at(name).begin(), args.at(name).end());
        CHECK_MESSAGE(run(a).code == exit_ok, name);
    }
}

TEST_CASE("spec file errors") {
    const auto zero = temp_file("zero.json", R"({"name": "z", "chords": [{"id": "a", "from": [0, "L0"],
 "to": [1, "L1"], "action": "0/1"}], "differential": {}})");
    auto r = run({"validate", zero.string()});
    CHECK(r.code == exit_validation);
    CHECK(r.out.find("NonPositiveAction") != std::string::npos);

    const std::string unk = R"({"name": "z",
  "colour": 1, "chords": [], "differential": {}})";
    try {
        io::parse_spec(unk);
        FAIL("expected a parse error");
    } catch (const io::ParseError& e) {
        CHECK(e.position().line == 2);
        CHECK(e.position().column == 3);
    }
    CHECK(run({"validate", temp_file("unk.json", unk).string()}).code == exit_parse);
    CHECK(run({"validate", temp_file("broken.json", "{\"name\": ").string()}).code == exit_parse);
}

TEST_CASE("spec json round trip") {
    for (const DGASpec& s : {two_fiber_spec(R(2)), two_chord_spec(R(1), R(3, 2), TwoChordCase::dA_equals_a),
                             random_valid_spec(9)}) {
        const DGASpec back = io::parse_spec(io::spec_to_json(s));
        CHECK(back.same_algebra(s));
        CHECK(io::spec_to_json(back) == io::spec_to_json(s));
    }
}

TEST_CASE("barcode command") {
    auto r = run({"barcode", "two_fiber", "L=2", "rmax=11"});
    CHECK(r.code == exit_ok);
    CHECK(data_lines(r.out) == std::vector<std::string>{"2 inf 1", "6 inf 1", "10 inf 1"});

    auto svg = run({"barcode", "two_fiber", "L=2", "rmax=11", "--format", "svg"});
    CHECK(svg.code == exit_ok);
    CHECK(count(svg.out, "marker-end=\"url(#arrow)\"") == 3);

    auto c2 = run({"barcode", "two_chord", "a=1", "A=3/2", "case=2", "rmax=4"});
    CHECK(data_lines(c2.out) == std::vector<std::string>{"1 3/2 1"});

    // byte-identical on repeat
    CHECK(run({"barcode", "two_fiber", "L=2", "rmax=11"}).out == r.out);
    CHECK(run({"barcode", "random", "seed=4", "rmax=3"}).out == run({"barcode", "random", "seed=4", "rmax=3"}).out);

    CHECK(run({"--budget", "50", "barcode", "stabilized_two_fiber", "L=1", "rmax=30"}).code == exit_budget);
    CHECK(run({"barcode", "nosuch_generator"}).code == exit_other);
}

TEST_CASE("barcode text round trip") {
    const Barcode b({{R(1), Death::finite(R(3, 2)), 2}, {R(2), Death::infinite(), 1}, {R(5, 2), Death::censored(R(4)), 3}},
                    R(4));
    io::RunManifest m{"barcode", {{"x", io::sha256_hex("x")}}, {{"rmax", "4"}}};
    const std::string text = io::format_barcode(b, &m, {"spec demo"});
    CHECK(io::parse_barcode(text) == b);
    CHECK(io::format_barcode(io::parse_barcode(text), &m, {"spec demo"}) == text);
    CHECK_THROWS_AS(io::parse_barcode("1 x 1\n"), io::ParseError);

    // the render command reads the text format
    const auto path = temp_file("bars.txt", text);
    auto r = run({"render", path.string()});
    CHECK(r.code == exit_ok);
    CHECK(count(r.out, "marker-end=\"url(#arrow)\"") == 1);
    CHECK(count(r.out, "stroke-dasharray") == 1);
}

TEST_CASE("sha256") {
    CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("lmin and bonded commands") {
    auto first = [](const Run& r) { return data_lines(r.out).front(); };
    CHECK(first(run({"lmin", "two_fiber", "L=2", "rmax=11", "--s", "inf"})) == "2");
    CHECK(first(run({"lmin", "two_chord", "a=1", "A=3/2", "case=2", "rmax=4", "--s", "6/5"})) == "1");
    CHECK(first(run({"lmin", "two_chord", "a=1", "A=3/2", "case=2", "rmax=4", "--s", "inf"})) == "inf");
    CHECK(first(run({"bonded", "two_fiber", "L=2", "rmax=11"})) == "yes");
    CHECK(first(run({"bonded", "two_chord", "a=1", "A=3/2", "case=2", "rmax=4"})) == "no");
    CHECK(first(run({"bonded", "two_fiber", "L=2", "rmax=7", "--stable"})) == "yes");
    CHECK(run({"bonded", "two_chord", "a=1", "A=3/2", "case=2", "rmax=4", "--stable"}).code == exit_validation);
    CHECK(run({"validate", "morse_circle", "values=min:1,min:2"}).code == exit_validation);
}

TEST_CASE("bounds command") {
    auto r = run({"bounds", (kData / "bounds" / "examples.json").string()});
    CHECK(r.code == exit_ok);
    CHECK(r.out.find("formula_id\tchord_bound_autonomous\napplicable\tyes\nvalue\t1\n") != std::string::npos);
    CHECK(r.out.find("formula_id\tcooperative_bound\napplicable\tyes\nvalue\t4/3\n") != std::string::npos);
}

TEST_CASE("generate writes a spec that validates") {
    const fs::path out = fs::temp_directory_path() / "lchpm_test_gen.json";
    CHECK(run({"generate", "two_chord", "a=1", "A=3/2", "case=1", "--out", out.string()}).code == exit_ok);
    CHECK(run({"validate", out.string()}).code == exit_ok);
    CHECK(run({"generate", "two_chord", "a=1", "bogus=2"}).code == exit_other);
}

TEST_CASE("verify scenarios") {
    auto ok = run({"verify", (kData / "scenarios" / "free_fiber_pair.json").string()});
    CHECK(ok.code == exit_ok);
    CHECK(ok.out.find("result\tPASS") != std::string::npos);

    auto ns = run({"verify", (kData / "scenarios" / "not_separating.json").string()});
    CHECK(ns.code == exit_validation);
    CHECK(ns.err.find("NotSeparating") != std::string::npos);
    CHECK(ns.out.find("shots") == std::string::npos);

    auto reeb = run({"verify", (kData / "scenarios" / "conformal_reeb.json").string()});
    CHECK(reeb.code == exit_ok);

    const auto bad = temp_file("scen.json", R"({"name": "x", "kind": "chord", "extra": 1})");
    CHECK(run({"verify", bad.string()}).code == exit_parse);
}
