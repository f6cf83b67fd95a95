#include "lchpm/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace lchpm::io {

namespace {

std::string describe(SourcePos pos, const std::string& message) {
    return "line " + std::to_string(pos.line) + ", column " + std::to_string(pos.column) + ": " +
           message;
}

SourcePos position_of(std::string_view text, std::size_t offset) {
    SourcePos pos;
    offset = std::min(offset, text.size());
    for (std::size_t i = 0; i < offset; ++i) {
        if (text[i] == '\n') {
            ++pos.line;
            pos.column = 1;
        } else {
            ++pos.column;
        }
    }
    return pos;
}

// Input iterator that publishes how many characters the lexer has consumed.
class CountingIterator {
public:
    using iterator_category = std::input_iterator_tag;
    using value_type = char;
    using difference_type = std::ptrdiff_t;
    using pointer = const char*;
    using reference = const char&;

    CountingIterator(const char* p, const char* begin, std::size_t* consumed)
        : p_(p), begin_(begin), consumed_(consumed) {}
    reference operator*() const { return *p_; }
    CountingIterator& operator++() {
        ++p_;
        if (consumed_) *consumed_ = static_cast<std::size_t>(p_ - begin_);
        return *this;
    }
    CountingIterator operator++(int) {
        CountingIterator old = *this;
        ++*this;
        return old;
    }
    bool operator==(const CountingIterator& o) const { return p_ == o.p_; }
    bool operator!=(const CountingIterator& o) const { return p_ != o.p_; }

private:
    const char* p_;
    const char* begin_;
    std::size_t* consumed_;
};

std::string escape_pointer_token(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

// Forwards to the DOM builder and records where members and elements start.
class LocatingSax {
public:
    using json = nlohmann::json;

    LocatingSax(json& root, std::string_view text, const std::size_t* consumed,
                std::map<std::string, SourcePos>& positions)
        : dom_(root, false), text_(text), consumed_(consumed), positions_(positions) {}

    bool null() { return element() && dom_.null(); }
    bool boolean(bool v) { return element() && dom_.boolean(v); }
    bool number_integer(json::number_integer_t v) { return element() && dom_.number_integer(v); }
    bool number_unsigned(json::number_unsigned_t v) { return element() && dom_.number_unsigned(v); }
    bool number_float(json::number_float_t v, const std::string& s) {
        return element() && dom_.number_float(v, s);
    }
    bool string(std::string& v) { return element() && dom_.string(v); }
    bool binary(json::binary_t& v) { return element() && dom_.binary(v); }

    bool start_object(std::size_t n) {
        element();
        frames_.push_back({current_pointer(), false, 0});
        return dom_.start_object(n);
    }
    bool key(std::string& k) {
        const std::size_t end = *consumed_;
        const std::size_t start = end >= k.size() + 2 ? end - k.size() - 2 : 0;
        pending_ = frames_.back().pointer + "/" + escape_pointer_token(k);
        positions_[pending_] = position_of(text_, start);
        return dom_.key(k);
    }
    bool end_object() {
        frames_.pop_back();
        return dom_.end_object();
    }
    bool start_array(std::size_t n) {
        element();
        frames_.push_back({current_pointer(), true, 0});
        return dom_.start_array(n);
    }
    bool end_array() {
        frames_.pop_back();
        return dom_.end_array();
    }
    bool parse_error(std::size_t position, const std::string& last_token,
                     const nlohmann::detail::exception& ex) {
        std::string msg = ex.what();
        if (auto colon = msg.rfind(": "); colon != std::string::npos) msg = msg.substr(colon + 2);
        throw ParseError("malformed JSON near '" + last_token + "': " + msg,
                         position_of(text_, position == 0 ? 0 : position - 1));
    }

private:
    struct Frame {
        std::string pointer;
        bool array;
        std::size_t index;
    };

    // Called at the start of every value; assigns array element pointers.
    bool element() {
        if (!frames_.empty() && frames_.back().array) {
            Frame& f = frames_.back();
            pending_ = f.pointer + "/" + std::to_string(f.index++);
            const std::size_t at = *consumed_ > 0 ? *consumed_ - 1 : 0;
            positions_[pending_] = position_of(text_, at);
        } else if (frames_.empty()) {
            pending_ = "";
            positions_[""] = position_of(text_, *consumed_ > 0 ? *consumed_ - 1 : 0);
        }
        return true;
    }
    std::string current_pointer() const { return pending_; }

    nlohmann::detail::json_sax_dom_parser<json> dom_;
    std::string_view text_;
    const std::size_t* consumed_;
    std::map<std::string, SourcePos>& positions_;
    std::vector<Frame> frames_;
    std::string pending_;
};

std::string type_name(const nlohmann::json& v) { return v.type_name(); }

}  // namespace

ParseError::ParseError(const std::string& message, SourcePos pos)
    : std::runtime_error(describe(pos, message)), pos_(pos) {}

SourcePos LocatedJson::at(const std::string& pointer) const {
    std::string p = pointer;
    while (true) {
        if (auto it = positions.find(p); it != positions.end()) return it->second;
        if (p.empty()) return {};
        p = p.substr(0, p.rfind('/'));
    }
}

void LocatedJson::fail(const std::string& pointer, const std::string& message) const {
    throw ParseError(message + (pointer.empty() ? "" : " (at " + pointer + ")"), at(pointer));
}

LocatedJson parse_json(std::string_view text) {
    LocatedJson doc;
    std::size_t consumed = 0;
    LocatingSax sax(doc.value, text, &consumed, doc.positions);
    CountingIterator first(text.data(), text.data(), &consumed);
    CountingIterator last(text.data() + text.size(), text.data(), nullptr);
    nlohmann::json::sax_parse(first, last, &sax);
    return doc;
}

void check_members(const LocatedJson& doc, const std::string& pointer,
                   std::initializer_list<std::string_view> required,
                   std::initializer_list<std::string_view> optional) {
    const nlohmann::json& obj = doc.value.at(nlohmann::json::json_pointer(pointer));
    if (!obj.is_object()) doc.fail(pointer, "expected an object, found " + type_name(obj));
    for (const auto& [key, value] : obj.items()) {
        const bool known = std::find(required.begin(), required.end(), key) != required.end() ||
                           std::find(optional.begin(), optional.end(), key) != optional.end();
        if (!known) doc.fail(pointer + "/" + escape_pointer_token(key), "unknown field '" + key + "'");
    }
    for (std::string_view key : required)
        if (!obj.contains(std::string(key)))
            doc.fail(pointer, "missing required field '" + std::string(key) + "'");
}

namespace {

const nlohmann::json& member(const LocatedJson& doc, const std::string& pointer) {
    return doc.value.at(nlohmann::json::json_pointer(pointer));
}

std::string expect_string(const LocatedJson& doc, const std::string& pointer) {
    const auto& v = member(doc, pointer);
    if (!v.is_string()) doc.fail(pointer, "expected a string, found " + type_name(v));
    return v.get<std::string>();
}

Endpoint parse_endpoint(const LocatedJson& doc, const std::string& pointer) {
    const auto& v = member(doc, pointer);
    if (!v.is_array() || v.size() != 2)
        doc.fail(pointer, "endpoint must be [part, component]");
    if (!v[0].is_number_integer() || (v[0].get<long>() != 0 && v[0].get<long>() != 1))
        doc.fail(pointer + "/0", "part must be 0 or 1");
    if (!v[1].is_string()) doc.fail(pointer + "/1", "component must be a string");
    return {static_cast<int>(v[0].get<long>()), v[1].get<std::string>()};
}

}  // namespace

DGASpec parse_spec(std::string_view text) {
    const LocatedJson doc = parse_json(text);
    check_members(doc, "", {"name", "chords", "differential"}, {"note", "manifest"});
    if (doc.value.contains("manifest") && !doc.value["manifest"].is_object())
        doc.fail("/manifest", "manifest must be an object");
    const std::string name = expect_string(doc, "/name");
    const std::string note = doc.value.contains("note") ? expect_string(doc, "/note") : "";

    const auto& chords_json = member(doc, "/chords");
    if (!chords_json.is_array()) doc.fail("/chords", "chords must be a list");
    std::vector<Chord> chords;
    std::set<std::string> seen;
    for (std::size_t k = 0; k < chords_json.size(); ++k) {
        const std::string ptr = "/chords/" + std::to_string(k);
        check_members(doc, ptr, {"id", "from", "to", "action"}, {"degree"});
        Chord c;
        c.id = expect_string(doc, ptr + "/id");
        if (c.id.empty()) doc.fail(ptr + "/id", "chord id must be non-empty");
        if (!seen.insert(c.id).second) doc.fail(ptr + "/id", "duplicate chord id '" + c.id + "'");
        c.source = parse_endpoint(doc, ptr + "/from");
        c.target = parse_endpoint(doc, ptr + "/to");
        try {
            c.action = parse_rational(expect_string(doc, ptr + "/action"));
        } catch (const RationalParseError& e) {
            doc.fail(ptr + "/action", e.what());
        }
        if (chords_json[k].contains("degree")) {
            const auto& d = chords_json[k]["degree"];
            if (!d.is_number_integer()) doc.fail(ptr + "/degree", "degree must be an integer");
            c.degree = d.get<long>();
        }
        chords.push_back(std::move(c));
    }

    const auto& diff_json = member(doc, "/differential");
    if (!diff_json.is_object()) doc.fail("/differential", "differential must be a map id -> words");
    IdDifferential diff;
    for (const auto& [id, words] : diff_json.items()) {
        const std::string ptr = "/differential/" + escape_pointer_token(id);
        if (!seen.contains(id)) doc.fail(ptr, "differential of unknown chord '" + id + "'");
        if (!words.is_array()) doc.fail(ptr, "expected a list of words");
        auto& entry = diff[id];
        for (std::size_t w = 0; w < words.size(); ++w) {
            const std::string wptr = ptr + "/" + std::to_string(w);
            if (!words[w].is_array()) doc.fail(wptr, "a word is a list of chord ids");
            std::vector<std::string> letters;
            for (std::size_t l = 0; l < words[w].size(); ++l) {
                const std::string lptr = wptr + "/" + std::to_string(l);
                const std::string letter = expect_string(doc, lptr);
                if (!seen.contains(letter)) doc.fail(lptr, "unknown chord '" + letter + "'");
                letters.push_back(letter);
            }
            entry.push_back(std::move(letters));
        }
    }
    return DGASpec(name, std::move(chords), diff, note);
}

std::string spec_to_json(const DGASpec& spec) {
    nlohmann::ordered_json out;
    out["name"] = spec.name();
    if (!spec.note().empty()) out["note"] = spec.note();
    out["chords"] = nlohmann::ordered_json::array();
    nlohmann::ordered_json diff = nlohmann::ordered_json::object();
    for (ChordIndex i = 0; i < spec.size(); ++i) {
        const Chord& c = spec.chord(i);
        nlohmann::ordered_json cj;
        cj["id"] = c.id;
        cj["from"] = {c.source.part, c.source.component};
        cj["to"] = {c.target.part, c.target.component};
        cj["action"] = to_string(c.action);
        if (c.degree) cj["degree"] = *c.degree;
        out["chords"].push_back(std::move(cj));
        if (spec.differential(i).empty()) continue;
        nlohmann::ordered_json words = nlohmann::ordered_json::array();
        for (const Word& w : spec.differential(i)) words.push_back(spec.ids_of(w));
        diff[c.id] = std::move(words);
    }
    out["differential"] = std::move(diff);
    return out.dump(2) + "\n";
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string RunManifest::lines(std::string_view prefix) const {
    std::string out;
    auto line = [&](const std::string& s) {
        out += prefix;
        out += "manifest ";
        out += s;
        out += '\n';
    };
    line("tool " + tool_version);
    line("command " + command);
    for (const auto& [name, digest] : inputs) line("input " + name + " sha256:" + digest);
    for (const auto& [key, value] : parameters) line("param " + key + " " + value);
    return out;
}

std::string format_barcode(const Barcode& barcode, const RunManifest* manifest,
                           const std::vector<std::string>& notes) {
    std::string out;
    if (manifest) out += manifest->lines("# ");
    for (const auto& n : notes) out += "# " + n + "\n";
    if (barcode.truncation()) out += "# truncation " + to_string(*barcode.truncation()) + "\n";
    for (const Bar& b : barcode.bars()) {
        out += to_string(b.birth);
        out += ' ';
        if (b.death.is_infinite()) out += "inf";
        else if (b.death.is_censored()) out += "cens@" + to_string(b.death.at());
        else out += to_string(b.death.at());
        out += ' ';
        out += std::to_string(b.multiplicity);
        out += '\n';
    }
    return out;
}

Barcode parse_barcode(std::string_view text) {
    std::vector<Bar> bars;
    std::optional<Action> truncation;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream fields(line);
        std::vector<std::string> tok;
        for (std::string t; fields >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        const auto col = [&](std::size_t k) {
            return SourcePos{line_no, line.find(tok[k]) + 1};
        };
        if (tok[0].front() == '#') {
            if (tok.size() == 3 && tok[0] == "#" && tok[1] == "truncation") {
                try {
                    truncation = parse_rational(tok[2]);
                } catch (const RationalParseError& e) {
                    throw ParseError(e.what(), col(2));
                }
            }
            continue;
        }
        if (tok.size() != 3)
            throw ParseError("expected 'birth death multiplicity'", {line_no, 1});
        Bar bar{0, Death::infinite(), 1};
        try {
            bar.birth = parse_rational(tok[0]);
        } catch (const RationalParseError& e) {
            throw ParseError(e.what(), col(0));
        }
        try {
            if (tok[1] == "inf") bar.death = Death::infinite();
            else if (tok[1].starts_with("cens@")) bar.death = Death::censored(parse_rational(tok[1].substr(5)));
            else bar.death = Death::finite(parse_rational(tok[1]));
        } catch (const RationalParseError& e) {
            throw ParseError(e.what(), col(1));
        }
        const std::string& m = tok[2];
        if (m.empty() || !std::all_of(m.begin(), m.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
            m.size() > 18)
            throw ParseError("multiplicity must be a positive integer", col(2));
        bar.multiplicity = std::stoull(m);
        try {
            Barcode check({bar});
        } catch (const std::exception& e) {
            throw ParseError(e.what(), {line_no, 1});
        }
        bars.push_back(std::move(bar));
    }
    try {
        return Barcode(std::move(bars), truncation);
    } catch (const std::exception& e) {
        throw ParseError(e.what(), {line_no, 1});
    }
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_svg(const Barcode& barcode, std::string_view title, const RunManifest* manifest) {
    const double width = 720, left = 70, right = 60, top = 40, row = 18;
    const double plot_w = width - left - right;
    const std::size_t n = barcode.bars().size();
    const double height = top + row * static_cast<double>(std::max<std::size_t>(n, 1)) + 60;

    std::set<Action> marks;
    for (const Bar& b : barcode.bars()) {
        marks.insert(b.birth);
        if (!b.death.is_infinite()) marks.insert(b.death.at());
    }
    if (barcode.truncation()) marks.insert(*barcode.truncation());
    double lo = 1, hi = 2;
    if (!marks.empty()) {
        lo = to_double_down(*marks.begin());
        hi = to_double_up(*marks.rbegin());
        if (!(hi > lo)) hi = 2 * lo;
    }
    const double span = std::log(hi) - std::log(lo);
    auto x_of = [&](const Action& v) {
        return left + (std::log(to_double_up(v)) - std::log(lo)) / span * plot_w;
    };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    if (manifest) {
        svg << "<!--\n" << manifest->lines("") << "-->\n";
    }
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
        << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height) << "\">\n";
    svg << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"8\" "
           "markerHeight=\"8\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"black\"/></marker></defs>\n";
    svg << "<text x=\"" << fmt(left) << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">"
        << xml_escape(title) << "</text>\n";

    for (std::size_t k = 0; k < n; ++k) {
        const Bar& b = barcode.bars()[k];
        const double y = top + row * (static_cast<double>(k) + 0.5);
        const double x0 = x_of(b.birth);
        double x1 = width - right / 2;
        std::string extra;
        if (b.death.is_finite()) {
            x1 = x_of(b.death.at());
        } else if (b.death.is_censored()) {
            x1 = x_of(b.death.at());
            extra = " stroke-dasharray=\"6 4\"";
        } else {
            extra = " marker-end=\"url(#arrow)\"";
        }
        svg << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(x1) << "\" y2=\""
            << fmt(y) << "\" stroke=\"black\" stroke-width=\"2\"" << extra << "/>\n";
        if (b.multiplicity > 1)
            svg << "<text x=\"" << fmt(x0 - 6) << "\" y=\"" << fmt(y + 4)
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">x"
                << b.multiplicity << "</text>\n";
    }

    const double axis_y = top + row * static_cast<double>(std::max<std::size_t>(n, 1)) + 10;
    svg << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(axis_y) << "\" x2=\"" << fmt(left + plot_w)
        << "\" y2=\"" << fmt(axis_y) << "\" stroke=\"gray\"/>\n";
    std::vector<Action> ticks(marks.begin(), marks.end());
    if (ticks.size() > 12) ticks = {ticks.front(), ticks.back()};
    for (const Action& t : ticks) {
        const double x = x_of(t);
        svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(axis_y) << "\" x2=\"" << fmt(x) << "\" y2=\""
            << fmt(axis_y + 5) << "\" stroke=\"gray\"/>\n";
        svg << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(axis_y + 18)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
            << xml_escape(to_string(t)) << "</text>\n";
    }
    svg << "<text x=\"" << fmt(left + plot_w) << "\" y=\"" << fmt(axis_y + 36)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">action (log scale)</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace lchpm::io
