#pragma once

// File formats: the DGA spec (JSON, strict schema), the line-oriented barcode
// record, run manifests, and SVG barcode rendering.

#include "lchpm/ce_dga.hpp"
#include "lchpm/persistence.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lchpm::io {

inline constexpr std::string_view kToolVersion = "lchpm 1.0.0";

struct SourcePos {
    std::size_t line = 1;
    std::size_t column = 1;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, SourcePos pos);
    SourcePos position() const { return pos_; }

private:
    SourcePos pos_;
};

/// Parsed JSON plus the source position of every object member and array
/// element, keyed by JSON pointer ("" is the root).
struct LocatedJson {
    nlohmann::json value;
    std::map<std::string, SourcePos> positions;

    /// Position of `pointer`, or of its nearest recorded ancestor.
    SourcePos at(const std::string& pointer) const;
    [[noreturn]] void fail(const std::string& pointer, const std::string& message) const;
};

/// Throws ParseError on malformed JSON.
LocatedJson parse_json(std::string_view text);

/// Rejects members of `pointer` other than `allowed`; checks `required` exist.
void check_members(const LocatedJson& doc, const std::string& pointer,
                   std::initializer_list<std::string_view> required,
                   std::initializer_list<std::string_view> optional = {});

/// DGA spec file. Throws ParseError (schema or syntax) with line/column.
DGASpec parse_spec(std::string_view text);
/// Canonical JSON rendering; parse_spec(spec_to_json(s)) reproduces s.
std::string spec_to_json(const DGASpec& spec);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view data);

/// Provenance block embedded in every output file. No wall time is stored, so
/// identical manifests go with byte-identical outputs.
struct RunManifest {
    std::string command;
    /// (input name, sha256 of its bytes)
    std::vector<std::pair<std::string, std::string>> inputs;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::string tool_version{kToolVersion};

    /// One "<prefix>manifest ..." line per field.
    std::string lines(std::string_view prefix) const;
};

/// "birth death multiplicity" lines with death in {p/q, inf, cens@p/q},
/// preceded by '#' comment lines (manifest, notes, "# truncation r").
std::string format_barcode(const Barcode& barcode, const RunManifest* manifest = nullptr,
                           const std::vector<std::string>& notes = {});
/// Inverse of format_barcode. Comments are ignored except "# truncation r".
Barcode parse_barcode(std::string_view text);

/// One horizontal segment per bar on a logarithmic action axis; infinite
/// bars end in an arrowhead, censored bars are dashed.
std::string render_svg(const Barcode& barcode, std::string_view title,
                       const RunManifest* manifest = nullptr);

}  // namespace lchpm::io
