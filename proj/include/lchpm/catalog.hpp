#pragma once

// Named spec generators reachable from the command line and from scenario
// files: `<name> key=value ...`.

#include "lchpm/ce_dga.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lchpm {

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using GeneratorParams = std::map<std::string, std::string>;

/// Splits "key=value" tokens. Throws UsageError on a token without '=' or a
/// repeated key.
GeneratorParams parse_params(const std::vector<std::string>& tokens);

std::vector<std::string> generator_names();

/// Parameters (UsageError on unknown or missing ones):
///   two_fiber, stabilized_two_fiber: L
///   two_chord: a, A, case (1: dA = 0, 2: dA = a)
///   morse_circle: values (e.g. "min:1,max:4,min:2,max:3"), offset (optional)
///   stabilize: spec (path to a spec file), delta
///   random: seed (or the fallback), chords, dup (0/1), density
DGASpec generate_spec(const std::string& name, const GeneratorParams& params,
                      std::optional<std::uint64_t> fallback_seed = std::nullopt);

}  // namespace lchpm
