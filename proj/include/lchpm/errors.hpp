#pragma once

#include <stdexcept>

namespace lchpm {

/// Two chord lengths given in the wrong order (|a| >= |A|).
class OrderingViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace lchpm
