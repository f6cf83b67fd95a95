#pragma once

// Sparse linear algebra over the two-element field.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace lchpm::z2 {

/// Support of a vector over Z/2: strictly increasing row indices.
class Z2Column {
public:
    Z2Column() = default;
    /// Throws std::invalid_argument unless `entries` is strictly increasing.
    explicit Z2Column(std::vector<std::size_t> entries);
    Z2Column(std::initializer_list<std::size_t> entries)
        : Z2Column(std::vector<std::size_t>(entries)) {}

    const std::vector<std::size_t>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    /// Largest row index, if any.
    std::optional<std::size_t> low() const;

    Z2Column& operator+=(const Z2Column& other);
    friend Z2Column operator+(Z2Column a, const Z2Column& b) { return a += b; }
    friend bool operator==(const Z2Column&, const Z2Column&) = default;

private:
    std::vector<std::size_t> entries_;
};

/// Symmetric difference of supports.
Z2Column add_columns(const Z2Column& a, const Z2Column& b);

struct ReducedMatrix {
    std::vector<Z2Column> columns;
    /// column index -> pivot row index
    std::map<std::size_t, std::size_t> pairings;
    /// Positions whose column is zero and which are never a pivot row.
    std::vector<std::size_t> essentials;
};

class FiltrationViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Standard left-to-right persistence reduction. Column j may only contain
/// rows < j; otherwise FiltrationViolation is thrown.
ReducedMatrix reduce(std::span<const Z2Column> columns);

/// Number of linearly independent columns. Row indices are unrestricted.
std::size_t rank(std::span<const Z2Column> columns);

}  // namespace lchpm::z2
