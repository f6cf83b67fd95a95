#include "lchpm/z2_linalg.hpp"

#include <algorithm>
#include <iterator>
#include <string>
#include <unordered_map>

namespace lchpm::z2 {

Z2Column::Z2Column(std::vector<std::size_t> entries) : entries_(std::move(entries)) {
    for (std::size_t k = 1; k < entries_.size(); ++k)
        if (entries_[k - 1] >= entries_[k])
            throw std::invalid_argument("Z2Column: entries must be strictly increasing");
}

std::optional<std::size_t> Z2Column::low() const {
    if (entries_.empty()) return std::nullopt;
    return entries_.back();
}

Z2Column& Z2Column::operator+=(const Z2Column& other) {
    std::vector<std::size_t> out;
    out.reserve(entries_.size() + other.entries_.size());
    std::set_symmetric_difference(entries_.begin(), entries_.end(), other.entries_.begin(),
                                  other.entries_.end(), std::back_inserter(out));
    entries_ = std::move(out);
    return *this;
}

Z2Column add_columns(const Z2Column& a, const Z2Column& b) { return a + b; }

ReducedMatrix reduce(std::span<const Z2Column> columns) {
    ReducedMatrix out;
    out.columns.assign(columns.begin(), columns.end());
    const std::size_t n = columns.size();

    for (std::size_t j = 0; j < n; ++j) {
        if (auto l = out.columns[j].low(); l && *l >= j)
            throw FiltrationViolation("column " + std::to_string(j) + " contains row " +
                                      std::to_string(*l) + " not below its own position");
    }

    // low row -> column owning that low
    std::vector<std::size_t> owner(n, n);
    std::vector<bool> is_pivot(n, false);
    for (std::size_t j = 0; j < n; ++j) {
        Z2Column& col = out.columns[j];
        while (auto l = col.low()) {
            if (owner[*l] == n) {
                owner[*l] = j;
                is_pivot[*l] = true;
                out.pairings.emplace(j, *l);
                break;
            }
            col += out.columns[owner[*l]];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!is_pivot[i] && out.columns[i].empty()) out.essentials.push_back(i);
    return out;
}

std::size_t rank(std::span<const Z2Column> columns) {
    std::unordered_map<std::size_t, Z2Column> by_low;
    std::size_t r = 0;
    for (const Z2Column& c : columns) {
        Z2Column col = c;
        while (auto l = col.low()) {
            auto it = by_low.find(*l);
            if (it == by_low.end()) {
                by_low.emplace(*l, std::move(col));
                ++r;
                break;
            }
            col += it->second;
        }
    }
    return r;
}

}  // namespace lchpm::z2
