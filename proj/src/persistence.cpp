#include "lchpm/persistence.hpp"

#include <algorithm>
#include <map>

namespace lchpm {

const Action& Death::at() const {
    if (kind_ == Kind::infinite) throw std::logic_error("Death::at() on an infinite death");
    return at_;
}

bool operator<(const Death& a, const Death& b) {
    if (a.is_infinite() || b.is_infinite()) return !a.is_infinite() && b.is_infinite();
    if (a.at_ != b.at_) return a.at_ < b.at_;
    return a.kind_ == Death::Kind::finite && b.kind_ == Death::Kind::censored;
}

Barcode::Barcode(std::vector<Bar> bars, std::optional<Action> truncation)
    : truncation_(std::move(truncation)) {
    std::vector<Bar> kept;
    kept.reserve(bars.size());
    for (Bar& bar : bars) {
        if (bar.multiplicity == 0) throw InvalidBar("bar with zero multiplicity");
        if (bar.birth <= 0) throw InvalidBar("bar birth must be positive, got " + to_string(bar.birth));
        if (bar.death.is_finite()) {
            if (bar.death.at() < bar.birth)
                throw InvalidBar("bar death " + to_string(bar.death.at()) + " precedes birth " +
                                 to_string(bar.birth));
            if (bar.death.at() == bar.birth) continue;
        } else if (bar.death.is_censored() && bar.death.at() <= bar.birth) {
            throw InvalidBar("censoring bound must exceed birth");
        }
        kept.push_back(std::move(bar));
    }
    std::sort(kept.begin(), kept.end(), [](const Bar& x, const Bar& y) {
        if (x.birth != y.birth) return x.birth < y.birth;
        return x.death < y.death;
    });
    for (Bar& bar : kept) {
        if (!bars_.empty() && bars_.back().birth == bar.birth && bars_.back().death == bar.death)
            bars_.back().multiplicity += bar.multiplicity;
        else
            bars_.push_back(std::move(bar));
    }
}

std::size_t Barcode::total_multiplicity() const {
    std::size_t total = 0;
    for (const Bar& b : bars_) total += b.multiplicity;
    return total;
}

Barcode barcode_from_filtered_complex(std::span<const FilteredGenerator> basis,
                                      std::span<const z2::Z2Column> boundaries,
                                      const Action& r_max) {
    if (basis.size() != boundaries.size())
        throw std::invalid_argument("basis and boundary counts differ");
    for (std::size_t j = 0; j < basis.size(); ++j) {
        if (j > 0 && basis[j].action < basis[j - 1].action)
            throw std::invalid_argument("basis is not sorted by action");
        if (basis[j].action >= r_max)
            throw std::invalid_argument("basis element '" + basis[j].id +
                                        "' has action at or above the truncation bound");
        for (std::size_t row : boundaries[j].entries()) {
            if (row >= basis.size() || basis[row].action >= basis[j].action)
                throw ActionNotLowered("boundary of '" + basis[j].id +
                                       "' does not strictly lower the action");
        }
    }
    // Strict action lowering implies rows precede columns in any sorted order.
    const z2::ReducedMatrix reduced = z2::reduce(boundaries);

    std::vector<Bar> bars;
    for (const auto& [column, row] : reduced.pairings)
        bars.push_back({basis[row].action, Death::finite(basis[column].action), 1});
    for (std::size_t row : reduced.essentials)
        bars.push_back({basis[row].action, Death::censored(r_max), 1});
    return Barcode(std::move(bars), r_max);
}

std::size_t rank_between(const Barcode& b, const Action& s, const Action& t) {
    if (s <= 0 || t < s) throw std::invalid_argument("rank_between requires 0 < s <= t");
    if (b.truncation() && t > *b.truncation())
        throw BeyondTruncation("t = " + to_string(t) + " exceeds truncation " +
                               to_string(*b.truncation()));
    std::size_t count = 0;
    for (const Bar& bar : b.bars()) {
        if (!(bar.birth < s)) continue;
        if (bar.death.is_infinite() || bar.death.at() >= t) count += bar.multiplicity;
    }
    return count;
}

Barcode multiplicative_shift(const Barcode& b, const Rational& c) {
    if (c <= 0) throw std::invalid_argument("multiplicative shift requires c > 0");
    std::vector<Bar> bars;
    bars.reserve(b.bars().size());
    for (const Bar& bar : b.bars()) {
        Death d = bar.death;
        if (d.is_finite()) d = Death::finite(d.at() / c);
        else if (d.is_censored()) d = Death::censored(d.at() / c);
        bars.push_back({bar.birth / c, d, bar.multiplicity});
    }
    std::optional<Action> trunc;
    if (b.truncation()) trunc = *b.truncation() / c;
    return Barcode(std::move(bars), trunc);
}

Barcode additive_shift(const Barcode& b, const Rational& c, std::vector<Bar>* dropped) {
    if (c < 0) throw std::invalid_argument("additive shift requires c >= 0");
    std::vector<Bar> bars;
    for (const Bar& bar : b.bars()) {
        Action birth = bar.birth - c;
        if (birth <= 0) {
            if (dropped) dropped->push_back(bar);
            continue;
        }
        Death d = bar.death;
        if (d.is_finite()) d = Death::finite(d.at() - c);
        else if (d.is_censored()) d = Death::censored(d.at() - c);
        bars.push_back({birth, d, bar.multiplicity});
    }
    std::optional<Action> trunc;
    if (b.truncation()) trunc = *b.truncation() - c;
    return Barcode(std::move(bars), trunc);
}

LMinResult l_min_s(const Barcode& b, const ExtendedRational& s) {
    if (s.is_finite() && s.value() <= 1) throw std::invalid_argument("l_min_s requires s > 1");
    LMinResult out;
    std::optional<Action> maybe;  // smallest birth of a censored bar that could qualify
    for (const Bar& bar : b.bars()) {
        bool qualifies = false;
        bool could = false;
        switch (bar.death.kind()) {
            case Death::Kind::infinite: qualifies = true; break;
            case Death::Kind::finite:
                qualifies = s.is_finite() && bar.death.at() > s.value() * bar.birth;
                break;
            case Death::Kind::censored:
                // death >= bound; certain only if the bound already clears s.
                if (s.is_finite() && bar.death.at() > s.value() * bar.birth) qualifies = true;
                else could = true;
                break;
        }
        if (qualifies && (out.value.is_infinite() || bar.birth < out.value.value()))
            out.value = bar.birth;
        if (could && (!maybe || bar.birth < *maybe)) maybe = bar.birth;
    }
    if (maybe && (out.value.is_infinite() || *maybe < out.value.value())) out.uncertain = true;
    return out;
}

Bondedness is_homologically_bonded(const Barcode& b) {
    bool censored = false;
    for (const Bar& bar : b.bars()) {
        if (bar.death.is_infinite()) return Bondedness::yes;
        censored = censored || bar.death.is_censored();
    }
    return censored ? Bondedness::unknown : Bondedness::no;
}

std::string to_string(Bondedness b) {
    switch (b) {
        case Bondedness::yes: return "yes";
        case Bondedness::no: return "no";
        case Bondedness::unknown: return "unknown";
    }
    return "unknown";
}

}  // namespace lchpm
