#pragma once

// Action-filtered Legendrian contact homology of the 01-subspace.

#include "lchpm/ce_dga.hpp"
#include "lchpm/persistence.hpp"

#include <cstddef>
#include <stdexcept>

namespace lchpm {

struct LCHOptions {
    std::size_t basis_cap = 100000;
};

struct LCHResult {
    Barcode barcode;
    std::size_t basis_size = 0;
    /// All bars alive at the truncation are genuinely infinite.
    bool certified_infinite = false;
    Action truncation;
};

class ValidationFailed : public std::invalid_argument {
public:
    ValidationFailed(ValidationReport report, const std::string& what)
        : std::invalid_argument(what), report_(std::move(report)) {}
    const ValidationReport& report() const { return report_; }

private:
    ValidationReport report_;
};

/// Barcode of V(Lambda_0, Lambda_1) computed on A_{r_max}.
/// Throws ValidationFailed, BudgetExceeded.
LCHResult lch_barcode(const DGASpec& spec, const Action& r_max, const LCHOptions& options = {});

/// True iff every chord occurring in some 01-composable word has zero
/// differential. Then the differential vanishes on the 01-subspace.
bool certify_infinite(const DGASpec& spec);

/// True iff the 01-subspace is finite-dimensional and all of it lies in
/// A_{r_max}, so the truncated complex is the whole complex.
bool complete_below(const DGASpec& spec, const Action& r_max);

/// Result for the form c*lambda: endpoints and truncation multiplied by c.
LCHResult rescale_form(const LCHResult& res, const Rational& c);

}  // namespace lchpm
