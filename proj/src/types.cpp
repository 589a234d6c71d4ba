#include "caresim/types.h"

namespace caresim {

std::string_view to_string(SesGroup g) noexcept {
    switch (g) {
    case SesGroup::A: return "A";
    case SesGroup::B: return "B";
    case SesGroup::C1: return "C1";
    case SesGroup::C2: return "C2";
    case SesGroup::D: return "D";
    }
    return "?";
}

std::string_view to_string(Sex s) noexcept { return s == Sex::Male ? "M" : "F"; }

std::string_view to_string(Status s) noexcept {
    switch (s) {
    case Status::Child: return "child";
    case Status::Teenager: return "teenager";
    case Status::Student: return "student";
    case Status::Employed: return "employed";
    case Status::Unemployed: return "unemployed";
    case Status::Retired: return "retired";
    }
    return "?";
}

std::string_view to_string(CareNeedLevel l) noexcept {
    switch (l) {
    case CareNeedLevel::None: return "none";
    case CareNeedLevel::Low: return "low";
    case CareNeedLevel::Moderate: return "moderate";
    case CareNeedLevel::Substantial: return "substantial";
    case CareNeedLevel::Critical: return "critical";
    }
    return "?";
}

std::string_view to_string(Policy p) noexcept {
    switch (p) {
    case Policy::None: return "none";
    case Policy::TaxDeduction: return "tax";
    case Policy::DirectFunding: return "direct";
    }
    return "?";
}

std::optional<SesGroup> parse_ses(std::string_view text) noexcept {
    for (auto g : kAllSes) {
        if (text == to_string(g)) {
            return g;
        }
    }
    return std::nullopt;
}

std::optional<Sex> parse_sex(std::string_view text) noexcept {
    if (text == "M" || text == "m" || text == "male") {
        return Sex::Male;
    }
    if (text == "F" || text == "f" || text == "female") {
        return Sex::Female;
    }
    return std::nullopt;
}

std::optional<Policy> parse_policy(std::string_view text) noexcept {
    if (text == "none") return Policy::None;
    if (text == "tax" || text == "tax_deduction") return Policy::TaxDeduction;
    if (text == "direct" || text == "direct_funding") return Policy::DirectFunding;
    return std::nullopt;
}

} // namespace caresim
