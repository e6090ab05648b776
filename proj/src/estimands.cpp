#include "aggtreat/estimands.hpp"

namespace aggtreat {

std::string to_string(EstimandKind kind) {
    switch (kind) {
        case EstimandKind::matt: return "matt";
        case EstimandKind::satt: return "satt";
        case EstimandKind::att: return "att";
        case EstimandKind::aatt: return "aatt";
        case EstimandKind::scaled_aatt: return "scaled_aatt";
        case EstimandKind::delta: return "delta";
        case EstimandKind::amatt_plus: return "amatt_plus";
        case EstimandKind::amatt_tilde: return "amatt_tilde";
        case EstimandKind::overall_delta: return "overall_delta";
        case EstimandKind::overall_amatt_plus: return "overall_amatt_plus";
        case EstimandKind::overall_aatt: return "overall_aatt";
        case EstimandKind::overall_scaled_aatt: return "overall_scaled_aatt";
        case EstimandKind::alpha1: return "alpha1";
    }
    return "unknown";
}

EstimandKind estimand_kind_from_string(const std::string& name) {
    for (int i = 0; i <= static_cast<int>(EstimandKind::alpha1); ++i) {
        EstimandKind kind = static_cast<EstimandKind>(i);
        if (to_string(kind) == name) return kind;
    }
    throw ValidationError("unknown estimand kind: " + name);
}

bool is_overall(EstimandKind kind) {
    switch (kind) {
        case EstimandKind::overall_delta:
        case EstimandKind::overall_amatt_plus:
        case EstimandKind::overall_aatt:
        case EstimandKind::overall_scaled_aatt:
            return true;
        default:
            return false;
    }
}

std::string EstimandRequest::label() const {
    std::string out = to_string(kind);
    if (hi) out += "(" + hi->str() + (lo ? "|" + lo->str() : "") + ")";
    else if (level) out += "(" + std::to_string(*level) + ")";
    return out;
}

std::vector<EstimandRequest> summary_requests() {
    std::vector<EstimandRequest> out;
    out.push_back({EstimandKind::alpha1, std::nullopt, std::nullopt, std::nullopt});
    out.push_back({EstimandKind::overall_delta, std::nullopt, std::nullopt, std::nullopt});
    out.push_back({EstimandKind::overall_amatt_plus, std::nullopt, std::nullopt, std::nullopt});
    out.push_back({EstimandKind::overall_aatt, std::nullopt, std::nullopt, std::nullopt});
    out.push_back({EstimandKind::overall_scaled_aatt, std::nullopt, std::nullopt, std::nullopt});
    return out;
}

bool needs_subtreatment_data(EstimandKind kind) {
    switch (kind) {
        case EstimandKind::matt:
        case EstimandKind::satt:
        case EstimandKind::att:
        case EstimandKind::amatt_plus:
        case EstimandKind::amatt_tilde:
        case EstimandKind::overall_amatt_plus:
            return true;
        default:
            return false;
    }
}

bool carries_incongruent_comparisons(EstimandKind kind) {
    switch (kind) {
        case EstimandKind::delta:
        case EstimandKind::overall_delta:
        case EstimandKind::alpha1:
            return true;
        default:
            return false;
    }
}

}  // namespace aggtreat
