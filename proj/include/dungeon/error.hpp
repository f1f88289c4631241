#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dungeon {

enum class Errc {
    WrongDimensions,
    UnknownGlyph,
    EntranceCount,
    ExitCount,
    StructurallyInvalid,
    OutOfBounds,
    InvalidKind,
    InfeasibleForM1,
    EmptyTargetSet,
    IndexSetMismatch,
    EmptySubpopulation,
    StructurallyInvalidParent,
    BudgetExhausted,
    PaddingExhausted,
    InvalidParams,
    EmptyUserId,
    NotAtStart,
    NotStarted,
    DuplicateDecision,
    InvalidMap,
    SessionComplete,
    SessionIncomplete,
    UnknownSuggestionIndex,
    TooFewSamples,
    ZeroVariance,
    Journal,
};

constexpr std::string_view errc_name(Errc e) noexcept
{
    switch (e) {
    case Errc::WrongDimensions: return "wrong_dimensions";
    case Errc::UnknownGlyph: return "unknown_glyph";
    case Errc::EntranceCount: return "entrance_count";
    case Errc::ExitCount: return "exit_count";
    case Errc::StructurallyInvalid: return "structurally_invalid";
    case Errc::OutOfBounds: return "out_of_bounds";
    case Errc::InvalidKind: return "invalid_kind";
    case Errc::InfeasibleForM1: return "infeasible_for_m1";
    case Errc::EmptyTargetSet: return "empty_target_set";
    case Errc::IndexSetMismatch: return "index_set_mismatch";
    case Errc::EmptySubpopulation: return "empty_subpopulation";
    case Errc::StructurallyInvalidParent: return "structurally_invalid_parent";
    case Errc::BudgetExhausted: return "budget_exhausted";
    case Errc::PaddingExhausted: return "padding_exhausted";
    case Errc::InvalidParams: return "invalid_params";
    case Errc::EmptyUserId: return "empty_user_id";
    case Errc::NotAtStart: return "not_at_start";
    case Errc::NotStarted: return "not_started";
    case Errc::DuplicateDecision: return "duplicate_decision";
    case Errc::InvalidMap: return "invalid_map";
    case Errc::SessionComplete: return "session_complete";
    case Errc::SessionIncomplete: return "session_incomplete";
    case Errc::UnknownSuggestionIndex: return "unknown_suggestion_index";
    case Errc::TooFewSamples: return "too_few_samples";
    case Errc::ZeroVariance: return "zero_variance";
    case Errc::Journal: return "journal";
    }
    return "unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (CLI exit codes, HTTP status mapping) can dispatch on it.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what)
        , code_(code)
    {
    }

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace dungeon
