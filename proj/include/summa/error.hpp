#pragma once

#include <stdexcept>
#include <string>

namespace summa {

enum class errc {
    insufficient_horizon,
    unsupported_ideal,
    unsupported_norm_context,
    empty_evaluation,
    rejected_sample,
    not_rank_one,
    horizon_exhausted,
    hypothesis_failed,
    not_divergent,
    zero_operator,
    invalid_family,
    unknown_name,
    parse_error,
};

inline const char* errc_name(errc c) noexcept
{
    switch (c) {
    case errc::insufficient_horizon: return "InsufficientHorizon";
    case errc::unsupported_ideal: return "UnsupportedIdeal";
    case errc::unsupported_norm_context: return "UnsupportedNormContext";
    case errc::empty_evaluation: return "EmptyEvaluation";
    case errc::rejected_sample: return "RejectedSample";
    case errc::not_rank_one: return "NotRankOne";
    case errc::horizon_exhausted: return "HorizonExhausted";
    case errc::hypothesis_failed: return "HypothesisFailed";
    case errc::not_divergent: return "NotDivergent";
    case errc::zero_operator: return "ZeroOperator";
    case errc::invalid_family: return "InvalidFamily";
    case errc::unknown_name: return "UnknownName";
    case errc::parse_error: return "ParseError";
    }
    return "Unknown";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what, long stage = -1)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code), stage_(stage)
    {
    }

    errc code() const noexcept { return code_; }
    // Stage index for HorizonExhausted / NotDivergent; -1 otherwise.
    long stage() const noexcept { return stage_; }

private:
    errc code_;
    long stage_;
};

} // namespace summa
