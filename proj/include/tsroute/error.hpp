#pragma once

#include <stdexcept>
#include <string>

namespace tsroute {

/// Error taxonomy shared across the toolkit. Every failure carries one code
/// so callers (and tests) can dispatch without parsing messages.
enum class ErrorCode {
	// ingestion / data model
	MissingColumn,
	NonUniformSpacing,
	NonFiniteValue,
	DuplicateTimestamp,
	HorizonTooLong,
	// transforms
	DegenerateSeries,
	DomainError,
	// features
	TooShort,
	InvalidPeriod,
	// router
	MismatchedIds,
	CorpusTooSmall,
	// forecasters
	HistoryTooShort,
	InsufficientTraining,
	SingularSystem,
	FeatureStarvation,
	Timeout,
	MalformedResponse,
	LengthMismatch,
	NotFound,
	// evaluation
	MissingForecast,
	// cost / pareto
	AlphaOutOfRange,
	CurveTooShort,
	MissingModelResult,
	MissingEndpoints,
	// plumbing
	ParseError,
	IoError,
	InvalidArgument,
};

inline const char* to_string(ErrorCode code) {
	switch (code) {
		case ErrorCode::MissingColumn: return "MissingColumn";
		case ErrorCode::NonUniformSpacing: return "NonUniformSpacing";
		case ErrorCode::NonFiniteValue: return "NonFiniteValue";
		case ErrorCode::DuplicateTimestamp: return "DuplicateTimestamp";
		case ErrorCode::HorizonTooLong: return "HorizonTooLong";
		case ErrorCode::DegenerateSeries: return "DegenerateSeries";
		case ErrorCode::DomainError: return "DomainError";
		case ErrorCode::TooShort: return "TooShort";
		case ErrorCode::InvalidPeriod: return "InvalidPeriod";
		case ErrorCode::MismatchedIds: return "MismatchedIds";
		case ErrorCode::CorpusTooSmall: return "CorpusTooSmall";
		case ErrorCode::HistoryTooShort: return "HistoryTooShort";
		case ErrorCode::InsufficientTraining: return "InsufficientTraining";
		case ErrorCode::SingularSystem: return "SingularSystem";
		case ErrorCode::FeatureStarvation: return "FeatureStarvation";
		case ErrorCode::Timeout: return "Timeout";
		case ErrorCode::MalformedResponse: return "MalformedResponse";
		case ErrorCode::LengthMismatch: return "LengthMismatch";
		case ErrorCode::NotFound: return "NotFound";
		case ErrorCode::MissingForecast: return "MissingForecast";
		case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
		case ErrorCode::CurveTooShort: return "CurveTooShort";
		case ErrorCode::MissingModelResult: return "MissingModelResult";
		case ErrorCode::MissingEndpoints: return "MissingEndpoints";
		case ErrorCode::ParseError: return "ParseError";
		case ErrorCode::IoError: return "IoError";
		case ErrorCode::InvalidArgument: return "InvalidArgument";
	}
	return "Unknown";
}

class Error : public std::runtime_error {
public:
	Error(ErrorCode code, const std::string& message)
	    : std::runtime_error(std::string(to_string(code)) + ": " + message),
	      code_(code),
	      message_(message) {}

	ErrorCode code() const { return code_; }

	/// Message without the code prefix, for callers that re-wrap with context.
	const std::string& message() const { return message_; }

private:
	ErrorCode code_;
	std::string message_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
	throw Error(code, message);
}

} // namespace tsroute
