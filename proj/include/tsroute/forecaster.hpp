#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tsroute/error.hpp"
#include "tsroute/series.hpp"

namespace tsroute {

/// One forecasting job: produce `horizon` values following `history`.
/// history_start_epoch_s anchors history[0] in absolute time so backends can
/// derive calendar covariates; step-index series use index * period seconds.
struct ForecastRequest {
	std::string series_id;
	std::vector<double> history;
	int horizon = 1;
	Frequency frequency = Frequency::hourly();
	std::int64_t history_start_epoch_s = 0;

	void validate() const {
		if (history.empty()) raise(ErrorCode::HistoryTooShort, "empty history");
		if (horizon < 1) raise(ErrorCode::InvalidArgument, "horizon must be >= 1");
	}
};

inline ForecastRequest make_request(const Series& history, int horizon) {
	ForecastRequest req;
	req.series_id = history.id();
	req.history = history.values();
	req.horizon = horizon;
	req.frequency = history.frequency();
	req.history_start_epoch_s = history.epoch_seconds(0);
	return req;
}

struct ForecastResult {
	std::string series_id;
	std::vector<double> predicted;
	std::string model_name;
	std::int64_t latency_micros = 0;
	std::vector<std::string> warnings;
};

namespace detail {

inline void check_result(const ForecastResult& result, int horizon) {
	if (static_cast<int>(result.predicted.size()) != horizon)
		raise(ErrorCode::LengthMismatch,
		      "forecast for '" + result.series_id + "' has " +
		          std::to_string(result.predicted.size()) + " values, expected " +
		          std::to_string(horizon));
	for (double v : result.predicted)
		if (!std::isfinite(v))
			raise(ErrorCode::NonFiniteValue,
			      "forecast for '" + result.series_id + "' contains a non-finite value");
}

} // namespace detail

/// generalist: remote service or replayed pre-recorded output.
/// specialist: a local model trained on the request's own history.
enum class ForecasterClass { generalist, specialist };

inline const char* to_string(ForecasterClass c) {
	return c == ForecasterClass::generalist ? "generalist" : "specialist";
}

/// Uniform backend boundary. Implementations are immutable after
/// construction and forecast() is safe to call concurrently.
class Forecaster {
public:
	virtual ~Forecaster() = default;
	virtual ForecastResult forecast(const ForecastRequest& req) const = 0;
	virtual std::string name() const = 0;
	virtual ForecasterClass forecaster_class() const = 0;
};

using ForecasterPtr = std::shared_ptr<const Forecaster>;

} // namespace tsroute
