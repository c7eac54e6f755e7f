#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "tsroute/error.hpp"
#include "tsroute/forecaster.hpp"

namespace tsroute {

/// Tiles the last m observations across the horizon:
/// prediction for step h repeats history[T - m + ((h-1) mod m)].
inline ForecastResult seasonal_naive(const ForecastRequest& req, int m) {
	req.validate();
	if (m < 1) raise(ErrorCode::InvalidPeriod, "seasonal lag must be >= 1");
	if (req.history.size() < static_cast<std::size_t>(m))
		raise(ErrorCode::HistoryTooShort, "series '" + req.series_id + "': history length " +
		                                      std::to_string(req.history.size()) +
		                                      " < seasonal lag " + std::to_string(m));

	const auto start = std::chrono::steady_clock::now();
	ForecastResult result;
	result.series_id = req.series_id;
	result.model_name = "seasonal_naive";
	result.predicted.resize(static_cast<std::size_t>(req.horizon));
	const std::size_t base = req.history.size() - static_cast<std::size_t>(m);
	for (std::size_t h = 0; h < result.predicted.size(); ++h)
		result.predicted[h] = req.history[base + h % static_cast<std::size_t>(m)];
	result.latency_micros = std::chrono::duration_cast<std::chrono::microseconds>(
	                            std::chrono::steady_clock::now() - start)
	                            .count();
	return result;
}

class SeasonalNaiveForecaster final : public Forecaster {
public:
	explicit SeasonalNaiveForecaster(int m) : m_(m) {
		if (m < 1) raise(ErrorCode::InvalidPeriod, "seasonal lag must be >= 1");
	}

	ForecastResult forecast(const ForecastRequest& req) const override {
		return seasonal_naive(req, m_);
	}

	std::string name() const override { return "seasonal_naive"; }
	ForecasterClass forecaster_class() const override { return ForecasterClass::specialist; }

private:
	int m_;
};

} // namespace tsroute
