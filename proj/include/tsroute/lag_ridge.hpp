#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tsroute/calendar.hpp"
#include "tsroute/error.hpp"
#include "tsroute/forecaster.hpp"
#include "tsroute/linalg.hpp"

namespace tsroute {

/// What to do when history cannot support every configured feature:
/// degrade drops the starved features with a warning, strict refuses.
enum class StarvationMode { degrade, strict };

inline const char* to_string(StarvationMode m) {
	return m == StarvationMode::degrade ? "degrade" : "strict";
}

inline StarvationMode parse_starvation_mode(const std::string& text) {
	if (text == "degrade") return StarvationMode::degrade;
	if (text == "strict") return StarvationMode::strict;
	raise(ErrorCode::ParseError, "bad starvation mode '" + text + "'");
}

struct LagRidgeConfig {
	StarvationMode mode = StarvationMode::degrade;
	std::size_t min_train_rows = 8;
	double lambda = 1.0;
};

/// Per-frequency tabular feature recipe: autoregressive lags, trailing
/// rolling mean/std windows, and calendar one-hots.
struct FeatureProfile {
	std::vector<int> lags;
	std::vector<int> rolling_windows;
	bool hour_of_day = false;
	bool day_of_week = false;
	bool month_of_year = false;
};

inline FeatureProfile feature_profile_for(Frequency frequency) {
	FeatureProfile p;
	if (frequency == Frequency::hourly()) {
		p.lags = {1, 6, 12, 24, 168};
		p.rolling_windows = {24, 168};
		p.hour_of_day = true;
		p.day_of_week = true;
		return p;
	}
	if (frequency == Frequency::daily()) {
		p.lags = {1, 7, 14, 30, 96};
		p.rolling_windows = {7, 30};
		p.day_of_week = true;
		p.month_of_year = true;
		return p;
	}
	raise(ErrorCode::InvalidArgument,
	      "lag-ridge feature profiles exist for hourly and daily frequencies only");
}

struct LagRidgeModel {
	FeatureProfile features; // kept features only
	std::vector<std::string> dropped;
	std::vector<double> weights; // one per column, bias last
	Frequency frequency = Frequency::hourly();
	double lambda = 1.0;

	std::size_t requirement() const {
		std::size_t r = 0;
		for (int k : features.lags) r = std::max(r, static_cast<std::size_t>(k));
		for (int w : features.rolling_windows) r = std::max(r, static_cast<std::size_t>(w));
		return r;
	}

	std::size_t column_count() const {
		return features.lags.size() + 2 * features.rolling_windows.size() +
		       (features.hour_of_day ? 24 : 0) + (features.day_of_week ? 7 : 0) +
		       (features.month_of_year ? 12 : 0) + 1;
	}
};

namespace detail {

/// Fills one design row for predicting values[t]. Lags and rolling windows
/// look strictly backwards (the rolling window ends at t-1); calendar
/// one-hots come from t's absolute time.
inline void fill_lagridge_row(const FeatureProfile& features, std::span<const double> values,
                              std::size_t t, std::int64_t epoch_s, double* row) {
	std::size_t c = 0;
	for (int k : features.lags) row[c++] = values[t - static_cast<std::size_t>(k)];
	for (int w : features.rolling_windows) {
		const auto wl = static_cast<std::size_t>(w);
		double mean = 0.0;
		for (std::size_t i = t - wl; i < t; ++i) mean += values[i];
		mean /= static_cast<double>(wl);
		double var = 0.0;
		for (std::size_t i = t - wl; i < t; ++i) var += (values[i] - mean) * (values[i] - mean);
		var /= static_cast<double>(wl);
		row[c++] = mean;
		row[c++] = std::sqrt(var);
	}
	if (features.hour_of_day) {
		for (int i = 0; i < 24; ++i) row[c + static_cast<std::size_t>(i)] = 0.0;
		row[c + static_cast<std::size_t>(hour_of_day(epoch_s))] = 1.0;
		c += 24;
	}
	if (features.day_of_week) {
		for (int i = 0; i < 7; ++i) row[c + static_cast<std::size_t>(i)] = 0.0;
		row[c + static_cast<std::size_t>(day_of_week(epoch_s))] = 1.0;
		c += 7;
	}
	if (features.month_of_year) {
		for (int i = 0; i < 12; ++i) row[c + static_cast<std::size_t>(i)] = 0.0;
		row[c + static_cast<std::size_t>(month_of_year(epoch_s) - 1)] = 1.0;
		c += 12;
	}
	row[c] = 1.0;
}

} // namespace detail

/// Fits ridge regression (no target normalization) on the frequency's lag,
/// rolling and calendar features. Features whose lookback leaves fewer than
/// min_train_rows training rows are dropped in degrade mode (recorded on the
/// model) or refused with FeatureStarvation in strict mode.
inline LagRidgeModel lagridge_fit(std::span<const double> training,
                                  std::int64_t start_epoch_s, Frequency frequency,
                                  const LagRidgeConfig& config = {}) {
	const FeatureProfile full = feature_profile_for(frequency);
	const std::size_t t_len = training.size();

	LagRidgeModel model;
	model.frequency = frequency;
	model.lambda = config.lambda;
	model.features.hour_of_day = full.hour_of_day;
	model.features.day_of_week = full.day_of_week;
	model.features.month_of_year = full.month_of_year;

	std::vector<std::string> starved;
	auto usable = [&](int r) {
		return t_len >= static_cast<std::size_t>(r) + config.min_train_rows;
	};
	for (int k : full.lags) {
		if (usable(k)) model.features.lags.push_back(k);
		else starved.push_back("lag" + std::to_string(k));
	}
	for (int w : full.rolling_windows) {
		if (usable(w)) model.features.rolling_windows.push_back(w);
		else starved.push_back("roll" + std::to_string(w));
	}

	if (!starved.empty() && config.mode == StarvationMode::strict) {
		std::string list;
		for (const std::string& s : starved) list += (list.empty() ? "" : ", ") + s;
		raise(ErrorCode::FeatureStarvation,
		      "history of " + std::to_string(t_len) + " points cannot support: " + list);
	}
	if (model.features.lags.empty() && model.features.rolling_windows.empty())
		raise(ErrorCode::FeatureStarvation,
		      "history of " + std::to_string(t_len) + " points supports no lag feature");
	model.dropped = std::move(starved);

	const std::size_t r_max = model.requirement();
	const std::size_t n = t_len - r_max;
	const std::size_t p = model.column_count();
	const std::int64_t period = frequency.period_seconds();

	std::vector<double> design(n * p);
	std::vector<double> target(n);
	for (std::size_t i = 0; i < n; ++i) {
		const std::size_t t = r_max + i;
		detail::fill_lagridge_row(model.features, training, t,
		                          start_epoch_s + static_cast<std::int64_t>(t) * period,
		                          design.data() + i * p);
		target[i] = training[t];
	}

	std::vector<double> penalty(p, config.lambda);
	penalty[p - 1] = 0.0;
	model.weights = linalg::ridge_solve(design, n, p, target, penalty);
	return model;
}

/// Recursive multi-step prediction: each step's lag and rolling features read
/// the history extended with the steps already predicted.
inline ForecastResult lagridge_predict(const LagRidgeModel& model, const ForecastRequest& req) {
	req.validate();
	if (req.frequency != model.frequency)
		raise(ErrorCode::InvalidArgument, "model fitted for " + model.frequency.to_string() +
		                                      ", request is " + req.frequency.to_string());
	const std::size_t r_max = model.requirement();
	if (req.history.size() < r_max)
		raise(ErrorCode::HistoryTooShort, "series '" + req.series_id + "': need " +
		                                      std::to_string(r_max) + " points of context");

	const auto start = std::chrono::steady_clock::now();
	const std::size_t p = model.column_count();
	const std::int64_t period = model.frequency.period_seconds();

	std::vector<double> extended(req.history.begin(), req.history.end());
	extended.reserve(extended.size() + static_cast<std::size_t>(req.horizon));
	std::vector<double> row(p);
	for (int h = 0; h < req.horizon; ++h) {
		const std::size_t t = extended.size();
		detail::fill_lagridge_row(model.features, extended, t,
		                          req.history_start_epoch_s +
		                              static_cast<std::int64_t>(t) * period,
		                          row.data());
		double v = 0.0;
		for (std::size_t i = 0; i < p; ++i) v += model.weights[i] * row[i];
		extended.push_back(v);
	}

	ForecastResult result;
	result.series_id = req.series_id;
	result.model_name = "lagridge";
	result.predicted.assign(extended.begin() + static_cast<std::ptrdiff_t>(req.history.size()),
	                        extended.end());
	if (!model.dropped.empty()) {
		std::string list;
		for (const std::string& s : model.dropped) list += (list.empty() ? "" : ", ") + s;
		result.warnings.push_back("dropped features: " + list);
	}
	result.latency_micros = std::chrono::duration_cast<std::chrono::microseconds>(
	                            std::chrono::steady_clock::now() - start)
	                            .count();
	detail::check_result(result, req.horizon);
	return result;
}

/// Per-series wrapper: fits on the request's own history, then predicts.
class LagRidgeForecaster final : public Forecaster {
public:
	explicit LagRidgeForecaster(LagRidgeConfig config = {}) : config_(config) {}

	ForecastResult forecast(const ForecastRequest& req) const override {
		const auto start = std::chrono::steady_clock::now();
		const LagRidgeModel model =
		    lagridge_fit(req.history, req.history_start_epoch_s, req.frequency, config_);
		ForecastResult result = lagridge_predict(model, req);
		result.latency_micros = std::chrono::duration_cast<std::chrono::microseconds>(
		                            std::chrono::steady_clock::now() - start)
		                            .count();
		return result;
	}

	std::string name() const override { return "lagridge"; }
	ForecasterClass forecaster_class() const override { return ForecasterClass::specialist; }

private:
	LagRidgeConfig config_;
};

} // namespace tsroute
