#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tsroute/error.hpp"
#include "tsroute/forecaster.hpp"
#include "tsroute/linalg.hpp"

namespace tsroute {

/// Centered moving average with replicate padding: indices past either edge
/// read the edge value, so a flat or linear interior stays undistorted
/// without inventing trend at the boundary.
inline std::vector<double> moving_average(std::span<const double> window, int kernel) {
	if (kernel < 1 || kernel % 2 == 0)
		raise(ErrorCode::InvalidArgument, "moving-average kernel must be odd and >= 1");
	const auto n = static_cast<std::ptrdiff_t>(window.size());
	if (static_cast<std::ptrdiff_t>(kernel) > n)
		raise(ErrorCode::InvalidArgument, "moving-average kernel exceeds window length");
	const std::ptrdiff_t half = kernel / 2;
	std::vector<double> out(window.size());
	for (std::ptrdiff_t i = 0; i < n; ++i) {
		double sum = 0.0;
		for (std::ptrdiff_t j = i - half; j <= i + half; ++j)
			sum += window[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(j, 0, n - 1))];
		out[static_cast<std::size_t>(i)] = sum / static_cast<double>(kernel);
	}
	return out;
}

/// Trend is the moving average; remainder is the exact elementwise
/// complement window - trend, so the pair always carries the full window.
struct Decomposition {
	std::vector<double> trend;
	std::vector<double> remainder;
};

inline Decomposition decompose_window(std::span<const double> window, int kernel) {
	Decomposition d;
	d.trend = moving_average(window, kernel);
	d.remainder.resize(window.size());
	for (std::size_t i = 0; i < window.size(); ++i) d.remainder[i] = window[i] - d.trend[i];
	return d;
}

/// Linear decomposition forecaster: per-step predictions are one linear map
/// of the trend component plus one of the remainder component of the last
/// lookback window, with a free intercept. Both maps are fitted jointly by
/// least squares over all sliding windows with fixed damping 1e-6 on the
/// weights (never the intercept) - a failed factorization is reported as
/// SingularSystem, not silently re-regularized.
struct DLinearModel {
	int lookback = 0;
	int horizon = 0;
	int kernel = 0;
	std::vector<double> weights; // (2*lookback + 1) x horizon, row-major
};

inline constexpr double kDLinearDamping = 1e-6;

inline DLinearModel dlinear_fit(std::span<const double> training, int lookback, int horizon,
                                int kernel) {
	if (lookback < 1) raise(ErrorCode::InvalidArgument, "lookback must be >= 1");
	if (horizon < 1) raise(ErrorCode::InvalidArgument, "horizon must be >= 1");
	if (kernel < 1 || kernel % 2 == 0 || kernel > lookback)
		raise(ErrorCode::InvalidArgument, "kernel must be odd, >= 1 and <= lookback");
	const std::size_t need = static_cast<std::size_t>(lookback) + static_cast<std::size_t>(horizon);
	if (training.size() < need)
		raise(ErrorCode::InsufficientTraining,
		      "dlinear needs lookback + horizon = " + std::to_string(need) + " points, got " +
		          std::to_string(training.size()));

	const auto l = static_cast<std::size_t>(lookback);
	const auto h = static_cast<std::size_t>(horizon);
	const std::size_t n = training.size() - l - h + 1;
	const std::size_t p = 2 * l + 1;

	std::vector<double> design(n * p);
	std::vector<double> targets(n * h);
	for (std::size_t s = 0; s < n; ++s) {
		const Decomposition d = decompose_window(training.subspan(s, l), kernel);
		double* row = design.data() + s * p;
		std::copy(d.trend.begin(), d.trend.end(), row);
		std::copy(d.remainder.begin(), d.remainder.end(), row + l);
		row[2 * l] = 1.0;
		for (std::size_t j = 0; j < h; ++j) targets[s * h + j] = training[s + l + j];
	}

	std::vector<double> penalty(p, kDLinearDamping);
	penalty[2 * l] = 0.0;

	DLinearModel model;
	model.lookback = lookback;
	model.horizon = horizon;
	model.kernel = kernel;
	model.weights = linalg::ridge_solve_multi(design, n, p, targets, h, penalty);
	return model;
}

inline ForecastResult dlinear_predict(const DLinearModel& model, const ForecastRequest& req) {
	req.validate();
	if (req.horizon != model.horizon)
		raise(ErrorCode::InvalidArgument, "model fitted for horizon " +
		                                      std::to_string(model.horizon) + ", requested " +
		                                      std::to_string(req.horizon));
	const auto l = static_cast<std::size_t>(model.lookback);
	if (req.history.size() < l)
		raise(ErrorCode::HistoryTooShort, "series '" + req.series_id + "': need " +
		                                      std::to_string(l) + " points of context");

	const auto start = std::chrono::steady_clock::now();
	const std::span<const double> window(req.history.data() + req.history.size() - l, l);
	const Decomposition d = decompose_window(window, model.kernel);

	ForecastResult result;
	result.series_id = req.series_id;
	result.model_name = "dlinear";
	const auto h = static_cast<std::size_t>(model.horizon);
	const std::size_t p = 2 * l + 1;
	result.predicted.resize(h);
	for (std::size_t j = 0; j < h; ++j) {
		double v = model.weights[(p - 1) * h + j];
		for (std::size_t i = 0; i < l; ++i) {
			v += model.weights[i * h + j] * d.trend[i];
			v += model.weights[(l + i) * h + j] * d.remainder[i];
		}
		result.predicted[j] = v;
	}
	result.latency_micros = std::chrono::duration_cast<std::chrono::microseconds>(
	                            std::chrono::steady_clock::now() - start)
	                            .count();
	detail::check_result(result, req.horizon);
	return result;
}

/// Per-series wrapper: fits on the request's own history, then predicts.
/// The configured kernel is clamped to an odd value no larger than the
/// lookback; the fit itself stays strict.
class DLinearForecaster final : public Forecaster {
public:
	explicit DLinearForecaster(int lookback, int kernel = 25) : lookback_(lookback) {
		if (lookback < 1) raise(ErrorCode::InvalidArgument, "lookback must be >= 1");
		kernel_ = std::min(kernel, lookback);
		if (kernel_ % 2 == 0) --kernel_;
		kernel_ = std::max(kernel_, 1);
	}

	ForecastResult forecast(const ForecastRequest& req) const override {
		const auto start = std::chrono::steady_clock::now();
		const DLinearModel model = dlinear_fit(req.history, lookback_, req.horizon, kernel_);
		ForecastResult result = dlinear_predict(model, req);
		result.latency_micros = std::chrono::duration_cast<std::chrono::microseconds>(
		                            std::chrono::steady_clock::now() - start)
		                            .count();
		return result;
	}

	std::string name() const override { return "dlinear"; }
	ForecasterClass forecaster_class() const override { return ForecasterClass::specialist; }

	int lookback() const { return lookback_; }
	int kernel() const { return kernel_; }

private:
	int lookback_;
	int kernel_;
};

} // namespace tsroute
