#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <vector>

#include "tsroute/error.hpp"
#include "tsroute/forecaster.hpp"

namespace tsroute {

struct LatencyStats {
	double p50_micros = 0.0;
	double p95_micros = 0.0;
	double mean_micros = 0.0;
	std::size_t iterations = 0;
};

/// Wall-clock per-call latency distribution for one request, repeated.
/// A twentieth of the iterations (at least 3) run first as warm-up and are
/// excluded. Percentiles use the nearest-rank method.
inline LatencyStats bench_latency(const Forecaster& forecaster, const ForecastRequest& req,
                                  int iterations = 200) {
	if (iterations < 100) raise(ErrorCode::InvalidArgument, "bench needs >= 100 iterations");

	const int warmup = std::max(3, iterations / 20);
	for (int i = 0; i < warmup; ++i) (void)forecaster.forecast(req);

	std::vector<double> samples;
	samples.reserve(static_cast<std::size_t>(iterations));
	for (int i = 0; i < iterations; ++i) {
		const auto start = std::chrono::steady_clock::now();
		(void)forecaster.forecast(req);
		const auto end = std::chrono::steady_clock::now();
		samples.push_back(
		    static_cast<double>(
		        std::chrono::duration_cast<std::chrono::nanoseconds>(end - start).count()) /
		    1000.0);
	}
	std::sort(samples.begin(), samples.end());

	auto rank = [&samples](double q) {
		const auto n = static_cast<double>(samples.size());
		auto idx = static_cast<std::size_t>(std::max(0.0, q * n - 1.0) + 0.5);
		return samples[std::min(idx, samples.size() - 1)];
	};

	LatencyStats stats;
	stats.iterations = static_cast<std::size_t>(iterations);
	stats.p50_micros = rank(0.50);
	stats.p95_micros = rank(0.95);
	double sum = 0.0;
	for (double s : samples) sum += s;
	stats.mean_micros = sum / static_cast<double>(samples.size());
	return stats;
}

} // namespace tsroute
