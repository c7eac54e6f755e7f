#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <vector>

#include "tsroute/bench.hpp"
#include "tsroute/dlinear.hpp"
#include "tsroute/lag_ridge.hpp"
#include "tsroute/linalg.hpp"
#include "tsroute/replay.hpp"
#include "tsroute/seasonal_naive.hpp"

#include "support/oracles.hpp"

using namespace tsroute;

namespace {

ForecastRequest request_for(std::string id, std::vector<double> history, int horizon,
                            Frequency freq = Frequency::hourly()) {
	ForecastRequest req;
	req.series_id = std::move(id);
	req.history = std::move(history);
	req.horizon = horizon;
	req.frequency = freq;
	req.history_start_epoch_s = 0;
	return req;
}

template <typename Fn>
void expect_code(ErrorCode want, Fn&& fn) {
	try {
		fn();
		FAIL("expected error code");
	} catch (const Error& e) {
		CHECK(e.code() == want);
	}
}

} // namespace

TEST_CASE("seasonal naive tiles the last period across the horizon") {
	const ForecastRequest req = request_for("s", {9, 9, 9, 1, 2, 3}, 5);
	const ForecastResult r = seasonal_naive(req, 3);
	CHECK(r.predicted == std::vector<double>{1, 2, 3, 1, 2});
	CHECK(r.model_name == "seasonal_naive");
	CHECK(r.series_id == "s");

	// m = 1 repeats the last value.
	const ForecastResult last = seasonal_naive(req, 1);
	CHECK(last.predicted == std::vector<double>{3, 3, 3, 3, 3});

	expect_code(ErrorCode::InvalidPeriod, [&] { seasonal_naive(req, 0); });
	expect_code(ErrorCode::HistoryTooShort, [&] { seasonal_naive(req, 7); });
	expect_code(ErrorCode::HistoryTooShort,
	            [&] { seasonal_naive(request_for("e", {}, 2), 1); });
	expect_code(ErrorCode::InvalidArgument,
	            [&] { seasonal_naive(request_for("h", {1, 2}, 0), 1); });

	const SeasonalNaiveForecaster f(3);
	CHECK(f.name() == "seasonal_naive");
	CHECK(f.forecaster_class() == ForecasterClass::specialist);
	CHECK(f.forecast(req).predicted == r.predicted);
	expect_code(ErrorCode::InvalidPeriod, [] { SeasonalNaiveForecaster bad(0); });
}

TEST_CASE("moving average uses replicate padding at the edges") {
	const std::vector<double> x = {1, 2, 3, 4};
	const std::vector<double> got = moving_average(x, 3);
	// Padded view is [1, 1, 2, 3, 4, 4].
	REQUIRE(got.size() == 4);
	CHECK(oracles::close(got[0], 4.0 / 3.0, 1e-15));
	CHECK(oracles::close(got[1], 2.0, 1e-15));
	CHECK(oracles::close(got[2], 3.0, 1e-15));
	CHECK(oracles::close(got[3], 11.0 / 3.0, 1e-15));

	// Kernel 1 is the identity; a flat series stays flat for any kernel.
	CHECK(moving_average(x, 1) == x);
	const std::vector<double> flat(9, 5.0);
	CHECK(moving_average(flat, 7) == flat);

	expect_code(ErrorCode::InvalidArgument, [&] { moving_average(x, 2); });
	expect_code(ErrorCode::InvalidArgument, [&] { moving_average(x, 0); });
	expect_code(ErrorCode::InvalidArgument, [&] { moving_average(x, 5); });
}

TEST_CASE("decomposition always carries the full window") {
	std::mt19937_64 rng(401);
	for (int i = 0; i < 30; ++i) {
		const std::vector<double> w = oracles::gen_mixed(40, rng);
		const Decomposition d = decompose_window(w, 7);
		REQUIRE(d.trend.size() == w.size());
		REQUIRE(d.remainder.size() == w.size());
		for (std::size_t j = 0; j < w.size(); ++j) {
			// The remainder is the exact elementwise complement; re-adding
			// the trend rounds once, so reconstruction is ulp-close.
			CHECK(d.remainder[j] == w[j] - d.trend[j]);
			CHECK(oracles::close(d.trend[j] + d.remainder[j], w[j], 1e-12));
		}
	}

	// Integer-valued windows whose moving averages are themselves integral
	// reconstruct bitwise: every operation is exact.
	const std::vector<double> ints = {3, 6, 9, 12, 15, 18, 21, 24};
	const Decomposition d = decompose_window(ints, 3);
	for (std::size_t j = 0; j < ints.size(); ++j)
		CHECK(d.trend[j] + d.remainder[j] == ints[j]);
}

TEST_CASE("dlinear reproduces an exact linear trend") {
	std::vector<double> train(120);
	for (std::size_t i = 0; i < train.size(); ++i)
		train[i] = 5.0 + 0.25 * static_cast<double>(i);
	const DLinearModel model = dlinear_fit(train, 48, 12, 25);
	std::vector<double> context(train.end() - 48, train.end());
	const ForecastResult r = dlinear_predict(model, request_for("lin", context, 12));
	for (std::size_t j = 0; j < 12; ++j) {
		const double want = 5.0 + 0.25 * static_cast<double>(train.size() + j);
		CHECK(std::abs(r.predicted[j] - want) < 1e-6);
	}
	CHECK(r.model_name == "dlinear");
}

TEST_CASE("dlinear validates shapes and history") {
	std::vector<double> train(59, 1.0);
	for (std::size_t i = 0; i < train.size(); ++i) train[i] = std::sin(0.3 * static_cast<double>(i));
	// lookback + horizon = 60 > 59.
	expect_code(ErrorCode::InsufficientTraining, [&] { dlinear_fit(train, 48, 12, 25); });
	// The free fit function is strict about the kernel.
	expect_code(ErrorCode::InvalidArgument, [&] { dlinear_fit(train, 40, 4, 24); });
	expect_code(ErrorCode::InvalidArgument, [&] { dlinear_fit(train, 10, 4, 11); });
	expect_code(ErrorCode::InvalidArgument, [&] { dlinear_fit(train, 0, 4, 1); });

	const DLinearModel model = dlinear_fit(train, 24, 4, 7);
	expect_code(ErrorCode::InvalidArgument, [&] {
		dlinear_predict(model, request_for("h", std::vector<double>(30, 1.0), 5));
	});
	expect_code(ErrorCode::HistoryTooShort, [&] {
		dlinear_predict(model, request_for("h", std::vector<double>(20, 1.0), 4));
	});

	// The wrapper clamps the kernel to an odd value within the lookback.
	const DLinearForecaster clamped(10, 25);
	CHECK(clamped.kernel() == 9);
	CHECK(clamped.lookback() == 10);
	const DLinearForecaster one(1, 25);
	CHECK(one.kernel() == 1);
	CHECK(clamped.forecaster_class() == ForecasterClass::specialist);
	expect_code(ErrorCode::InvalidArgument, [] { DLinearForecaster bad(0); });
}

TEST_CASE("ridge solver handles known systems") {
	// Overdetermined exact system: y = 2 a - b + 3 with negligible damping.
	// Columns: a, b, bias.
	const std::vector<double> design = {
	    1, 0, 1, //
	    0, 1, 1, //
	    1, 1, 1, //
	    2, 1, 1, //
	    3, 5, 1, //
	};
	std::vector<double> target(5);
	for (std::size_t r = 0; r < 5; ++r)
		target[r] = 2.0 * design[r * 3] - design[r * 3 + 1] + 3.0;
	const std::vector<double> penalty = {1e-9, 1e-9, 0.0};
	const std::vector<double> w = linalg::ridge_solve(design, 5, 3, target, penalty);
	REQUIRE(w.size() == 3);
	CHECK(oracles::close(w[0], 2.0, 1e-6));
	CHECK(oracles::close(w[1], -1.0, 1e-6));
	CHECK(oracles::close(w[2], 3.0, 1e-6));

	// An unpenalized bias recovers a pure constant exactly even under heavy
	// weight shrinkage.
	const std::vector<double> ones_design = {1, 1, 1, 1, 1, 1, 1, 1};
	const std::vector<double> const_target = {7, 7, 7, 7};
	const std::vector<double> heavy = {100.0, 0.0};
	const std::vector<double> wc =
	    linalg::ridge_solve(std::vector<double>{1, 1, 2, 1, 3, 1, 4, 1}, 4, 2, const_target,
	                        heavy);
	CHECK(std::abs(wc[0]) < 0.2);
	CHECK(oracles::close(wc[0] * 2.5 + wc[1], 7.0, 0.05));
	(void)ones_design;

	// A zero column with zero penalty gives an exactly zero pivot.
	const std::vector<double> zero_col = {1, 0, 2, 0, 3, 0};
	const std::vector<double> tgt = {1, 2, 3};
	expect_code(ErrorCode::SingularSystem, [&] {
		linalg::ridge_solve(zero_col, 3, 2, tgt, std::vector<double>{0.0, 0.0});
	});
	// Any positive penalty on that column restores definiteness.
	CHECK(linalg::ridge_solve(zero_col, 3, 2, tgt, std::vector<double>{0.0, 1e-6}).size() == 2);
	expect_code(ErrorCode::InvalidArgument, [&] {
		linalg::ridge_solve(zero_col, 3, 2, tgt, std::vector<double>{0.0});
	});
	expect_code(ErrorCode::InvalidArgument, [&] {
		linalg::ridge_solve(zero_col, 2, 2, tgt, std::vector<double>{0.0, 0.0});
	});
}

TEST_CASE("ridge solver keeps tiny damping effective at large scales") {
	// An exact line makes the remainder columns collinear with the bias, so
	// only the damping keeps the Gram matrix definite. At values around 2e3
	// the Gram entries reach ~1e9, where the 1e-6 damping term drowns in
	// double-precision Cholesky rounding noise (a plain-double rebuild of
	// the solver hits a negative pivot here) but stays two orders above
	// extended-precision noise.
	std::vector<double> train(200);
	for (std::size_t i = 0; i < train.size(); ++i)
		train[i] = 2.0e3 + 2.0 * static_cast<double>(i);
	const DLinearModel model = dlinear_fit(train, 48, 12, 25);
	std::vector<double> context(train.end() - 48, train.end());
	const ForecastResult r = dlinear_predict(model, request_for("big", context, 12));
	for (std::size_t j = 0; j < 12; ++j) {
		const double want = 2.0e3 + 2.0 * static_cast<double>(train.size() + j);
		CHECK(std::abs(r.predicted[j] - want) / want < 1e-6);
	}
}

TEST_CASE("lag ridge feature profiles and starvation handling") {
	const FeatureProfile hourly = feature_profile_for(Frequency::hourly());
	CHECK(hourly.lags == std::vector<int>{1, 6, 12, 24, 168});
	CHECK(hourly.rolling_windows == std::vector<int>{24, 168});
	CHECK(hourly.hour_of_day);
	CHECK(hourly.day_of_week);
	CHECK_FALSE(hourly.month_of_year);

	const FeatureProfile daily = feature_profile_for(Frequency::daily());
	CHECK(daily.lags == std::vector<int>{1, 7, 14, 30, 96});
	CHECK(daily.rolling_windows == std::vector<int>{7, 30});
	CHECK_FALSE(daily.hour_of_day);
	CHECK(daily.day_of_week);
	CHECK(daily.month_of_year);

	expect_code(ErrorCode::InvalidArgument,
	            [] { feature_profile_for(Frequency::other(900)); });

	// A 48-point hourly history cannot support the weekly lag or window.
	std::mt19937_64 rng(402);
	const std::vector<double> short_hist = oracles::gen_sinusoid(48, 24.0, 5.0, 20.0, 0.5, rng);
	const LagRidgeModel degraded = lagridge_fit(short_hist, 0, Frequency::hourly());
	CHECK(degraded.features.lags == std::vector<int>{1, 6, 12, 24});
	CHECK(degraded.features.rolling_windows == std::vector<int>{24});
	CHECK(degraded.dropped == std::vector<std::string>{"lag168", "roll168"});

	const ForecastRequest req = request_for("deg", short_hist, 6);
	const ForecastResult r = lagridge_predict(degraded, req);
	REQUIRE(r.warnings.size() == 1);
	CHECK(r.warnings[0] == "dropped features: lag168, roll168");

	LagRidgeConfig strict;
	strict.mode = StarvationMode::strict;
	expect_code(ErrorCode::FeatureStarvation,
	            [&] { lagridge_fit(short_hist, 0, Frequency::hourly(), strict); });

	// Even degrade mode refuses when no lag survives at all.
	expect_code(ErrorCode::FeatureStarvation, [&] {
		lagridge_fit(std::vector<double>(8, 1.0), 0, Frequency::daily());
	});

	CHECK(parse_starvation_mode("degrade") == StarvationMode::degrade);
	CHECK(parse_starvation_mode("strict") == StarvationMode::strict);
	expect_code(ErrorCode::ParseError, [] { parse_starvation_mode("lax"); });
}

TEST_CASE("lag ridge predicts periodic structure and validates requests") {
	std::mt19937_64 rng(403);
	const std::size_t t = 420;
	std::vector<double> values(t);
	for (std::size_t i = 0; i < t; ++i)
		values[i] = 50.0 +
		            12.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 24.0);
	const std::vector<double> train(values.begin(), values.end() - 24);

	const LagRidgeModel model = lagridge_fit(train, 0, Frequency::hourly());
	CHECK(model.dropped.empty());
	CHECK(model.requirement() == 168);

	const ForecastResult r =
	    lagridge_predict(model, request_for("per", train, 24));
	REQUIRE(r.predicted.size() == 24);
	CHECK(r.model_name == "lagridge");
	CHECK(r.warnings.empty());
	double err = 0.0;
	for (std::size_t j = 0; j < 24; ++j)
		err += std::abs(r.predicted[j] - values[train.size() + j]);
	// Within a twentieth of the amplitude on average.
	CHECK(err / 24.0 < 0.6);

	expect_code(ErrorCode::InvalidArgument, [&] {
		lagridge_predict(model, request_for("f", train, 4, Frequency::daily()));
	});
	expect_code(ErrorCode::HistoryTooShort, [&] {
		lagridge_predict(model, request_for("h", std::vector<double>(100, 1.0), 4));
	});

	const LagRidgeForecaster wrapper;
	CHECK(wrapper.name() == "lagridge");
	CHECK(wrapper.forecaster_class() == ForecasterClass::specialist);
	const ForecastResult wr = wrapper.forecast(request_for("per", train, 24));
	CHECK(wr.predicted == r.predicted);
}

TEST_CASE("replay store parses, validates and serves prefixes") {
	const std::string csv =
	    "series_id,model_name,step,value\n"
	    "a,fm,1,10\n"
	    "a,fm,2,11\n"
	    "a,fm,3,12\n"
	    "b,fm,1,20\n";
	const std::string path =
	    (std::filesystem::temp_directory_path() / "tsroute_test_replay.csv").string();
	write_text_file(path, csv);
	const ForecastStore store = ForecastStore::from_csv(read_csv(path));
	std::remove(path.c_str());
	CHECK(store.size() == 2);

	const ReplayForecaster replay(store, "fm");
	CHECK(replay.name() == "fm");
	CHECK(replay.forecaster_class() == ForecasterClass::generalist);

	// A shorter horizon replays the prefix.
	const ForecastResult two = replay.forecast(request_for("a", {1, 2, 3}, 2));
	CHECK(two.predicted == std::vector<double>{10, 11});
	CHECK(two.model_name == "fm");
	const ForecastResult three = replay.forecast(request_for("a", {1, 2, 3}, 3));
	CHECK(three.predicted == std::vector<double>{10, 11, 12});

	expect_code(ErrorCode::NotFound, [&] { replay.forecast(request_for("a", {1}, 4)); });
	expect_code(ErrorCode::NotFound, [&] { replay.forecast(request_for("c", {1}, 1)); });
	expect_code(ErrorCode::NotFound, [&] {
		ReplayForecaster other(store, "other_model");
		other.forecast(request_for("a", {1}, 1));
	});

	auto table_of = [](const std::string& body) {
		const std::string p =
		    (std::filesystem::temp_directory_path() / "tsroute_test_replay2.csv").string();
		write_text_file(p, body);
		CsvTable t = read_csv(p);
		std::remove(p.c_str());
		return t;
	};
	expect_code(ErrorCode::ParseError, [&] {
		ForecastStore::from_csv(table_of("series_id,model_name,step,value\na,fm,1,1\na,fm,1,2\n"));
	});
	expect_code(ErrorCode::ParseError, [&] {
		ForecastStore::from_csv(table_of("series_id,model_name,step,value\na,fm,2,1\n"));
	});
	expect_code(ErrorCode::ParseError, [&] {
		ForecastStore::from_csv(table_of("series_id,model_name,step,value\na,fm,0,1\n"));
	});
	expect_code(ErrorCode::ParseError, [&] {
		ForecastStore::from_csv(table_of("series_id,model_name,step,value\na,fm,1,1\na,fm,3,3\n"));
	});

	// Round trip through the canonical writer.
	const ForecastStore back = ForecastStore::from_csv(table_of(store.to_csv()));
	CHECK(back.size() == store.size());
	REQUIRE(back.find("a", "fm") != nullptr);
	CHECK(*back.find("a", "fm") == *store.find("a", "fm"));
}

TEST_CASE("latency benchmark orders percentiles and validates iterations") {
	const SeasonalNaiveForecaster f(24);
	std::mt19937_64 rng(404);
	const ForecastRequest req =
	    request_for("bench", oracles::gen_sinusoid(168, 24.0, 5.0, 50.0, 1.0, rng), 24);
	const LatencyStats stats = bench_latency(f, req, 100);
	CHECK(stats.iterations == 100);
	CHECK(stats.p50_micros > 0.0);
	CHECK(stats.p50_micros <= stats.p95_micros);
	CHECK(stats.mean_micros > 0.0);
	expect_code(ErrorCode::InvalidArgument, [&] { bench_latency(f, req, 99); });
}
