#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "tsroute/dataset.hpp"
#include "tsroute/ingest.hpp"
#include "tsroute/numfmt.hpp"
#include "tsroute/series.hpp"
#include "tsroute/transform.hpp"

#include "support/oracles.hpp"

using namespace tsroute;

namespace {

std::string temp_file(const std::string& name) {
	return (std::filesystem::temp_directory_path() / ("tsroute_test_" + name)).string();
}

} // namespace

TEST_CASE("series enforces uniform spacing and ordered unique timestamps") {
	const Frequency hourly = Frequency::hourly();
	CHECK_NOTHROW(Series("a", {0, 1, 2}, {1.0, 2.0, 3.0}, hourly, 24, 24, TimeAxis::step_index));
	CHECK_THROWS_AS(Series("a", {0, 1, 1}, {1.0, 2.0, 3.0}, hourly, 24, 24, TimeAxis::step_index),
	                Error);
	CHECK_THROWS_AS(Series("a", {0, 1, 3}, {1.0, 2.0, 3.0}, hourly, 24, 24, TimeAxis::step_index),
	                Error);

	try {
		Series("a", {0, 1, 1}, {1.0, 2.0, 3.0}, hourly, 24, 24, TimeAxis::step_index);
		FAIL("expected duplicate timestamp error");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::DuplicateTimestamp);
	}
	try {
		Series("a", {0, 3600, 7201}, {1.0, 2.0, 3.0}, hourly, 24, 24, TimeAxis::epoch_seconds);
		FAIL("expected spacing error");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::NonUniformSpacing);
	}
}

TEST_CASE("split reconstructs the original series") {
	std::mt19937_64 rng(11);
	const Series s = oracles::make_series("x", oracles::gen_mixed(120, rng));
	const SplitSeries split = split_last_h(s, 24);
	REQUIRE(split.history.length() == 96);
	REQUIRE(split.actuals.size() == 24);
	for (std::size_t i = 0; i < 96; ++i) CHECK(split.history.values()[i] == s.values()[i]);
	for (std::size_t i = 0; i < 24; ++i) CHECK(split.actuals[i] == s.values()[96 + i]);

	try {
		split_last_h(s, 120);
		FAIL("expected horizon error");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::HorizonTooLong);
	}
	CHECK_THROWS_AS(split_last_h(s, 0), Error);
}

TEST_CASE("prefix and suffix preserve identity and alignment") {
	std::mt19937_64 rng(12);
	const Series s = oracles::make_series("x", oracles::gen_mixed(60, rng));
	const Series head = s.prefix(40);
	const Series tail = s.suffix(10);
	CHECK(head.id() == "x");
	CHECK(head.length() == 40);
	CHECK(tail.length() == 10);
	CHECK(tail.timestamp(0) == s.timestamp(50));
	for (std::size_t i = 0; i < 10; ++i) CHECK(tail.values()[i] == s.values()[50 + i]);
}

TEST_CASE("epoch axis exposes calendar positions") {
	// 1970-01-01 was a Thursday; Monday=0 puts it at 3.
	CHECK(day_of_week(0) == 3);
	CHECK(hour_of_day(0) == 0);
	CHECK(hour_of_day(3600 * 5) == 5);
	CHECK(month_of_year(0) == 1);

	const int64_t aug19_2026 = parse_iso8601("2026-08-19T00:00:00Z");
	CHECK(day_of_week(aug19_2026) == 2);
	CHECK(month_of_year(aug19_2026) == 8);
	CHECK(format_iso8601(aug19_2026) == "2026-08-19T00:00:00Z");
	CHECK(parse_iso8601(format_iso8601(aug19_2026 + 3600 * 7)) == aug19_2026 + 3600 * 7);
}

TEST_CASE("frequency parses and prints") {
	CHECK(Frequency::parse("hourly") == Frequency::hourly());
	CHECK(Frequency::parse("daily") == Frequency::daily());
	CHECK(Frequency::hourly().period_seconds() == 3600);
	CHECK(Frequency::daily().period_seconds() == 86400);
	CHECK(Frequency::hourly().to_string() == "hourly");
}

TEST_CASE("dataset config ships the four benchmark entries") {
	const DatasetConfig cfg = DatasetConfig::builtin_defaults();
	CHECK(cfg.at("Traffic").seasonal_period == 168);
	CHECK(cfg.at("Traffic").mase_m == 24);
	CHECK(cfg.at("Traffic").horizon == 168);
	CHECK(cfg.at("Energy").seasonal_period == 24);
	CHECK(cfg.at("Energy").horizon == 24);
	CHECK(cfg.at("Exchange").horizon == 96);
	CHECK(cfg.at("Exchange").frequency == Frequency::daily());
	CHECK(cfg.at("M4-Daily").horizon == 14);
	CHECK_THROWS_AS(cfg.at("nope"), Error);

	// JSON entries override and extend the defaults.
	const auto j = nlohmann::json::parse(
	    R"({"Mine": {"frequency": "daily", "seasonal_period": 7, "mase_m": 7, "horizon": 5}})");
	const DatasetConfig merged = DatasetConfig::from_json(j);
	CHECK(merged.at("Mine").horizon == 5);
	CHECK(merged.at("Energy").horizon == 24);

	// Malformed entries fail as ParseError naming the entry, not as a raw
	// json exception.
	CHECK_THROWS_AS(DatasetConfig::from_json(nlohmann::json::array()), Error);
	try {
		DatasetConfig::from_json(nlohmann::json::parse(
		    R"({"Mine": {"frequency": "daily", "seasonal_period": "seven", "mase_m": 7, "horizon": 5}})"));
		FAIL("expected ParseError");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::ParseError);
		CHECK(std::string(e.message()).find("Mine") != std::string::npos);
	}
	try {
		DatasetConfig::from_json(nlohmann::json::parse(R"({"Mine": {"frequency": "daily"}})"));
		FAIL("expected ParseError");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::ParseError);
	}
}

TEST_CASE("ingest groups, sorts, and validates a long csv") {
	const std::string path = temp_file("ingest.csv");
	write_text_file(path,
	                "series_id,timestamp,value\n"
	                "b,2,30\n"
	                "a,1,2\n"
	                "b,0,10\n"
	                "a,0,1\n"
	                "b,1,20\n"
	                "a,2,3\n");
	const DatasetSpec spec{Frequency::hourly(), 24, 24, 24};
	const Corpus corpus = ingest_long_csv(path, spec);
	REQUIRE(corpus.size() == 2);
	const Series* a = corpus.find("a");
	REQUIRE(a != nullptr);
	CHECK(a->values() == std::vector<double>{1.0, 2.0, 3.0});
	CHECK(corpus.find("b")->values() == std::vector<double>{10.0, 20.0, 30.0});
	CHECK(a->seasonal_period() == 24);

	write_text_file(path, "series_id,timestamp,value\na,0,1\na,0,2\n");
	try {
		ingest_long_csv(path, spec);
		FAIL("expected duplicate timestamp");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::DuplicateTimestamp);
	}

	write_text_file(path, "series_id,timestamp,value\na,0,1\na,2,2\n");
	try {
		ingest_long_csv(path, spec);
		FAIL("expected gap");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::NonUniformSpacing);
	}

	write_text_file(path, "series_id,timestamp,value\na,0,1\na,1,nan\n");
	try {
		ingest_long_csv(path, spec);
		FAIL("expected non-finite value");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::NonFiniteValue);
	}

	write_text_file(path, "series_id,when,value\na,0,1\n");
	try {
		ingest_long_csv(path, spec);
		FAIL("expected missing column");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::MissingColumn);
	}

	write_text_file(path, "series_id,timestamp,value\na,0,1\na,2026-01-01T00:00:00Z,2\n");
	CHECK_THROWS_AS(ingest_long_csv(path, spec), Error);
	std::remove(path.c_str());
}

TEST_CASE("canonical corpus csv round-trips") {
	std::mt19937_64 rng(13);
	std::vector<Series> series;
	series.push_back(oracles::make_series("s1", oracles::gen_mixed(50, rng)));
	series.push_back(oracles::make_series("s2", oracles::gen_mixed(50, rng)));
	const Corpus corpus(std::move(series));

	const std::string path = temp_file("roundtrip.csv");
	write_text_file(path, corpus_to_long_csv(corpus));
	const Corpus back = ingest_long_csv(path, DatasetSpec{Frequency::hourly(), 24, 24, 24});
	REQUIRE(back.size() == 2);
	// Values come back at canonical 9-significant-digit precision; a second
	// round-trip is exact because canon is idempotent.
	for (const Series& s : corpus.series()) {
		const Series* r = back.find(s.id());
		REQUIRE(r != nullptr);
		REQUIRE(r->length() == s.length());
		for (std::size_t i = 0; i < s.length(); ++i)
			CHECK(r->values()[i] == canon_num(s.values()[i]));
	}
	const std::string again = corpus_to_long_csv(back);
	CHECK(again == corpus_to_long_csv(
	                   ingest_long_csv(path, DatasetSpec{Frequency::hourly(), 24, 24, 24})));
	std::remove(path.c_str());
}

TEST_CASE("ingest accepts iso-8601 timestamps on a uniform hourly grid") {
	const std::string path = temp_file("iso.csv");
	write_text_file(path,
	                "series_id,timestamp,value\n"
	                "a,2026-08-19T02:00:00Z,3\n"
	                "a,2026-08-19T00:00:00Z,1\n"
	                "a,2026-08-19T01:00:00Z,2\n");
	const Corpus corpus = ingest_long_csv(path, DatasetSpec{Frequency::hourly(), 24, 24, 24});
	const Series* a = corpus.find("a");
	REQUIRE(a != nullptr);
	CHECK(a->axis() == TimeAxis::epoch_seconds);
	CHECK(a->values() == std::vector<double>{1.0, 2.0, 3.0});
	CHECK(a->epoch_seconds(1) - a->epoch_seconds(0) == 3600);
	std::remove(path.c_str());
}

TEST_CASE("csv parser rejects ragged rows, including comma-bearing fields") {
	// Plain numeric/identifier columns only: quoting is out of scope, so a
	// field with an embedded comma surfaces as a ragged row.
	const std::string path = temp_file("quotes.csv");
	write_text_file(path, "a,b\n\"x,y\",z\n");
	CHECK_THROWS_AS(read_csv(path), Error);

	write_text_file(path, "a,b\n1\n");
	CHECK_THROWS_AS(read_csv(path), Error);

	write_text_file(path, "a,b\n1,2\n\n3,4\n");
	const CsvTable t = read_csv(path);
	CHECK(t.rows.size() == 2);
	std::remove(path.c_str());
}

TEST_CASE("format_num round-trips doubles and stays shortest") {
	CHECK(format_num(0.1) == "0.1");
	CHECK(format_num(1.0) == "1");
	CHECK(format_num(-2.5) == "-2.5");
	CHECK(format_num(0.0) == "0");
	std::mt19937_64 rng(17);
	std::uniform_real_distribution<double> u(-1e6, 1e6);
	for (int i = 0; i < 2000; ++i) {
		const double x = u(rng);
		const double back = std::strtod(format_num(x).c_str(), nullptr);
		CHECK(back == canon_num(x));
	}
}

TEST_CASE("transforms invert within tolerance and reject degenerate fits") {
	std::mt19937_64 rng(19);
	const std::vector<double> data = oracles::gen_noise(100, 50.0, 8.0, rng);

	for (TransformKind kind : {TransformKind::identity, TransformKind::zscore, TransformKind::log1p}) {
		const Transform tf = Transform::fit(kind, data);
		const std::vector<double> back = tf.invert(tf.apply(data));
		for (std::size_t i = 0; i < data.size(); ++i)
			CHECK(oracles::close(back[i], data[i], 1e-9));
	}

	const Transform z = Transform::fit(TransformKind::zscore, data);
	const std::vector<double> applied = z.apply(data);
	const auto stats = oracles::coeff_variation(applied);
	double mean = 0.0;
	for (double v : applied) mean += v;
	CHECK(std::abs(mean) < 1e-9);
	(void)stats;

	const std::vector<double> flat(10, 3.0);
	try {
		Transform::fit(TransformKind::zscore, flat);
		FAIL("expected degenerate series");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::DegenerateSeries);
	}

	const Transform lg = Transform::fit(TransformKind::log1p, data);
	const std::vector<double> bad = {0.5, -2.0};
	try {
		lg.apply(bad);
		FAIL("expected domain error");
	} catch (const Error& e) {
		CHECK(e.code() == ErrorCode::DomainError);
	}

	CHECK(parse_transform_kind("zscore") == TransformKind::zscore);
	CHECK_THROWS_AS(parse_transform_kind("sqrt"), Error);
}
