#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsroute/csv.hpp"
#include "tsroute/error.hpp"
#include "tsroute/forecaster.hpp"
#include "tsroute/numfmt.hpp"
#include "tsroute/series.hpp"

namespace tsroute {

namespace detail {

inline void check_same_length(std::span<const double> actual, std::span<const double> predicted) {
	if (actual.size() != predicted.size())
		raise(ErrorCode::LengthMismatch, "actual has " + std::to_string(actual.size()) +
		                                     " values, predicted has " +
		                                     std::to_string(predicted.size()));
	if (actual.empty()) raise(ErrorCode::LengthMismatch, "metrics need at least one step");
}

} // namespace detail

/// Root mean squared error.
inline double rmse(std::span<const double> actual, std::span<const double> predicted) {
	detail::check_same_length(actual, predicted);
	double sum = 0.0;
	for (std::size_t i = 0; i < actual.size(); ++i) {
		const double e = actual[i] - predicted[i];
		sum += e * e;
	}
	return std::sqrt(sum / static_cast<double>(actual.size()));
}

/// Symmetric mean absolute percentage error, in percent, bounded [0, 200].
/// A step where both values are zero has zero error at zero level and
/// contributes 0.
inline double smape(std::span<const double> actual, std::span<const double> predicted) {
	detail::check_same_length(actual, predicted);
	double sum = 0.0;
	for (std::size_t i = 0; i < actual.size(); ++i) {
		const double denom = (std::abs(actual[i]) + std::abs(predicted[i])) / 2.0;
		if (denom == 0.0) continue;
		sum += std::abs(actual[i] - predicted[i]) / denom;
	}
	return 100.0 * sum / static_cast<double>(actual.size());
}

/// Mean absolute scaled error: horizon mean absolute error divided by the
/// in-sample mean absolute lag-m difference of the training history. The
/// scaling uses training data only. Returns nullopt when the training
/// history is (numerically) lag-m constant and the scale is undefined.
inline std::optional<double> mase(std::span<const double> actual,
                                  std::span<const double> predicted,
                                  std::span<const double> training, int m) {
	detail::check_same_length(actual, predicted);
	if (m < 1) raise(ErrorCode::InvalidPeriod, "mase lag must be >= 1");
	const std::size_t t = training.size();
	const auto lag = static_cast<std::size_t>(m);
	if (t <= lag)
		raise(ErrorCode::HistoryTooShort, "mase needs training length > lag " + std::to_string(m));

	double scale = 0.0;
	for (std::size_t i = lag; i < t; ++i) scale += std::abs(training[i] - training[i - lag]);
	scale /= static_cast<double>(t - lag);
	if (scale < 1e-12) return std::nullopt;

	double err = 0.0;
	for (std::size_t i = 0; i < actual.size(); ++i) err += std::abs(actual[i] - predicted[i]);
	err /= static_cast<double>(actual.size());
	return err / scale;
}

/// Per-series, per-model metric row. mase is nullopt when the scaling
/// denominator was zero; such rows are excluded from MASE aggregation and
/// counted separately.
struct EvalRecord {
	std::string series_id;
	std::string model_name;
	std::optional<double> mase;
	double smape = 0.0;
	double rmse = 0.0;
	int horizon = 0;
	int mase_m = 0;
};

struct ModelAggregate {
	std::string model_name;
	std::optional<double> mean_mase;
	double mean_smape = 0.0;
	double mean_rmse = 0.0;
	std::size_t n_series = 0;
	std::size_t n_mase_undefined = 0;
};

struct EvalReport {
	std::string dataset;
	std::string transform = "identity";
	std::size_t n_series = 0;
	std::vector<ModelAggregate> models;
};

inline EvalRecord evaluate_one(const SplitSeries& split, const ForecastResult& forecast) {
	detail::check_result(forecast, split.horizon);
	EvalRecord rec;
	rec.series_id = forecast.series_id;
	rec.model_name = forecast.model_name;
	rec.horizon = split.horizon;
	rec.mase_m = split.history.mase_m();
	rec.rmse = rmse(split.actuals, forecast.predicted);
	rec.smape = smape(split.actuals, forecast.predicted);
	rec.mase = mase(split.actuals, forecast.predicted, split.history.values(),
	                split.history.mase_m());
	return rec;
}

/// Evaluates every (series, model) pair and aggregates unweighted means per
/// model. Every model must cover every split series; aggregation order is
/// fixed by sorting, so input order never changes the output.
inline EvalReport evaluate_corpus(const std::vector<SplitSeries>& splits,
                                  const std::vector<ForecastResult>& forecasts,
                                  const std::string& dataset_name,
                                  std::vector<EvalRecord>* records_out = nullptr) {
	std::map<std::string, const SplitSeries*> split_by_id;
	for (const SplitSeries& s : splits) split_by_id.emplace(s.history.id(), &s);
	if (split_by_id.size() != splits.size())
		raise(ErrorCode::MismatchedIds, "duplicate series ids in splits");

	std::map<std::string, std::map<std::string, EvalRecord>> by_model_series;
	for (const ForecastResult& f : forecasts) {
		auto it = split_by_id.find(f.series_id);
		if (it == split_by_id.end())
			raise(ErrorCode::NotFound, "forecast for unknown series '" + f.series_id + "'");
		EvalRecord rec = evaluate_one(*it->second, f);
		by_model_series[rec.model_name][rec.series_id] = rec;
	}

	EvalReport report;
	report.dataset = dataset_name;
	report.n_series = splits.size();
	if (records_out) records_out->clear();

	for (auto& [model, rows] : by_model_series) {
		ModelAggregate agg;
		agg.model_name = model;
		agg.n_series = splits.size();
		double mase_sum = 0.0;
		std::size_t mase_n = 0;
		for (const auto& [id, split] : split_by_id) {
			auto it = rows.find(id);
			if (it == rows.end())
				raise(ErrorCode::MissingForecast,
				      "model '" + model + "' has no forecast for series '" + id + "'");
			const EvalRecord& rec = it->second;
			agg.mean_smape += rec.smape;
			agg.mean_rmse += rec.rmse;
			if (rec.mase) {
				mase_sum += *rec.mase;
				++mase_n;
			} else {
				++agg.n_mase_undefined;
			}
			if (records_out) records_out->push_back(rec);
		}
		agg.mean_smape /= static_cast<double>(splits.size());
		agg.mean_rmse /= static_cast<double>(splits.size());
		if (mase_n > 0) agg.mean_mase = mase_sum / static_cast<double>(mase_n);
		report.models.push_back(std::move(agg));
	}
	return report;
}

inline std::string eval_records_to_csv(const std::vector<EvalRecord>& records) {
	std::string out = "series_id,model,mase,smape,rmse\n";
	for (const EvalRecord& r : records) {
		out += r.series_id;
		out += ',';
		out += r.model_name;
		out += ',';
		out += r.mase ? format_num(*r.mase) : "undefined";
		out += ',';
		out += format_num(r.smape);
		out += ',';
		out += format_num(r.rmse);
		out += '\n';
	}
	return out;
}

inline std::vector<EvalRecord> eval_records_from_csv(const CsvTable& table) {
	const std::size_t id_col = table.require_column("series_id");
	const std::size_t model_col = table.require_column("model");
	const std::size_t mase_col = table.require_column("mase");
	const std::size_t smape_col = table.require_column("smape");
	const std::size_t rmse_col = table.require_column("rmse");
	std::vector<EvalRecord> out;
	out.reserve(table.rows.size());
	for (const auto& row : table.rows) {
		EvalRecord r;
		r.series_id = row[id_col];
		r.model_name = row[model_col];
		if (row[mase_col] != "undefined") r.mase = parse_double(row[mase_col]);
		r.smape = parse_double(row[smape_col]);
		r.rmse = parse_double(row[rmse_col]);
		out.push_back(std::move(r));
	}
	return out;
}

inline nlohmann::json eval_report_to_json(const EvalReport& report) {
	nlohmann::json models = nlohmann::json::array();
	for (const ModelAggregate& m : report.models) {
		nlohmann::json row{{"model", m.model_name},
		                   {"smape", canon_num(m.mean_smape)},
		                   {"rmse", canon_num(m.mean_rmse)},
		                   {"n_series", m.n_series},
		                   {"n_mase_undefined", m.n_mase_undefined}};
		if (m.mean_mase)
			row["mase"] = canon_num(*m.mean_mase);
		else
			row["mase"] = nullptr;
		models.push_back(std::move(row));
	}
	return nlohmann::json{{"dataset", report.dataset},
	                      {"transform", report.transform},
	                      {"n_series", report.n_series},
	                      {"models", std::move(models)}};
}

} // namespace tsroute
