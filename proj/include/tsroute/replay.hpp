#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tsroute/csv.hpp"
#include "tsroute/error.hpp"
#include "tsroute/forecaster.hpp"
#include "tsroute/numfmt.hpp"

namespace tsroute {

/// Pre-recorded forecasts keyed by (series_id, model_name), stored as the
/// step-ordered value sequence. A request for horizon H replays the first H
/// stored steps, so one recording serves any shorter horizon.
class ForecastStore {
public:
	void put(const std::string& series_id, const std::string& model_name,
	         std::vector<double> values) {
		store_[{series_id, model_name}] = std::move(values);
	}

	const std::vector<double>* find(const std::string& series_id,
	                                const std::string& model_name) const {
		auto it = store_.find({series_id, model_name});
		return it == store_.end() ? nullptr : &it->second;
	}

	std::size_t size() const { return store_.size(); }

	/// CSV schema: series_id,model_name,step,value with step starting at 1.
	/// Steps for one (series, model) pair must form a contiguous 1..H run.
	static ForecastStore from_csv(const CsvTable& table) {
		const std::size_t id_col = table.require_column("series_id");
		const std::size_t model_col = table.require_column("model_name");
		const std::size_t step_col = table.require_column("step");
		const std::size_t value_col = table.require_column("value");

		std::map<std::pair<std::string, std::string>, std::map<long long, double>> grouped;
		for (const auto& row : table.rows) {
			const long long step = parse_int(row[step_col], "replay store");
			if (step < 1) raise(ErrorCode::ParseError, "replay step must be >= 1");
			auto& entry = grouped[{row[id_col], row[model_col]}];
			if (!entry.emplace(step, parse_double(row[value_col], "replay store")).second)
				raise(ErrorCode::ParseError, "duplicate replay step " + std::to_string(step) +
				                                 " for series '" + row[id_col] + "'");
		}

		ForecastStore store;
		for (auto& [key, steps] : grouped) {
			std::vector<double> values;
			values.reserve(steps.size());
			long long expect = 1;
			for (const auto& [step, value] : steps) {
				if (step != expect)
					raise(ErrorCode::ParseError, "replay steps for series '" + key.first +
					                                 "' are not contiguous from 1");
				values.push_back(value);
				++expect;
			}
			store.put(key.first, key.second, std::move(values));
		}
		return store;
	}

	std::string to_csv() const {
		std::string out = "series_id,model_name,step,value\n";
		for (const auto& [key, values] : store_) {
			for (std::size_t i = 0; i < values.size(); ++i) {
				out += key.first;
				out += ',';
				out += key.second;
				out += ',';
				out += std::to_string(i + 1);
				out += ',';
				out += format_num(values[i]);
				out += '\n';
			}
		}
		return out;
	}

private:
	std::map<std::pair<std::string, std::string>, std::vector<double>> store_;
};

inline ForecastResult replay_forecast(const ForecastRequest& req, const ForecastStore& store,
                                      const std::string& model_name) {
	req.validate();
	const auto start = std::chrono::steady_clock::now();
	const std::vector<double>* values = store.find(req.series_id, model_name);
	if (!values)
		raise(ErrorCode::NotFound, "no replayed forecast for series '" + req.series_id +
		                               "' from model '" + model_name + "'");
	if (values->size() < static_cast<std::size_t>(req.horizon))
		raise(ErrorCode::NotFound, "replayed forecast for series '" + req.series_id + "' has " +
		                               std::to_string(values->size()) + " steps, need " +
		                               std::to_string(req.horizon));

	ForecastResult result;
	result.series_id = req.series_id;
	result.model_name = model_name;
	result.predicted.assign(values->begin(), values->begin() + req.horizon);
	result.latency_micros = std::chrono::duration_cast<std::chrono::microseconds>(
	                            std::chrono::steady_clock::now() - start)
	                            .count();
	detail::check_result(result, req.horizon);
	return result;
}

class ReplayForecaster final : public Forecaster {
public:
	ReplayForecaster(ForecastStore store, std::string model_name)
	    : store_(std::move(store)), model_name_(std::move(model_name)) {}

	ForecastResult forecast(const ForecastRequest& req) const override {
		return replay_forecast(req, store_, model_name_);
	}

	std::string name() const override { return model_name_; }
	ForecasterClass forecaster_class() const override { return ForecasterClass::generalist; }

	const ForecastStore& store() const { return store_; }

private:
	ForecastStore store_;
	std::string model_name_;
};

} // namespace tsroute
