#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "tsroute/csv.hpp"
#include "tsroute/error.hpp"
#include "tsroute/series.hpp"

namespace tsroute {

/// Per-dataset seasonal metadata and evaluation horizon, loaded from a JSON
/// sidecar. Seasonal period and MASE lag are configuration, never inferred.
struct DatasetSpec {
	Frequency frequency;
	int seasonal_period = 1;
	int mase_m = 1;
	int horizon = 1;
};

class DatasetConfig {
public:
	DatasetConfig() = default;

	static DatasetConfig builtin_defaults() {
		DatasetConfig cfg;
		cfg.entries_["Traffic"] = {Frequency::hourly(), 168, 24, 168};
		cfg.entries_["Energy"] = {Frequency::hourly(), 24, 24, 24};
		cfg.entries_["Exchange"] = {Frequency::daily(), 7, 7, 96};
		cfg.entries_["M4-Daily"] = {Frequency::daily(), 7, 7, 14};
		return cfg;
	}

	static DatasetConfig from_json(const nlohmann::json& j) {
		if (!j.is_object()) raise(ErrorCode::ParseError, "dataset config must be a JSON object");
		DatasetConfig cfg = builtin_defaults();
		for (auto it = j.begin(); it != j.end(); ++it) {
			const auto& e = it.value();
			if (!e.is_object())
				raise(ErrorCode::ParseError, "dataset entry '" + it.key() + "' is not an object");
			DatasetSpec spec;
			try {
				spec.frequency = Frequency::parse(e.at("frequency").get<std::string>());
				spec.seasonal_period = e.at("seasonal_period").get<int>();
				spec.mase_m = e.at("mase_m").get<int>();
				spec.horizon = e.at("horizon").get<int>();
			} catch (const nlohmann::json::exception& ex) {
				raise(ErrorCode::ParseError, "dataset entry '" + it.key() + "': " + ex.what());
			}
			if (spec.seasonal_period < 1 || spec.mase_m < 1 || spec.horizon < 1)
				raise(ErrorCode::ParseError, "dataset entry '" + it.key() + "' has non-positive fields");
			cfg.entries_[it.key()] = spec;
		}
		return cfg;
	}

	static DatasetConfig load(const std::string& path) {
		nlohmann::json j;
		try {
			j = nlohmann::json::parse(read_text_file(path));
		} catch (const nlohmann::json::exception& e) {
			raise(ErrorCode::ParseError, "dataset config '" + path + "': " + e.what());
		}
		return from_json(j);
	}

	const DatasetSpec& at(const std::string& name) const {
		auto it = entries_.find(name);
		if (it == entries_.end())
			raise(ErrorCode::NotFound, "dataset '" + name + "' not in config");
		return it->second;
	}

	bool contains(const std::string& name) const { return entries_.count(name) > 0; }

	nlohmann::json to_json() const {
		nlohmann::json j = nlohmann::json::object();
		for (const auto& [name, spec] : entries_) {
			j[name] = {{"frequency", spec.frequency.to_string()},
			           {"seasonal_period", spec.seasonal_period},
			           {"mase_m", spec.mase_m},
			           {"horizon", spec.horizon}};
		}
		return j;
	}

private:
	std::map<std::string, DatasetSpec> entries_;
};

} // namespace tsroute
