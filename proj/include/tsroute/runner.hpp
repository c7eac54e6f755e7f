#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tsroute/bench.hpp"
#include "tsroute/dataset.hpp"
#include "tsroute/dlinear.hpp"
#include "tsroute/error.hpp"
#include "tsroute/features.hpp"
#include "tsroute/forecaster.hpp"
#include "tsroute/ingest.hpp"
#include "tsroute/lag_ridge.hpp"
#include "tsroute/metrics.hpp"
#include "tsroute/numfmt.hpp"
#include "tsroute/pareto.hpp"
#include "tsroute/remote.hpp"
#include "tsroute/replay.hpp"
#include "tsroute/router.hpp"
#include "tsroute/seasonal_naive.hpp"
#include "tsroute/series.hpp"
#include "tsroute/transform.hpp"

namespace tsroute {

/// Runs fn(0), ..., fn(n-1) across at most `workers` threads. fn must only
/// write per-index state. Exceptions are captured per index and the one with
/// the lowest index is rethrown after all threads join, so failures are
/// reported deterministically regardless of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
	if (n == 0) return;
	const int bound = std::clamp<int>(workers, 1, static_cast<int>(std::min<std::size_t>(n, 256)));
	if (bound == 1) {
		for (std::size_t i = 0; i < n; ++i) fn(i);
		return;
	}
	std::vector<std::exception_ptr> errors(n);
	std::atomic<std::size_t> next{0};
	std::vector<std::thread> pool;
	pool.reserve(static_cast<std::size_t>(bound));
	for (int t = 0; t < bound; ++t) {
		pool.emplace_back([&] {
			for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
				try {
					fn(i);
				} catch (...) {
					errors[i] = std::current_exception();
				}
			}
		});
	}
	for (std::thread& t : pool) t.join();
	for (std::size_t i = 0; i < n; ++i)
		if (errors[i]) std::rethrow_exception(errors[i]);
}

namespace detail {

/// Reads j[key] as T. A missing key yields the fallback; a mistyped value is
/// the user's error and raises ParseError, with `what` naming the field
/// family so the message reads "backend option 'period' has the wrong type".
template <typename T>
T typed_field_or(const nlohmann::json& j, const char* what, const char* key, T fallback) {
	if (!j.contains(key)) return fallback;
	try {
		return j.at(key).get<T>();
	} catch (const nlohmann::json::exception&) {
		raise(ErrorCode::ParseError, std::string(what) + " '" + key + "' has the wrong type");
	}
}

template <typename T>
T option_or(const nlohmann::json& options, const char* key, T fallback) {
	return typed_field_or(options, "backend option", key, std::move(fallback));
}

template <typename T>
T config_or(const nlohmann::json& j, const char* key, T fallback) {
	return typed_field_or(j, "run config field", key, std::move(fallback));
}

} // namespace detail

/// One forecasting backend: a kind tag plus kind-specific options.
struct BackendSpec {
	std::string kind = "seasonal_naive";
	nlohmann::json options = nlohmann::json::object();

	static BackendSpec from_json(const nlohmann::json& j) {
		if (!j.is_object()) raise(ErrorCode::ParseError, "backend spec must be a JSON object");
		BackendSpec spec;
		spec.kind = detail::option_or(j, "kind", std::string("seasonal_naive"));
		for (auto it = j.begin(); it != j.end(); ++it)
			if (it.key() != "kind") spec.options[it.key()] = it.value();
		return spec;
	}

	nlohmann::json to_json() const {
		nlohmann::json j = options;
		j["kind"] = kind;
		return j;
	}
};

/// Builds a forecaster from its spec. Defaults lean on the dataset's seasonal
/// metadata: seasonal_naive repeats one season, dlinear looks back two.
inline ForecasterPtr make_forecaster(const BackendSpec& spec, const DatasetSpec& dataset) {
	const nlohmann::json& opt = spec.options;
	if (spec.kind == "seasonal_naive") {
		int period = detail::option_or(opt, "period", dataset.seasonal_period);
		return std::make_shared<SeasonalNaiveForecaster>(period);
	}
	if (spec.kind == "dlinear") {
		int lookback = detail::option_or(opt, "lookback", std::max(2 * dataset.seasonal_period, 8));
		int kernel = detail::option_or(opt, "kernel", 25);
		return std::make_shared<DLinearForecaster>(lookback, kernel);
	}
	if (spec.kind == "lagridge") {
		LagRidgeConfig cfg;
		cfg.mode = parse_starvation_mode(
		    detail::option_or(opt, "mode", std::string(to_string(cfg.mode))));
		cfg.lambda = detail::option_or(opt, "lambda", cfg.lambda);
		cfg.min_train_rows = detail::option_or(opt, "min_train_rows", cfg.min_train_rows);
		return std::make_shared<LagRidgeForecaster>(cfg);
	}
	if (spec.kind == "replay") {
		if (!opt.contains("store"))
			raise(ErrorCode::InvalidArgument, "replay backend needs a 'store' CSV path");
		std::string path = detail::option_or(opt, "store", std::string());
		std::string model = detail::option_or(opt, "model", std::string("replay"));
		ForecastStore store = ForecastStore::from_csv(read_csv(path));
		return std::make_shared<ReplayForecaster>(std::move(store), std::move(model));
	}
	if (spec.kind == "remote") {
		RemoteEndpoint ep;
		ep.host = detail::option_or(opt, "host", ep.host);
		ep.port = detail::option_or(opt, "port", ep.port);
		ep.path = detail::option_or(opt, "path", ep.path);
		ep.timeout_seconds = detail::option_or(opt, "timeout_seconds", ep.timeout_seconds);
		ep.max_in_flight = detail::option_or(opt, "max_in_flight", ep.max_in_flight);
		return std::make_shared<RemoteForecaster>(ep);
	}
	raise(ErrorCode::InvalidArgument, "unknown backend kind '" + spec.kind + "'");
}

/// Everything one run needs: corpus location, dataset + router configuration,
/// the two backend roles, and output plumbing. CLI flags override the file.
struct RunConfig {
	std::string corpus_csv;
	std::string dataset_name = "Energy";
	std::string dataset_config_path;
	std::string router_config_path;
	BackendSpec generalist{"dlinear", nlohmann::json::object()};
	BackendSpec specialist{"seasonal_naive", nlohmann::json::object()};
	TransformKind transform = TransformKind::identity;
	CostModel cost;
	std::string out_dir = "out";
	std::uint64_t seed = 0;
	bool strict = false;
	int workers = 4;
	int coldstart_context = 48;
	int bench_context = 168;
	int bench_horizon = 24;
	int bench_iterations = 200;

	static RunConfig from_json(const nlohmann::json& j) {
		if (!j.is_object()) raise(ErrorCode::ParseError, "run config must be a JSON object");
		RunConfig cfg;
		cfg.corpus_csv = detail::config_or(j, "corpus_csv", cfg.corpus_csv);
		cfg.dataset_name = detail::config_or(j, "dataset", cfg.dataset_name);
		cfg.dataset_config_path = detail::config_or(j, "dataset_config", cfg.dataset_config_path);
		cfg.router_config_path = detail::config_or(j, "router_config", cfg.router_config_path);
		if (j.contains("generalist")) cfg.generalist = BackendSpec::from_json(j.at("generalist"));
		if (j.contains("specialist")) cfg.specialist = BackendSpec::from_json(j.at("specialist"));
		cfg.transform = parse_transform_kind(detail::config_or(j, "transform", std::string("identity")));
		if (j.contains("cost")) {
			const nlohmann::json& c = j.at("cost");
			if (!c.is_object()) raise(ErrorCode::ParseError, "run config field 'cost' must be an object");
			cfg.cost.c_fm = detail::config_or(c, "c_fm", cfg.cost.c_fm);
			cfg.cost.c_spec = detail::config_or(c, "c_spec", cfg.cost.c_spec);
		}
		cfg.out_dir = detail::config_or(j, "out_dir", cfg.out_dir);
		cfg.seed = detail::config_or(j, "seed", cfg.seed);
		cfg.strict = detail::config_or(j, "strict", cfg.strict);
		cfg.workers = detail::config_or(j, "workers", cfg.workers);
		cfg.coldstart_context = detail::config_or(j, "coldstart_context", cfg.coldstart_context);
		if (j.contains("bench")) {
			const nlohmann::json& b = j.at("bench");
			if (!b.is_object()) raise(ErrorCode::ParseError, "run config field 'bench' must be an object");
			cfg.bench_context = detail::config_or(b, "context", cfg.bench_context);
			cfg.bench_horizon = detail::config_or(b, "horizon", cfg.bench_horizon);
			cfg.bench_iterations = detail::config_or(b, "iterations", cfg.bench_iterations);
		}
		return cfg;
	}

	static RunConfig load(const std::string& path) {
		nlohmann::json j;
		try {
			j = nlohmann::json::parse(read_text_file(path));
		} catch (const nlohmann::json::exception& e) {
			raise(ErrorCode::ParseError, "run config '" + path + "': " + e.what());
		}
		return from_json(j);
	}

	nlohmann::json to_json() const {
		return nlohmann::json{
		    {"corpus_csv", corpus_csv},
		    {"dataset", dataset_name},
		    {"dataset_config", dataset_config_path},
		    {"router_config", router_config_path},
		    {"generalist", generalist.to_json()},
		    {"specialist", specialist.to_json()},
		    {"transform", to_string(transform)},
		    {"cost", {{"c_fm", canon_num(cost.c_fm)}, {"c_spec", canon_num(cost.c_spec)}}},
		    {"out_dir", out_dir},
		    {"seed", seed},
		    {"strict", strict},
		    {"workers", workers},
		    {"coldstart_context", coldstart_context},
		    {"bench",
		     {{"context", bench_context}, {"horizon", bench_horizon}, {"iterations", bench_iterations}}}};
	}

	DatasetSpec dataset() const {
		DatasetConfig dc = dataset_config_path.empty() ? DatasetConfig::builtin_defaults()
		                                               : DatasetConfig::load(dataset_config_path);
		return dc.at(dataset_name);
	}

	RouterConfig router() const {
		if (router_config_path.empty()) return RouterConfig{};
		nlohmann::json j;
		try {
			j = nlohmann::json::parse(read_text_file(router_config_path));
		} catch (const nlohmann::json::exception& e) {
			raise(ErrorCode::ParseError, "router config '" + router_config_path + "': " + e.what());
		}
		return RouterConfig::from_json(j);
	}
};

struct SkipEntry {
	std::string series_id;
	std::string reason;
};

struct PipelineResult {
	std::vector<SeriesFeatures> features;
	std::vector<RouteDecision> decisions;
	std::vector<EvalRecord> records;
	EvalReport report;
	ParetoCurve curve;
	DominanceReport dominance;
	std::size_t n_fm_wins = 0;
	std::size_t n_labeled = 0;
	std::vector<SkipEntry> skipped;
	std::vector<std::string> warnings;
	std::map<std::string, std::string> artifact_paths;
};

namespace detail {

/// Prefixes a skip reason with the series id unless the underlying error
/// already names it, so strict-mode failures read cleanly.
inline std::string name_series(const std::string& id, const std::string& reason) {
	const std::string prefix = "series '" + id + "'";
	return reason.rfind(prefix, 0) == 0 ? reason : prefix + ": " + reason;
}

inline void write_artifact(const std::string& out_dir, const std::string& name,
                           const std::string& content,
                           std::map<std::string, std::string>& paths) {
	std::filesystem::create_directories(out_dir);
	std::string path = (std::filesystem::path(out_dir) / name).string();
	write_text_file(path, content);
	paths[name] = path;
}

/// Shared forecast phase: per series, split off the final horizon, compute
/// history-side features, and forecast with both backends. The specialist
/// sees the configured transform and its forecast is mapped back, so
/// evaluation stays on the original scale.
struct ForecastPhase {
	std::vector<SplitSeries> splits;
	std::vector<SeriesFeatures> features;
	std::vector<ForecastResult> forecasts;
	std::string generalist_name;
	std::string specialist_name;
	std::vector<SkipEntry> skipped;
	std::vector<std::string> warnings;
};

inline ForecastPhase forecast_corpus(const RunConfig& cfg, const DatasetSpec& dataset) {
	if (cfg.corpus_csv.empty()) raise(ErrorCode::InvalidArgument, "config has no corpus_csv");
	const Corpus corpus = ingest_long_csv(cfg.corpus_csv, dataset);
	const ForecasterPtr generalist = make_forecaster(cfg.generalist, dataset);
	const ForecasterPtr specialist = make_forecaster(cfg.specialist, dataset);
	if (generalist->name() == specialist->name())
		raise(ErrorCode::InvalidArgument,
		      "generalist and specialist resolve to the same model name '" + generalist->name() + "'");

	struct Outcome {
		std::optional<SplitSeries> split;
		std::optional<SeriesFeatures> features;
		std::optional<ForecastResult> gen;
		std::optional<ForecastResult> spec;
		std::vector<std::string> warnings;
		std::optional<ErrorCode> skip_code;
		std::optional<std::string> skip_reason;
	};
	const auto& all = corpus.series();
	std::vector<Outcome> outcomes(all.size());

	parallel_for(all.size(), cfg.workers, [&](std::size_t i) {
		Outcome& out = outcomes[i];
		const Series& s = all[i];
		try {
			SplitSeries split = split_last_h(s, dataset.horizon);
			out.features = extract_features(split.history);
			const ForecastRequest req = make_request(split.history, dataset.horizon);
			ForecastResult gen = generalist->forecast(req);
			Transform tf = Transform::fit(cfg.transform, split.history.values());
			ForecastRequest spec_req = req;
			spec_req.history = tf.apply(split.history.values());
			ForecastResult spec = specialist->forecast(spec_req);
			spec.predicted = tf.invert(spec.predicted);
			detail::check_result(spec, dataset.horizon);
			for (const std::string& w : gen.warnings)
				out.warnings.push_back(s.id() + ": " + gen.model_name + ": " + w);
			for (const std::string& w : spec.warnings)
				out.warnings.push_back(s.id() + ": " + spec.model_name + ": " + w);
			out.split = std::move(split);
			out.gen = std::move(gen);
			out.spec = std::move(spec);
		} catch (const Error& e) {
			out.skip_code = e.code();
			out.skip_reason = e.message();
		}
	});

	ForecastPhase phase;
	phase.generalist_name = generalist->name();
	phase.specialist_name = specialist->name();
	for (std::size_t i = 0; i < outcomes.size(); ++i) {
		Outcome& out = outcomes[i];
		if (out.skip_reason) {
			if (cfg.strict) raise(*out.skip_code, detail::name_series(all[i].id(), *out.skip_reason));
			phase.skipped.push_back({all[i].id(), *out.skip_reason});
			continue;
		}
		phase.splits.push_back(std::move(*out.split));
		phase.features.push_back(std::move(*out.features));
		phase.forecasts.push_back(std::move(*out.gen));
		phase.forecasts.push_back(std::move(*out.spec));
		for (std::string& w : out.warnings) phase.warnings.push_back(std::move(w));
	}
	if (phase.splits.empty()) raise(ErrorCode::InvalidArgument, "no series survived forecasting");
	return phase;
}

} // namespace detail

/// Full chain over one corpus: forecast phase, routing, evaluation, and the
/// cost-accuracy sweep. Strict mode fails on the first broken series; lenient
/// mode skips it and records why. Artifacts are deterministic: nothing
/// timing-dependent is written and every aggregation runs in sorted order.
inline PipelineResult run_pipeline(const RunConfig& cfg) {
	const DatasetSpec dataset = cfg.dataset();
	const RouterConfig router_cfg = cfg.router();
	router_cfg.validate();
	cfg.cost.validate();

	detail::ForecastPhase phase = detail::forecast_corpus(cfg, dataset);
	PipelineResult result;
	result.features = std::move(phase.features);
	result.skipped = std::move(phase.skipped);
	result.warnings = std::move(phase.warnings);

	result.decisions = route_all(result.features, router_cfg);
	result.report =
	    evaluate_corpus(phase.splits, phase.forecasts, cfg.dataset_name, &result.records);
	result.report.transform = to_string(cfg.transform);

	// Join per-series MASE across the two models for labels and the sweep.
	std::map<std::string, double> score_by_id;
	for (const RouteDecision& d : result.decisions) score_by_id[d.series_id] = d.advantage_score;
	std::map<std::string, std::map<std::string, std::optional<double>>> mase_by_id;
	for (const EvalRecord& r : result.records) mase_by_id[r.series_id][r.model_name] = r.mase;

	std::vector<SweepRecord> sweep;
	sweep.reserve(mase_by_id.size());
	for (const auto& [id, models] : mase_by_id) {
		const auto g = models.find(phase.generalist_name);
		const auto s = models.find(phase.specialist_name);
		const bool defined = g != models.end() && s != models.end() && g->second && s->second;
		if (!defined) {
			if (cfg.strict)
				raise(ErrorCode::MissingModelResult, "series '" + id + "' has undefined MASE");
			result.warnings.push_back(id + ": undefined MASE, excluded from labels and sweep");
			continue;
		}
		const WinLabel label = make_win_label(id, *g->second, *s->second);
		if (label.fm_wins) ++result.n_fm_wins;
		++result.n_labeled;
		sweep.push_back({id, score_by_id.at(id), *g->second, *s->second});
	}
	if (sweep.empty())
		raise(ErrorCode::MissingModelResult, "no series has a defined MASE under both models");
	result.curve = pareto_sweep(std::move(sweep), cfg.cost, make_alpha_grid());
	result.dominance = dominance_check(result.curve);

	detail::write_artifact(cfg.out_dir, "features.csv", features_to_csv(result.features),
	                       result.artifact_paths);
	detail::write_artifact(cfg.out_dir, "decisions.csv", decisions_to_csv(result.decisions),
	                       result.artifact_paths);
	detail::write_artifact(cfg.out_dir, "eval.csv", eval_records_to_csv(result.records),
	                       result.artifact_paths);
	detail::write_artifact(cfg.out_dir, "curve.csv", curve_to_csv(result.curve),
	                       result.artifact_paths);

	nlohmann::json report = eval_report_to_json(result.report);
	report["seed"] = cfg.seed;
	report["generalist"] = phase.generalist_name;
	report["specialist"] = phase.specialist_name;
	report["knee"] = knee_to_json(result.curve, result.dominance);
	report["cost_model"] = {{"c_fm", canon_num(cfg.cost.c_fm)}, {"c_spec", canon_num(cfg.cost.c_spec)}};
	report["router"] = router_cfg.to_json();
	report["n_fm_wins"] = result.n_fm_wins;
	report["n_labeled"] = result.n_labeled;
	report["n_skipped"] = result.skipped.size();
	nlohmann::json skipped = nlohmann::json::array();
	for (const SkipEntry& s : result.skipped)
		skipped.push_back({{"series_id", s.series_id}, {"reason", s.reason}});
	report["skipped"] = skipped;
	detail::write_artifact(cfg.out_dir, "report.json", report.dump(2) + "\n", result.artifact_paths);
	return result;
}

struct EvaluateResult {
	std::vector<EvalRecord> records;
	EvalReport report;
	std::vector<SkipEntry> skipped;
	std::vector<std::string> warnings;
	std::map<std::string, std::string> artifact_paths;
};

/// Forecast-and-score only: both backends over every series, per-series
/// metric rows plus per-model aggregates, no routing or sweep.
inline EvaluateResult run_evaluate(const RunConfig& cfg) {
	const DatasetSpec dataset = cfg.dataset();
	detail::ForecastPhase phase = detail::forecast_corpus(cfg, dataset);

	EvaluateResult result;
	result.skipped = std::move(phase.skipped);
	result.warnings = std::move(phase.warnings);
	result.report =
	    evaluate_corpus(phase.splits, phase.forecasts, cfg.dataset_name, &result.records);
	result.report.transform = to_string(cfg.transform);

	detail::write_artifact(cfg.out_dir, "eval.csv", eval_records_to_csv(result.records),
	                       result.artifact_paths);
	nlohmann::json report = eval_report_to_json(result.report);
	report["seed"] = cfg.seed;
	report["generalist"] = phase.generalist_name;
	report["specialist"] = phase.specialist_name;
	report["n_skipped"] = result.skipped.size();
	nlohmann::json skipped = nlohmann::json::array();
	for (const SkipEntry& s : result.skipped)
		skipped.push_back({{"series_id", s.series_id}, {"reason", s.reason}});
	report["skipped"] = skipped;
	detail::write_artifact(cfg.out_dir, "report.json", report.dump(2) + "\n", result.artifact_paths);
	return result;
}

struct ColdStartBackendRow {
	std::string name;
	std::optional<double> full_mase;
	std::optional<double> cold_mase;
	std::optional<double> degradation_ratio;
	std::size_t n_series = 0;
	std::size_t n_undefined = 0;
};

struct ColdStartReport {
	std::string dataset;
	int context = 0;
	int horizon = 0;
	std::vector<ColdStartBackendRow> rows;
	std::vector<SkipEntry> skipped;
	std::vector<std::string> warnings;
	std::string artifact_path;
};

/// Forecasts each series twice per backend: once from the full history and
/// once from only the trailing `coldstart_context` points. MASE in both
/// conditions is scaled by the full history's seasonal naive error, so the
/// ratio isolates forecast degradation rather than denominator drift.
inline ColdStartReport run_coldstart(const RunConfig& cfg) {
	const DatasetSpec dataset = cfg.dataset();
	if (cfg.coldstart_context < 1)
		raise(ErrorCode::InvalidArgument, "cold-start context must be positive");
	if (cfg.corpus_csv.empty()) raise(ErrorCode::InvalidArgument, "config has no corpus_csv");
	const Corpus corpus = ingest_long_csv(cfg.corpus_csv, dataset);

	std::vector<std::pair<std::string, ForecasterPtr>> backends;
	backends.emplace_back("generalist", make_forecaster(cfg.generalist, dataset));
	backends.emplace_back("specialist", make_forecaster(cfg.specialist, dataset));
	std::sort(backends.begin(), backends.end(), [](const auto& a, const auto& b) {
		return a.second->name() < b.second->name();
	});
	if (backends[0].second->name() == backends[1].second->name())
		raise(ErrorCode::InvalidArgument, "cold start needs two distinct backend names");

	struct Outcome {
		// Parallel to `backends`; nullopt = MASE undefined for that series.
		std::vector<std::optional<double>> full;
		std::vector<std::optional<double>> cold;
		std::optional<ErrorCode> skip_code;
		std::optional<std::string> skip_reason;
	};
	const auto& all = corpus.series();
	std::vector<Outcome> outcomes(all.size());
	const auto context = static_cast<std::size_t>(cfg.coldstart_context);

	parallel_for(all.size(), cfg.workers, [&](std::size_t i) {
		Outcome& out = outcomes[i];
		const Series& s = all[i];
		try {
			const SplitSeries split = split_last_h(s, dataset.horizon);
			if (split.history.length() < context)
				raise(ErrorCode::HistoryTooShort,
				      "history has " + std::to_string(split.history.length()) +
				          " points, fewer than the cold-start context " + std::to_string(context));
			const Series cold_history = split.history.suffix(context);
			const ForecastRequest full_req = make_request(split.history, dataset.horizon);
			const ForecastRequest cold_req = make_request(cold_history, dataset.horizon);
			for (const auto& [role, backend] : backends) {
				const ForecastResult full_fc = backend->forecast(full_req);
				const ForecastResult cold_fc = backend->forecast(cold_req);
				// Full-history denominator in both conditions.
				out.full.push_back(mase(split.actuals, full_fc.predicted,
				                        split.history.values(), split.history.mase_m()));
				out.cold.push_back(mase(split.actuals, cold_fc.predicted,
				                        split.history.values(), split.history.mase_m()));
			}
		} catch (const Error& e) {
			out.skip_code = e.code();
			out.skip_reason = e.message();
			out.full.clear();
			out.cold.clear();
		}
	});

	ColdStartReport report;
	report.dataset = cfg.dataset_name;
	report.context = cfg.coldstart_context;
	report.horizon = dataset.horizon;

	std::vector<double> full_sum(backends.size(), 0.0), cold_sum(backends.size(), 0.0);
	std::vector<std::size_t> defined(backends.size(), 0), undefined(backends.size(), 0);
	for (std::size_t i = 0; i < outcomes.size(); ++i) {
		const Outcome& out = outcomes[i];
		if (out.skip_reason) {
			if (cfg.strict) raise(*out.skip_code, detail::name_series(all[i].id(), *out.skip_reason));
			report.skipped.push_back({all[i].id(), *out.skip_reason});
			continue;
		}
		for (std::size_t b = 0; b < backends.size(); ++b) {
			if (out.full[b] && out.cold[b]) {
				full_sum[b] += *out.full[b];
				cold_sum[b] += *out.cold[b];
				++defined[b];
			} else {
				++undefined[b];
			}
		}
	}

	for (std::size_t b = 0; b < backends.size(); ++b) {
		ColdStartBackendRow row;
		row.name = backends[b].second->name();
		row.n_series = defined[b];
		row.n_undefined = undefined[b];
		if (defined[b] > 0) {
			row.full_mase = full_sum[b] / static_cast<double>(defined[b]);
			row.cold_mase = cold_sum[b] / static_cast<double>(defined[b]);
			if (*row.full_mase > 0.0) row.degradation_ratio = *row.cold_mase / *row.full_mase;
		}
		report.rows.push_back(std::move(row));
	}
	if (report.rows.empty() || (defined[0] == 0 && defined[1] == 0))
		raise(ErrorCode::MissingModelResult, "no series produced a defined MASE in both conditions");

	auto opt_json = [](const std::optional<double>& v) {
		return v ? nlohmann::json(canon_num(*v)) : nlohmann::json(nullptr);
	};
	nlohmann::json j;
	j["dataset"] = report.dataset;
	j["context"] = report.context;
	j["horizon"] = report.horizon;
	nlohmann::json rows = nlohmann::json::array();
	for (const ColdStartBackendRow& row : report.rows)
		rows.push_back({{"name", row.name},
		                {"full_mase", opt_json(row.full_mase)},
		                {"cold_mase", opt_json(row.cold_mase)},
		                {"degradation_ratio", opt_json(row.degradation_ratio)},
		                {"n_series", row.n_series},
		                {"n_undefined", row.n_undefined}});
	j["backends"] = rows;
	j["n_skipped"] = report.skipped.size();
	nlohmann::json skipped = nlohmann::json::array();
	for (const SkipEntry& s : report.skipped)
		skipped.push_back({{"series_id", s.series_id}, {"reason", s.reason}});
	j["skipped"] = skipped;
	std::map<std::string, std::string> paths;
	detail::write_artifact(cfg.out_dir, "coldstart.json", j.dump(2) + "\n", paths);
	report.artifact_path = paths.at("coldstart.json");
	return report;
}

struct BenchRow {
	std::string name;
	std::string forecaster_class;
	LatencyStats stats;
	double throughput_per_sec = 0.0;
	std::string note;
};

struct BenchReport {
	std::vector<BenchRow> rows;
	std::string artifact_path;
};

/// Times each backend on one synthetic request (seasonal sine plus trend at
/// the configured context length) and derives throughput as 1/mean. Remote
/// rows are flagged because their latency includes the network round-trip.
inline BenchReport run_bench(const RunConfig& cfg) {
	const DatasetSpec dataset = cfg.dataset();
	if (cfg.bench_context < 1 || cfg.bench_horizon < 1)
		raise(ErrorCode::InvalidArgument, "bench context and horizon must be positive");

	ForecastRequest req;
	req.series_id = "bench";
	req.horizon = cfg.bench_horizon;
	req.frequency = dataset.frequency;
	req.history_start_epoch_s = 0;
	req.history.resize(static_cast<std::size_t>(cfg.bench_context));
	const double period = std::max(dataset.seasonal_period, 2);
	for (std::size_t i = 0; i < req.history.size(); ++i) {
		const auto t = static_cast<double>(i);
		req.history[i] = 100.0 + 20.0 * std::sin(2.0 * std::numbers::pi * t / period) + 0.05 * t;
	}

	std::vector<std::pair<BackendSpec, ForecasterPtr>> backends;
	backends.emplace_back(cfg.generalist, make_forecaster(cfg.generalist, dataset));
	backends.emplace_back(cfg.specialist, make_forecaster(cfg.specialist, dataset));
	std::sort(backends.begin(), backends.end(), [](const auto& a, const auto& b) {
		return a.second->name() < b.second->name();
	});

	BenchReport report;
	for (const auto& [spec, backend] : backends) {
		BenchRow row;
		row.name = backend->name();
		row.forecaster_class = to_string(backend->forecaster_class());
		row.stats = bench_latency(*backend, req, cfg.bench_iterations);
		row.throughput_per_sec = row.stats.mean_micros > 0.0 ? 1e6 / row.stats.mean_micros : 0.0;
		if (spec.kind == "remote") row.note = "latency includes network round-trip";
		report.rows.push_back(std::move(row));
	}

	std::string csv = "backend,class,p50_micros,p95_micros,mean_micros,throughput_per_sec,note\n";
	for (const BenchRow& row : report.rows) {
		csv += row.name;
		csv += ',';
		csv += row.forecaster_class;
		csv += ',';
		csv += format_num(row.stats.p50_micros);
		csv += ',';
		csv += format_num(row.stats.p95_micros);
		csv += ',';
		csv += format_num(row.stats.mean_micros);
		csv += ',';
		csv += format_num(row.throughput_per_sec);
		csv += ',';
		csv += row.note;
		csv += '\n';
	}
	std::map<std::string, std::string> paths;
	detail::write_artifact(cfg.out_dir, "bench.csv", csv, paths);
	report.artifact_path = paths.at("bench.csv");
	return report;
}

} // namespace tsroute
