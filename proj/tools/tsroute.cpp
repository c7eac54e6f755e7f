#include <cstdint>
#include <exception>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tsroute/runner.hpp"

namespace {

using namespace tsroute;

struct GlobalFlags {
	std::string config_path;
	std::string out_dir;
	std::optional<std::uint64_t> seed;
	std::optional<int> workers;
	bool strict = false;
};

RunConfig resolve_config(const GlobalFlags& flags) {
	RunConfig cfg = flags.config_path.empty() ? RunConfig{} : RunConfig::load(flags.config_path);
	if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
	if (flags.seed) cfg.seed = *flags.seed;
	if (flags.strict) cfg.strict = true;
	if (flags.workers) cfg.workers = *flags.workers;
	return cfg;
}

void print_warnings(const std::vector<std::string>& warnings,
                    const std::vector<SkipEntry>& skipped) {
	for (const SkipEntry& s : skipped)
		std::cerr << "skipped series '" << s.series_id << "': " << s.reason << "\n";
	for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::string opt_num(const std::optional<double>& v) { return v ? format_num(*v) : "undefined"; }

void cmd_ingest(const RunConfig& cfg) {
	const DatasetSpec dataset = cfg.dataset();
	if (cfg.corpus_csv.empty()) raise(ErrorCode::InvalidArgument, "config has no corpus_csv");
	const Corpus corpus = ingest_long_csv(cfg.corpus_csv, dataset);

	std::size_t n_points = 0, min_len = 0, max_len = 0;
	for (const Series& s : corpus.series()) {
		n_points += s.length();
		min_len = min_len == 0 ? s.length() : std::min(min_len, s.length());
		max_len = std::max(max_len, s.length());
	}
	std::map<std::string, std::string> paths;
	detail::write_artifact(cfg.out_dir, "corpus.csv", corpus_to_long_csv(corpus), paths);
	nlohmann::json j{{"dataset", cfg.dataset_name},
	                 {"frequency", dataset.frequency.to_string()},
	                 {"seasonal_period", dataset.seasonal_period},
	                 {"mase_m", dataset.mase_m},
	                 {"horizon", dataset.horizon},
	                 {"n_series", corpus.size()},
	                 {"n_points", n_points},
	                 {"min_length", min_len},
	                 {"max_length", max_len}};
	detail::write_artifact(cfg.out_dir, "ingest.json", j.dump(2) + "\n", paths);
	std::cout << "ingested " << corpus.size() << " series (" << n_points << " points) from "
	          << cfg.corpus_csv << "\n";
	for (const auto& [name, path] : paths) std::cout << "wrote " << path << "\n";
}

void cmd_features(const RunConfig& cfg, double fraction) {
	const DatasetSpec dataset = cfg.dataset();
	if (cfg.corpus_csv.empty()) raise(ErrorCode::InvalidArgument, "config has no corpus_csv");
	const Corpus corpus = ingest_long_csv(cfg.corpus_csv, dataset);
	std::vector<SeriesFeatures> rows;
	rows.reserve(corpus.size());
	for (const Series& s : corpus.series())
		rows.push_back(fraction >= 1.0 ? extract_features(s) : extract_all(s, fraction));
	std::map<std::string, std::string> paths;
	detail::write_artifact(cfg.out_dir, "features.csv", features_to_csv(rows), paths);
	std::cout << "extracted features for " << rows.size() << " series\n";
	std::cout << "wrote " << paths.at("features.csv") << "\n";
}

void cmd_route(const RunConfig& cfg, const std::string& features_path) {
	const RouterConfig router_cfg = cfg.router();
	router_cfg.validate();
	const std::vector<SeriesFeatures> features = features_from_csv(read_csv(features_path));
	const std::vector<RouteDecision> decisions = route_all(features, router_cfg);
	std::size_t n_gen = 0;
	for (const RouteDecision& d : decisions)
		if (d.target == RouteTarget::generalist) ++n_gen;
	std::map<std::string, std::string> paths;
	detail::write_artifact(cfg.out_dir, "decisions.csv", decisions_to_csv(decisions), paths);
	std::cout << "routed " << decisions.size() << " series: " << n_gen << " generalist, "
	          << decisions.size() - n_gen << " specialist\n";
	std::cout << "wrote " << paths.at("decisions.csv") << "\n";
}

void cmd_calibrate(const RunConfig& cfg, const std::string& features_path,
                   const std::string& labels_path) {
	const RouterConfig prior = cfg.router();
	prior.validate();
	const std::vector<SeriesFeatures> features = features_from_csv(read_csv(features_path));
	const std::vector<WinLabel> labels = win_labels_from_csv(read_csv(labels_path));
	const DecileAnalysis analysis = decile_analysis(features, labels);
	const CalibrationResult result = calibrate(analysis, prior);

	std::map<std::string, std::string> paths;
	detail::write_artifact(cfg.out_dir, "deciles.csv", decile_tables_to_csv(analysis), paths);
	detail::write_artifact(cfg.out_dir, "calibrated_config.json",
	                       result.config.to_json().dump(2) + "\n", paths);
	for (const std::string& f : result.flagged_features())
		std::cerr << "warning: no qualifying decile for " << f << "; prior threshold kept\n";
	std::cout << "calibrated thresholds on " << features.size() << " series\n";
	for (const auto& [name, path] : paths) std::cout << "wrote " << path << "\n";
}

void cmd_evaluate(const RunConfig& cfg) {
	const EvaluateResult result = run_evaluate(cfg);
	print_warnings(result.warnings, result.skipped);
	for (const ModelAggregate& m : result.report.models)
		std::cout << m.model_name << ": mase=" << opt_num(m.mean_mase)
		          << " smape=" << format_num(m.mean_smape) << " rmse=" << format_num(m.mean_rmse)
		          << " (" << m.n_series << " series)\n";
	for (const auto& [name, path] : result.artifact_paths) std::cout << "wrote " << path << "\n";
}

void cmd_pareto(const RunConfig& cfg, const std::string& scores_path,
                const std::string& fm_eval_path, const std::string& spec_eval_path,
                const CostModel& cost) {
	CsvTable scores_table = read_csv(scores_path);
	const int id_col = scores_table.require_column("series_id");
	const int score_col = scores_table.require_column("advantage_score");
	std::map<std::string, double> score_by_id;
	for (const auto& row : scores_table.rows)
		score_by_id[row[id_col]] = parse_double(row[score_col], scores_path);

	auto load_mase = [](const std::string& path) {
		std::vector<EvalRecord> records = eval_records_from_csv(read_csv(path));
		std::map<std::string, std::optional<double>> by_id;
		std::string model;
		for (const EvalRecord& r : records) {
			if (model.empty()) model = r.model_name;
			if (r.model_name != model)
				raise(ErrorCode::InvalidArgument,
				      "'" + path + "' mixes models '" + model + "' and '" + r.model_name + "'");
			by_id[r.series_id] = r.mase;
		}
		return by_id;
	};
	const auto fm_mase = load_mase(fm_eval_path);
	const auto spec_mase = load_mase(spec_eval_path);

	std::vector<SweepRecord> records;
	for (const auto& [id, score] : score_by_id) {
		const auto f = fm_mase.find(id);
		const auto s = spec_mase.find(id);
		const bool defined = f != fm_mase.end() && s != spec_mase.end() && f->second && s->second;
		if (!defined) {
			if (cfg.strict)
				raise(ErrorCode::MissingModelResult,
				      "series '" + id + "' lacks a defined MASE under both models");
			std::cerr << "warning: " << id << ": missing or undefined MASE, excluded from sweep\n";
			continue;
		}
		records.push_back({id, score, *f->second, *s->second});
	}
	const ParetoCurve curve = pareto_sweep(std::move(records), cost, make_alpha_grid());
	const DominanceReport dominance = dominance_check(curve);

	std::map<std::string, std::string> paths;
	detail::write_artifact(cfg.out_dir, "curve.csv", curve_to_csv(curve), paths);
	detail::write_artifact(cfg.out_dir, "knee.json", knee_to_json(curve, dominance).dump(2) + "\n",
	                       paths);
	std::cout << "knee: alpha=" << format_num(curve.knee.alpha)
	          << " cost=" << format_num(curve.knee.expected_cost)
	          << " mase=" << format_num(curve.knee.aggregate_mase)
	          << " dominates_pure_fm=" << (dominance.dominates_pure_fm ? "true" : "false")
	          << " dominates_pure_spec=" << (dominance.dominates_pure_spec ? "true" : "false")
	          << "\n";
	for (const auto& [name, path] : paths) std::cout << "wrote " << path << "\n";
}

void cmd_pipeline(const RunConfig& cfg) {
	const PipelineResult result = run_pipeline(cfg);
	print_warnings(result.warnings, result.skipped);
	std::cout << "evaluated " << result.report.n_series << " series (" << result.skipped.size()
	          << " skipped)\n";
	for (const ModelAggregate& m : result.report.models)
		std::cout << m.model_name << ": mase=" << opt_num(m.mean_mase)
		          << " smape=" << format_num(m.mean_smape) << " rmse=" << format_num(m.mean_rmse)
		          << "\n";
	std::cout << "knee: alpha=" << format_num(result.curve.knee.alpha)
	          << " cost=" << format_num(result.curve.knee.expected_cost)
	          << " mase=" << format_num(result.curve.knee.aggregate_mase) << "\n";
	for (const auto& [name, path] : result.artifact_paths) std::cout << "wrote " << path << "\n";
}

void cmd_coldstart(const RunConfig& cfg) {
	const ColdStartReport report = run_coldstart(cfg);
	print_warnings(report.warnings, report.skipped);
	std::cout << "cold start on " << report.dataset << " (context " << report.context
	          << ", horizon " << report.horizon << ")\n";
	std::cout << std::left << std::setw(16) << "backend" << std::setw(14) << "full_mase"
	          << std::setw(14) << "cold_mase" << std::setw(12) << "ratio" << std::setw(8) << "n"
	          << "undefined\n";
	for (const ColdStartBackendRow& row : report.rows)
		std::cout << std::left << std::setw(16) << row.name << std::setw(14)
		          << opt_num(row.full_mase) << std::setw(14) << opt_num(row.cold_mase)
		          << std::setw(12) << opt_num(row.degradation_ratio) << std::setw(8)
		          << row.n_series << row.n_undefined << "\n";
	std::cout << "wrote " << report.artifact_path << "\n";
}

void cmd_bench(const RunConfig& cfg) {
	const BenchReport report = run_bench(cfg);
	std::cout << std::left << std::setw(16) << "backend" << std::setw(12) << "class"
	          << std::setw(14) << "p50_micros" << std::setw(14) << "p95_micros" << std::setw(14)
	          << "mean_micros" << std::setw(16) << "throughput/s"
	          << "note\n";
	for (const BenchRow& row : report.rows)
		std::cout << std::left << std::setw(16) << row.name << std::setw(12)
		          << row.forecaster_class << std::setw(14) << format_num(row.stats.p50_micros)
		          << std::setw(14) << format_num(row.stats.p95_micros) << std::setw(14)
		          << format_num(row.stats.mean_micros) << std::setw(16)
		          << format_num(row.throughput_per_sec) << row.note << "\n";
	std::cout << "wrote " << report.artifact_path << "\n";
}

} // namespace

int main(int argc, char** argv) {
	CLI::App app{"Cost-aware forecast routing toolkit"};
	app.require_subcommand(1);

	GlobalFlags flags;
	app.add_option("--config", flags.config_path, "Run config JSON path");
	app.add_option("--out", flags.out_dir, "Output directory (overrides config)");
	app.add_option("--seed", flags.seed, "Run seed recorded in artifacts (overrides config)");
	app.add_flag("--strict", flags.strict, "Fail on the first broken series instead of skipping");
	app.add_option("--workers", flags.workers, "Worker thread bound (overrides config)");

	auto* ingest = app.add_subcommand("ingest", "Validate a corpus CSV and write it canonically");
	auto* features = app.add_subcommand("features", "Extract routing features per series");
	double fraction = 1.0;
	features->add_option("--fraction", fraction, "Leading fraction of each series to use")
	    ->check(CLI::Range(1e-9, 1.0));
	auto* route = app.add_subcommand("route", "Route series from a features CSV");
	std::string features_path;
	route->add_option("--features", features_path, "Features CSV path")->required();
	auto* calibrate_cmd = app.add_subcommand("calibrate", "Calibrate thresholds from win labels");
	std::string cal_features_path, labels_path;
	calibrate_cmd->add_option("--features", cal_features_path, "Features CSV path")->required();
	calibrate_cmd->add_option("--labels", labels_path, "Win labels CSV path")->required();
	auto* evaluate = app.add_subcommand("evaluate", "Forecast and score both backends");
	auto* pareto = app.add_subcommand("pareto", "Sweep the cost-accuracy curve from CSV inputs");
	std::string scores_path, fm_eval_path, spec_eval_path;
	std::optional<double> c_fm, c_spec;
	pareto->add_option("--scores", scores_path, "Routing decisions CSV with advantage_score")
	    ->required();
	pareto->add_option("--fm-eval", fm_eval_path, "Generalist per-series eval CSV")->required();
	pareto->add_option("--spec-eval", spec_eval_path, "Specialist per-series eval CSV")->required();
	pareto->add_option("--c-fm", c_fm, "Generalist per-forecast cost");
	pareto->add_option("--c-spec", c_spec, "Specialist per-forecast cost");
	auto* pipeline = app.add_subcommand("pipeline", "Run the full chain and write all artifacts");
	auto* coldstart = app.add_subcommand("coldstart", "Compare full-history vs truncated-context MASE");
	auto* bench = app.add_subcommand("bench", "Measure per-backend forecast latency");
	for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		const int rc = app.exit(e);
		return rc == 0 ? 0 : 1;
	}

	try {
		const RunConfig cfg = resolve_config(flags);
		if (ingest->parsed()) cmd_ingest(cfg);
		if (features->parsed()) cmd_features(cfg, fraction);
		if (route->parsed()) cmd_route(cfg, features_path);
		if (calibrate_cmd->parsed()) cmd_calibrate(cfg, cal_features_path, labels_path);
		if (evaluate->parsed()) cmd_evaluate(cfg);
		if (pareto->parsed()) {
			CostModel cost = cfg.cost;
			if (c_fm) cost.c_fm = *c_fm;
			if (c_spec) cost.c_spec = *c_spec;
			cmd_pareto(cfg, scores_path, fm_eval_path, spec_eval_path, cost);
		}
		if (pipeline->parsed()) cmd_pipeline(cfg);
		if (coldstart->parsed()) cmd_coldstart(cfg);
		if (bench->parsed()) cmd_bench(cfg);
	} catch (const tsroute::Error& e) {
		std::cerr << "error: " << e.what() << "\n";
		return 1;
	} catch (const std::exception& e) {
		std::cerr << "internal error: " << e.what() << "\n";
		return 2;
	}
	return 0;
}
