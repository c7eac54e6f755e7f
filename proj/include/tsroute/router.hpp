#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tsroute/csv.hpp"
#include "tsroute/error.hpp"
#include "tsroute/features.hpp"
#include "tsroute/numfmt.hpp"

namespace tsroute {

/// Thresholds for the 2-of-4 routing rule plus the calibration target.
struct RouterConfig {
	double entropy_min = 0.24;
	double cv_min = 0.22;
	double sacf_high = 0.72;
	double sacf_low = 0.50;
	double trend_r2_max = 0.05;
	int min_satisfied = 2;
	double win_rate_target = 0.60;

	void validate() const {
		if (!(sacf_low >= 0.0 && sacf_low <= sacf_high && sacf_high <= 1.0))
			raise(ErrorCode::InvalidArgument, "require 0 <= sacf_low <= sacf_high <= 1");
		if (min_satisfied < 1 || min_satisfied > 4)
			raise(ErrorCode::InvalidArgument, "min_satisfied must be in 1..4");
		if (!(win_rate_target > 0.0 && win_rate_target < 1.0))
			raise(ErrorCode::InvalidArgument, "win_rate_target must be in (0,1)");
		for (double v : {entropy_min, cv_min, sacf_high, sacf_low, trend_r2_max,
		                 win_rate_target})
			if (!std::isfinite(v))
				raise(ErrorCode::InvalidArgument, "router thresholds must be finite");
	}

	nlohmann::json to_json() const {
		return nlohmann::json{{"entropy_min", canon_num(entropy_min)},
		                      {"cv_min", canon_num(cv_min)},
		                      {"sacf_high", canon_num(sacf_high)},
		                      {"sacf_low", canon_num(sacf_low)},
		                      {"trend_r2_max", canon_num(trend_r2_max)},
		                      {"min_satisfied", min_satisfied},
		                      {"win_rate_target", canon_num(win_rate_target)}};
	}

	static RouterConfig from_json(const nlohmann::json& j) {
		RouterConfig cfg;
		try {
			if (j.contains("entropy_min")) cfg.entropy_min = j.at("entropy_min").get<double>();
			if (j.contains("cv_min")) cfg.cv_min = j.at("cv_min").get<double>();
			if (j.contains("sacf_high")) cfg.sacf_high = j.at("sacf_high").get<double>();
			if (j.contains("sacf_low")) cfg.sacf_low = j.at("sacf_low").get<double>();
			if (j.contains("trend_r2_max")) cfg.trend_r2_max = j.at("trend_r2_max").get<double>();
			if (j.contains("min_satisfied")) cfg.min_satisfied = j.at("min_satisfied").get<int>();
			if (j.contains("win_rate_target"))
				cfg.win_rate_target = j.at("win_rate_target").get<double>();
		} catch (const nlohmann::json::exception& e) {
			raise(ErrorCode::ParseError, std::string("bad router config: ") + e.what());
		}
		cfg.validate();
		return cfg;
	}
};

enum class RouteTarget { generalist, specialist };

inline const char* to_string(RouteTarget t) {
	return t == RouteTarget::generalist ? "generalist" : "specialist";
}

inline RouteTarget parse_route_target(const std::string& text) {
	if (text == "generalist") return RouteTarget::generalist;
	if (text == "specialist") return RouteTarget::specialist;
	raise(ErrorCode::ParseError, "bad route target '" + text + "'");
}

/// Which of the four threshold tests a series passed.
struct SatisfiedSet {
	bool entropy = false;
	bool cv = false;
	bool sacf = false;
	bool trend = false;

	int count() const {
		return static_cast<int>(entropy) + static_cast<int>(cv) + static_cast<int>(sacf) +
		       static_cast<int>(trend);
	}

	std::string to_string() const {
		std::string out;
		auto add = [&out](const char* name) {
			if (!out.empty()) out += '|';
			out += name;
		};
		if (entropy) add("entropy");
		if (cv) add("cv");
		if (sacf) add("sacf");
		if (trend) add("trend");
		return out;
	}

	static SatisfiedSet parse(const std::string& text) {
		SatisfiedSet s;
		std::size_t pos = 0;
		while (pos < text.size()) {
			std::size_t bar = text.find('|', pos);
			if (bar == std::string::npos) bar = text.size();
			const std::string name = text.substr(pos, bar - pos);
			if (name == "entropy") s.entropy = true;
			else if (name == "cv") s.cv = true;
			else if (name == "sacf") s.sacf = true;
			else if (name == "trend") s.trend = true;
			else raise(ErrorCode::ParseError, "bad satisfied set item '" + name + "'");
			pos = bar + 1;
		}
		return s;
	}

	bool operator==(const SatisfiedSet&) const = default;
};

struct RouteDecision {
	std::string series_id;
	RouteTarget target = RouteTarget::specialist;
	SatisfiedSet satisfied;
	double advantage_score = 0.0;
};

namespace detail {

/// Signed threshold-relative margin for a "value >= tau" test. Positive past
/// the threshold. Near-zero thresholds fall back to the absolute difference
/// so the margin stays finite.
inline double margin_at_least(double value, double tau) {
	const double denom = std::abs(tau) > 1e-12 ? std::abs(tau) : 1.0;
	return (value - tau) / denom;
}

inline double margin_below(double value, double tau) {
	const double denom = std::abs(tau) > 1e-12 ? std::abs(tau) : 1.0;
	return (tau - value) / denom;
}

} // namespace detail

/// Scalar ranking of how generalist-favorable a series is: the sum over the
/// four tests of the signed threshold-relative margin. The two-sided SACF
/// test contributes the larger of its two margins; an undefined CV (treated
/// as maximally volatile) contributes a fixed +1.
inline double advantage_score(const SeriesFeatures& f, const RouterConfig& cfg) {
	double score = detail::margin_at_least(f.spectral_entropy, cfg.entropy_min);
	score += f.coeff_variation ? detail::margin_at_least(*f.coeff_variation, cfg.cv_min) : 1.0;
	score += std::max(detail::margin_at_least(f.seasonal_acf, cfg.sacf_high),
	                  detail::margin_below(f.seasonal_acf, cfg.sacf_low));
	score += detail::margin_below(f.trend_r2, cfg.trend_r2_max);
	return score;
}

/// The 2-of-4 rule: a series goes to the generalist when at least
/// cfg.min_satisfied threshold tests pass. An undefined CV counts satisfied.
inline RouteDecision route(const SeriesFeatures& f, const RouterConfig& cfg) {
	RouteDecision d;
	d.series_id = f.series_id;
	d.satisfied.entropy = f.spectral_entropy >= cfg.entropy_min;
	d.satisfied.cv = !f.coeff_variation.has_value() || *f.coeff_variation >= cfg.cv_min;
	d.satisfied.sacf = f.seasonal_acf >= cfg.sacf_high || f.seasonal_acf < cfg.sacf_low;
	d.satisfied.trend = f.trend_r2 < cfg.trend_r2_max;
	d.target = d.satisfied.count() >= cfg.min_satisfied ? RouteTarget::generalist
	                                                    : RouteTarget::specialist;
	d.advantage_score = advantage_score(f, cfg);
	return d;
}

inline std::vector<RouteDecision> route_all(const std::vector<SeriesFeatures>& features,
                                            const RouterConfig& cfg) {
	std::vector<RouteDecision> out;
	out.reserve(features.size());
	for (const SeriesFeatures& f : features) out.push_back(route(f, cfg));
	return out;
}

inline std::string decisions_to_csv(const std::vector<RouteDecision>& decisions) {
	std::string out = "series_id,target,satisfied,advantage_score\n";
	for (const RouteDecision& d : decisions) {
		out += d.series_id;
		out += ',';
		out += to_string(d.target);
		out += ',';
		out += d.satisfied.to_string();
		out += ',';
		out += format_num(d.advantage_score);
		out += '\n';
	}
	return out;
}

/// Per-series outcome label: did the generalist beat the best specialist?
/// Ties go to the specialist, the cheaper class.
struct WinLabel {
	std::string series_id;
	double fm_best_mase = 0.0;
	double spec_best_mase = 0.0;
	bool fm_wins = false;
};

inline WinLabel make_win_label(std::string series_id, double fm_best_mase,
                               double spec_best_mase) {
	if (!(fm_best_mase >= 0.0) || !(spec_best_mase >= 0.0))
		raise(ErrorCode::InvalidArgument,
		      "win label for '" + series_id + "' needs non-negative errors");
	WinLabel w;
	w.series_id = std::move(series_id);
	w.fm_best_mase = fm_best_mase;
	w.spec_best_mase = spec_best_mase;
	w.fm_wins = fm_best_mase < spec_best_mase;
	return w;
}

inline std::vector<WinLabel> win_labels_from_csv(const CsvTable& table) {
	const std::size_t id_col = table.require_column("series_id");
	const std::size_t fm_col = table.require_column("fm_best_mase");
	const std::size_t spec_col = table.require_column("spec_best_mase");
	std::vector<WinLabel> out;
	out.reserve(table.rows.size());
	for (const auto& row : table.rows)
		out.push_back(make_win_label(row[id_col], parse_double(row[fm_col]),
		                             parse_double(row[spec_col])));
	return out;
}

struct DecileBin {
	double lower = 0.0;
	double upper = 0.0;
	std::size_t count = 0;
	double win_rate = 0.0;
};

/// Win rates bucketed by empirical deciles of one feature's distribution.
struct DecileTable {
	std::string feature;
	std::array<DecileBin, 10> bins;
};

struct DecileAnalysis {
	DecileTable entropy;
	DecileTable cv;
	DecileTable sacf;
	DecileTable trend;
};

namespace detail {

inline DecileTable build_decile_table(std::string feature_name,
                                      std::vector<std::pair<double, bool>> samples) {
	// Rank-based bucketing: bucket i holds sorted ranks [i*n/10, (i+1)*n/10).
	// Ties sort by value only; equal values may straddle a bucket boundary,
	// which is fine because edges come from the sorted array, not the members.
	std::sort(samples.begin(), samples.end(),
	          [](const auto& a, const auto& b) { return a.first < b.first; });
	const std::size_t n = samples.size();
	DecileTable table;
	table.feature = std::move(feature_name);
	for (std::size_t i = 0; i < 10; ++i) {
		const std::size_t begin = i * n / 10;
		const std::size_t end = (i + 1) * n / 10;
		DecileBin& bin = table.bins[i];
		bin.count = end - begin;
		bin.lower = samples[begin].first;
		bin.upper = end == n ? samples[n - 1].first : samples[end].first;
		std::size_t wins = 0;
		for (std::size_t r = begin; r < end; ++r)
			if (samples[r].second) ++wins;
		bin.win_rate = bin.count == 0 ? 0.0
		                              : static_cast<double>(wins) / static_cast<double>(bin.count);
	}
	return table;
}

} // namespace detail

/// Buckets the corpus by empirical deciles of each feature and reports the
/// generalist win rate per bucket. Undefined CV sorts above every defined
/// value. Requires at least 20 series so every bucket is populated.
inline DecileAnalysis decile_analysis(const std::vector<SeriesFeatures>& features,
                                      const std::vector<WinLabel>& labels) {
	if (features.size() < 20) raise(ErrorCode::CorpusTooSmall, "decile analysis needs >= 20 series");
	if (features.size() != labels.size())
		raise(ErrorCode::MismatchedIds, "feature and label corpora differ in size");
	std::map<std::string, bool> wins_by_id;
	for (const WinLabel& w : labels) wins_by_id.emplace(w.series_id, w.fm_wins);
	if (wins_by_id.size() != labels.size())
		raise(ErrorCode::MismatchedIds, "duplicate series ids in labels");

	std::vector<std::pair<double, bool>> ent, cv, acf, r2;
	ent.reserve(features.size());
	cv.reserve(features.size());
	acf.reserve(features.size());
	r2.reserve(features.size());
	for (const SeriesFeatures& f : features) {
		auto it = wins_by_id.find(f.series_id);
		if (it == wins_by_id.end())
			raise(ErrorCode::MismatchedIds, "no win label for series '" + f.series_id + "'");
		ent.emplace_back(f.spectral_entropy, it->second);
		cv.emplace_back(
		    f.coeff_variation ? *f.coeff_variation : std::numeric_limits<double>::infinity(),
		    it->second);
		acf.emplace_back(f.seasonal_acf, it->second);
		r2.emplace_back(f.trend_r2, it->second);
	}

	DecileAnalysis out;
	out.entropy = detail::build_decile_table("spectral_entropy", std::move(ent));
	out.cv = detail::build_decile_table("coeff_variation", std::move(cv));
	out.sacf = detail::build_decile_table("seasonal_acf", std::move(acf));
	out.trend = detail::build_decile_table("trend_r2", std::move(r2));
	return out;
}

inline std::string decile_tables_to_csv(const DecileAnalysis& analysis) {
	std::string out = "feature,decile,lower,upper,count,win_rate\n";
	for (const DecileTable* table : {&analysis.entropy, &analysis.cv, &analysis.sacf,
	                                 &analysis.trend}) {
		for (std::size_t i = 0; i < 10; ++i) {
			const DecileBin& bin = table->bins[i];
			out += table->feature;
			out += ',';
			out += std::to_string(i);
			out += ',';
			out += format_num(bin.lower);
			out += ',';
			out += format_num(bin.upper);
			out += ',';
			out += std::to_string(bin.count);
			out += ',';
			out += format_num(bin.win_rate);
			out += '\n';
		}
	}
	return out;
}

/// Calibration output: the updated config plus per-threshold flags for
/// features that had no qualifying decile and kept their prior value.
struct CalibrationResult {
	RouterConfig config;
	bool entropy_kept_prior = false;
	bool cv_kept_prior = false;
	bool sacf_high_kept_prior = false;
	bool sacf_low_kept_prior = false;
	bool trend_kept_prior = false;

	bool any_kept_prior() const {
		return entropy_kept_prior || cv_kept_prior || sacf_high_kept_prior ||
		       sacf_low_kept_prior || trend_kept_prior;
	}

	std::vector<std::string> flagged_features() const {
		std::vector<std::string> out;
		if (entropy_kept_prior) out.push_back("spectral_entropy");
		if (cv_kept_prior) out.push_back("coeff_variation");
		if (sacf_high_kept_prior || sacf_low_kept_prior) out.push_back("seasonal_acf");
		if (trend_kept_prior) out.push_back("trend_r2");
		return out;
	}
};

namespace detail {

inline bool qualifies(const DecileBin& bin, double target) { return bin.win_rate > target; }

/// Scans buckets in `order` and yields the lower edge of the first one whose
/// win rate strictly exceeds the target. Non-finite edges (possible when
/// undefined CV values pool in the top buckets) are rejected.
inline std::optional<double> first_qualifying_lower_edge(const DecileTable& table,
                                                         std::span<const int> order,
                                                         double target) {
	for (int i : order) {
		const DecileBin& bin = table.bins[static_cast<std::size_t>(i)];
		if (!qualifies(bin, target)) continue;
		if (!std::isfinite(bin.lower)) return std::nullopt;
		return bin.lower;
	}
	return std::nullopt;
}

/// High tail for the two-sided SACF test: the maximal run of qualifying
/// buckets ending at bucket 9. Returns the run's first lower edge, or nothing
/// when bucket 9 itself does not qualify.
inline std::optional<double> high_tail_lower_edge(const DecileTable& table, double target) {
	if (!qualifies(table.bins[9], target)) return std::nullopt;
	int first = 9;
	while (first > 0 && qualifies(table.bins[static_cast<std::size_t>(first - 1)], target))
		--first;
	const double edge = table.bins[static_cast<std::size_t>(first)].lower;
	if (!std::isfinite(edge)) return std::nullopt;
	return edge;
}

/// Low tail: the maximal run of qualifying buckets starting at bucket 0.
/// Returns the lower edge of the run's last bucket, or nothing when bucket 0
/// itself does not qualify.
inline std::optional<double> low_tail_lower_edge(const DecileTable& table, double target) {
	if (!qualifies(table.bins[0], target)) return std::nullopt;
	int last = 0;
	while (last < 9 && qualifies(table.bins[static_cast<std::size_t>(last + 1)], target))
		++last;
	const double edge = table.bins[static_cast<std::size_t>(last)].lower;
	if (!std::isfinite(edge)) return std::nullopt;
	return edge;
}

} // namespace detail

/// Re-derives thresholds from decile win rates: each threshold moves to the
/// lower edge of the first bucket, scanning from the least favorable end
/// toward the most favorable end, whose win rate strictly exceeds
/// win_rate_target. Entropy and CV scan upward, trend R-squared scans
/// downward. The two-sided SACF test calibrates each tail against its own
/// contiguous qualifying run so a U-shaped win profile cannot collapse the
/// mid-range gap; sacf_low is clamped to sacf_high afterwards. Thresholds
/// with no qualifying bucket keep their prior value and are flagged.
inline CalibrationResult calibrate(const DecileAnalysis& tables, const RouterConfig& prior) {
	static constexpr std::array<int, 10> kUpward = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
	static constexpr std::array<int, 10> kDownward = {9, 8, 7, 6, 5, 4, 3, 2, 1, 0};
	const double target = prior.win_rate_target;

	CalibrationResult result;
	result.config = prior;

	if (auto edge = detail::first_qualifying_lower_edge(tables.entropy, kUpward, target))
		result.config.entropy_min = *edge;
	else
		result.entropy_kept_prior = true;

	if (auto edge = detail::first_qualifying_lower_edge(tables.cv, kUpward, target))
		result.config.cv_min = *edge;
	else
		result.cv_kept_prior = true;

	if (auto edge = detail::first_qualifying_lower_edge(tables.trend, kDownward, target))
		result.config.trend_r2_max = *edge;
	else
		result.trend_kept_prior = true;

	// SACF edges come from data in [-1, 1]; the config type requires both
	// thresholds inside [0, 1] with low <= high.
	if (auto edge = detail::high_tail_lower_edge(tables.sacf, target))
		result.config.sacf_high = std::clamp(*edge, 0.0, 1.0);
	else
		result.sacf_high_kept_prior = true;

	if (auto edge = detail::low_tail_lower_edge(tables.sacf, target))
		result.config.sacf_low = std::clamp(*edge, 0.0, 1.0);
	else
		result.sacf_low_kept_prior = true;

	result.config.sacf_low = std::min(result.config.sacf_low, result.config.sacf_high);
	return result;
}

} // namespace tsroute
