#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsroute/error.hpp"
#include "tsroute/numfmt.hpp"

namespace tsroute {

/// Per-forecast serving cost of each deployment class.
struct CostModel {
	double c_fm = 1000.0;
	double c_spec = 1.0;

	void validate() const {
		if (!(c_fm > 0.0) || !(c_spec > 0.0) || !std::isfinite(c_fm) || !std::isfinite(c_spec))
			raise(ErrorCode::InvalidArgument, "costs must be positive and finite");
	}
};

/// Expected per-series cost when a fraction alpha of series go to the
/// generalist: alpha * c_fm + (1 - alpha) * c_spec.
inline double expected_cost(double alpha, const CostModel& cm) {
	cm.validate();
	if (!(alpha >= 0.0 && alpha <= 1.0))
		raise(ErrorCode::AlphaOutOfRange, "alpha must be in [0,1]");
	return alpha * cm.c_fm + (1.0 - alpha) * cm.c_spec;
}

/// One series' sweep inputs: its ranking score and its MASE under each
/// deployment.
struct SweepRecord {
	std::string series_id;
	double advantage_score = 0.0;
	double fm_mase = 0.0;
	double spec_mase = 0.0;
};

struct ParetoPoint {
	double alpha = 0.0;
	double expected_cost = 0.0;
	double aggregate_mase = 0.0;
	std::size_t n_fm = 0;
};

struct ParetoCurve {
	std::vector<ParetoPoint> points;
	ParetoPoint knee;
};

inline std::vector<double> make_alpha_grid() {
	std::vector<double> grid(101);
	for (int i = 0; i <= 100; ++i) grid[static_cast<std::size_t>(i)] = i / 100.0;
	return grid;
}

/// Picks the minimum-MASE point; among points within 0.5% relative MASE of
/// that minimum, the cheapest (lowest alpha on cost ties) wins.
inline ParetoPoint find_knee(const std::vector<ParetoPoint>& points) {
	if (points.size() < 3) raise(ErrorCode::CurveTooShort, "knee detection needs >= 3 points");
	const ParetoPoint* best = &points.front();
	for (const ParetoPoint& p : points)
		if (p.aggregate_mase < best->aggregate_mase) best = &p;
	const double bound = best->aggregate_mase * 1.005;
	const ParetoPoint* knee = best;
	for (const ParetoPoint& p : points) {
		if (p.aggregate_mase > bound) continue;
		if (p.expected_cost < knee->expected_cost ||
		    (p.expected_cost == knee->expected_cost && p.alpha < knee->alpha))
			knee = &p;
	}
	return *knee;
}

/// For each alpha, the ceil(alpha * n) series with the highest advantage
/// scores (ties by series_id) take their generalist MASE, the rest their
/// specialist MASE; the aggregate is the unweighted mean, summed in
/// series_id order so input permutation never changes a byte.
inline ParetoCurve pareto_sweep(std::vector<SweepRecord> records, const CostModel& cm,
                                const std::vector<double>& grid) {
	cm.validate();
	if (records.empty()) raise(ErrorCode::InvalidArgument, "sweep needs at least one series");
	if (grid.empty()) raise(ErrorCode::InvalidArgument, "sweep needs a non-empty alpha grid");
	for (std::size_t i = 0; i < grid.size(); ++i) {
		if (!(grid[i] >= 0.0 && grid[i] <= 1.0))
			raise(ErrorCode::AlphaOutOfRange, "alpha must be in [0,1]");
		if (i > 0 && !(grid[i] > grid[i - 1]))
			raise(ErrorCode::InvalidArgument, "alpha grid must be strictly increasing");
	}
	for (const SweepRecord& r : records)
		if (!std::isfinite(r.advantage_score) || !std::isfinite(r.fm_mase) ||
		    !std::isfinite(r.spec_mase))
			raise(ErrorCode::MissingModelResult,
			      "series '" + r.series_id + "' lacks a finite score or model result");

	const std::size_t n = records.size();

	// Selection order: score descending, id ascending on ties.
	std::vector<std::size_t> by_score(n);
	for (std::size_t i = 0; i < n; ++i) by_score[i] = i;
	std::sort(by_score.begin(), by_score.end(), [&records](std::size_t a, std::size_t b) {
		if (records[a].advantage_score != records[b].advantage_score)
			return records[a].advantage_score > records[b].advantage_score;
		return records[a].series_id < records[b].series_id;
	});

	// Aggregation order: id ascending, independent of input order.
	std::vector<std::size_t> by_id(n);
	for (std::size_t i = 0; i < n; ++i) by_id[i] = i;
	std::sort(by_id.begin(), by_id.end(), [&records](std::size_t a, std::size_t b) {
		return records[a].series_id < records[b].series_id;
	});
	for (std::size_t i = 1; i < n; ++i)
		if (records[by_id[i]].series_id == records[by_id[i - 1]].series_id)
			raise(ErrorCode::InvalidArgument,
			      "duplicate series id '" + records[by_id[i]].series_id + "' in sweep");

	std::vector<std::size_t> score_rank(n);
	for (std::size_t r = 0; r < n; ++r) score_rank[by_score[r]] = r;

	ParetoCurve curve;
	curve.points.reserve(grid.size());
	for (double alpha : grid) {
		// Guard against binary-representation drift pushing an exact
		// alpha*n just past an integer.
		const auto k = static_cast<std::size_t>(std::max(
		    0.0, std::ceil(alpha * static_cast<double>(n) - 1e-9)));
		ParetoPoint point;
		point.alpha = alpha;
		point.n_fm = std::min(k, n);
		point.expected_cost = expected_cost(alpha, cm);
		double sum = 0.0;
		for (std::size_t i = 0; i < n; ++i) {
			const SweepRecord& rec = records[by_id[i]];
			sum += score_rank[by_id[i]] < point.n_fm ? rec.fm_mase : rec.spec_mase;
		}
		point.aggregate_mase = sum / static_cast<double>(n);
		curve.points.push_back(point);
	}
	curve.knee = find_knee(curve.points);
	return curve;
}

struct DominanceReport {
	bool dominates_pure_fm = false;
	bool dominates_pure_spec = false;
};

/// Compares the knee against both pure deployments: beats pure FM when both
/// its MASE and cost are strictly lower; beats pure specialist when its MASE
/// is strictly lower (the specialist endpoint is already the cheapest).
inline DominanceReport dominance_check(const ParetoCurve& curve) {
	const ParetoPoint* pure_spec = nullptr;
	const ParetoPoint* pure_fm = nullptr;
	for (const ParetoPoint& p : curve.points) {
		if (p.alpha == 0.0) pure_spec = &p;
		if (p.alpha == 1.0) pure_fm = &p;
	}
	if (!pure_spec || !pure_fm)
		raise(ErrorCode::MissingEndpoints, "dominance needs alpha=0 and alpha=1 on the curve");

	DominanceReport report;
	report.dominates_pure_fm = curve.knee.aggregate_mase < pure_fm->aggregate_mase &&
	                           curve.knee.expected_cost < pure_fm->expected_cost;
	report.dominates_pure_spec = curve.knee.aggregate_mase < pure_spec->aggregate_mase;
	return report;
}

inline std::string curve_to_csv(const ParetoCurve& curve) {
	std::string out = "alpha,cost,mase\n";
	for (const ParetoPoint& p : curve.points) {
		out += format_num(p.alpha);
		out += ',';
		out += format_num(p.expected_cost);
		out += ',';
		out += format_num(p.aggregate_mase);
		out += '\n';
	}
	return out;
}

inline nlohmann::json knee_to_json(const ParetoCurve& curve, const DominanceReport& report) {
	return nlohmann::json{{"alpha", canon_num(curve.knee.alpha)},
	                      {"expected_cost", canon_num(curve.knee.expected_cost)},
	                      {"aggregate_mase", canon_num(curve.knee.aggregate_mase)},
	                      {"n_fm", curve.knee.n_fm},
	                      {"dominates_pure_fm", report.dominates_pure_fm},
	                      {"dominates_pure_spec", report.dominates_pure_spec}};
}

} // namespace tsroute
