#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tsroute/error.hpp"

namespace tsroute::linalg {

/// In-place Cholesky factorization of a p x p row-major symmetric
/// positive-definite matrix; the lower triangle becomes L with G = L L'.
/// A non-positive pivot means the system is not positive definite.
template <typename Scalar>
inline void cholesky_factor(std::vector<Scalar>& g, std::size_t p) {
	for (std::size_t j = 0; j < p; ++j) {
		Scalar diag = g[j * p + j];
		for (std::size_t k = 0; k < j; ++k) diag -= g[j * p + k] * g[j * p + k];
		if (!(diag > Scalar(0)))
			raise(ErrorCode::SingularSystem, "non-positive pivot at column " + std::to_string(j));
		const Scalar root = std::sqrt(diag);
		g[j * p + j] = root;
		for (std::size_t i = j + 1; i < p; ++i) {
			Scalar v = g[i * p + j];
			for (std::size_t k = 0; k < j; ++k) v -= g[i * p + k] * g[j * p + k];
			g[i * p + j] = v / root;
		}
	}
}

/// Solves L L' x = b in place given the factor from cholesky_factor.
template <typename Scalar>
inline void cholesky_solve(const std::vector<Scalar>& l, std::size_t p, std::span<Scalar> x) {
	for (std::size_t i = 0; i < p; ++i) {
		Scalar v = x[i];
		for (std::size_t k = 0; k < i; ++k) v -= l[i * p + k] * x[k];
		x[i] = v / l[i * p + i];
	}
	for (std::size_t ii = p; ii-- > 0;) {
		Scalar v = x[ii];
		for (std::size_t k = ii + 1; k < p; ++k) v -= l[k * p + ii] * x[k];
		x[ii] = v / l[ii * p + ii];
	}
}

/// Ridge weights minimizing ||X w - y||^2 + sum_j penalty[j] * w[j]^2 via the
/// normal equations. A zero penalty entry leaves that coefficient (typically
/// the bias) unshrunk. design is n x p row-major; targets is n x k row-major
/// for k right-hand sides sharing one factorization; returns p x k row-major.
/// Accumulation and factorization run in extended precision: a damping term
/// far below the Gram entries' rounding noise must still register as a
/// positive pivot.
inline std::vector<double> ridge_solve_multi(std::span<const double> design, std::size_t n,
                                             std::size_t p, std::span<const double> targets,
                                             std::size_t k, std::span<const double> penalty) {
	if (design.size() != n * p || targets.size() != n * k || penalty.size() != p)
		raise(ErrorCode::InvalidArgument, "ridge solver shape mismatch");
	if (n == 0 || p == 0 || k == 0) raise(ErrorCode::InvalidArgument, "ridge solver needs data");

	std::vector<long double> gram(p * p, 0.0L);
	for (std::size_t r = 0; r < n; ++r) {
		const double* row = design.data() + r * p;
		for (std::size_t i = 0; i < p; ++i) {
			const long double ri = row[i];
			for (std::size_t j = 0; j <= i; ++j) gram[i * p + j] += ri * row[j];
		}
	}
	for (std::size_t i = 0; i < p; ++i) {
		gram[i * p + i] += penalty[i];
		for (std::size_t j = i + 1; j < p; ++j) gram[i * p + j] = gram[j * p + i];
	}
	cholesky_factor(gram, p);

	std::vector<double> weights(p * k, 0.0);
	std::vector<long double> rhs(p);
	for (std::size_t c = 0; c < k; ++c) {
		std::fill(rhs.begin(), rhs.end(), 0.0L);
		for (std::size_t r = 0; r < n; ++r) {
			const double* row = design.data() + r * p;
			const long double y = targets[r * k + c];
			for (std::size_t i = 0; i < p; ++i) rhs[i] += row[i] * y;
		}
		cholesky_solve(gram, p, std::span<long double>(rhs));
		for (std::size_t i = 0; i < p; ++i) weights[i * k + c] = static_cast<double>(rhs[i]);
	}
	return weights;
}

inline std::vector<double> ridge_solve(std::span<const double> design, std::size_t n,
                                       std::size_t p, std::span<const double> target,
                                       std::span<const double> penalty) {
	return ridge_solve_multi(design, n, p, target, 1, penalty);
}

} // namespace tsroute::linalg
