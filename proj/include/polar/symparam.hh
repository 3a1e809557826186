/*
Symmetric-parameter lists: (mu, theta) pairs describing a binary conditional
distribution, with the canonicalizing operators A (fold theta to |theta|),
Sigma (drop zero masses, merge equal theta) and C = A then Sigma then sort.
*/

#pragma once

#include "scalar.hh"

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

namespace polar {

template <class S> struct ParamList {
	struct Entry {
		S mu, theta;
	};
	std::vector<Entry> e;
	bool canonical = false;

	ParamList() = default;
	ParamList(std::initializer_list<std::pair<S, S>> init)
	{
		for (auto& p : init)
			e.push_back({p.first, p.second});
	}
	size_t size() const { return e.size(); }
};

template <class S> S mass_sum(const ParamList<S>& P)
{
	S t(0);
	for (auto& x : P.e)
		t += x.mu;
	return t;
}

// Exact-order comparison of nonnegative rationals through a truncated-double
// prefilter: a value x >= 0 lies in [lo, nextafter(lo)), so disjoint
// enclosures decide without touching the big integers.
inline bool lt_filtered(double alo, const Rat& a, double blo, const Rat& b)
{
	if (std::nextafter(alo, std::numeric_limits<double>::infinity()) <= blo)
		return true;
	if (std::nextafter(blo, std::numeric_limits<double>::infinity()) <= alo)
		return false;
	return a < b;
}

inline bool eq_filtered(double alo, const Rat& a, double blo, const Rat& b)
{
	return alo == blo && a == b;
}

namespace detail {

// Sorted index permutation of nonnegative thetas, exact order.
template <class S>
std::vector<uint32_t> theta_order(const std::vector<typename ParamList<S>::Entry>& v,
                                  const std::vector<double>& lo)
{
	std::vector<uint32_t> idx(v.size());
	for (uint32_t i = 0; i < idx.size(); ++i)
		idx[i] = i;
	if constexpr (scalar_traits<S>::exact) {
		std::sort(idx.begin(), idx.end(), [&](uint32_t a, uint32_t b) {
			return lt_filtered(lo[a], v[a].theta, lo[b], v[b].theta);
		});
	} else {
		std::stable_sort(idx.begin(), idx.end(),
		                 [&](uint32_t a, uint32_t b) { return lo[a] < lo[b]; });
	}
	return idx;
}

inline bool float_theta_close(double a, double b, double eps)
{
	return a == b || std::fabs(a - b) <= eps * std::max(std::fabs(a), std::fabs(b));
}

}  // namespace detail

// theta -> |theta|; masses and M unchanged.
template <class S> ParamList<S> abs_op(ParamList<S> P)
{
	for (auto& x : P.e)
		if (x.theta < S(0))
			x.theta = -x.theta;
	P.canonical = false;
	return P;
}

// Drops zero-mass entries and merges entries with identical theta (float
// backend: relative difference below eps) into the first occurrence.
template <class S> ParamList<S> sigma_op(const ParamList<S>& P, double eps = 1e-12)
{
	ParamList<S> out;
	for (auto& x : P.e) {
		if (x.mu == S(0))
			continue;
		bool merged = false;
		for (auto& y : out.e) {
			bool same;
			if constexpr (scalar_traits<S>::exact)
				same = y.theta == x.theta;
			else
				same = detail::float_theta_close(y.theta, x.theta, eps);
			if (same) {
				y.mu += x.mu;
				merged = true;
				break;
			}
		}
		if (!merged)
			out.e.push_back(x);
	}
	out.canonical = false;
	return out;
}

// P^C = P^{A Sigma} sorted ascending: all mu > 0, 0 <= theta_1 < ... <= 1.
template <class S> ParamList<S> canonicalize(ParamList<S> P, double eps = 1e-12)
{
	auto& v = P.e;
	std::vector<double> lo(v.size());
	for (size_t i = 0; i < v.size(); ++i) {
		if (v[i].theta < S(0))
			v[i].theta = -v[i].theta;
		lo[i] = approx(v[i].theta);
	}
	auto idx = detail::theta_order<S>(v, lo);
	ParamList<S> out;
	out.e.reserve(v.size());
	for (uint32_t i : idx) {
		if (v[i].mu == S(0))
			continue;
		if (!out.e.empty()) {
			bool same;
			if constexpr (scalar_traits<S>::exact)
				same = eq_filtered(approx(out.e.back().theta), out.e.back().theta,
				                   lo[i], v[i].theta);
			else
				same = detail::float_theta_close(out.e.back().theta, v[i].theta, eps);
			if (same) {
				out.e.back().mu += std::move(v[i].mu);
				continue;
			}
		}
		out.e.push_back({std::move(v[i].mu), std::move(v[i].theta)});
	}
	out.canonical = true;
	return out;
}

struct Diagnostics {
	double mass_defect = 0;     // |sum(mu) - 1|
	size_t negative_mass = 0;   // entries with mu < 0
	size_t theta_range = 0;     // entries with |theta| > 1
	size_t order_violations = 0;  // canonical lists only: not strictly ascending
	bool ok() const
	{
		return mass_defect <= 1e-12 && !negative_mass && !theta_range && !order_violations;
	}
};

template <class S> Diagnostics validate(const ParamList<S>& P)
{
	Diagnostics d;
	S t(0);
	for (auto& x : P.e) {
		t += x.mu;
		if (x.mu < S(0))
			++d.negative_mass;
		if (x.theta < S(-1) || x.theta > S(1))
			++d.theta_range;
	}
	t -= S(1);
	if (t < S(0))
		t = -t;
	d.mass_defect = approx(t);
	if (P.canonical) {
		for (size_t i = 0; i < P.e.size(); ++i) {
			bool bad = P.e[i].mu <= S(0) || P.e[i].theta < S(0);
			if (i && !(P.e[i - 1].theta < P.e[i].theta))
				bad = true;
			d.order_violations += bad;
		}
	}
	return d;
}

// Multiset equality of entry lists (test and cross-check helper).
template <class S> bool same_multiset(const ParamList<S>& A, const ParamList<S>& B)
{
	if (A.size() != B.size())
		return false;
	auto key = [](const ParamList<S>& P) {
		std::vector<std::pair<S, S>> k;
		for (auto& x : P.e)
			k.push_back({x.theta, x.mu});
		std::sort(k.begin(), k.end());
		return k;
	};
	return key(A) == key(B);
}

}  // namespace polar
