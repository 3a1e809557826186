/*
Polar minus/plus transforms on symmetric-parameter lists, op-word chaining,
and the max-theta recursion t-(x) = x^2, t+(x) = 2x/(1+x^2).
*/

#pragma once

#include "symparam.hh"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace polar {

// Op word over '-'/'+', first character applied first; index bit 0 -> '-',
// bit 1 -> '+', most significant bit first.
using OpWord = std::string;

inline OpWord word_from_bits(uint64_t index, int n)
{
	OpWord w(n, '-');
	for (int k = 0; k < n; ++k)
		if (index >> (n - 1 - k) & 1)
			w[k] = '+';
	return w;
}

inline void check_word(const OpWord& w)
{
	for (char c : w)
		if (c != '-' && c != '+')
			throw std::invalid_argument("op word may contain only '-' and '+'");
}

// All ordered pairs (v0, v1) row-major: (mu0 mu1, theta0 theta1); |P|^2 entries.
template <class S> ParamList<S> minus_op(const ParamList<S>& P)
{
	ParamList<S> out;
	out.e.reserve(P.size() * P.size());
	for (auto& a : P.e)
		for (auto& b : P.e)
			out.e.push_back({a.mu * b.mu, a.theta * b.theta});
	return out;
}

// All ordered pairs and u in {0,1}:
// (mu0 mu1 (1 -+ theta0 theta1)/2, (theta1 -+ theta0)/(1 -+ theta0 theta1)),
// u = 0 taking the upper signs; degenerate denominators yield (0,0);
// 2|P|^2 entries.
template <class S> ParamList<S> plus_op(const ParamList<S>& P)
{
	ParamList<S> out;
	out.e.reserve(2 * P.size() * P.size());
	for (auto& a : P.e)
		for (auto& b : P.e) {
			S m = a.mu * b.mu, p = a.theta * b.theta;
			S d0 = S(1) + p, d1 = S(1) - p;
			if (d0 == S(0))
				out.e.push_back({S(0), S(0)});
			else
				out.e.push_back({m * d0 / 2, (b.theta + a.theta) / d0});
			if (d1 == S(0))
				out.e.push_back({S(0), S(0)});
			else
				out.e.push_back({m * d1 / 2, (b.theta - a.theta) / d1});
		}
	return out;
}

namespace detail {

inline Rat rat_frac(const mpz_class& num, const mpz_class& den)
{
	Rat q(num, den);
	q.canonicalize();
	return q;
}

}  // namespace detail

inline constexpr size_t default_size_cap = size_t(1) << 26;

// Visits the entries of the canonicalized '-'/'+' child of Pc in nondecreasing
// theta order without materializing the child. For fixed i, theta_i theta_j,
// (theta_i+theta_j)/(1+theta_i theta_j) and (theta_j-theta_i)/(1-theta_i
// theta_j) are all nondecreasing in j, so a k-way merge over the per-i pair
// streams emits the child in canonical order with O(|P|) state. Equal thetas
// arrive as separate calls of fn(entry, theta_approx); zero-mass degenerate
// pairs are skipped. Exact backend only.
template <class S, class Fn>
void for_each_child_ascending(const ParamList<S>& Pc, char op, Fn&& fn)
{
	static_assert(scalar_traits<S>::exact,
	              "child streaming relies on exact comparisons");
	if (op != '-' && op != '+')
		throw std::invalid_argument("op must be '-' or '+'");
	if (!Pc.canonical)
		throw std::invalid_argument("child streaming requires a canonical list");
	const auto& v = Pc.e;
	const uint32_t s = uint32_t(v.size());
	if (!s)
		return;

	struct Cursor {
		uint32_t i, j, u;    // u = 2 for '-', plus branch 0/1 otherwise
		typename ParamList<S>::Entry cur;
		double lo;
	};
	std::vector<Cursor> cs;
	cs.reserve(op == '-' ? s : 2 * s);

	mpz_class pn, pd, t0, t1, mn, md, dd;
	// Loads the (c.i, c.j) pair entry into c.cur; false on the zero-mass case.
	auto load = [&](Cursor& c) {
		const auto& a = v[c.i];
		const auto& b = v[c.j];
		Rat m = a.mu * b.mu;
		if (c.i != c.j)
			mpq_mul_2exp(m.get_mpq_t(), m.get_mpq_t(), 1);
		auto ni = mpq_numref(a.theta.get_mpq_t());
		auto di = mpq_denref(a.theta.get_mpq_t());
		auto nj = mpq_numref(b.theta.get_mpq_t());
		auto dj = mpq_denref(b.theta.get_mpq_t());
		if (c.u == 2) {    // '-': (m, theta_i theta_j)
			mpz_mul(pn.get_mpz_t(), ni, nj);
			mpz_mul(pd.get_mpz_t(), di, dj);
			c.cur = {std::move(m), detail::rat_frac(pn, pd)};
		} else {    // '+': mu m (pd -+ pn)/(2 pd), theta (t0+t1 or t1-t0)/(pd -+ pn)
			mpz_mul(pn.get_mpz_t(), ni, nj);
			mpz_mul(pd.get_mpz_t(), di, dj);
			if (c.u)
				mpz_sub(mn.get_mpz_t(), pd.get_mpz_t(), pn.get_mpz_t());
			else
				mpz_add(mn.get_mpz_t(), pd.get_mpz_t(), pn.get_mpz_t());
			if (mn == 0)
				return false;
			mpz_mul(t0.get_mpz_t(), ni, dj);
			mpz_mul(t1.get_mpz_t(), nj, di);
			if (c.u)
				mpz_sub(t0.get_mpz_t(), t1.get_mpz_t(), t0.get_mpz_t());
			else
				mpz_add(t0.get_mpz_t(), t0.get_mpz_t(), t1.get_mpz_t());
			mpz_mul(md.get_mpz_t(), mn.get_mpz_t(), mpq_numref(m.get_mpq_t()));
			mpz_mul_2exp(dd.get_mpz_t(), pd.get_mpz_t(), 1);
			mpz_mul(dd.get_mpz_t(), dd.get_mpz_t(), mpq_denref(m.get_mpq_t()));
			c.cur = {detail::rat_frac(md, dd), detail::rat_frac(t0, mn)};
		}
		c.lo = approx(c.cur.theta);
		return true;
	};
	auto advance = [&](Cursor& c) {
		while (++c.j < s)
			if (load(c))
				return true;
		return false;
	};
	auto seed = [&](uint32_t i, uint32_t u) {
		Cursor c{i, i, u, {}, 0};
		if (load(c) || advance(c))
			cs.push_back(std::move(c));
	};
	for (uint32_t i = 0; i < s; ++i) {
		if (op == '-') {
			seed(i, 2);
		} else {
			seed(i, 0);
			seed(i, 1);
		}
	}

	// Min-heap of cursor ids ordered by current theta.
	auto later = [&](uint32_t x, uint32_t y) {
		return lt_filtered(cs[y].lo, cs[y].cur.theta, cs[x].lo, cs[x].cur.theta);
	};
	std::vector<uint32_t> heap(cs.size());
	for (uint32_t k = 0; k < heap.size(); ++k)
		heap[k] = k;
	std::make_heap(heap.begin(), heap.end(), later);
	while (!heap.empty()) {
		std::pop_heap(heap.begin(), heap.end(), later);
		uint32_t id = heap.back();
		fn(std::move(cs[id].cur), cs[id].lo);
		if (advance(cs[id]))
			std::push_heap(heap.begin(), heap.end(), later);
		else
			heap.pop_back();
	}
}

namespace detail {

// Shared exact-backend builder: stream the child ascending, merging equal
// thetas on the fly, so memory follows the canonical result instead of the
// |P|^2 raw expansion.
template <class S>
ParamList<S> child_canonical(const ParamList<S>& Pc, char op, size_t cap)
{
	ParamList<S> out;
	double last_lo = -1;
	for_each_child_ascending(Pc, op, [&](typename ParamList<S>::Entry&& x, double lo) {
		if (!out.e.empty() && eq_filtered(last_lo, out.e.back().theta, lo, x.theta)) {
			out.e.back().mu += x.mu;
			return;
		}
		if (out.e.size() >= cap)
			throw std::length_error("transform would exceed the list size cap");
		out.e.push_back(std::move(x));
		last_lo = lo;
	});
	out.canonical = true;
	return out;
}

}  // namespace detail

// canonicalize(minus_op(Pc)), built in canonical order; throws
// std::length_error when the canonical result would exceed cap entries.
template <class S>
ParamList<S> minus_canonical(const ParamList<S>& Pc, size_t cap = SIZE_MAX)
{
	assert(Pc.canonical);
	if constexpr (!scalar_traits<S>::exact) {
		if (Pc.size() * Pc.size() > cap)
			throw std::length_error("transform would exceed the list size cap");
		return canonicalize(minus_op(Pc));
	} else {
		return detail::child_canonical(Pc, '-', cap);
	}
}

// canonicalize(plus_op(Pc)); the u = 1 branch is emitted with |theta|
// (theta_j >= theta_i under the canonical order).
template <class S>
ParamList<S> plus_canonical(const ParamList<S>& Pc, size_t cap = SIZE_MAX)
{
	assert(Pc.canonical);
	if constexpr (!scalar_traits<S>::exact) {
		if (2 * Pc.size() * Pc.size() > cap)
			throw std::length_error("transform would exceed the list size cap");
		return canonicalize(plus_op(Pc));
	} else {
		return detail::child_canonical(Pc, '+', cap);
	}
}

// Applies the ops of w left to right; with canonicalize_each the list is kept
// canonical throughout (same final M either way). Throws std::length_error
// when an intermediate list would exceed cap entries: the canonical path caps
// the merged results it builds, the raw path caps the |P|^2 expansions.
template <class S>
ParamList<S> apply_word(ParamList<S> P, const OpWord& w, bool canonicalize_each = true,
                        size_t cap = default_size_cap)
{
	check_word(w);
	if (canonicalize_each)
		P = canonicalize(std::move(P));
	for (char c : w) {
		size_t s = P.size();
		if (s > (size_t(1) << 31))
			throw std::length_error("transform would exceed the list size cap");
		if (canonicalize_each) {
			P = c == '-' ? minus_canonical(P, cap) : plus_canonical(P, cap);
		} else {
			if ((c == '-' ? s * s : 2 * s * s) > cap)
				throw std::length_error("transform would exceed the list size cap");
			P = c == '-' ? minus_op(P) : plus_op(P);
		}
	}
	return P;
}

// x_n from x_0 = theta0 under the per-op recursions; equals the largest theta
// of the canonical list after w when starting from {(1, theta0)}.
template <class S> S theta_max_after(S theta0, const OpWord& w)
{
	check_word(w);
	S x = theta0;
	for (char c : w)
		x = c == '-' ? S(x * x) : S(2 * x / (S(1) + x * x));
	return x;
}

}  // namespace polar
