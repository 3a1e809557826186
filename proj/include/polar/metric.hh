/*
M-value computation (with the O(|P|) last-step shortcut), bit-error
conversion, and the comparison metrics H, Z, H_Q with their BER sandwiches.
*/

#pragma once

#include "transform.hh"

#include <cmath>

namespace polar {

// Binary entropy h(x) = -x log2 x - (1-x) log2(1-x) and its inverse on [0,1/2].
inline double binary_entropy(double x)
{
	if (x <= 0 || x >= 1)
		return 0;
	return -x * std::log2(x) - (1 - x) * std::log2(1 - x);
}

inline double binary_entropy_inv(double y)
{
	if (y <= 0)
		return 0;
	if (y >= 1)
		return 0.5;
	double lo = 0, hi = 0.5;
	while (hi - lo > 1e-14) {
		double mid = (lo + hi) / 2;
		(binary_entropy(mid) < y ? lo : hi) = mid;
	}
	return lo;
}

template <class S> struct MetricReport {
	S m{}, error_prob{}, h_quad{};
	double h_cond = 0, z = 0;
	double ber_z_lo = 0, ber_z_hi = 0;   // [ (1-sqrt(1-Z^2))/2, Z ]
	double ber_h_lo = 0, ber_h_hi = 0;   // [ h^{-1}(H), H/2 ]
};

// M(P) = sum mu |theta|.
template <class S> S m_value(const ParamList<S>& P)
{
	S t(0);
	for (auto& x : P.e) {
		S a = x.theta;
		if (a < S(0))
			a = -a;
		t += x.mu * a;
	}
	return t;
}

// M(P+) in one pass over a canonical list:
// sum_v mu_v theta_v (mu_v + 2 sum_{v'<v} mu_{v'}).
template <class S> S m_plus_canonical(const ParamList<S>& Pc)
{
	if (!Pc.canonical)
		throw std::invalid_argument("m_plus_canonical requires a canonical list");
	S m(0), tau(0);
	for (auto& x : Pc.e) {
		m += x.mu * x.theta * (x.mu + 2 * tau);
		tau += x.mu;
	}
	return m;
}

// M of the '+' grandchild through op c: the one-pass plus formula applied to
// the streamed child, so the child list is never materialized (ties need no
// merging: the sum only depends on a nondecreasing enumeration).
template <class S> S m_plus_of_child(const ParamList<S>& Pc, char c)
{
	if constexpr (scalar_traits<S>::exact) {
		S m(0), tau(0);
		for_each_child_ascending(Pc, c, [&](typename ParamList<S>::Entry&& x, double) {
			tau += x.mu;
			m += x.mu * x.theta * tau;
			tau += x.mu;
		});
		return m;
	} else {
		return m_plus_canonical(c == '-' ? minus_canonical(Pc) : plus_canonical(Pc));
	}
}

// M after two more ops (c1 then c2) from a canonical list: '-' endings square
// the child's M, '+' endings stream, so neither descendant is materialized.
template <class S> S m_after_two(const ParamList<S>& Pc, char c1, char c2)
{
	if (c2 == '-') {
		S r;
		if (c1 == '-') {
			r = m_value(Pc);
			r = S(r * r);
		} else {
			r = m_plus_canonical(Pc);
		}
		return S(r * r);
	}
	return m_plus_of_child(Pc, c1);
}

// M after applying w: chains canonically to depth |w|-2, then finishes with
// the squaring/streaming shortcuts, so the two deepest lists never appear.
template <class S>
S m_of_word(ParamList<S> P, const OpWord& w, size_t cap = default_size_cap)
{
	check_word(w);
	if (w.empty())
		throw std::invalid_argument("op word must be nonempty");
	if (w.size() >= 2) {
		P = apply_word(std::move(P), w.substr(0, w.size() - 2), true, cap);
		return m_after_two(P, w[w.size() - 2], w.back());
	}
	P = apply_word(std::move(P), "", true, cap);
	if (w.back() == '-') {
		S r = m_value(P);
		return S(r * r);
	}
	return m_plus_canonical(P);
}

template <class S> S bit_error_prob(const S& m) { return S((S(1) - m) / 2); }

// H(U|V), Z(U|V) in binary64 plus the exact quadratic entropy H_Q(U|V),
// with the two BER sandwich intervals for cross-checks.
template <class S> MetricReport<S> comparison_metrics(const ParamList<S>& P)
{
	MetricReport<S> r;
	r.m = m_value(P);
	r.error_prob = bit_error_prob(r.m);
	S q(0);
	double h = 0, z = 0;
	for (auto& x : P.e) {
		q += x.mu * x.theta * x.theta;
		double mu = approx(x.mu), th = std::fabs(approx(x.theta));
		th = std::min(th, 1.0);
		h += mu * binary_entropy((1 - th) / 2);
		z += mu * std::sqrt(1 - th * th);
	}
	r.h_quad = S((S(1) - q) / 2);
	r.h_cond = h;
	r.z = z;
	z = std::min(z, 1.0);
	r.ber_z_lo = (1 - std::sqrt(1 - z * z)) / 2;
	r.ber_z_hi = z;
	r.ber_h_lo = binary_entropy_inv(h);
	r.ber_h_hi = h / 2;
	return r;
}

}  // namespace polar
