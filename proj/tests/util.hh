/*
Shared helpers for tests: deterministic random symmetric-parameter lists.
*/

#pragma once

#include "polar/symparam.hh"

#include <random>

// Raw list with exact masses summing to 1; theta in [-1,1] (signed unless
// canonical requested). dyadic restricts theta to k/16 to provoke ties.
inline polar::ParamList<polar::Rat>
random_rat_list(std::mt19937_64& rng, size_t max_len, bool canonical = false,
                bool dyadic = false)
{
	using namespace polar;
	size_t n = 1 + rng() % max_len;
	std::vector<unsigned long> w(n);
	unsigned long tot = 0;
	for (auto& x : w)
		tot += x = 1 + rng() % 64;
	ParamList<Rat> P;
	for (size_t i = 0; i < n; ++i) {
		Rat mu(w[i], tot);
		mu.canonicalize();
		Rat th = dyadic ? Rat(rng() % 17, 16) : Rat(rng() % 1001, 1000);
		th.canonicalize();
		if (!canonical && rng() % 2)
			th = -th;
		P.e.push_back({mu, th});
	}
	return canonical ? canonicalize(std::move(P)) : P;
}

inline polar::ParamList<double>
to_double_list(const polar::ParamList<polar::Rat>& P)
{
	polar::ParamList<double> out;
	for (auto& x : P.e)
		out.e.push_back({polar::approx(x.mu), polar::approx(x.theta)});
	out.canonical = P.canonical;
	return out;
}

inline polar::Rat rat_pow(const polar::Rat& x, unsigned long k)
{
	polar::Rat r(1), b = x;
	for (; k; k >>= 1) {
		if (k & 1)
			r *= b;
		b *= b;
	}
	return r;
}
