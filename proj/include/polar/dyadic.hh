// Gridded fixed-point lists for two-sided interval chains: thetas live on the
// 2^-g dyadic grid (theta_v = a_v/2^g), masses are integer grid units
// (mu_v = b_v/2^g) summing to exactly 2^g, and every rounding step is itself
// a channel degradation (lower chain) or upgrade (upper chain), so chained
// bounds stay valid while all hot-path arithmetic is gcd-free integers.
#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "polar/quantize.hh"
#include "polar/scalar.hh"
#include "polar/symparam.hh"

namespace polar {

struct DyadicList {
	long g = 0;
	std::vector<mpz_class> a, b;    // ascending a in [0, 2^g], b > 0, sum b = 2^g

	size_t size() const { return a.size(); }
};

namespace detail {

inline mpz_class pow2(long k)
{
	mpz_class r;
	mpz_setbit(r.get_mpz_t(), static_cast<mp_bitcnt_t>(k));
	return r;
}

inline double log2_mpz(const mpz_class& x)
{
	signed long e;
	double m = mpz_get_d_2exp(&e, x.get_mpz_t());
	return std::log2(m) + double(e);
}

inline mpz_class shr(const mpz_class& x, long k)    // floor(x / 2^k), x >= 0
{
	mpz_class r;
	mpz_fdiv_q_2exp(r.get_mpz_t(), x.get_mpz_t(), static_cast<mp_bitcnt_t>(k));
	return r;
}

struct GridCand {
	mpz_class a, b;
};

// Sorts candidates by grid position, folds equal positions, banks the
// flooring residue 2^g - sum(b) on the extreme slot in the bound's safe
// direction (lowest theta when degrading, highest when upgrading), and drops
// empty slots. Callers push only candidates whose exact pre-floor mass is
// positive, so the extreme slot is a valid destination for every shaved bit.
inline DyadicList assemble(long g, std::vector<GridCand>& c, Direction dir)
{
	if (c.empty())
		throw std::logic_error("no grid candidates");
	std::vector<uint32_t> idx(c.size());
	for (uint32_t i = 0; i < idx.size(); ++i)
		idx[i] = i;
	std::sort(idx.begin(), idx.end(),
	          [&](uint32_t i, uint32_t j) { return cmp(c[i].a, c[j].a) < 0; });
	DyadicList out;
	out.g = g;
	mpz_class total(0);
	for (size_t k = 0; k < idx.size(); ++k) {
		GridCand& x = c[idx[k]];
		total += x.b;
		if (!out.a.empty() && cmp(out.a.back(), x.a) == 0)
			out.b.back() += x.b;
		else {
			out.a.push_back(std::move(x.a));
			out.b.push_back(std::move(x.b));
		}
	}
	mpz_class residue = pow2(g) - total;
	if (residue < 0)
		throw std::logic_error("grid mass exceeds one");
	(dir == Direction::degrade ? out.b.front() : out.b.back()) += residue;
	size_t w = 0;
	for (size_t v = 0; v < out.a.size(); ++v) {
		if (out.b[v] == 0)
			continue;
		if (w != v) {
			out.a[w] = std::move(out.a[v]);
			out.b[w] = std::move(out.b[v]);
		}
		++w;
	}
	out.a.resize(w);
	out.b.resize(w);
	return out;
}

}    // namespace detail

// Structural invariants; throws on violation (test helper).
inline void dyadic_check(const DyadicList& D)
{
	if (D.size() == 0)
		throw std::invalid_argument("empty grid list");
	mpz_class total(0), cap = detail::pow2(D.g);
	for (size_t v = 0; v < D.size(); ++v) {
		if (D.b[v] <= 0)
			throw std::invalid_argument("non-positive grid mass");
		if (D.a[v] < 0 || D.a[v] > cap)
			throw std::invalid_argument("grid theta out of range");
		if (v && cmp(D.a[v - 1], D.a[v]) >= 0)
			throw std::invalid_argument("grid thetas not ascending");
		total += D.b[v];
	}
	if (total != cap)
		throw std::invalid_argument("grid mass sum is not one");
}

inline ParamList<Rat> dyadic_to_list(const DyadicList& D)
{
	ParamList<Rat> P;
	Rat unit(1);
	unit /= Rat(detail::pow2(D.g));
	for (size_t v = 0; v < D.size(); ++v)
		P.e.push_back({Rat(D.b[v]) * unit, Rat(D.a[v]) * unit});
	P.canonical = true;
	return P;
}

// Sum of mu_v theta_v, exact.
inline Rat dyadic_m(const DyadicList& D)
{
	mpz_class s(0);
	for (size_t v = 0; v < D.size(); ++v)
		s += D.a[v] * D.b[v];
	Rat m(s);
	m /= Rat(detail::pow2(2 * D.g));
	return m;
}

// Snaps an exact canonical list onto the grid. Degrading floors each theta
// and mass; upgrading splits each entry's mass onto the two bracketing grid
// points so the mean theta is preserved exactly, then floors the masses.
// Residues are banked by assemble() in the safe direction.
inline DyadicList dyadic_from_list(const ParamList<Rat>& Pc, long g, Direction dir)
{
	if (!Pc.canonical)
		throw std::invalid_argument("grid snap requires a canonical list");
	if (g < 8)
		throw std::invalid_argument("grid too coarse");
	mpz_class unit = detail::pow2(g);
	std::vector<detail::GridCand> cands;
	for (auto& x : Pc.e) {
		mpz_class tn = x.theta.get_num() << g, td = x.theta.get_den();
		mpz_class lo, tr;
		mpz_fdiv_qr(lo.get_mpz_t(), tr.get_mpz_t(), tn.get_mpz_t(), td.get_mpz_t());
		Rat units = x.mu * Rat(unit);
		if (dir == Direction::degrade) {
			mpz_class bq;
			mpz_fdiv_q(bq.get_mpz_t(), units.get_num().get_mpz_t(),
			           units.get_den().get_mpz_t());
			cands.push_back({std::move(lo), std::move(bq)});
			continue;
		}
		Rat hi_exact = units * Rat(tr) / Rat(td);
		Rat lo_exact = units - hi_exact;
		mpz_class bl, bh;
		mpz_fdiv_q(bl.get_mpz_t(), lo_exact.get_num().get_mpz_t(),
		           lo_exact.get_den().get_mpz_t());
		cands.push_back({lo, std::move(bl)});
		if (tr > 0) {
			mpz_fdiv_q(bh.get_mpz_t(), hi_exact.get_num().get_mpz_t(),
			           hi_exact.get_den().get_mpz_t());
			cands.push_back({lo + 1, std::move(bh)});
		}
	}
	return detail::assemble(g, cands, dir);
}

// Minus transform with directional grid snap. Exact child theta a_i a_j/2^2g
// floors to the grid (degrade) or lever-splits onto its bracketing grid
// points (upgrade, mean-preserving); exact child masses floor to grid units.
inline DyadicList dyadic_minus(const DyadicList& D, Direction dir)
{
	size_t n = D.size();
	std::vector<detail::GridCand> cands;
	cands.reserve(dir == Direction::degrade ? n * (n + 1) / 2 : n * (n + 1));
	mpz_class unit = detail::pow2(D.g);
	mpz_class p, m, lo, frac;
	for (size_t i = 0; i < n; ++i)
		for (size_t j = i; j < n; ++j) {
			p = D.a[i] * D.a[j];
			m = D.b[i] * D.b[j];
			if (i < j)
				m <<= 1;
			if (dir == Direction::degrade) {
				cands.push_back({detail::shr(p, D.g), detail::shr(m, D.g)});
				continue;
			}
			lo = detail::shr(p, D.g);
			frac = p - (lo << D.g);
			cands.push_back({lo, detail::shr(m * (unit - frac), 2 * D.g)});
			if (frac > 0)
				cands.push_back({lo + 1, detail::shr(m * frac, 2 * D.g)});
		}
	return detail::assemble(D.g, cands, dir);
}

// Plus transform with directional grid snap. Per unordered pair and decision
// branch s: exact mass m(2^2g + s p)/2^(3g+1) and exact theta
// (a_j + s a_i) 2^2g / (2^2g + s p) in grid units; theta snaps like minus
// (the upgrade lever shares are m*rem and m*(den-rem) over 2^(3g+1), exact).
inline DyadicList dyadic_plus(const DyadicList& D, Direction dir)
{
	size_t n = D.size();
	long g = D.g;
	std::vector<detail::GridCand> cands;
	cands.reserve(n * (n + 1) * (dir == Direction::degrade ? 1 : 2));
	mpz_class two2g = detail::pow2(2 * g);
	mpz_class p, m, den, na, nn, lo, rem;
	for (size_t i = 0; i < n; ++i)
		for (size_t j = i; j < n; ++j) {
			p = D.a[i] * D.a[j];
			m = D.b[i] * D.b[j];
			if (i < j)
				m <<= 1;
			for (int s = 1; s >= -1; s -= 2) {
				if (s > 0) {
					den = two2g + p;
					na = D.a[i] + D.a[j];
				} else {
					den = two2g - p;
					na = abs(D.a[j] - D.a[i]);
				}
				if (den == 0)
					continue;    // degenerate branch carries zero mass
				nn = na << (2 * g);
				mpz_fdiv_qr(lo.get_mpz_t(), rem.get_mpz_t(), nn.get_mpz_t(),
				            den.get_mpz_t());
				if (dir == Direction::degrade) {
					cands.push_back({lo, detail::shr(m * den, 3 * g + 1)});
					continue;
				}
				cands.push_back({lo, detail::shr(m * (den - rem), 3 * g + 1)});
				if (rem > 0)
					cands.push_back({lo + 1, detail::shr(m * rem, 3 * g + 1)});
			}
		}
	return detail::assemble(g, cands, dir);
}

inline DyadicList dyadic_op(const DyadicList& D, char op, Direction dir)
{
	if (op != '-' && op != '+')
		throw std::invalid_argument("op must be '-' or '+'");
	return op == '-' ? dyadic_minus(D, dir) : dyadic_plus(D, dir);
}

namespace detail {

struct GridCandRef {
	double key;
	int32_t x, r;    // degrade: (left, right); upgrade: (middle, unused)
	uint32_t gx, gr;
};

// Greedy degrading merge on grid lists. Slot state keeps the exact running
// sums B = sum b and A = sum b*a, so the adjacent-pair loss is the exact
// integer A_r B_l - A_l B_r on the common 2^-3g scale and the merge order
// (and leftmost tie rule) matches the exact greedy bit for bit; merged means
// floor to the grid only once, at the end.
inline std::pair<DyadicList, QuantizeCertificate<Rat>>
dyadic_degrade_q(const DyadicList& D, size_t q)
{
	if (q < 1)
		throw std::invalid_argument("degrade requires Q >= 1");
	QuantizeCertificate<Rat> cert;
	cert.theta_c = Rat(D.a.back()) / Rat(pow2(D.g));
	cert.delta_bound = loss_bound(cert.theta_c, q, Direction::degrade);
	cert.actual_merge_loss_sum = 0;
	if (D.size() <= q)
		return {D, cert};

	size_t n = D.size();
	std::vector<mpz_class> B(D.b), A(n);
	for (size_t v = 0; v < n; ++v)
		A[v] = D.a[v] * D.b[v];
	Links lk(n);
	auto loss_of = [&](int32_t l, int32_t r) { return mpz_class(A[r] * B[l] - A[l] * B[r]); };

	using HeapItem = std::pair<double, uint32_t>;
	std::vector<GridCandRef> arena;
	std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap;
	auto push = [&](int32_t x) {
		if (x < 0 || lk.next[x] < 0)
			return;
		int32_t r = lk.next[x];
		arena.push_back({log2_mpz(loss_of(x, r)), x, r, lk.gen[x], lk.gen[r]});
		heap.push({arena.back().key, uint32_t(arena.size() - 1)});
	};
	auto valid = [&](const GridCandRef& c) {
		return lk.next[c.x] == c.r && lk.gen[c.x] == c.gx && lk.gen[c.r] == c.gr;
	};
	for (int32_t x = 0; x + 1 < int32_t(n); ++x)
		push(x);

	mpz_class loss_sum(0);
	std::vector<uint32_t> group;
	while (lk.live > q) {
		uint32_t best;
		for (;;) {
			best = heap.top().second;
			heap.pop();
			if (valid(arena[best]))
				break;
		}
		group.clear();
		double limit = arena[best].key + 1e-9;
		while (!heap.empty() && heap.top().first <= limit) {
			uint32_t i = heap.top().second;
			heap.pop();
			if (valid(arena[i]))
				group.push_back(i);
		}
		mpz_class best_loss = loss_of(arena[best].x, arena[best].r);
		for (uint32_t i : group) {
			mpz_class li = loss_of(arena[i].x, arena[i].r);
			int c = cmp(li, best_loss);
			if (c < 0 || (c == 0 && arena[i].x < arena[best].x)) {
				std::swap(best, i);
				best_loss = std::move(li);
			}
			heap.push({arena[i].key, i});
		}
		int32_t l = arena[best].x, r = arena[best].r;
		loss_sum += best_loss;
		A[l] += A[r];
		B[l] += B[r];
		lk.unlink(r);
		++lk.gen[l];
		push(lk.prev[l]);
		push(l);
	}

	DyadicList out;
	out.g = D.g;
	mpz_class aq;
	for (int32_t v = 0; v >= 0; v = lk.next[v]) {
		mpz_fdiv_q(aq.get_mpz_t(), A[v].get_mpz_t(), B[v].get_mpz_t());
		if (!out.a.empty() && cmp(out.a.back(), aq) == 0)
			out.b.back() += B[v];
		else {
			out.a.push_back(aq);
			out.b.push_back(B[v]);
		}
	}
	cert.actual_merge_loss_sum = Rat(loss_sum) / Rat(pow2(3 * D.g));
	return {std::move(out), cert};
}

// Greedy upgrading removal on grid lists. Thetas never move; the removed
// slot's mass lever-splits to its neighbors (floor to the left, remainder to
// the right — toward the larger theta, the one-sided direction). Losses
// b^2 dl dr / gap are compared exactly by cross-multiplication; the
// certificate sum is accumulated as a 2^-4g ceiling (a valid upper bound).
inline std::pair<DyadicList, QuantizeCertificate<Rat>>
dyadic_upgrade_q(const DyadicList& D, size_t q)
{
	if (q < 2)
		throw std::invalid_argument("upgrade requires Q >= 2");
	QuantizeCertificate<Rat> cert;
	cert.theta_c = Rat(D.a.back()) / Rat(pow2(D.g));
	cert.delta_bound = loss_bound(cert.theta_c, q, Direction::upgrade);
	cert.actual_merge_loss_sum = 0;
	if (D.size() <= q)
		return {D, cert};

	size_t n = D.size();
	std::vector<mpz_class> B(D.b);
	Links lk(n);
	auto loss_of = [&](int32_t x, mpz_class& num, mpz_class& den) {
		int32_t l = lk.prev[x], r = lk.next[x];
		num = B[x] * B[x] * (D.a[x] - D.a[l]) * (D.a[r] - D.a[x]);
		den = D.a[r] - D.a[l];
	};

	using HeapItem = std::pair<double, uint32_t>;
	std::vector<GridCandRef> arena;
	std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap;
	mpz_class num, den;
	auto push = [&](int32_t x) {
		if (x < 0 || lk.prev[x] < 0 || lk.next[x] < 0)
			return;
		loss_of(x, num, den);
		arena.push_back({log2_mpz(num) - log2_mpz(den), x, -1, lk.gen[x], 0});
		heap.push({arena.back().key, uint32_t(arena.size() - 1)});
	};
	auto valid = [&](const GridCandRef& c) {
		return lk.prev[c.x] >= 0 && lk.next[c.x] >= 0 && lk.gen[c.x] == c.gx;
	};
	for (int32_t x = 1; x + 1 < int32_t(n); ++x)
		push(x);

	mpz_class best_num, best_den, give, ceil_sum(0), t;
	std::vector<uint32_t> group;
	while (lk.live > q) {
		uint32_t best;
		for (;;) {
			best = heap.top().second;
			heap.pop();
			if (valid(arena[best]))
				break;
		}
		group.clear();
		double limit = arena[best].key + 1e-9;
		while (!heap.empty() && heap.top().first <= limit) {
			uint32_t i = heap.top().second;
			heap.pop();
			if (valid(arena[i]))
				group.push_back(i);
		}
		loss_of(arena[best].x, best_num, best_den);
		for (uint32_t i : group) {
			loss_of(arena[i].x, num, den);
			int c = cmp(num * best_den, best_num * den);
			if (c < 0 || (c == 0 && arena[i].x < arena[best].x)) {
				std::swap(best, i);
				std::swap(best_num, num);
				std::swap(best_den, den);
			}
			heap.push({arena[i].key, i});
		}
		int32_t x = arena[best].x, l = lk.prev[x], r = lk.next[x];
		t = best_num << static_cast<mp_bitcnt_t>(D.g);
		mpz_cdiv_q(t.get_mpz_t(), t.get_mpz_t(), best_den.get_mpz_t());
		ceil_sum += t;
		t = B[x] * (D.a[r] - D.a[x]);
		mpz_fdiv_q(give.get_mpz_t(), t.get_mpz_t(), best_den.get_mpz_t());
		B[l] += give;
		B[r] += B[x] - give;
		lk.unlink(x);
		++lk.gen[l];
		++lk.gen[r];
		push(l);
		push(r);
	}

	DyadicList out;
	out.g = D.g;
	for (int32_t v = 0; v >= 0; v = lk.next[v]) {
		out.a.push_back(D.a[v]);
		out.b.push_back(B[v]);
	}
	cert.actual_merge_loss_sum = Rat(ceil_sum) / Rat(pow2(4 * D.g));
	return {std::move(out), cert};
}

}    // namespace detail

inline std::pair<DyadicList, QuantizeCertificate<Rat>>
dyadic_quantize(const DyadicList& D, size_t q, Direction dir)
{
	return dir == Direction::degrade ? detail::dyadic_degrade_q(D, q)
	                                 : detail::dyadic_upgrade_q(D, q);
}

// M after one last op, evaluated exactly on the grid list without
// materializing the child: minus gives (sum a b)^2 / 2^4g, plus the one-pass
// sum a_v b_v (b_v + 2 tau) / 2^3g with tau the mass prefix sum.
inline Rat dyadic_leaf_m(const DyadicList& D, char op)
{
	if (op == '-') {
		mpz_class s(0);
		for (size_t v = 0; v < D.size(); ++v)
			s += D.a[v] * D.b[v];
		return Rat(s * s) / Rat(detail::pow2(4 * D.g));
	}
	if (op != '+')
		throw std::invalid_argument("op must be '-' or '+'");
	mpz_class acc(0), tau(0);
	for (size_t v = 0; v < D.size(); ++v) {
		acc += D.a[v] * D.b[v] * (D.b[v] + 2 * tau);
		tau += D.b[v];
	}
	return Rat(acc) / Rat(detail::pow2(3 * D.g));
}

}    // namespace polar
