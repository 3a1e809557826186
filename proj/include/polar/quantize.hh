/*
Greedy degrading- and upgrading-merge quantizers with exact per-merge loss
accounting and theta_C/Q^2-type precision certificates.

The default engine keeps adjacent-pair (or removable-middle) losses in a
min-heap over a doubly linked list with lazy invalidation; the rescan engine
re-scans all candidates each merge. Both produce the identical merge sequence:
the argmin is taken under the exact order with ties broken toward the smallest
current index, and slot labels preserve the current order of live entries.
*/

#pragma once

#include "symparam.hh"

#include <cstdint>
#include <queue>

namespace polar {

enum class Direction { degrade, upgrade };
enum class QuantizeEngine { heap, rescan };

struct QuantizeConfig {
	size_t target_size = 2;
	Direction direction = Direction::degrade;
	bool pin_theta_one = false;
};

template <class S> struct QuantizeCertificate {
	S delta_bound{};
	S theta_c{};
	S actual_merge_loss_sum{};
};

// theta_c/Q^2 for degrade, theta_c/(Q-1)^2 for upgrade.
template <class S> S loss_bound(const S& theta_c, size_t q, Direction dir)
{
	size_t d = dir == Direction::degrade ? q : q - 1;
	if (dir == Direction::upgrade && q < 2)
		throw std::invalid_argument("upgrade requires Q >= 2");
	if constexpr (scalar_traits<S>::exact) {
		mpz_class dd(static_cast<unsigned long>(d));
		return S(theta_c / Rat(dd * dd));
	} else {
		return theta_c / double(d) / double(d);
	}
}

namespace detail {

// Lower bound on log2 of a positive rational, within ~1e-12.
inline double log2_approx(const Rat& x)
{
	signed long en, ed;
	double mn = mpz_get_d_2exp(&en, mpq_numref(x.get_mpq_t()));
	double md = mpz_get_d_2exp(&ed, mpq_denref(x.get_mpq_t()));
	return std::log2(mn) - std::log2(md) + double(en - ed);
}

inline double cand_key(const Rat& loss) { return log2_approx(loss); }
inline double cand_key(double loss) { return loss; }
template <class S> constexpr double cand_slack() { return scalar_traits<S>::exact ? 1e-9 : 0.0; }

struct Links {
	std::vector<int32_t> prev, next;
	std::vector<uint32_t> gen;
	size_t live;

	explicit Links(size_t n) : prev(n), next(n), gen(n, 0), live(n)
	{
		for (size_t i = 0; i < n; ++i) {
			prev[i] = int32_t(i) - 1;
			next[i] = i + 1 < n ? int32_t(i) + 1 : -1;
		}
	}
	void unlink(int32_t x)
	{
		if (prev[x] >= 0)
			next[prev[x]] = next[x];
		if (next[x] >= 0)
			prev[next[x]] = prev[x];
		prev[x] = next[x] = -2;
		++gen[x];
		--live;
	}
};

// Candidates hold only a double key (log2 of the exact loss); the exact loss
// is recomputed on demand, which is safe because a candidate is only consulted
// while its slots are unchanged (generation check).
template <class S> struct Cand {
	double key;
	int32_t a, b, c;    // degrade: (left, right, -); upgrade: (middle, left, right)
	uint32_t ga, gb;
};

template <class S> using Entries = std::vector<typename ParamList<S>::Entry>;

template <class S> S pair_loss(const Entries<S>& e, int32_t l, int32_t r)
{
	return S(e[l].mu * e[r].mu * (e[r].theta - e[l].theta));
}

template <class S> S middle_loss(const Entries<S>& e, int32_t l, int32_t m, int32_t r)
{
	S dl = e[m].theta - e[l].theta, dr = e[r].theta - e[m].theta;
	return S(e[m].mu * e[m].mu * dl * dr / (e[r].theta - e[l].theta));
}

// Shared heap driver; Up selects candidate shape and merge action.
template <class S, bool Up> S greedy_heap(Entries<S>& e, Links& lk, size_t q)
{
	using HeapItem = std::pair<double, uint32_t>;
	std::vector<Cand<S>> arena;
	std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap;

	auto loss_of = [&](const Cand<S>& c) {
		if constexpr (Up)
			return middle_loss<S>(e, c.b, c.a, c.c);
		else
			return pair_loss<S>(e, c.a, c.b);
	};
	auto push = [&](int32_t x) {
		if (x < 0)
			return;
		int32_t l = lk.prev[x], r = lk.next[x];
		if constexpr (Up) {
			if (l < 0 || r < 0)
				return;
			arena.push_back({0, x, l, r, lk.gen[x], 0});
		} else {
			if (r < 0)
				return;
			arena.push_back({0, x, r, -1, lk.gen[x], lk.gen[r]});
		}
		arena.back().key = cand_key(loss_of(arena.back()));
		heap.push({arena.back().key, uint32_t(arena.size() - 1)});
	};
	auto valid = [&](const Cand<S>& c) {
		if constexpr (Up)
			return lk.prev[c.a] == c.b && lk.next[c.a] == c.c && lk.gen[c.a] == c.ga;
		else
			return lk.next[c.a] == c.b && lk.gen[c.a] == c.ga && lk.gen[c.b] == c.gb;
	};

	for (int32_t x = 0; x < int32_t(e.size()); ++x)
		push(x);

	S loss_sum(0);
	std::vector<uint32_t> group;
	while (lk.live > q) {
		uint32_t best;
		for (;;) {    // a valid candidate always exists while live > q
			best = heap.top().second;
			heap.pop();
			if (valid(arena[best]))
				break;
		}
		// Everything that could be exactly smaller or tie the minimum has a
		// key within the slack window; resolve that group exactly, breaking
		// ties toward the smallest slot (= smallest current index).
		group.clear();
		double limit = arena[best].key + cand_slack<S>();
		while (!heap.empty() && heap.top().first <= limit) {
			uint32_t i = heap.top().second;
			heap.pop();
			if (valid(arena[i]))
				group.push_back(i);
		}
		S best_loss = loss_of(arena[best]);
		for (uint32_t i : group) {
			S li = loss_of(arena[i]);
			if (li < best_loss || (li == best_loss && arena[i].a < arena[best].a)) {
				std::swap(best, i);
				best_loss = std::move(li);
			}
			heap.push({arena[i].key, i});    // loser stays pending
		}
		const Cand<S> w = arena[best];    // by value: push() may reallocate arena
		loss_sum += best_loss;
		if constexpr (Up) {
			int32_t l = w.b, m = w.a, r = w.c;
			S gap = e[r].theta - e[l].theta;
			e[l].mu += e[m].mu * (e[r].theta - e[m].theta) / gap;
			e[r].mu += e[m].mu * (e[m].theta - e[l].theta) / gap;
			lk.unlink(m);
			++lk.gen[l];
			++lk.gen[r];
			push(l);
			push(r);
		} else {
			int32_t l = w.a, r = w.b;
			S mu = e[l].mu + e[r].mu;
			e[l].theta = (e[l].mu * e[l].theta + e[r].mu * e[r].theta) / mu;
			e[l].mu = mu;
			lk.unlink(r);
			++lk.gen[l];
			push(lk.prev[l]);
			push(l);
		}
	}
	return loss_sum;
}

template <class S, bool Up> S greedy_rescan(Entries<S>& e, Links& lk, size_t q)
{
	S loss_sum(0);
	while (lk.live > q) {
		int32_t best = -1;
		S best_loss(0);
		// slot 0 is always live: degrade merges into the left slot and
		// upgrade removes interior slots only
		for (int32_t x = 0; x >= 0; x = lk.next[x]) {
			S loss(0);
			if constexpr (Up) {
				if (lk.prev[x] < 0 || lk.next[x] < 0)
					continue;
				loss = middle_loss<S>(e, lk.prev[x], x, lk.next[x]);
			} else {
				if (lk.next[x] < 0)
					continue;
				loss = pair_loss<S>(e, x, lk.next[x]);
			}
			if (best < 0 || loss < best_loss) {
				best = x;
				best_loss = std::move(loss);
			}
		}
		loss_sum += best_loss;
		if constexpr (Up) {
			int32_t l = lk.prev[best], r = lk.next[best];
			S gap = e[r].theta - e[l].theta;
			e[l].mu += e[best].mu * (e[r].theta - e[best].theta) / gap;
			e[r].mu += e[best].mu * (e[best].theta - e[l].theta) / gap;
			lk.unlink(best);
		} else {
			int32_t r = lk.next[best];
			S mu = e[best].mu + e[r].mu;
			e[best].theta = (e[best].mu * e[best].theta + e[r].mu * e[r].theta) / mu;
			e[best].mu = mu;
			lk.unlink(r);
		}
	}
	return loss_sum;
}

template <class S, bool Up>
std::pair<ParamList<S>, QuantizeCertificate<S>>
greedy_merge(const ParamList<S>& Pc, size_t q, bool pin, QuantizeEngine engine)
{
	if (!Pc.canonical)
		throw std::invalid_argument("quantize requires a canonical list");
	QuantizeCertificate<S> cert;
	cert.theta_c = Pc.e.empty() ? S(0) : Pc.e.back().theta;
	cert.delta_bound = loss_bound(cert.theta_c, q, Up ? Direction::upgrade : Direction::degrade);
	cert.actual_merge_loss_sum = S(0);

	Entries<S> e = Pc.e;
	bool pinned = pin && !e.empty() && e.back().theta == S(1);
	typename ParamList<S>::Entry aside{};
	if (pinned) {
		aside = e.back();
		e.pop_back();
	}
	Links lk(e.size());
	cert.actual_merge_loss_sum = engine == QuantizeEngine::heap
	                                 ? greedy_heap<S, Up>(e, lk, q)
	                                 : greedy_rescan<S, Up>(e, lk, q);
	ParamList<S> out;
	out.e.reserve(lk.live + pinned);
	if (!e.empty())
		for (int32_t x = 0; x >= 0; x = lk.next[x])
			out.e.push_back(std::move(e[x]));
	if (pinned)
		out.e.push_back(std::move(aside));
	out.canonical = true;
	return {std::move(out), std::move(cert)};
}

}  // namespace detail

// Merge adjacent pairs minimizing mu_v mu_{v+1} (theta_{v+1} - theta_v) until
// at most Q entries remain; M is invariant, M(P+) decreases by exactly the
// accumulated loss, bounded by theta_C/Q^2.
template <class S>
std::pair<ParamList<S>, QuantizeCertificate<S>>
degrade(const ParamList<S>& Pc, size_t q, bool pin_theta_one = false,
        QuantizeEngine engine = QuantizeEngine::heap)
{
	if (q < 1)
		throw std::invalid_argument("degrade requires Q >= 1");
	return detail::greedy_merge<S, false>(Pc, q, pin_theta_one, engine);
}

// Remove the interior element minimizing mu'_{v-1} mu'_{v+1} (theta_{v+1} -
// theta_{v-1}), splitting its mass to the neighbors so that both the total
// mass and the mean theta are preserved; M is invariant, M(P+) increases by
// exactly the accumulated loss, bounded by theta_C/(Q-1)^2. With
// pin_theta_one and theta_C = 1 the (mu_C, 1) entry is set aside and
// restored, so the output has Q+1 entries.
template <class S>
std::pair<ParamList<S>, QuantizeCertificate<S>>
upgrade(const ParamList<S>& Pc, size_t q, bool pin_theta_one = false,
        QuantizeEngine engine = QuantizeEngine::heap)
{
	if (q < 2)
		throw std::invalid_argument("upgrade requires Q >= 2");
	return detail::greedy_merge<S, true>(Pc, q, pin_theta_one, engine);
}

template <class S>
std::pair<ParamList<S>, QuantizeCertificate<S>>
quantize(const ParamList<S>& Pc, const QuantizeConfig& cfg,
         QuantizeEngine engine = QuantizeEngine::heap)
{
	return cfg.direction == Direction::degrade
	           ? degrade(Pc, cfg.target_size, cfg.pin_theta_one, engine)
	           : upgrade(Pc, cfg.target_size, cfg.pin_theta_one, engine);
}

}  // namespace polar
