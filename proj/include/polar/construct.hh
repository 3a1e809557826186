// Full-tree analysis of all 2^n indices: exact rational bit error
// probabilities by depth-first reuse of canonical lists, or two-sided
// interval bounds from paired degraded/upgraded grid chains; frozen-set
// selection, bit-reversed index sets, and block error bounds.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "polar/dyadic.hh"
#include "polar/metric.hh"
#include "polar/quantize.hh"
#include "polar/scalar.hh"
#include "polar/symparam.hh"
#include "polar/transform.hh"

namespace polar {

enum class AnalysisMode { exact, interval };

template <class S> struct IndexRecord {
	std::string index_bits;    // b_1..b_n, 0 <-> '-' and 1 <-> '+'
	S m_lower{}, m_upper{};
	S ber_lower{}, ber_upper{};
	AnalysisMode mode = AnalysisMode::exact;
};

struct AnalyzeOptions {
	size_t q = 512;                        // interval mode list budget
	long grid_bits = 832;                  // interval mode dyadic grid
	size_t size_cap = default_size_cap;    // exact mode resource guard
	int threads = 1;                       // sibling-subtree workers
};

inline std::string index_bits(uint64_t index, int n)
{
	std::string s(n, '0');
	for (int i = 0; i < n; ++i)
		s[i] = (index >> (n - 1 - i)) & 1 ? '1' : '0';
	return s;
}

inline uint64_t index_value(const std::string& bits)
{
	uint64_t v = 0;
	for (char c : bits) {
		if (c != '0' && c != '1')
			throw std::invalid_argument("index bits must be 0/1");
		v = v << 1 | uint64_t(c - '0');
	}
	return v;
}

inline uint64_t bit_reverse(uint64_t index, int n)
{
	uint64_t r = 0;
	for (int i = 0; i < n; ++i)
		r |= ((index >> i) & 1) << (n - 1 - i);
	return r;
}

namespace detail {

inline double log2_of(const Rat& x) { return log2_approx(x); }
inline double log2_of(double x) { return std::log2(x); }

template <class S> ParamList<S> exact_child(const ParamList<S>& P, char c, size_t cap)
{
	return c == '-' ? minus_canonical(P, cap) : plus_canonical(P, cap);
}

inline DyadicList interval_child(const DyadicList& D, char c, size_t q, Direction dir)
{
	return dyadic_quantize(dyadic_op(D, c, dir), q, dir).first;
}

template <class S>
void exact_tree(const ParamList<S>& P, int depth, int n, std::string& bits,
                std::vector<IndexRecord<S>>& out, size_t cap)
{
	auto emit = [&](const S& m) {
		S ber = bit_error_prob(m);
		out.push_back({bits, m, m, ber, ber, AnalysisMode::exact});
	};
	if (depth == n - 1) {
		S mv = m_value(P);
		for (char c : {'-', '+'}) {
			bits[depth] = c == '-' ? '0' : '1';
			emit(c == '-' ? S(mv * mv) : m_plus_canonical(P));
		}
		return;
	}
	if (depth == n - 2) {
		// Both remaining levels collapse to squaring/streaming shortcuts,
		// so the two largest lists of each branch never materialize.
		for (char c1 : {'-', '+'}) {
			bits[depth] = c1 == '-' ? '0' : '1';
			for (char c2 : {'-', '+'}) {
				bits[depth + 1] = c2 == '-' ? '0' : '1';
				emit(m_after_two(P, c1, c2));
			}
		}
		return;
	}
	for (char c : {'-', '+'}) {
		bits[depth] = c == '-' ? '0' : '1';
		ParamList<S> child = exact_child(P, c, cap);
		exact_tree(child, depth + 1, n, bits, out, cap);
	}
}

inline void interval_tree(const DyadicList& dg, const DyadicList& ug, int depth, int n,
                          size_t q, std::string& bits, std::vector<IndexRecord<Rat>>& out)
{
	if (depth == n - 1) {
		for (char c : {'-', '+'}) {
			bits[depth] = c == '-' ? '0' : '1';
			Rat ml = dyadic_leaf_m(dg, c), mu = dyadic_leaf_m(ug, c);
			out.push_back({bits, ml, mu, bit_error_prob(mu), bit_error_prob(ml),
			               AnalysisMode::interval});
		}
		return;
	}
	for (char c : {'-', '+'}) {
		bits[depth] = c == '-' ? '0' : '1';
		DyadicList cd = interval_child(dg, c, q, Direction::degrade);
		DyadicList cu = interval_child(ug, c, q, Direction::upgrade);
		interval_tree(cd, cu, depth + 1, n, q, bits, out);
	}
}

// Hands each worker every (workers)-th subtree at the shallowest depth with
// one subtree per worker; prefixes are rederived from the root, so the merged
// records match the serial traversal exactly.
template <class S, class Node, class Child, class Sub>
std::vector<IndexRecord<S>> split_tree(int n, int threads, const Node& root, Child child,
                                       Sub subtree)
{
	size_t total = size_t(1) << n;
	int workers = int(std::min<size_t>(size_t(threads), total / 2));
	if (workers <= 1) {
		std::vector<IndexRecord<S>> out;
		out.reserve(total);
		std::string bits(n, '0');
		subtree(root, 0, bits, out);
		return out;
	}
	int d = 0;
	while ((size_t(1) << d) < size_t(workers))
		++d;
	size_t subtrees = size_t(1) << d, span = total >> d;
	std::vector<IndexRecord<S>> out(total);
	std::vector<std::exception_ptr> errs(static_cast<size_t>(workers));
	auto run = [&](int t) {
		try {
			for (size_t s = size_t(t); s < subtrees; s += size_t(workers)) {
				std::string bits(n, '0');
				Node P = root;
				for (int j = 0; j < d; ++j) {
					char c = (s >> (d - 1 - j)) & 1 ? '+' : '-';
					bits[j] = c == '-' ? '0' : '1';
					P = child(P, c);
				}
				std::vector<IndexRecord<S>> local;
				local.reserve(span);
				subtree(P, d, bits, local);
				std::move(local.begin(), local.end(),
				          out.begin() + std::ptrdiff_t(s * span));
			}
		} catch (...) {
			errs[size_t(t)] = std::current_exception();
		}
	};
	std::vector<std::thread> pool;
	for (int t = 1; t < workers; ++t)
		pool.emplace_back(run, t);
	run(0);
	for (auto& th : pool)
		th.join();
	for (auto& e : errs)
		if (e)
			std::rethrow_exception(e);
	return out;
}

}    // namespace detail

// All 2^n records in ascending index order. Exact mode chains canonical
// lists depth-first (each prefix list transformed once for both children)
// and finishes leaves with the last-op shortcut; interval mode carries a
// degraded and a upgraded grid chain per prefix, quantized to Q at every
// level including the first, so m_lower <= M <= m_upper at every leaf.
template <class S>
std::vector<IndexRecord<S>> analyze_all(const ParamList<S>& base, int n, AnalysisMode mode,
                                        AnalyzeOptions opt = {})
{
	if (n < 1 || n > 26)
		throw std::invalid_argument("n must be in [1, 26]");
	if (opt.threads < 1)
		throw std::invalid_argument("threads must be >= 1");
	ParamList<S> Pc = canonicalize(base);
	if constexpr (scalar_traits<S>::exact) {
		if (mass_sum(Pc) != S(1))
			throw std::invalid_argument("base masses must sum to exactly 1");
	}
	if (mode == AnalysisMode::exact) {
		auto child = [&](const ParamList<S>& P, char c) {
			return detail::exact_child(P, c, opt.size_cap);
		};
		auto sub = [&](const ParamList<S>& P, int depth, std::string& bits,
		               std::vector<IndexRecord<S>>& out) {
			detail::exact_tree(P, depth, n, bits, out, opt.size_cap);
		};
		// Splitting below depth n-2 would materialize the lists the two-level
		// leaf shortcut exists to avoid, so cap the worker count there.
		int workers = n >= 2 ? int(std::min<size_t>(size_t(opt.threads),
		                                            size_t(1) << (n - 2)))
		                     : 1;
		return detail::split_tree<S>(n, workers, Pc, child, sub);
	}
	if constexpr (!scalar_traits<S>::exact) {
		throw std::invalid_argument("interval mode requires the exact backend");
	} else {
		if (opt.q < 2)
			throw std::invalid_argument("interval mode requires Q >= 2");
		using Pair = std::pair<DyadicList, DyadicList>;
		Pair root{dyadic_quantize(dyadic_from_list(Pc, opt.grid_bits, Direction::degrade),
		                          opt.q, Direction::degrade)
		              .first,
		          dyadic_quantize(dyadic_from_list(Pc, opt.grid_bits, Direction::upgrade),
		                          opt.q, Direction::upgrade)
		              .first};
		auto child = [&](const Pair& P, char c) {
			return Pair{detail::interval_child(P.first, c, opt.q, Direction::degrade),
			            detail::interval_child(P.second, c, opt.q, Direction::upgrade)};
		};
		auto sub = [&](const Pair& P, int depth, std::string& bits,
		               std::vector<IndexRecord<Rat>>& out) {
			detail::interval_tree(P.first, P.second, depth, n, opt.q, bits, out);
		};
		return detail::split_tree<Rat>(n, opt.threads, root, child, sub);
	}
}

struct SelectPolicy {
	enum class Kind { count, threshold };
	Kind kind = Kind::count;
	size_t k = 0;
	double beta = 0;

	static SelectPolicy count(size_t k) { return {Kind::count, k, 0}; }
	static SelectPolicy threshold(double beta) { return {Kind::threshold, 0, beta}; }
};

template <class S> struct CodeSpec {
	int n = 0;
	std::vector<uint32_t> i0, i1;    // ascending; i0 = low-entropy (frozen-for-source) set
	std::vector<uint32_t> i0_reversed, i1_reversed;
	S block_lower{}, block_upper{};
};

// (max ber_lower, min(1, sum ber_upper)) over I0.
template <class S>
std::pair<S, S> block_error_bounds(const std::vector<IndexRecord<S>>& records,
                                   const std::vector<uint32_t>& i0)
{
	S lo(0), hi(0);
	for (uint32_t ix : i0) {
		if (ix >= records.size())
			throw std::invalid_argument("index outside record range");
		const IndexRecord<S>& r = records[ix];
		if (cmp(r.ber_lower, lo) > 0)
			lo = r.ber_lower;
		hi += r.ber_upper;
	}
	if (cmp(hi, S(1)) > 0)
		hi = S(1);
	return {lo, hi};
}

// Populates the bit-reversed images of both index sets.
template <class S> CodeSpec<S> bit_reverse_sets(CodeSpec<S> spec)
{
	auto rev = [&](const std::vector<uint32_t>& v) {
		std::vector<uint32_t> r;
		r.reserve(v.size());
		for (uint32_t ix : v)
			r.push_back(uint32_t(bit_reverse(ix, spec.n)));
		std::sort(r.begin(), r.end());
		return r;
	};
	spec.i0_reversed = rev(spec.i0);
	spec.i1_reversed = rev(spec.i1);
	return spec;
}

// Count policy: the k indices of largest m_lower (ties by index ascending).
// Threshold policy: indices with m_lower >= 1 - 2^-(2^(n beta)), the
// comparison carried out on log2(1 - m) in binary64.
template <class S>
CodeSpec<S> select_frozen(const std::vector<IndexRecord<S>>& records, SelectPolicy policy)
{
	size_t total = records.size();
	if (total == 0 || (total & (total - 1)))
		throw std::invalid_argument("records must cover all 2^n indices");
	int n = 0;
	while ((size_t(1) << n) < total)
		++n;

	CodeSpec<S> spec;
	spec.n = n;
	if (policy.kind == SelectPolicy::Kind::count) {
		if (policy.k > total)
			throw std::invalid_argument("k out of range");
		std::vector<uint32_t> ids(total);
		for (uint32_t i = 0; i < total; ++i)
			ids[i] = i;
		std::sort(ids.begin(), ids.end(), [&](uint32_t x, uint32_t y) {
			int c = cmp(records[x].m_lower, records[y].m_lower);
			return c != 0 ? c > 0 : x < y;
		});
		spec.i0.assign(ids.begin(), ids.begin() + std::ptrdiff_t(policy.k));
		std::sort(spec.i0.begin(), spec.i0.end());
	} else {
		double t = std::exp2(double(n) * policy.beta);
		for (uint32_t i = 0; i < total; ++i) {
			S slack = S(S(1) - records[i].m_lower);
			if (cmp(slack, S(0)) == 0 || detail::log2_of(slack) <= -t)
				spec.i0.push_back(i);
		}
	}
	std::vector<char> in0(total, 0);
	for (uint32_t ix : spec.i0)
		in0[ix] = 1;
	for (uint32_t i = 0; i < total; ++i)
		if (!in0[i])
			spec.i1.push_back(i);
	spec = bit_reverse_sets(std::move(spec));
	auto bounds = block_error_bounds(records, spec.i0);
	spec.block_lower = bounds.first;
	spec.block_upper = bounds.second;
	return spec;
}

// "0.5 - gamma" display convention at 4 significant digits: values with
// M < 1/2 print as -gamma, the rest print the bit error probability itself.
// upper_bound renders the value rounded up as a BER (gamma truncated),
// otherwise rounded down (gamma up), so printed bounds stay valid.
template <class S> std::string paper_style_value(const S& ber, bool upper_bound)
{
	S gamma = S(S(1) / 2 - ber);    // = M/2
	if (cmp(gamma, S(S(1) / 4)) < 0) {
		if (cmp(gamma, S(0)) == 0)
			return "-0";
		return "-" + to_decimal(gamma, 4, upper_bound ? Round::truncate : Round::up);
	}
	return to_decimal(ber, 4, upper_bound ? Round::up : Round::truncate);
}

struct CsvOptions {
	bool paper_style = false;
	int sig = 40;    // plain-format significant digits
};

// Columns index_bits, ber_lower, ber_upper, m_lower, m_upper. Plain format
// renders outward-directed decimals (lower truncated, upper rounded up) so
// parsed intervals still contain the true value; paper style renders the
// signed convention, with exact-mode rows printing the published point value
// (the upper-bound rendering) in both ber cells.
template <class S>
void write_records_csv(std::ostream& os, const std::vector<IndexRecord<S>>& records,
                       CsvOptions opt = {})
{
	os << "index_bits,ber_lower,ber_upper,m_lower,m_upper\n";
	for (const IndexRecord<S>& r : records) {
		os << r.index_bits << ',';
		if (opt.paper_style) {
			bool point = r.mode == AnalysisMode::exact;
			os << paper_style_value(r.ber_lower, point) << ','
			   << paper_style_value(r.ber_upper, true) << ','
			   << to_decimal(r.m_lower, 4, Round::truncate) << ','
			   << to_decimal(r.m_upper, 4, point ? Round::truncate : Round::up) << '\n';
		} else {
			os << to_decimal(r.ber_lower, opt.sig, Round::truncate) << ','
			   << to_decimal(r.ber_upper, opt.sig, Round::up) << ','
			   << to_decimal(r.m_lower, opt.sig, Round::truncate) << ','
			   << to_decimal(r.m_upper, opt.sig, Round::up) << '\n';
		}
	}
}

}    // namespace polar
