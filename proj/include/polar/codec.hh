// Polar transform, source/channel encoders, theta-domain successive-
// cancellation decoding, symmetric observation sampling, and a Monte Carlo
// harness cross-checking the analytic bit error probabilities.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "polar/construct.hh"
#include "polar/symparam.hh"

namespace polar {

using BitVec = std::vector<uint8_t>;

inline bool is_pow2(size_t x) { return x && !(x & (x - 1)); }

// u = xG: GF(2) superset-sum butterflies (the self-inverse Kronecker kernel
// power) followed by the bit-reversal permutation.
inline BitVec polar_transform(BitVec x)
{
	size_t N = x.size();
	if (!is_pow2(N))
		throw std::invalid_argument("block length must be a power of two");
	int n = 0;
	while ((size_t(1) << n) < N)
		++n;
	for (size_t step = 1; step < N; step <<= 1)
		for (size_t i = 0; i < N; ++i)
			if (!(i & step))
				x[i] ^= x[i | step];
	BitVec u(N);
	for (size_t j = 0; j < N; ++j)
		u[j] = x[bit_reverse(j, n)];
	return u;
}

namespace detail {

// One live block per depth: th[d] holds the current biases, vhat[d] the
// reconstructed block decisions, mh[d] the minus-half decisions kept alive
// while the plus half runs.
struct ScScratch {
	int n = 0;
	std::vector<std::vector<double>> th;
	std::vector<BitVec> vhat, mh;

	explicit ScScratch(int levels) : n(levels), th(levels + 1), vhat(levels + 1), mh(levels + 1)
	{
		for (int d = 0; d <= levels; ++d) {
			size_t L = size_t(1) << (levels - d);
			th[d].resize(L);
			vhat[d].resize(L);
			mh[d].resize(L / 2);
		}
	}
};

// Depth-first SC pass deciding positions [pos, pos + 2^(n-d)) of u; leaf
// returns the settled bit (decision, frozen copy, or genie correction).
template <class Leaf> void sc_pass(ScScratch& w, int d, size_t pos, Leaf& leaf)
{
	if (d == w.n) {
		w.vhat[d][0] = leaf(pos, w.th[d][0]);
		return;
	}
	size_t h = size_t(1) << (w.n - d - 1);
	const std::vector<double>& cur = w.th[d];
	for (size_t i = 0; i < h; ++i)
		w.th[d + 1][i] = cur[2 * i] * cur[2 * i + 1];
	sc_pass(w, d + 1, pos, leaf);
	std::copy(w.vhat[d + 1].begin(), w.vhat[d + 1].end(), w.mh[d].begin());
	for (size_t i = 0; i < h; ++i) {
		double a = cur[2 * i], b = cur[2 * i + 1];
		double den = w.mh[d][i] ? 1 - a * b : 1 + a * b;
		w.th[d + 1][i] = den == 0 ? 0 : (w.mh[d][i] ? b - a : b + a) / den;
	}
	sc_pass(w, d + 1, pos + h, leaf);
	for (size_t i = 0; i < h; ++i) {
		uint8_t p = w.vhat[d + 1][i];
		w.vhat[d][2 * i] = w.mh[d][i] ^ p;
		w.vhat[d][2 * i + 1] = p;
	}
}

}    // namespace detail

// Theta-domain SC decoding from per-symbol posterior biases; positions in
// `frozen` (mask of length 2^n, values in `fval`) are copied, the rest decide
// 0 iff theta >= 0. Returns the full u-hat.
inline BitVec sc_decode_theta(const std::vector<double>& thetas, const BitVec& frozen,
                              const BitVec& fval)
{
	size_t N = thetas.size();
	if (!is_pow2(N))
		throw std::invalid_argument("block length must be a power of two");
	if (frozen.size() != N || fval.size() != N)
		throw std::invalid_argument("frozen mask length mismatch");
	int n = 0;
	while ((size_t(1) << n) < N)
		++n;
	detail::ScScratch w(n);
	w.th[0] = thetas;
	BitVec uhat(N);
	auto leaf = [&](size_t pos, double t) -> uint8_t {
		uint8_t u = frozen[pos] ? fval[pos] : (t >= 0 ? 0 : 1);
		uhat[pos] = u;
		return u;
	};
	detail::sc_pass(w, 0, 0, leaf);
	return uhat;
}

// Genie-aided pass: every position is decided by the plain MAP rule, compared
// against the true u, then corrected so later decisions see a clean past.
// err[pos] counts first-decision misses.
inline void sc_genie(const std::vector<double>& thetas, const BitVec& u_true,
                     std::vector<uint64_t>& err)
{
	size_t N = thetas.size();
	if (!is_pow2(N) || u_true.size() != N || err.size() != N)
		throw std::invalid_argument("genie pass length mismatch");
	int n = 0;
	while ((size_t(1) << n) < N)
		++n;
	detail::ScScratch w(n);
	w.th[0] = thetas;
	auto leaf = [&](size_t pos, double t) -> uint8_t {
		if ((t >= 0 ? 0 : 1) != u_true[pos])
			++err[pos];
		return u_true[pos];
	};
	detail::sc_pass(w, 0, 0, leaf);
}

// Symmetric per-symbol observation model. Entry v of the base list splits
// into the signed observations +-(v+1), each of mass mu_v/2; the conditional
// bias of the source bit given observation s(v+1) is s theta_v, so a BSC with
// crossover eps reduces to the single entry (1, 1-2 eps).
struct ChannelModel {
	ParamList<double> base;
	std::vector<double> cum;    // cumulative masses for sampling

	static ChannelModel from_list(ParamList<double> b)
	{
		if (b.e.empty())
			throw std::invalid_argument("empty channel list");
		ChannelModel ch;
		ch.base = std::move(b);
		double acc = 0;
		for (const auto& x : ch.base.e) {
			if (!(x.mu > 0) || std::abs(x.theta) > 1)
				throw std::invalid_argument("channel entries need mu > 0, |theta| <= 1");
			ch.cum.push_back(acc += x.mu);
		}
		if (std::abs(acc - 1) > 1e-9)
			throw std::invalid_argument("channel masses must sum to one");
		ch.cum.back() = 1;
		return ch;
	}

	static ChannelModel bsc(double eps)
	{
		if (!(eps >= 0 && eps <= 0.5))
			throw std::invalid_argument("crossover must lie in [0, 1/2]");
		ParamList<double> b;
		b.e.push_back({1.0, 1 - 2 * eps});
		b.canonical = true;
		return from_list(std::move(b));
	}

	double theta_of(int32_t obs) const
	{
		size_t v = size_t(obs < 0 ? -int64_t(obs) : int64_t(obs));
		if (v == 0 || v > base.e.size())
			throw std::invalid_argument("observation outside the channel alphabet");
		double t = base.e[v - 1].theta;
		return obs < 0 ? -t : t;
	}
};

inline std::vector<double> observation_thetas(const ChannelModel& ch,
                                              const std::vector<int32_t>& y)
{
	std::vector<double> th(y.size());
	for (size_t i = 0; i < y.size(); ++i)
		th[i] = ch.theta_of(y[i]);
	return th;
}

// SC decoding of a full block from signed observations; u_frozen supplies the
// I1 bits in ascending index order.
template <class S>
BitVec sc_decode(const BitVec& u_frozen, const std::vector<int32_t>& y,
                 const ChannelModel& ch, const CodeSpec<S>& spec)
{
	size_t N = size_t(1) << spec.n;
	if (y.size() != N)
		throw std::invalid_argument("observation length mismatch");
	if (u_frozen.size() != spec.i1.size())
		throw std::invalid_argument("frozen vector length mismatch");
	BitVec frozen(N, 0), fval(N, 0);
	for (size_t k = 0; k < spec.i1.size(); ++k) {
		frozen[spec.i1[k]] = 1;
		fval[spec.i1[k]] = u_frozen[k];
	}
	return sc_decode_theta(observation_thetas(ch, y), frozen, fval);
}

enum class EncodeMode { source, channel_nonsystematic, channel_systematic };

namespace detail {

// Solves u = xG over GF(2) with x fixed on I'0 (message) and u fixed on I1
// (shared bits); unknowns are x on I'1 and u on I0. Dense Gauss on rows
// packed into 64-bit words; the polar system is always nonsingular.
template <class S>
BitVec systematic_encode(const BitVec& msg, const BitVec& shared, const CodeSpec<S>& spec)
{
	size_t N = size_t(1) << spec.n;
	std::vector<int32_t> unknown_of(2 * N, -1);    // x slots then u slots
	std::vector<uint32_t> slot;                    // unknown -> packed slot id
	for (uint32_t ix : spec.i1_reversed) {
		unknown_of[ix] = int32_t(slot.size());
		slot.push_back(ix);
	}
	for (uint32_t ix : spec.i0) {
		unknown_of[N + ix] = int32_t(slot.size());
		slot.push_back(uint32_t(N) + ix);
	}
	BitVec xknown(N, 0), xmask(N, 0), uknown(N, 0), umask(N, 0);
	for (size_t k = 0; k < spec.i0_reversed.size(); ++k) {
		xknown[spec.i0_reversed[k]] = msg[k];
		xmask[spec.i0_reversed[k]] = 1;
	}
	for (size_t k = 0; k < spec.i1.size(); ++k) {
		uknown[spec.i1[k]] = shared[k];
		umask[spec.i1[k]] = 1;
	}

	size_t words = (N + 64) / 64;    // N unknown columns plus the RHS bit
	std::vector<std::vector<uint64_t>> rows(N, std::vector<uint64_t>(words, 0));
	auto flip = [&](std::vector<uint64_t>& r, size_t c) { r[c >> 6] ^= uint64_t(1) << (c & 63); };
	auto get = [&](const std::vector<uint64_t>& r, size_t c) {
		return (r[c >> 6] >> (c & 63)) & 1;
	};
	for (size_t j = 0; j < N; ++j) {    // equation u_j = sum_{i contains rev(j)} x_i
		auto& r = rows[j];
		uint64_t rj = bit_reverse(j, spec.n);
		for (size_t i = rj;; i = (i + 1) | rj) {
			if (xmask[i]) {
				if (xknown[i])
					flip(r, N);
			} else {
				flip(r, size_t(unknown_of[i]));
			}
			if (i == N - 1)
				break;
		}
		if (umask[j]) {
			if (uknown[j])
				flip(r, N);
		} else {
			flip(r, size_t(unknown_of[N + j]));
		}
	}
	std::vector<int32_t> pivot_row(N, -1);
	size_t rank = 0;
	for (size_t c = 0; c < N && rank < N; ++c) {
		size_t p = rank;
		while (p < N && !get(rows[p], c))
			++p;
		if (p == N)
			continue;
		std::swap(rows[rank], rows[p]);
		for (size_t r2 = 0; r2 < N; ++r2)
			if (r2 != rank && get(rows[r2], c))
				for (size_t wd = 0; wd < words; ++wd)
					rows[r2][wd] ^= rows[rank][wd];
		pivot_row[c] = int32_t(rank++);
	}
	BitVec x = xknown;
	for (size_t c = 0; c < N; ++c) {
		if (pivot_row[c] < 0)
			throw std::logic_error("systematic system is singular");
		if (slot[c] < N)
			x[slot[c]] = uint8_t(get(rows[size_t(pivot_row[c])], N));
	}
	return x;
}

}    // namespace detail

// Source mode: message is the full source block x, returns the codeword
// u_{I1}. Channel modes return the channel input x with the message riding on
// I0 (non-systematic, inverted through G) or verbatim on I'0 (systematic).
template <class S>
BitVec encode(const BitVec& message, const CodeSpec<S>& spec, EncodeMode mode,
              const BitVec& shared_frozen = {})
{
	size_t N = size_t(1) << spec.n;
	if (mode == EncodeMode::source) {
		if (message.size() != N)
			throw std::invalid_argument("source block length mismatch");
		BitVec u = polar_transform(message), cw;
		cw.reserve(spec.i1.size());
		for (uint32_t ix : spec.i1)
			cw.push_back(u[ix]);
		return cw;
	}
	if (message.size() != spec.i0.size() || shared_frozen.size() != spec.i1.size())
		throw std::invalid_argument("message/frozen length mismatch");
	if (mode == EncodeMode::channel_nonsystematic) {
		BitVec u(N, 0);
		for (size_t k = 0; k < spec.i0.size(); ++k)
			u[spec.i0[k]] = message[k];
		for (size_t k = 0; k < spec.i1.size(); ++k)
			u[spec.i1[k]] = shared_frozen[k];
		return polar_transform(std::move(u));
	}
	return detail::systematic_encode(message, shared_frozen, spec);
}

// Deterministic 64-bit stream; one independent instance per trial keeps runs
// bit-reproducible across any worker partition.
struct SplitMix64 {
	uint64_t s;

	explicit SplitMix64(uint64_t seed) : s(seed) {}

	uint64_t next()
	{
		uint64_t z = (s += 0x9E3779B97F4A7C15ull);
		z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
		z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
		return z ^ (z >> 31);
	}

	double uniform() { return double(next() >> 11) * 0x1.0p-53; }
};

inline SplitMix64 trial_stream(uint64_t seed, uint64_t trial)
{
	return SplitMix64(seed ^ (0x9E3779B97F4A7C15ull * (trial + 1)));
}

enum class McMode { genie_per_index, block };

struct McIndexStat {
	std::string index_bits;
	uint64_t errors = 0;
	uint64_t trials = 0;
	double freq = 0, se = 0;
};

struct McResult {
	uint64_t trials = 0;
	std::vector<McIndexStat> per_index;    // genie mode
	uint64_t block_errors = 0;             // block mode
	double block_freq = 0, block_se = 0;
};

namespace detail {

// Draws one symbol: observation sign/entry first, then the source bit from
// the conditional bias.
inline void sample_symbol(const ChannelModel& ch, SplitMix64& rng, uint8_t& x, double& theta)
{
	double r = rng.uniform();
	size_t v = size_t(std::lower_bound(ch.cum.begin(), ch.cum.end(), r) - ch.cum.begin());
	if (v >= ch.base.e.size())
		v = ch.base.e.size() - 1;
	double s = rng.uniform() < 0.5 ? 1.0 : -1.0;
	theta = s * ch.base.e[v].theta;
	x = rng.uniform() < (1 + theta) / 2 ? 0 : 1;
}

}    // namespace detail

// Genie mode tallies per-index first-decision errors against the true u;
// block mode freezes u_{I1} as decoder side information and counts full-block
// failures. Reproducible for fixed (seed, trials) at any thread count.
template <class S>
McResult monte_carlo(const ChannelModel& ch, const CodeSpec<S>& spec, uint64_t trials,
                     uint64_t seed, McMode mode, int threads = 1)
{
	if (trials < 1)
		throw std::invalid_argument("trials must be at least 1");
	size_t N = size_t(1) << spec.n;
	int nw = std::max(1, threads);
	if (uint64_t(nw) > trials)
		nw = int(trials);

	std::vector<std::vector<uint64_t>> err(size_t(nw), std::vector<uint64_t>(N, 0));
	std::vector<uint64_t> blocks(size_t(nw), 0);
	auto run = [&](int wk) {
		std::vector<uint64_t>& e = err[size_t(wk)];
		BitVec x(N), frozen(N, 0);
		std::vector<double> th(N);
		detail::ScScratch w(spec.n);
		for (uint32_t ix : spec.i1)
			frozen[ix] = 1;
		for (uint64_t t = wk; t < trials; t += uint64_t(nw)) {
			SplitMix64 rng = trial_stream(seed, t);
			for (size_t i = 0; i < N; ++i)
				detail::sample_symbol(ch, rng, x[i], th[i]);
			BitVec u = polar_transform(x);
			w.th[0] = th;
			if (mode == McMode::genie_per_index) {
				auto leaf = [&](size_t pos, double v) -> uint8_t {
					if ((v >= 0 ? 0 : 1) != u[pos])
						++e[pos];
					return u[pos];
				};
				detail::sc_pass(w, 0, 0, leaf);
			} else {
				bool bad = false;
				auto leaf = [&](size_t pos, double v) -> uint8_t {
					uint8_t d = frozen[pos] ? u[pos] : (v >= 0 ? 0 : 1);
					bad = bad || d != u[pos];
					return d;
				};
				detail::sc_pass(w, 0, 0, leaf);
				if (bad)
					++blocks[size_t(wk)];
			}
		}
	};
	std::vector<std::thread> pool;
	for (int wk = 1; wk < nw; ++wk)
		pool.emplace_back(run, wk);
	run(0);
	for (std::thread& t : pool)
		t.join();

	McResult res;
	res.trials = trials;
	auto se_of = [&](double f) { return std::sqrt(f * (1 - f) / double(trials)); };
	if (mode == McMode::genie_per_index) {
		res.per_index.resize(N);
		for (size_t i = 0; i < N; ++i) {
			uint64_t tot = 0;
			for (int wk = 0; wk < nw; ++wk)
				tot += err[size_t(wk)][i];
			McIndexStat& st = res.per_index[i];
			st.index_bits = index_bits(i, spec.n);
			st.errors = tot;
			st.trials = trials;
			st.freq = double(tot) / double(trials);
			st.se = se_of(st.freq);
		}
	} else {
		for (int wk = 0; wk < nw; ++wk)
			res.block_errors += blocks[size_t(wk)];
		res.block_freq = double(res.block_errors) / double(trials);
		res.block_se = se_of(res.block_freq);
	}
	return res;
}

}    // namespace polar
