/*
Scalar backends: exact arbitrary-precision rationals (GMP) and binary64,
with decimal parsing and directed decimal rendering.
*/

#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace polar {

using Rat = mpq_class;

enum class Round { up, truncate, nearest };

// Parses "num/den" or a decimal literal with optional sign, fraction and
// exponent ("e"/"E") into an exact rational.
inline Rat rat_from_decimal(std::string_view s)
{
	if (s.empty())
		throw std::invalid_argument("empty number");
	if (s.find('/') != std::string_view::npos) {
		Rat q;
		if (q.set_str(std::string(s), 10) != 0)
			throw std::invalid_argument("bad rational: " + std::string(s));
		if (q.get_den() == 0)
			throw std::invalid_argument("zero denominator: " + std::string(s));
		q.canonicalize();
		return q;
	}
	size_t i = 0;
	bool neg = false;
	if (s[i] == '+' || s[i] == '-')
		neg = s[i++] == '-';
	std::string digits;
	long frac = 0;
	bool any = false;
	for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i, any = true)
		digits += s[i];
	if (i < s.size() && s[i] == '.') {
		for (++i; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i, any = true, ++frac)
			digits += s[i];
	}
	if (!any)
		throw std::invalid_argument("bad decimal: " + std::string(s));
	long exp = 0;
	if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
		size_t pos = 0;
		exp = std::stol(std::string(s.substr(i + 1)), &pos);
		i += 1 + pos;
	}
	if (i != s.size())
		throw std::invalid_argument("bad decimal: " + std::string(s));
	mpz_class num(digits.empty() ? std::string("0") : digits, 10), den(1);
	long e10 = exp - frac;
	mpz_class p;
	mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e10 < 0 ? -e10 : e10));
	if (e10 < 0)
		den = p;
	else
		num *= p;
	Rat q(num, den);
	q.canonicalize();
	return neg ? Rat(-q) : q;
}

// Greatest double <= |x| sign-applied: mpq_get_d truncates toward zero, so for
// x >= 0 the exact value lies in [approx(x), nextafter(approx(x), inf)).
inline double approx(const Rat& x) { return mpq_get_d(x.get_mpq_t()); }
inline double approx(double x) { return x; }

inline int cmp(const Rat& a, const Rat& b) { return ::cmp(a, b); }
inline int cmp(double a, double b) { return a < b ? -1 : a > b ? 1 : 0; }

// Renders x with exactly sig significant digits; Round::up moves the
// magnitude away from zero, Round::truncate toward zero, Round::nearest
// breaks ties away from zero. Zero renders as "0".
inline std::string to_decimal(const Rat& x, int sig, Round mode)
{
	if (sig < 1)
		throw std::invalid_argument("sig_digits must be >= 1");
	if (x == 0)
		return "0";
	bool neg = x < 0;
	mpz_class num = abs(x.get_num()), den = x.get_den();
	// decimal exponent e with 10^e <= num/den < 10^(e+1)
	long e = static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 10)) -
	         static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 10)) + 1;
	auto pow10 = [](long k) {
		mpz_class p;
		mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(k));
		return p;
	};
	auto scaled_less = [&](long k) {  // num/den < 10^k ?
		return k >= 0 ? num < den * pow10(k) : num * pow10(-k) < den;
	};
	while (scaled_less(e))
		--e;
	while (!scaled_less(e + 1))
		++e;
	// digits = directed rounding of (num/den) * 10^(sig-1-e)
	long k = sig - 1 - e;
	mpz_class n = num, d = den;
	if (k >= 0)
		n *= pow10(k);
	else
		d *= pow10(-k);
	mpz_class q, r;
	mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
	if (mode == Round::up)
		q += r != 0;
	else if (mode == Round::nearest)
		q += 2 * r >= d;
	if (q == pow10(sig)) {
		q = pow10(sig - 1);
		++e;
	}
	std::string ds = q.get_str();
	std::string out = neg ? "-" : "";
	out += ds[0];
	if (sig > 1) {
		out += '.';
		out += ds.substr(1);
	}
	out += 'e';
	out += std::to_string(e);
	return out;
}

inline std::string to_decimal(double x, int sig, Round mode)
{
	return to_decimal(Rat(x), sig, mode);
}

// Serialized exact form "num/den" ("num" when integral).
inline std::string to_fraction(const Rat& x)
{
	return x.get_den() == 1 ? x.get_num().get_str() : x.get_str();
}

template <class S> struct scalar_traits;

template <> struct scalar_traits<Rat> {
	static constexpr bool exact = true;
	static Rat from_decimal(std::string_view s) { return rat_from_decimal(s); }
};

template <> struct scalar_traits<double> {
	static constexpr bool exact = false;
	static double from_decimal(std::string_view s) { return std::stod(std::string(s)); }
};

}  // namespace polar
