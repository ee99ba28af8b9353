// Copyright 2026 The multibaker Authors
// SPDX-License-Identifier: Apache-2.0

#include <multibaker/classical_baker.hpp>

#include <multibaker/errors.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace multibaker {

namespace {

using boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

void check_asymmetry(double s) {
    if (!(s > 0.0 && s < 1.0)) throw ParameterError("asymmetry s must lie in (0, 1)");
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

Rational exact_rational(double v) {
    int exponent = 0;
    const double mantissa = std::frexp(v, &exponent);
    // mantissa * 2^53 is an exact integer for any finite double.
    const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
    exponent -= 53;
    Rational r{cpp_int(scaled)};
    if (exponent >= 0)
        r *= Rational(cpp_int(1) << exponent);
    else
        r /= Rational(cpp_int(1) << -exponent);
    return r;
}

// Nearly correctly rounded conversion that survives numerators and
// denominators far beyond the double range.
double to_double(const Rational& r) {
    const cpp_int num = boost::multiprecision::numerator(r);
    const cpp_int den = boost::multiprecision::denominator(r);
    if (num == 0) return 0.0;
    const bool negative = num < 0;
    const cpp_int mag = negative ? cpp_int(-num) : num;
    const long shift = static_cast<long>(msb(den)) - static_cast<long>(msb(mag)) + 64;
    const cpp_int quotient = shift >= 0 ? cpp_int((mag << shift) / den) : cpp_int(mag / (den << -shift));
    const double v = std::ldexp(quotient.convert_to<double>(), static_cast<int>(-shift));
    return negative ? -v : v;
}

// Piecewise-constant densities of the in-cell position q, one per net
// displacement, on a shared partition of [0, 1).
struct ExactEnsemble {
    std::vector<Rational> breakpoints;              // sorted, front 0, back 1
    std::map<int, std::vector<Rational>> densities;  // displacement -> density per cell

    std::size_t cells() const { return breakpoints.size() - 1; }

    std::size_t cell_of(const Rational& q) const {
        const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), q);
        return static_cast<std::size_t>(it - breakpoints.begin()) - 1;
    }

    Rational length(std::size_t j) const { return breakpoints[j + 1] - breakpoints[j]; }
};

ExactEnsemble initial_ensemble() {
    ExactEnsemble e;
    e.breakpoints = {Rational(0), Rational(1)};
    e.densities[0] = {Rational(1)};
    return e;
}

// Push the densities forward through B_s, then route by the q < 1/2 cut.
ExactEnsemble step_ensemble(const ExactEnsemble& old, const Rational& s) {
    const Rational one(1);
    const Rational half(1, 2);
    const Rational r = one - s;

    ExactEnsemble next;
    next.breakpoints = {Rational(0), half, one};
    for (std::size_t i = 1; i + 1 < old.breakpoints.size(); ++i) {
        const Rational& p = old.breakpoints[i];
        if (p < s)
            next.breakpoints.push_back(p / s);
        else if (p > s)
            next.breakpoints.push_back((p - s) / r);
    }
    std::sort(next.breakpoints.begin(), next.breakpoints.end());
    next.breakpoints.erase(std::unique(next.breakpoints.begin(), next.breakpoints.end()), next.breakpoints.end());

    const std::size_t n_new = next.cells();
    std::vector<std::size_t> from_first(n_new);
    std::vector<std::size_t> from_second(n_new);
    std::vector<bool> goes_right(n_new);
    for (std::size_t j = 0; j < n_new; ++j) {
        const Rational mid = (next.breakpoints[j] + next.breakpoints[j + 1]) / 2;
        from_first[j] = old.cell_of(s * mid);
        from_second[j] = old.cell_of(s + r * mid);
        goes_right[j] = mid < half;
    }

    for (const auto& [x, f] : old.densities) {
        auto& right = next.densities[x + 1];
        auto& left = next.densities[x - 1];
        if (right.empty()) right.assign(n_new, Rational(0));
        if (left.empty()) left.assign(n_new, Rational(0));
        for (std::size_t j = 0; j < n_new; ++j) {
            const Rational pushed = s * f[from_first[j]] + r * f[from_second[j]];
            if (pushed == 0) continue;
            (goes_right[j] ? right : left)[j] += pushed;
        }
    }
    return next;
}

std::map<int, Rational> class_masses(const ExactEnsemble& e) {
    std::vector<Rational> lengths(e.cells());
    for (std::size_t j = 0; j < e.cells(); ++j) lengths[j] = e.length(j);
    std::map<int, Rational> out;
    for (const auto& [x, f] : e.densities) {
        Rational m(0);
        for (std::size_t j = 0; j < f.size(); ++j)
            if (f[j] != 0) m += f[j] * lengths[j];
        out[x] = m;
    }
    return out;
}

void check_depth(int t, int max_depth) {
    if (t < 0) throw ParameterError("time must be non-negative");
    if (t > max_depth)
        throw BudgetError("exact classical evolution limited to t <= " + std::to_string(max_depth) + ", got " +
                          std::to_string(t));
}

ClassicalTable exact_table(const Rational& s, int t, int max_depth) {
    check_depth(t, max_depth);
    ClassicalTable table(t);
    ExactEnsemble e = initial_ensemble();
    table.at(0, 0) = 1.0;
    for (int step = 1; step <= t; ++step) {
        e = step_ensemble(e, s);
        for (const auto& [x, m] : class_masses(e)) table.at(step, x) = to_double(m);
    }
    table.metadata = {{"kind", "classical"}, {"method", "exact"}, {"convention", "q<1/2->x+1"}};
    return table;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Keep images inside [0, 1) when rounding lands exactly on 1.
double below_one(double v) { return v < 1.0 ? v : std::nextafter(1.0, 0.0); }

}  // namespace

PhasePoint step_point(const PhasePoint& pt, double s) {
    check_asymmetry(s);
    if (!(pt.q >= 0.0 && pt.q < 1.0) || !(pt.p >= 0.0 && pt.p < 1.0))
        throw ParameterError("phase point must lie in the unit cell");
    PhasePoint out = pt;
    if (pt.q < s) {
        out.q = below_one(pt.q / s);
        out.p = s * pt.p;
    } else {
        out.q = below_one((pt.q - s) / (1.0 - s));
        out.p = below_one((1.0 - s) * pt.p + s);
    }
    out.x += out.q < 0.5 ? 1 : -1;
    return out;
}

double ItineraryPartition::measure() const {
    double m = 0.0;
    for (const auto& iv : intervals) m += iv.mass;
    return m;
}

ItineraryPartition exact_partition(double s, int t, int max_depth) {
    check_asymmetry(s);
    check_depth(t, max_depth);
    const Rational exact_s = exact_rational(s);
    ExactEnsemble e = initial_ensemble();
    for (int step = 1; step <= t; ++step) e = step_ensemble(e, exact_s);

    ItineraryPartition out;
    out.depth = t;
    for (const auto& [x, f] : e.densities)
        for (std::size_t j = 0; j < f.size(); ++j)
            if (f[j] != 0)
                out.intervals.push_back(ItineraryInterval{to_double(e.breakpoints[j]), to_double(e.breakpoints[j + 1]),
                                                          x, to_double(f[j] * e.length(j))});
    return out;
}

ClassicalTable exact_distribution(double s, int t, int max_depth) {
    check_asymmetry(s);
    ClassicalTable table = exact_table(exact_rational(s), t, max_depth);
    table.metadata["s"] = format_double(s);
    return table;
}

ClassicalTable exact_distribution(int D1, int D, int t, int max_depth) {
    if (D <= 0 || D1 <= 0 || D1 >= D) throw ParameterError("need 0 < D1 < D");
    ClassicalTable table = exact_table(Rational(D1, D), t, max_depth);
    table.metadata["s"] = std::to_string(D1) + "/" + std::to_string(D);
    return table;
}

ClassicalTable monte_carlo_distribution(double s, int t, std::int64_t n, std::uint64_t seed, double delta_p) {
    check_asymmetry(s);
    if (t < 0) throw ParameterError("time must be non-negative");
    if (n < 1) throw ParameterError("need at least one particle");
    if (!(delta_p > 0.0 && delta_p <= 1.0)) throw ParameterError("momentum band width must lie in (0, 1]");

    std::vector<std::vector<std::int64_t>> counts(static_cast<std::size_t>(t) + 1,
                                                  std::vector<std::int64_t>(2 * static_cast<std::size_t>(t) + 1, 0));
    std::mt19937_64 rng(seed);
    const double p_low = 0.5 - 0.5 * delta_p;
    for (std::int64_t i = 0; i < n; ++i) {
        PhasePoint pt{0, uniform01(rng), below_one(p_low + delta_p * uniform01(rng))};
        ++counts[0][static_cast<std::size_t>(t)];
        for (int step = 1; step <= t; ++step) {
            pt = step_point(pt, s);
            ++counts[static_cast<std::size_t>(step)][static_cast<std::size_t>(pt.x + t)];
        }
    }

    ClassicalTable table(t);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (int step = 0; step <= t; ++step)
        for (int x = -t; x <= t; ++x)
            table.at(step, x) =
                static_cast<double>(counts[static_cast<std::size_t>(step)][static_cast<std::size_t>(x + t)]) * inv_n;
    table.metadata = {{"kind", "classical"},
                      {"method", "monte-carlo"},
                      {"convention", "q<1/2->x+1"},
                      {"s", format_double(s)},
                      {"samples", std::to_string(n)},
                      {"seed", std::to_string(seed)},
                      {"delta_p", format_double(delta_p)},
                      {"rng", "std::mt19937_64"}};
    return table;
}

std::pair<double, double> lyapunov_exponents(double s) {
    check_asymmetry(s);
    return {-std::log(s), -std::log1p(-s)};
}

}  // namespace multibaker
