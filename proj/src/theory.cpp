#include "lowrank/theory.hpp"

#include <cmath>

#include "lowrank/errors.hpp"

namespace lowrank::theory {

namespace {

double cbrt_of(double v) { return std::cbrt(v); }

} // namespace

void TheoryInputs::validate() const {
    if (p < 1) throw InvalidInput("TheoryInputs: p must be >= 1");
    if (n < 1) throw InvalidInput("TheoryInputs: n must be >= 1");
    if (s < 1 || s > p) throw InvalidInput("TheoryInputs: requires 1 <= s <= p");
    if (!(radius >= 1.0)) throw InvalidInput("TheoryInputs: requires R >= 1");
    if (!(gamma >= 0.0)) throw InvalidInput("TheoryInputs: gamma must be >= 0");
    if (!(universal.c_tilde > 0.0 && universal.c1 > 0.0 && universal.c2 > 0.0))
        throw InvalidInput("TheoryInputs: universal constants must be positive");
    constants.validate();
}

double delta_tilde(const AssumptionConstants& c, double radius) {
    const double arg = 18.0 * radius * (c.k_c + c.c_mu);
    if (!(arg > 0.0)) throw InvalidInput("delta_tilde: argument of the log must be positive");
    return std::log(arg);
}

double log_term(const TheoryInputs& in) {
    in.validate();
    if (in.n < 2) throw InvalidInput("log_term: requires n >= 2");
    return std::log(cbrt_of(static_cast<double>(in.n)) * in.p) + delta_tilde(in.constants, in.radius);
}

double tuned_a(const TheoryInputs& in) {
    in.validate();
    return 1.0 / (2.0 * in.constants.u_l);
}

double tuned_lambda(const TheoryInputs& in) {
    const double a = tuned_a(in);
    const double n23 = std::pow(static_cast<double>(in.n), 2.0 / 3.0);
    const double p23 = std::pow(2.0 * in.p + 1.0, 2.0 / 3.0);
    return std::sqrt(8.0 * in.constants.k * p23 / (in.constants.bernstein_c * a * n23) *
                     log_term(in));
}

SampleCondition sample_condition_i(const TheoryInputs& in) {
    const double gk = in.gamma / in.constants.k;
    const double rhs = in.universal.c1 * (gk * gk * gk + 1.0) * in.p +
                       in.universal.c1 * in.s * log_term(in);
    return {rhs, static_cast<double>(in.n) > rhs};
}

double risk_bound_i(const TheoryInputs& in) {
    const double lt = log_term(in);
    const double n = static_cast<double>(in.n);
    const double n13 = cbrt_of(n);
    const double n23 = n13 * n13;
    const double p13 = cbrt_of(static_cast<double>(in.p));
    const double p23 = p13 * p13;
    const double k = in.constants.k;
    return std::sqrt(k * p13 * in.gamma / n13) + in.gamma +
           in.universal.c1 * k *
               (in.s * p23 * lt / n23 + std::sqrt(in.s * lt / n) + p13 / n13);
}

SampleCondition sample_condition_ii(const TheoryInputs& in) {
    const double rhs = in.universal.c2 * in.p * in.constants.u_l * log_term(in) *
                       std::pow(static_cast<double>(in.s), 1.5) * std::pow(in.radius, 1.5);
    return {rhs, static_cast<double>(in.n) > rhs};
}

double risk_bound_ii(const TheoryInputs& in) {
    const double lt = log_term(in);
    const double n13 = cbrt_of(static_cast<double>(in.n));
    const double n23 = n13 * n13;
    const double p13 = cbrt_of(static_cast<double>(in.p));
    const double p23 = p13 * p13;
    return in.universal.c2 * in.s * in.constants.k *
           (p23 * lt / n23 +
            p13 * in.radius * std::sqrt(in.constants.u_l) * std::sqrt(lt) / n13);
}

std::int64_t rank_bound(const TheoryInputs& in) {
    return rank_bound(in, 1.0 / cbrt_of(static_cast<double>(in.n)));
}

std::int64_t rank_bound(const TheoryInputs& in, double epsilon) {
    in.validate();
    if (in.n < 2) throw InvalidInput("rank_bound: requires n >= 2");
    if (!(epsilon > 0.0)) throw InvalidInput("rank_bound: epsilon must be positive");
    const double delta1 =
        std::log(18.0 * (in.constants.k_c + in.constants.c_mu) * in.p * in.radius / epsilon);
    const double c = in.constants.bernstein_c;
    const double n13 = cbrt_of(static_cast<double>(in.n));
    const double n23 = n13 * n13;
    const double tp13 = cbrt_of(2.0 * in.p + 1.0);
    const double tp23 = tp13 * tp13;
    const double value = 2.0 * c * n13 / (delta1 * tp13) +
                         2.0 * c * n23 / (in.constants.k * delta1 * tp23) *
                             (in.gamma + 2.0 * epsilon) +
                         8.0 * in.s;
    return static_cast<std::int64_t>(std::ceil(value));
}

CoveringNumber covering_number(int r, double radius, double epsilon, int p) {
    if (r < 1) throw InvalidInput("covering_number: r must be >= 1");
    if (p < 1) throw InvalidInput("covering_number: p must be >= 1");
    if (!(epsilon > 0.0)) throw InvalidInput("covering_number: epsilon must be positive");
    if (!(radius > 0.0)) throw InvalidInput("covering_number: radius must be positive");
    const double base = 9.0 * std::sqrt(static_cast<double>(r)) * radius / epsilon;
    if (base <= 1.0) return {0.0, true};
    return {(2.0 * p + 1.0) * r * std::log(base), false};
}

double saa_classical_bound(int p, std::int64_t n, double scale) {
    if (p < 1) throw InvalidInput("saa_classical_bound: p must be >= 1");
    if (n < 2) throw InvalidInput("saa_classical_bound: requires n >= 2");
    if (!(scale > 0.0)) throw InvalidInput("saa_classical_bound: scale must be positive");
    const double nd = static_cast<double>(n);
    return scale * std::sqrt(static_cast<double>(p) * p * std::log(nd) / nd);
}

namespace {

template <class Cond>
std::int64_t min_n_on_doubling_grid(TheoryInputs in, std::int64_t max_n, Cond cond) {
    for (std::int64_t n = 2; n <= max_n; n *= 2) {
        in.n = n;
        if (cond(in).satisfied) return n;
    }
    return 0;
}

} // namespace

std::int64_t min_n_condition_i(TheoryInputs in, std::int64_t max_n) {
    return min_n_on_doubling_grid(in, max_n, [](const TheoryInputs& t) {
        return sample_condition_i(t);
    });
}

std::int64_t min_n_condition_ii(TheoryInputs in, std::int64_t max_n) {
    return min_n_on_doubling_grid(in, max_n, [](const TheoryInputs& t) {
        return sample_condition_ii(t);
    });
}

} // namespace lowrank::theory
