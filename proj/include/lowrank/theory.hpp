#pragma once

#include <cstdint>

#include "lowrank/problems.hpp"

namespace lowrank::theory {

// The analysis proves existence of universal constants but never supplies
// values; they are exposed as inputs, defaulting to 1, and every bound
// computed from them is to be read as "up to these constants".
struct UniversalConstants {
    double c_tilde = 1.0;
    double c1 = 1.0;
    double c2 = 1.0;
};

struct TheoryInputs {
    int p = 1;
    std::int64_t n = 2;
    int s = 1;
    AssumptionConstants constants;
    double radius = 1.0; // R >= 1
    double gamma = 0.0;  // sublevel-set parameter
    UniversalConstants universal;

    void validate() const;
};

// delta_tilde = ln(18 R (K_C + C_mu)).
double delta_tilde(const AssumptionConstants& c, double radius);

// ln(n^{1/3} p) + delta_tilde; the log factor shared by all the bounds.
double log_term(const TheoryInputs& in);

// a = 1/(2 U_L), so a*U_L = 1/2 < 1 by construction.
double tuned_a(const TheoryInputs& in);

// lambda = sqrt(8 K (2p+1)^{2/3} / (c a n^{2/3}) * [ln(n^{1/3} p) + delta_tilde]).
double tuned_lambda(const TheoryInputs& in);

struct SampleCondition {
    double required_n = 0.0; // right-hand side evaluated at the given n
    bool satisfied = false;  // n > required_n
};

// Condition (i): n > C1 [(Gamma/K)^3 + 1] p + C1 s (ln(n^{1/3} p) + delta_tilde).
SampleCondition sample_condition_i(const TheoryInputs& in);

// Excess-risk bound (i):
// sqrt(K p^{1/3} Gamma / n^{1/3}) + Gamma
//   + C1 K [ s p^{2/3} L / n^{2/3} + sqrt(s L / n) + p^{1/3} / n^{1/3} ],
// with L the shared log factor.
double risk_bound_i(const TheoryInputs& in);

// Condition (ii): n > C2 p U_L L s^{3/2} R^{3/2}.
SampleCondition sample_condition_ii(const TheoryInputs& in);

// Excess-risk bound (ii):
// C2 s K [ p^{2/3} L / n^{2/3} + p^{1/3} R U_L^{1/2} sqrt(L) / n^{1/3} ].
double risk_bound_ii(const TheoryInputs& in);

// Rank bound p~_u at discretization epsilon (default n^{-1/3}):
// ceil( 2 c n^{1/3} / (Delta1 (2p+1)^{1/3})
//     + 2 c n^{2/3} / (K Delta1 (2p+1)^{2/3}) * (Gamma + 2 epsilon) + 8 s ),
// with Delta1 = ln(18 (K_C + C_mu) p R / epsilon). Always exceeds s.
std::int64_t rank_bound(const TheoryInputs& in);
std::int64_t rank_bound(const TheoryInputs& in, double epsilon);

struct CoveringNumber {
    double log_count = 0.0;
    bool trivial = false; // epsilon so large that a single point covers
};

// Log of the epsilon-net size bound (9 sqrt(r) R / epsilon)^{(2p+1) r} for
// rank-r matrices of spectral radius <= R; kept in log scale since the raw
// count overflows quickly.
CoveringNumber covering_number(int r, double radius, double epsilon, int p);

// Classical baseline rate: scale * sqrt(p^2 ln(n) / n).
double saa_classical_bound(int p, std::int64_t n, double scale);

// Conditions (i)/(ii) contain n on both sides through the log factor;
// these report the smallest n on a doubling grid {2, 4, 8, ...} that
// satisfies the condition, or 0 if none does up to max_n.
std::int64_t min_n_condition_i(TheoryInputs in, std::int64_t max_n = std::int64_t{1} << 40);
std::int64_t min_n_condition_ii(TheoryInputs in, std::int64_t max_n = std::int64_t{1} << 40);

} // namespace lowrank::theory
