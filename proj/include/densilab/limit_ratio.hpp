#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "density.hpp"
#include "dyadic.hpp"
#include "weights.hpp"

namespace densilab {

struct LimitRatioReport {
    std::vector<double> rho;   // rho_k = sum_{j<=k} alpha_{n_j} / phi(n_k)
    // dip ratios at the all-ones indices lambda_k = 2^{k+1} - 1, evaluated at
    // the last position before the next element, phi(n_{lambda_k + 1} - 1):
    // (k, ratio) pairs
    std::vector<std::pair<int, double>> lambda_dips;
    double tail_min = 0.0; // min rho_k over k in [K/2, K]
    bool entry_decay_warning = false;
};

// Subsequence-density ratios of (n_k(f)) under a weight family, plus the
// nullity probe along the lambda subsequence where the increment jumps by
// f(k+1).
inline LimitRatioReport limit_ratio_report(const StepFunction& f, const WeightFamily& fam,
                                           std::uint64_t K) {
    if (K < 16) throw std::invalid_argument("K >= 16 required");
    LimitRatioReport rep;
    rep.rho.reserve(K);

    // element positions from the recursion stream
    SequenceStream seq(f);
    u128 next_pos = seq.next(); // n_1
    std::uint64_t j = 0;        // elements consumed

    DensityScan scan(fam);
    double tail_min = std::numeric_limits<double>::infinity();
    std::uint64_t tail_lo = K / 2;
    for (;;) {
        std::uint64_t m = scan.pos + 1;
        bool member = (u128(m) == next_pos);
        scan.step(member);
        if (member) {
            ++j;
            double r = scan.ratio();
            rep.rho.push_back(r);
            if (j >= tail_lo && r < tail_min) tail_min = r;
            if (j == K) break;
            next_pos = seq.next();
        } else if (u128(m + 1) == next_pos && std::popcount(j + 1) == 1 && j >= 3) {
            // position n_{lambda_k + 1} - 1 with j = lambda_k = 2^{k+1} - 1
            int k = std::bit_width(j + 1) - 2;
            rep.lambda_dips.emplace_back(k, scan.ratio());
        }
    }
    rep.tail_min = tail_min;

    std::uint64_t nK = scan.pos;
    double e1 = std::exp(fam.log_weight(nK) - summatory_log(fam, nK));
    double e0 = std::exp(fam.log_weight(nK / 2) - summatory_log(fam, nK / 2));
    if (e1 > 0.1 && e1 > 0.9 * e0) rep.entry_decay_warning = true;
    return rep;
}

} // namespace densilab
