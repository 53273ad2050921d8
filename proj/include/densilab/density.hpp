#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "accum.hpp"
#include "integer_set.hpp"
#include "weights.hpp"

namespace densilab {

// Shared streaming kernel: walks n = 1,2,... and maintains the weighted mass
// of the member positions, the complement mass, and phi (all log-domain).
struct DensityScan {
    explicit DensityScan(const WeightFamily& f) : fam(&f) {}

    void step(bool member) {
        ++pos;
        double lw = fam->log_weight(pos);
        if (member) num.add_log(lw); else comp.add_log(lw);
        phi.add_log(lw);
    }

    double ratio() const { return LogAccumulator::ratio(num, phi); }
    double comp_ratio() const { return LogAccumulator::ratio(comp, phi); }

    const WeightFamily* fam;
    std::uint64_t pos = 0;
    LogAccumulator num, comp, phi;
};

struct DensityEstimate {
    std::uint64_t horizon = 0;
    std::vector<std::pair<std::uint64_t, double>> ratios; // geometric samples (n, r_n)
    double liminf_proxy = 1.0;   // min r_n over the tail window [N/2, N]
    double limsup_proxy = 0.0;   // max r_n over the same window
    // direct limsup vs 1 - liminf of the complement, same sample points
    double limsup_cross_check = 0.0;
    double max_complement_defect = 0.0; // max |r_n + r_n(complement) - 1| over tail
    // tail split in half, for oscillation diagnostics
    double liminf_first_half = 1.0, liminf_second_half = 1.0;
    double limsup_first_half = 0.0, limsup_second_half = 0.0;

    double tail_oscillation() const {
        return std::max(std::fabs(liminf_first_half - liminf_second_half),
                        std::fabs(limsup_first_half - limsup_second_half));
    }
};

inline DensityEstimate density_estimate(const IntegerSet& E, const WeightFamily& fam,
                                        std::uint64_t horizon) {
    if (horizon < 4) throw std::invalid_argument("density horizon must be >= 4");
    DensityEstimate est;
    est.horizon = horizon;

    // 256 geometric sample points
    std::vector<std::uint64_t> samples;
    {
        double lo = 0.0, hi = std::log(static_cast<double>(horizon));
        for (int i = 0; i < 256; ++i) {
            auto n = static_cast<std::uint64_t>(std::llround(std::exp(lo + (hi - lo) * i / 255.0)));
            n = std::min(std::max<std::uint64_t>(n, 1), horizon);
            if (samples.empty() || n > samples.back()) samples.push_back(n);
        }
    }
    std::size_t si = 0;

    DensityScan scan(fam);
    auto cur = E.cursor();
    std::uint64_t tail_start = horizon / 2;
    std::uint64_t tail_mid = tail_start + (horizon - tail_start) / 2;
    double comp_min = 1.0;
    for (std::uint64_t n = 1; n <= horizon; ++n) {
        scan.step(cur.contains_advance(n));
        bool in_tail = n >= tail_start;
        bool sampled = si < samples.size() && samples[si] == n;
        if (!in_tail && !sampled) continue;
        double r = scan.ratio();
        if (sampled) {
            est.ratios.emplace_back(n, r);
            ++si;
        }
        if (in_tail) {
            double rc = scan.comp_ratio();
            est.liminf_proxy = std::min(est.liminf_proxy, r);
            est.limsup_proxy = std::max(est.limsup_proxy, r);
            comp_min = std::min(comp_min, rc);
            est.max_complement_defect = std::max(est.max_complement_defect, std::fabs(r + rc - 1.0));
            if (n < tail_mid) {
                est.liminf_first_half = std::min(est.liminf_first_half, r);
                est.limsup_first_half = std::max(est.limsup_first_half, r);
            } else {
                est.liminf_second_half = std::min(est.liminf_second_half, r);
                est.limsup_second_half = std::max(est.limsup_second_half, r);
            }
        }
    }
    est.limsup_cross_check = 1.0 - comp_min;
    return est;
}

struct SubsequenceRatios {
    std::vector<double> rho;        // rho_k, 1-based at index k-1
    bool entry_decay_warning = false; // alpha_n/phi(n) not tending to 0
    std::uint64_t last_position = 0;  // n_K
};

// rho_k = sum_{j<=k} alpha_{n_j} / phi(n_k)
inline SubsequenceRatios density_via_subsequence(const IntegerSet& seq, const WeightFamily& fam,
                                                 std::uint64_t K) {
    if (K < 1) throw std::invalid_argument("K must be >= 1");
    auto nK = seq.nth(K);
    if (!nK) throw std::invalid_argument("sequence exhausted before K");
    SubsequenceRatios out;
    out.rho.reserve(K);
    DensityScan scan(fam);
    auto cur = seq.cursor();
    for (std::uint64_t n = 1; n <= *nK; ++n) {
        bool member = cur.contains_advance(n);
        scan.step(member);
        if (member) out.rho.push_back(scan.ratio());
    }
    out.last_position = *nK;
    // precondition probe: the matrix entry alpha_n/phi(n) should tend to 0
    double e1 = std::exp(fam.log_weight(*nK) - summatory_log(fam, *nK));
    double e0 = std::exp(fam.log_weight(*nK / 2) - summatory_log(fam, *nK / 2));
    if (e1 > 0.1 && e1 > 0.9 * e0) out.entry_decay_warning = true;
    return out;
}

enum class CompareVerdict { holds, inconclusive, fails };

struct DensityComparison {
    DensityEstimate a, b;
    CompareVerdict verdict = CompareVerdict::inconclusive;
    double tol = 0.02;
};

// Requires alpha_k(famA)/alpha_k(famB) eventually decreasing to 0; then the
// lower B-density cannot exceed the lower A-density (and dually for upper).
inline DensityComparison density_compare(const IntegerSet& E, const WeightFamily& famA,
                                         const WeightFamily& famB, std::uint64_t horizon) {
    // precondition: log ratio non-increasing over [horizon/2, horizon] and
    // strictly smaller at the end
    double first = famA.log_weight(horizon / 2) - famB.log_weight(horizon / 2);
    double prev = first;
    for (std::uint64_t k = horizon / 2 + 1; k <= horizon; ++k) {
        double d = famA.log_weight(k) - famB.log_weight(k);
        if (d > prev + 1e-9)
            throw std::invalid_argument("weight ratio not eventually decreasing; first violation at k=" +
                                        std::to_string(k));
        prev = d;
    }
    if (!(prev < first - 1e-3))
        throw std::invalid_argument("weight ratio not tending to zero over the test window");

    DensityComparison cmp;
    cmp.a = density_estimate(E, famA, horizon);
    cmp.b = density_estimate(E, famB, horizon);
    bool ordered = cmp.b.liminf_proxy <= cmp.a.liminf_proxy + cmp.tol &&
                   cmp.a.limsup_proxy <= cmp.b.limsup_proxy + cmp.tol;
    if (ordered) {
        cmp.verdict = CompareVerdict::holds;
    } else {
        double osc = std::max(cmp.a.tail_oscillation(), cmp.b.tail_oscillation());
        cmp.verdict = osc > 0.005 ? CompareVerdict::inconclusive : CompareVerdict::fails;
    }
    return cmp;
}

struct CrEquivalence {
    bool natural_positive = false;
    bool cr_positive = false;
    bool agree = false;
    double max_index_ratio = 0.0; // max n_j / j over the materialized prefix
    double cr_liminf_proxy = 0.0;
};

inline CrEquivalence cr_equivalence_check(const IntegerSet& E, double r, std::uint64_t horizon) {
    if (horizon < 100) throw std::invalid_argument("horizon must be >= 100");
    if (r <= -1.0) throw std::invalid_argument("r must be > -1");
    CrEquivalence out;
    for (std::uint64_t j = 1;; ++j) {
        auto v = E.nth(j);
        if (!v || *v > horizon) break;
        out.max_index_ratio = std::max(out.max_index_ratio,
                                       static_cast<double>(*v) / static_cast<double>(j));
    }
    out.natural_positive = out.max_index_ratio > 0.0 && out.max_index_ratio < 1000.0;
    auto est = density_estimate(E, WeightFamily::C(r), horizon);
    out.cr_liminf_proxy = est.liminf_proxy;
    out.cr_positive = est.liminf_proxy > 0.01;
    out.agree = out.natural_positive == out.cr_positive;
    return out;
}

struct A1GapReport {
    std::uint64_t max_gap = 0;
    double a1_liminf_proxy = 1.0; // min over tail of the A(1) ratio at gap right-endpoints
    bool gap_bound_consistent = true;
};

// Bounded gaps are necessary for positive lower A(1)-density: the proxy is the
// A(1) ratio evaluated just before each element (the bottom of every dip).
inline A1GapReport a1_gap_check(const IntegerSet& E, std::uint64_t horizon) {
    if (horizon < 10) throw std::invalid_argument("horizon must be >= 10");
    A1GapReport rep;
    WeightFamily a1 = WeightFamily::A(1.0);
    DensityScan scan(a1);
    auto cur = E.cursor();
    std::uint64_t prev = 0;
    bool any = false;
    double proxy = 1.0;
    bool proxy_set = false;
    std::uint64_t tail_start = horizon / 2;
    for (std::uint64_t n = 1; n <= horizon; ++n) {
        bool member = cur.contains_advance(n);
        if (member) {
            // ratio at the gap right-endpoint n-1 was captured before stepping
            rep.max_gap = std::max(rep.max_gap, n - prev);
            prev = n;
            any = true;
        }
        if (member && n - 1 >= tail_start) {
            // value at position n-1 (before this element is added)
            if (scan.pos > 0) {
                proxy = proxy_set ? std::min(proxy, scan.ratio()) : scan.ratio();
                proxy_set = true;
            }
        }
        scan.step(member);
    }
    // trailing gap up to the horizon counts too
    if (any) rep.max_gap = std::max(rep.max_gap, horizon - prev + 1);
    if (!proxy_set) proxy = any ? scan.ratio() : 0.0;
    rep.a1_liminf_proxy = proxy;
    if (rep.a1_liminf_proxy >= 0.01 && rep.max_gap > 6) rep.gap_bound_consistent = false;
    return rep;
}

} // namespace densilab
