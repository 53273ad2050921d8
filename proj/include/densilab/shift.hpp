#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "accum.hpp"
#include "integer_set.hpp"

namespace densilab {

// Parameters of the counterexample weighted backward shift: geometric windows
// I_u = [(1-eps) a^u, (1+eps) a^u], a syndetic partition of the window indices
// u into classes A_p (2-adic valuation), and the spacing sequence b_p.
struct ShiftParameters {
    int a = 12;
    double eps = 0.05;
    int b_exponent = 5; // b_p = max(8p, ceil(e^{2p} p^exponent))
    std::uint64_t horizon = 10000000;

    static ShiftParameters defaults() { return {}; }

    double b_real(int p) const {
        return std::max(8.0 * p, std::ceil(std::exp(2.0 * p) * std::pow(static_cast<double>(p),
                                                                        static_cast<double>(b_exponent))));
    }

    std::uint64_t b(int p) const {
        if (p < 1) throw std::invalid_argument("b_p needs p >= 1");
        double v = b_real(p);
        if (v > 9e18) throw std::overflow_error("b_p exceeds 64-bit range");
        return static_cast<std::uint64_t>(v);
    }

    std::string b_formula() const {
        return "max(8p, ceil(e^{2p} p^" + std::to_string(b_exponent) + "))";
    }

    // class of window index u: p = 1 + v2(u)
    static int partition_class(std::uint64_t u) {
        if (u == 0) throw std::invalid_argument("u >= 1 required");
        return std::countr_zero(u) + 1;
    }

    // M(p) = floor(2^{p/2})
    static double M(int p) { return std::floor(std::pow(2.0, p / 2.0)); }

    double apow(int u) const { return std::pow(static_cast<double>(a), u); }
    double window_lo(int u, double e) const { return (1.0 - e) * apow(u); }
    double window_hi(int u, double e) const { return (1.0 + e) * apow(u); }
};

// All invariants checked on a candidate; nullopt means accepted, otherwise the
// first failed condition.
inline std::optional<std::string> shift_candidate_error(const ShiftParameters& c) {
    if (c.a < 2) return "a must be >= 2";
    if (!(c.eps > 0.0 && c.eps < 0.125)) return "eps must be in (0, 1/8)";
    if (!((1.0 - c.eps) * c.a / (1.0 + c.eps) > 1.0)) return "(1-eps)a/(1+eps) > 1 fails";
    if (!(2.0 * c.eps * c.a >= 1.0 + 2.0 * c.eps))
        return "difference-inclusion condition 2 eps a >= 1 + 2 eps fails";
    // interval separation and difference inclusion, u > v >= 1, u <= 12
    for (int u = 2; u <= 12; ++u) {
        for (int v = 1; v < u; ++v) {
            if (!(c.window_lo(u, 2 * c.eps) > c.window_hi(v, 2 * c.eps)))
                return "2eps-windows intersect at u=" + std::to_string(u) + ",v=" + std::to_string(v);
            double dlo = c.window_lo(u, c.eps) - c.window_hi(v, c.eps);
            double dhi = c.window_hi(u, c.eps) - c.window_lo(v, c.eps);
            if (!(dlo >= c.window_lo(u, 4 * c.eps) && dhi <= c.window_hi(u, 4 * c.eps)))
                return "difference inclusion fails at u=" + std::to_string(u) + ",v=" + std::to_string(v);
        }
    }
    // finite-horizon proxy for the upper density of the union of 4eps-windows
    {
        double covered = 0.0;
        int U = 12;
        for (int u = 1; u <= U; ++u)
            covered += c.window_hi(u, 4 * c.eps) - c.window_lo(u, 4 * c.eps);
        if (!(covered / c.window_hi(U, 4 * c.eps) < 1.0))
            return "4eps-window union upper-density proxy >= 1";
    }
    // b_p: increasing, >= 8p, and summable tail for condition (4)
    for (int p = 1; p <= 15; ++p) {
        if (!(c.b_real(p) >= 8.0 * p)) return "b_p < 8p at p=" + std::to_string(p);
        if (p > 1 && !(c.b_real(p) > c.b_real(p - 1))) return "b_p not increasing at p=" + std::to_string(p);
    }
    {
        double tail = 0.0;
        for (int q = 11; q <= 2000; ++q) {
            double s = (4.0 * q + 1.0) * (2.0 * q + 1.0) * std::exp(2.0 * q) / c.b_real(q);
            tail += s;
            if (s < 1e-15) break;
        }
        if (!(tail < 0.5)) return "condition-(4) tail not Cauchy-small beyond q=10";
    }
    // partition sanity: classes are disjoint by construction; gaps in A_p are
    // exactly 2^p
    for (int p = 1; p <= 6; ++p) {
        std::uint64_t prev = 0;
        for (std::uint64_t u = 1; u <= 4096; ++u) {
            if (ShiftParameters::partition_class(u) != p) continue;
            if (prev != 0 && u - prev != (std::uint64_t{1} << p))
                return "partition gap wrong in A_" + std::to_string(p);
            prev = u;
        }
    }
    return std::nullopt;
}

// Returns the default parameters after validating every invariant; on failure,
// scans a small (a, eps) grid before giving up.
inline ShiftParameters derive_parameters() {
    ShiftParameters def = ShiftParameters::defaults();
    auto err = shift_candidate_error(def);
    if (!err) return def;
    std::string first = *err;
    for (int a = 2; a <= 40; ++a) {
        for (int ei = 1; ei <= 24; ++ei) {
            ShiftParameters c = def;
            c.a = a;
            c.eps = 0.005 * ei;
            if (!shift_candidate_error(c)) return c;
        }
    }
    throw std::runtime_error("no admissible shift parameters found; defaults failed: " + first);
}

// n in E_p  <=>  exists u in A_p with n in I_u^eps and b_p | n.
inline bool ep_membership(const ShiftParameters& prm, int p, std::uint64_t n) {
    if (p < 1 || n < 1) throw std::invalid_argument("p, n >= 1 required");
    std::uint64_t b = prm.b(p);
    if (n % b != 0) return false;
    for (int u = 1;; ++u) {
        double lo = prm.window_lo(u, prm.eps);
        if (lo > static_cast<double>(n)) return false;
        if (ShiftParameters::partition_class(u) == p &&
            static_cast<double>(n) <= prm.window_hi(u, prm.eps))
            return true;
    }
}

inline std::vector<std::uint64_t> enumerate_ep(const ShiftParameters& prm, int p,
                                               std::uint64_t horizon) {
    std::vector<std::uint64_t> out;
    std::uint64_t b = prm.b(p);
    for (int u = 1;; ++u) {
        double lo = prm.window_lo(u, prm.eps);
        if (lo > static_cast<double>(horizon)) break;
        if (ShiftParameters::partition_class(u) != p) continue;
        double hi = std::min(prm.window_hi(u, prm.eps), static_cast<double>(horizon));
        std::uint64_t first = (static_cast<std::uint64_t>(std::ceil(lo)) + b - 1) / b * b;
        for (std::uint64_t n = first; static_cast<double>(n) <= hi; n += b) out.push_back(n);
    }
    return out;
}

// The weight-product profile P(n) = log2(w_0 ... w_{n-1}): the max of
//  - p-profiles: plateaus of height p on b_p Z + [-2p, 2p], log2-linear ramps
//    of slope 1/2 down to 0 at distance 4p;
//  - (u,v)-profiles (u > v, u in A_p, v in A_q): plateau of height max(p,q) on
//    I_u^eps - I_v^eps + [0, p], zero outside I_u^{4eps}, linear ramps between;
//  - the constant-0 baseline.
class ShiftProfile {
public:
    explicit ShiftProfile(ShiftParameters prm) : prm_(prm) {
        // p-profiles while b_p stays in double-exact integer range
        for (int p = 1;; ++p) {
            double b = prm_.b_real(p);
            if (b > 4e15) break;
            bre_.push_back(b);
            bi_.push_back(static_cast<std::uint64_t>(b));
        }
        // (u,v)-profile geometry; a^u up to ~1e18
        for (int u = 1; static_cast<double>(u) * std::log(static_cast<double>(prm_.a)) < 41.5; ++u) {
            UProfile up;
            up.u = u;
            up.cls = ShiftParameters::partition_class(static_cast<std::uint64_t>(u));
            up.s1 = prm_.window_lo(u, 4 * prm_.eps);
            up.s2 = prm_.window_hi(u, 4 * prm_.eps);
            up.wlo = prm_.window_lo(u, prm_.eps);
            up.whi = prm_.window_hi(u, prm_.eps);
            uprof_.push_back(up);
        }
        for (std::size_t ui = 1; ui < uprof_.size(); ++ui) {
            const UProfile& U = uprof_[ui];
            for (std::size_t vi = 0; vi < ui; ++vi) {
                const UProfile& V = uprof_[vi];
                UVProfile uv;
                uv.h = static_cast<double>(std::max(U.cls, V.cls));
                uv.p1 = U.wlo - V.whi;
                uv.p2 = U.whi - V.wlo + U.cls;
                // ramp feasibility: slope magnitude must not exceed 1
                if (!(uv.p1 - U.s1 >= uv.h && U.s2 - uv.p2 >= uv.h))
                    throw std::logic_error("(u,v)-profile ramp slope would exceed 1");
                uprof_[ui].pairs.push_back(uv);
            }
        }
    }

    const ShiftParameters& params() const { return prm_; }

    double log2_product(std::uint64_t n) const {
        if (n == 0) return 0.0;
        double nd = static_cast<double>(n);
        double best = 0.0;
        // p-profiles
        for (std::size_t pi = 0; pi < bre_.size(); ++pi) {
            double p = static_cast<double>(pi + 1);
            if (bre_[pi] > nd + 4.0 * p) break;
            std::uint64_t bi = bi_[pi];
            std::uint64_t j = n / bi;
            for (std::uint64_t jj : {j, j + 1}) {
                if (jj < 1) continue;
                double r = std::fabs(nd - static_cast<double>(jj) * static_cast<double>(bi));
                double val;
                if (r <= 2.0 * p) val = p;
                else if (r < 4.0 * p) val = p - (r - 2.0 * p) / 2.0;
                else continue;
                best = std::max(best, val);
            }
        }
        // (u,v)-profiles
        for (std::size_t ui = 1; ui < uprof_.size(); ++ui) {
            const UProfile& U = uprof_[ui];
            if (U.s1 > nd) break;
            if (nd > U.s2) continue;
            for (const UVProfile& uv : U.pairs) {
                double val;
                if (nd >= uv.p1 && nd <= uv.p2) val = uv.h;
                else if (nd > U.s1 && nd < uv.p1) val = uv.h * (nd - U.s1) / (uv.p1 - U.s1);
                else if (nd > uv.p2 && nd < U.s2) val = uv.h * (U.s2 - nd) / (U.s2 - uv.p2);
                else continue;
                best = std::max(best, val);
            }
        }
        return best;
    }

    double weight_at(std::uint64_t n) const {
        return std::exp2(log2_product(n + 1) - log2_product(n));
    }

private:
    struct UVProfile {
        double h = 0.0, p1 = 0.0, p2 = 0.0;
    };
    struct UProfile {
        int u = 0, cls = 0;
        double s1 = 0.0, s2 = 0.0, wlo = 0.0, whi = 0.0;
        std::vector<UVProfile> pairs;
    };

    ShiftParameters prm_;
    std::vector<double> bre_;
    std::vector<std::uint64_t> bi_;
    std::vector<UProfile> uprof_;
};

struct WindowStat {
    int p = 0;
    int u = 0;
    std::uint64_t count = 0;
    double width = 0.0;
    double density_proxy = 0.0;
};

struct HitReport {
    std::uint64_t horizon = 0;
    int pmax = 0;
    std::uint64_t pairs_checked = 0;
    bool a_ok = false, b_ok = false, gap_ok = false, c_ok = false, d_ok = false;
    std::vector<WindowStat> windows;
    // violation witnesses (p, q, n, m, t), at most a handful retained
    std::vector<std::array<std::uint64_t, 5>> violations;
    std::vector<std::pair<std::uint64_t, double>> c_mins; // (tail start, min log2P)

    bool all_ok() const { return a_ok && b_ok && gap_ok && c_ok && d_ok; }
};

// Finite-horizon verification of the characterization conditions:
// (a) positive density proxy of E_p per window, (b) disjointness of the
// shifted sets, the gap lemma, (c) the weight products along E_p + [0,p] stay
// >= p with a non-decreasing tail minimum, (d) product lower bound
// M(p) M(q) at difference positions.
inline HitReport verify_characterization(const ShiftParameters& prm, std::uint64_t horizon,
                                         int pmax) {
    if (static_cast<double>(horizon) < std::pow(static_cast<double>(prm.a), 3))
        throw std::invalid_argument("horizon must be >= a^3");
    ShiftProfile profile(prm);
    HitReport rep;
    rep.horizon = horizon;
    rep.pmax = pmax;

    std::vector<std::vector<std::uint64_t>> ep(pmax + 1);
    for (int p = 1; p <= pmax; ++p) {
        ep[p] = enumerate_ep(prm, p, horizon);
        if (ep[p].empty())
            throw std::invalid_argument("E_" + std::to_string(p) + " empty below horizon");
    }

    // (a) per-window counts; windows narrower than b_p cannot hold a multiple
    // and sit below the scale where E_p lives, so only windows of width >= b_p
    // count toward the proxy
    rep.a_ok = true;
    for (int p = 1; p <= pmax; ++p) {
        bool any_window = false;
        for (int u = 1;; ++u) {
            double lo = prm.window_lo(u, prm.eps);
            if (lo > static_cast<double>(horizon)) break;
            if (ShiftParameters::partition_class(u) != p) continue;
            double hi = std::min(prm.window_hi(u, prm.eps), static_cast<double>(horizon));
            if (hi - lo < static_cast<double>(prm.b(p))) continue;
            any_window = true;
            WindowStat ws;
            ws.p = p;
            ws.u = u;
            ws.width = hi - lo;
            for (std::uint64_t n : ep[p])
                if (static_cast<double>(n) >= lo && static_cast<double>(n) <= hi) ++ws.count;
            ws.density_proxy = ws.width > 0 ? static_cast<double>(ws.count) / ws.width : 0.0;
            if (!(ws.density_proxy > 0.0)) rep.a_ok = false;
            rep.windows.push_back(ws);
        }
        if (!any_window) rep.a_ok = false;
    }

    // merged element list with classes
    std::vector<std::pair<std::uint64_t, int>> all;
    for (int p = 1; p <= pmax; ++p)
        for (std::uint64_t n : ep[p]) all.emplace_back(n, p);
    std::sort(all.begin(), all.end());

    // (b) disjointness of E_p + [0, p] across classes
    rep.b_ok = true;
    {
        std::vector<std::pair<std::uint64_t, int>> shifted;
        for (auto [n, p] : all)
            for (int t = 0; t <= p; ++t) shifted.emplace_back(n + t, p);
        std::sort(shifted.begin(), shifted.end());
        for (std::size_t i = 1; i < shifted.size(); ++i) {
            if (shifted[i].first == shifted[i - 1].first && shifted[i].second != shifted[i - 1].second) {
                rep.b_ok = false;
                rep.violations.push_back({static_cast<std::uint64_t>(shifted[i - 1].second),
                                          static_cast<std::uint64_t>(shifted[i].second),
                                          shifted[i].first, shifted[i].first, 0});
            }
        }
    }

    // gap lemma: |n - m| > max(p, q) for all distinct pairs
    rep.gap_ok = true;
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            std::uint64_t d = all[j].first - all[i].first;
            int mx = std::max(all[i].second, all[j].second);
            if (d > static_cast<std::uint64_t>(pmax)) break; // sorted: later pairs only grow
            if (d <= static_cast<std::uint64_t>(mx)) {
                rep.gap_ok = false;
                if (rep.violations.size() < 16)
                    rep.violations.push_back({static_cast<std::uint64_t>(all[i].second),
                                              static_cast<std::uint64_t>(all[j].second),
                                              all[i].first, all[j].first, 0});
            }
        }
    }

    // (c) tail minima of log2P over E_p + [0, p]
    rep.c_ok = true;
    for (int p = 1; p <= pmax; ++p) {
        double prev_min = -1.0;
        for (int frac = 0; frac < 4; ++frac) {
            std::uint64_t T = frac == 0 ? 1 : horizon / 4 * frac;
            double mn = std::numeric_limits<double>::infinity();
            for (std::uint64_t n : ep[p]) {
                for (int t = 0; t <= p; ++t) {
                    std::uint64_t pos = n + t;
                    if (pos < T || pos > horizon) continue;
                    mn = std::min(mn, profile.log2_product(pos));
                }
            }
            if (std::isfinite(mn)) {
                rep.c_mins.emplace_back(T, mn);
                if (mn < static_cast<double>(p) - 1e-9 || mn < prev_min - 1e-9) rep.c_ok = false;
                prev_min = mn;
            }
        }
    }

    // (d) products at difference positions
    rep.d_ok = true;
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            auto [n, p] = all[i];
            auto [m, q] = all[j];
            double need = std::log2(ShiftParameters::M(p) * ShiftParameters::M(q));
            for (int t = 0; t <= q; ++t) {
                ++rep.pairs_checked;
                if (profile.log2_product(m - n + t) < need - 1e-9) {
                    rep.d_ok = false;
                    if (rep.violations.size() < 16)
                        rep.violations.push_back({static_cast<std::uint64_t>(p),
                                                  static_cast<std::uint64_t>(q), n, m,
                                                  static_cast<std::uint64_t>(t)});
                }
            }
        }
    }
    return rep;
}

struct FpDecayReport {
    std::vector<double> tail;          // T(p), index p-1, p = 1..plen
    std::vector<double> proxy;         // empirical A(r) proxy of G_p, p = 1..pmax_emp
    std::vector<std::uint64_t> gp_count;
    std::vector<std::uint64_t> window_ends;
};

// T(p) = sum_{q>p} (4q+1)(2q+1) e^{2q} / b_q  (truncated below 1e-15), plus an
// empirical A(r)-density proxy of G_p = {n <= horizon : log2P(n) > p}
// evaluated at the window ends (1-eps)a^{u+1}.
inline FpDecayReport fp_decay_report(const ShiftParameters& prm, double r, int plen,
                                     int pmax_emp, std::uint64_t horizon) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("r in (0,1) required");
    FpDecayReport rep;
    for (int p = 1; p <= plen; ++p) {
        double sum = 0.0;
        for (int q = p + 1;; ++q) {
            double s = (4.0 * q + 1.0) * (2.0 * q + 1.0) * std::exp(2.0 * q) / prm.b_real(q);
            sum += s;
            if (s < 1e-15) break;
        }
        rep.tail.push_back(sum);
    }

    ShiftProfile profile(prm);
    std::vector<LogAccumulator> num(pmax_emp + 1);
    LogAccumulator phi;
    std::vector<double> mins(pmax_emp + 1, std::numeric_limits<double>::infinity());
    rep.gp_count.assign(pmax_emp + 1, 0);
    std::vector<std::uint64_t> ends;
    for (int u = 2;; ++u) {
        auto e = static_cast<std::uint64_t>(std::floor(prm.window_lo(u, prm.eps)));
        if (e > horizon) break;
        ends.push_back(e);
    }
    std::size_t ei = 0;
    for (std::uint64_t n = 1; n <= horizon; ++n) {
        double P = profile.log2_product(n);
        double lw = std::pow(static_cast<double>(n), r); // ln of A(r) weight
        phi.add_log(lw);
        for (int p = 1; p <= pmax_emp; ++p) {
            if (P > static_cast<double>(p) + 1e-9) {
                num[p].add_log(lw);
                ++rep.gp_count[p];
            }
        }
        if (ei < ends.size() && ends[ei] == n) {
            ++ei;
            for (int p = 1; p <= pmax_emp; ++p) {
                double ratio = LogAccumulator::ratio(num[p], phi);
                mins[p] = std::min(mins[p], ratio);
            }
        }
    }
    rep.window_ends = ends;
    for (int p = 1; p <= pmax_emp; ++p)
        rep.proxy.push_back(std::isfinite(mins[p]) ? mins[p] : 0.0);
    rep.gp_count.erase(rep.gp_count.begin());
    return rep;
}

// {n in [1, N] : || B_w^n x - e_0 ||_inf <= radius} for finitely supported x
inline IntegerSet orbit_hit_set(const ShiftProfile& profile,
                                const std::vector<std::pair<std::uint64_t, double>>& x,
                                double radius, std::uint64_t N) {
    if (!(radius > 0.0)) throw std::invalid_argument("radius > 0 required");
    std::vector<std::uint64_t> hits;
    for (std::uint64_t n = 1; n <= N; ++n) {
        double coord0 = 0.0;
        double rest = 0.0;
        for (auto [i, xi] : x) {
            if (i < n) continue;
            std::uint64_t j = i - n;
            double val = std::exp2(profile.log2_product(i + 1) - profile.log2_product(j + 1)) * xi;
            if (j == 0) coord0 = val;
            else rest = std::max(rest, std::fabs(val));
        }
        double dist = std::max(std::fabs(coord0 - 1.0), rest);
        if (dist <= radius) hits.push_back(n);
    }
    return IntegerSet::from_sorted("orbit_hits", std::move(hits));
}

} // namespace densilab
