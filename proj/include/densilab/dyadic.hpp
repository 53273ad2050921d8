#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "integer_set.hpp"

namespace densilab {

using u128 = unsigned __int128;

inline std::string u128_to_string(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

// Block decomposition of the binary expansion of k: maximal runs of ones,
// ordered by increasing start bit.
struct DyadicProfile {
    std::uint64_t k = 0;
    int trailing_zeros = 0;              // = l - 1 for k in I(l, nu)
    int delta = 0;                       // length of the lowest block of ones
    std::vector<std::pair<int, int>> blocks; // (start_i, length_i)

    static DyadicProfile of(std::uint64_t k) {
        if (k == 0) throw std::domain_error("dyadic profile of 0");
        DyadicProfile p;
        p.k = k;
        p.trailing_zeros = std::countr_zero(k);
        std::uint64_t v = k;
        int pos = 0;
        while (v != 0) {
            int z = std::countr_zero(v);
            v >>= z;
            pos += z;
            int o = std::countr_one(v);
            p.blocks.emplace_back(pos, o);
            v >>= o;
            pos += o;
        }
        p.delta = p.blocks.front().second;
        return p;
    }

    // membership in I(l, nu): l-1 trailing zeros then exactly nu ones
    bool in_class(int l, int nu) const { return trailing_zeros == l - 1 && delta == nu; }
};

inline int delta_of(std::uint64_t k) {
    return std::countr_one(k >> std::countr_zero(k));
}

// f(j) = m on [a_m, a_{m+1}) for an increasing integer sequence (a_m) with the
// a_1 = 1 normalization.  Tower kinds use a_m = 2^2^...^m (s twos), with a_1
// replaced by 1; f is evaluated by iterated floor-log2, exact at the power-of-
// two boundaries.
class StepFunction {
public:
    enum class Kind { identity, tower, custom };

    static StepFunction identity() {
        StepFunction f;
        f.kind_ = Kind::identity;
        f.name_ = "identity";
        return f;
    }

    static StepFunction tower(int s) {
        if (s < 1) throw std::invalid_argument("tower(s) requires s >= 1");
        StepFunction f;
        f.kind_ = Kind::tower;
        f.s_ = s;
        f.name_ = "tower:" + std::to_string(s);
        return f;
    }

    static StepFunction custom(std::vector<std::uint64_t> a) {
        if (a.empty() || a.front() != 1)
            throw std::invalid_argument("custom step function requires a_1 = 1");
        for (std::size_t i = 1; i < a.size(); ++i)
            if (a[i] <= a[i - 1]) throw std::invalid_argument("a_m must be increasing");
        StepFunction f;
        f.kind_ = Kind::custom;
        f.a_ = std::move(a);
        f.name_ = "custom";
        return f;
    }

    static StepFunction parse(std::string_view spec) {
        std::string s(spec);
        if (s == "identity") return identity();
        if (s.rfind("tower:", 0) == 0) return tower(std::stoi(s.substr(6)));
        if (s.rfind("tower", 0) == 0 && s.size() > 5) return tower(std::stoi(s.substr(5)));
        throw std::invalid_argument("unknown step function spec: " + s);
    }

    const std::string& name() const { return name_; }
    Kind kind() const { return kind_; }

    std::uint64_t operator()(std::uint64_t j) const {
        if (j == 0) throw std::domain_error("f(0) undefined");
        switch (kind_) {
        case Kind::identity:
            return j;
        case Kind::tower: {
            std::uint64_t v = j;
            for (int i = 0; i < s_; ++i) {
                if (v == 0) break;
                v = static_cast<std::uint64_t>(std::bit_width(v)) - 1; // floor log2
            }
            return std::max<std::uint64_t>(v, 1);
        }
        case Kind::custom: {
            std::uint64_t m = 0;
            for (std::size_t i = 0; i < a_.size() && a_[i] <= j; ++i) m = i + 1;
            return m;
        }
        }
        throw std::logic_error("unreachable");
    }

    // a_m; nullopt when the tower leaves 64-bit range
    std::optional<std::uint64_t> a(std::uint64_t m) const {
        if (m == 0) throw std::domain_error("a_m is 1-based");
        switch (kind_) {
        case Kind::identity:
            return m;
        case Kind::tower: {
            if (m == 1) return 1; // normalization
            std::uint64_t v = m;
            for (int i = 0; i < s_; ++i) {
                if (v > 63) return std::nullopt;
                v = std::uint64_t{1} << v;
            }
            return v;
        }
        case Kind::custom:
            if (m > a_.size()) return std::nullopt;
            return a_[m - 1];
        }
        throw std::logic_error("unreachable");
    }

    // sum_{j<=L} f(j)
    u128 prefix_sum(std::uint64_t L) const {
        if (L == 0) return 0;
        if (kind_ == Kind::identity) return u128(L) * (L + 1) / 2;
        u128 total = 0;
        std::uint64_t m = 1;
        std::uint64_t lo = 1;
        for (;;) {
            auto next = a(m + 1);
            std::uint64_t hi = (next && *next - 1 < L) ? *next - 1 : L;
            total += u128(m) * (hi - lo + 1);
            if (!next || *next > L) break;
            lo = *next;
            ++m;
        }
        return total;
    }

private:
    Kind kind_ = Kind::identity;
    int s_ = 0;
    std::vector<std::uint64_t> a_;
    std::string name_;
};

// Streaming recursion n_k = n_{k-1} + f(delta_{k-1}) + f(delta_k); the brute
// force oracle for every closed form.
class SequenceStream {
public:
    explicit SequenceStream(const StepFunction& f) : f_(&f) {}

    // returns n_k for k = 1, 2, ... on successive calls
    u128 next() {
        ++k_;
        std::uint64_t fd = (*f_)(delta_of(k_));
        if (k_ == 1) {
            n_ = fd; // n_1 = f(1) = f(delta_1), delta_1 = 1
        } else {
            n_ += prev_fd_ + fd;
        }
        prev_fd_ = fd;
        return n_;
    }

    std::uint64_t k() const { return k_; }

private:
    const StepFunction* f_;
    std::uint64_t k_ = 0;
    std::uint64_t prev_fd_ = 0;
    u128 n_ = 0;
};

inline std::vector<u128> nk_recursive(const StepFunction& f, std::uint64_t K) {
    if (K < 1) throw std::invalid_argument("K >= 1 required");
    std::vector<u128> out;
    out.reserve(K);
    SequenceStream s(f);
    for (std::uint64_t k = 1; k <= K; ++k) out.push_back(s.next());
    return out;
}

// identity-f closed form: n_k = 4k - 2 sum_i L_i (q_i + 1) - delta_k
inline u128 nk_closed_identity(std::uint64_t k) {
    DyadicProfile p = DyadicProfile::of(k);
    u128 sub = 0;
    for (auto [q, L] : p.blocks) sub += u128(L) * (q + 1);
    return u128(4) * k - 2 * sub - p.delta;
}

// n_{2^t} = sum_{j<=m} 2^{t+2-a_j} - 2m + 1 with m the largest index with
// a_m <= t; unified over the whole range [a_m, a_{m+1}).  t = 0 gives n_1 = 1.
inline u128 nk_power(const StepFunction& f, std::uint64_t t) {
    if (t == 0) return 1;
    if (t > 125) throw std::domain_error("nk_power: t too large for 128-bit result");
    std::uint64_t m = f(t); // largest m with a_m <= t
    u128 total = 0;
    for (std::uint64_t j = 1; j <= m; ++j) {
        auto aj = f.a(j);
        if (!aj || *aj > t) throw std::logic_error("nk_power: inconsistent step function");
        total += u128(1) << (t + 2 - *aj);
    }
    return total - 2 * u128(m) + 1;
}

// multi-block closed form:
// n_k = sum_i sum_{j<L_i} n_{2^{q_i+j}} + 2 sum_i sum_{j<=L_i} f(j)
//       - sum_i L_i - f(delta_k)
inline u128 nk_closed_general(const StepFunction& f, std::uint64_t k) {
    DyadicProfile p = DyadicProfile::of(k);
    u128 total = 0;
    u128 lsum = 0;
    for (auto [q, L] : p.blocks) {
        for (int j = 0; j < L; ++j) total += nk_power(f, static_cast<std::uint64_t>(q) + j);
        total += 2 * f.prefix_sum(static_cast<std::uint64_t>(L));
        lsum += L;
    }
    return total - lsum - f(static_cast<std::uint64_t>(p.delta));
}

// Per-block tuples (m_i, t_i, p_i, s_i) describing how (a_m) meets the block
// [q_i, q_i + L_i - 1].
struct BlockParams {
    int block_start = 0;
    int block_length = 0;
    std::uint64_t m = 0; // largest m with a_m <= q + L - 1
    std::uint64_t t = 0; // (q + L - 1) - a_m
    std::uint64_t p = 0; // #{l < m : q <= a_l <= q + L - 1}
    std::int64_t s = 0;  // L - 1 - t - (a_m - a_{m-p})
    bool degenerate = false;
};

inline std::vector<BlockParams> notation_params(std::uint64_t k, const StepFunction& f) {
    DyadicProfile prof = DyadicProfile::of(k);
    std::vector<BlockParams> out;
    for (auto [q, L] : prof.blocks) {
        BlockParams bp;
        bp.block_start = q;
        bp.block_length = L;
        std::uint64_t top = static_cast<std::uint64_t>(q) + L - 1;
        if (top < 1) { // block is the single bit 2^0, below a_1
            bp.degenerate = true;
            out.push_back(bp);
            continue;
        }
        bp.m = f(top);
        auto am = f.a(bp.m);
        bp.t = top - *am;
        // count a_l in [q, top] below m (a is increasing: walk down from m-1)
        std::uint64_t p = 0;
        for (std::uint64_t l = bp.m; l-- > 1;) {
            auto al = f.a(l);
            if (!al || *al < static_cast<std::uint64_t>(q)) break;
            if (*al <= top) ++p;
        }
        bp.p = p;
        auto amp = f.a(bp.m - bp.p);
        bp.s = static_cast<std::int64_t>(L) - 1 - static_cast<std::int64_t>(bp.t) -
               static_cast<std::int64_t>(*am - *amp);
        // when no a_l lands inside the block the s-part of the decomposition
        // is vacuous; flag it rather than reporting a negative count
        if (*am < static_cast<std::uint64_t>(q)) bp.degenerate = true;
        out.push_back(bp);
    }
    return out;
}

struct SeparationVerdict {
    bool ok = true;
    std::uint64_t witness_i = 0, witness_j = 0;
};

// n_j - n_i >= f(delta_i) + f(delta_j) for all i < j, plus n_k >= f(delta_k).
// Adjacent pairs suffice: the difference telescopes with non-negative middle
// terms.
inline SeparationVerdict separation_check(const StepFunction& f, std::uint64_t K) {
    if (K < 2) throw std::invalid_argument("K >= 2 required");
    SeparationVerdict v;
    SequenceStream s(f);
    u128 prev = s.next();
    std::uint64_t prev_fd = f(delta_of(1));
    if (prev < prev_fd) { v.ok = false; v.witness_i = 1; v.witness_j = 1; return v; }
    for (std::uint64_t k = 2; k <= K; ++k) {
        u128 cur = s.next();
        std::uint64_t fd = f(delta_of(k));
        if (cur < prev + prev_fd + fd || cur < fd) {
            v.ok = false;
            v.witness_i = k - 1;
            v.witness_j = k;
            return v;
        }
        prev = cur;
        prev_fd = fd;
    }
    return v;
}

// {n_k : k in I(l, nu), k <= K}
inline IntegerSet partition_set(const StepFunction& f, int l, int nu, std::uint64_t K) {
    if (l < 1 || nu < 1) throw std::invalid_argument("l, nu >= 1 required");
    std::vector<std::uint64_t> vals;
    SequenceStream s(f);
    for (std::uint64_t k = 1; k <= K; ++k) {
        u128 n = s.next();
        if (DyadicProfile::of(k).in_class(l, nu)) {
            if (n > UINT64_MAX) throw std::overflow_error("partition_set: value exceeds 64 bits");
            vals.push_back(static_cast<std::uint64_t>(n));
        }
    }
    return IntegerSet::from_sorted("A(" + std::to_string(l) + "," + std::to_string(nu) + ")",
                                   std::move(vals));
}

struct SandwichSample {
    std::uint64_t k = 0;
    u128 n = 0;
    double lower = 0.0, upper = 0.0;
    bool ok = false;
};

// identity: 4k - 2(log2 k + 2)^2 - log2 k - 1 <= n_k <= 4k - 2 log2 k - 1
// tower(s): 2k S - 2 log2(k) f(floor(log2 k)) - 14 log2 k - 8 f(floor(log2 k))
//           <= n_k <= 2k S,   S = sum_l 2^{1 - a_l} (truncated below 2^-64)
inline std::vector<SandwichSample> sandwich_check(const StepFunction& f,
                                                 const std::vector<std::uint64_t>& k_samples) {
    std::vector<SandwichSample> out;
    double S = 0.0;
    if (f.kind() != StepFunction::Kind::identity) {
        for (std::uint64_t l = 1;; ++l) {
            auto al = f.a(l);
            if (!al || *al > 64 + 1) break;
            double term = std::ldexp(1.0, 1 - static_cast<int>(*al));
            if (term < std::ldexp(1.0, -64)) break;
            S += term;
        }
    }
    for (std::uint64_t k : k_samples) {
        SandwichSample smp;
        smp.k = k;
        smp.n = nk_closed_general(f, k);
        double kd = static_cast<double>(k);
        double lg = std::log2(kd);
        if (f.kind() == StepFunction::Kind::identity) {
            smp.lower = 4.0 * kd - 2.0 * (lg + 2.0) * (lg + 2.0) - lg - 1.0;
            smp.upper = 4.0 * kd - 2.0 * lg - 1.0;
        } else {
            double fs = static_cast<double>(f(static_cast<std::uint64_t>(lg)));
            smp.lower = 2.0 * kd * S - 2.0 * lg * fs - 14.0 * lg - 8.0 * fs;
            smp.upper = 2.0 * kd * S;
        }
        double nv = static_cast<double>(smp.n);
        // round bounds outward by one ulp-scale unit before comparing
        smp.ok = nv >= smp.lower - 1.0 && nv <= smp.upper + 1.0;
        out.push_back(smp);
    }
    return out;
}

// lambda_j = sum_{l<=j} 4^l (binary 1010...101), the optimal subsequence of
// the identity construction
inline std::uint64_t lambda_optimal(int j) {
    std::uint64_t v = 0;
    for (int l = 0; l <= j; ++l) v += std::uint64_t{1} << (2 * l);
    return v;
}

// IntegerSet view of (n_k(f)) via the exact closed form (random access)
inline IntegerSet nk_set(const StepFunction& f) {
    StepFunction fc = f;
    return IntegerSet::from_formula(
        "nk:" + f.name(), [fc](std::uint64_t k) -> std::optional<std::uint64_t> {
            if (k > (std::uint64_t{1} << 60)) return std::nullopt;
            u128 n = nk_closed_general(fc, k);
            if (n > UINT64_MAX) return std::nullopt;
            return static_cast<std::uint64_t>(n);
        });
}

} // namespace densilab
