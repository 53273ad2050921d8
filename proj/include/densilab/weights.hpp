#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "accum.hpp"

namespace densilab {

// Named admissible weight sequences (alpha_k)_{k>=1} evaluated in the
// natural-log domain, plus hard-coded summatory asymptotics where known.
//
// Families:
//   Cesaro        alpha_k = 1
//   C(r), r>=-1   alpha_k = k^r
//   A(r), 0<=r<=1 alpha_k = e^{k^r}
//   B(r), r>=0    alpha_1 = 1, alpha_k = e^{k/ln^r k} for k>=2
//   Btilde(s)     alpha_k = 1 below the threshold k*_s, e^{k/h_s(k)} above,
//                 with h_s(k) = ln(k) * ln^{(s)}(k)  (s-fold iterated ln)
class WeightFamily {
public:
    enum class Kind { cesaro, c_poly, a_exp, b_exp, btilde, custom };

    static WeightFamily cesaro() {
        WeightFamily w;
        w.kind_ = Kind::cesaro;
        w.name_ = "Cesaro";
        return w;
    }

    static WeightFamily C(double r) {
        if (r < -1.0) throw std::invalid_argument("C(r) requires r >= -1");
        WeightFamily w;
        w.kind_ = Kind::c_poly;
        w.r_ = r;
        w.name_ = "C(" + trim_num(r) + ")";
        return w;
    }

    static WeightFamily A(double r) {
        if (r < 0.0 || r > 1.0) throw std::invalid_argument("A(r) requires 0 <= r <= 1");
        WeightFamily w;
        w.kind_ = Kind::a_exp;
        w.r_ = r;
        w.name_ = "A(" + trim_num(r) + ")";
        return w;
    }

    static WeightFamily B(double r) {
        if (r < 0.0) throw std::invalid_argument("B(r) requires r >= 0");
        WeightFamily w;
        w.kind_ = Kind::b_exp;
        w.r_ = r;
        w.name_ = "B(" + trim_num(r) + ")";
        return w;
    }

    static WeightFamily Btilde(int s) {
        if (s < 2) throw std::invalid_argument("Btilde(s) requires s >= 2");
        WeightFamily w;
        w.kind_ = Kind::btilde;
        w.s_ = s;
        w.name_ = "Btilde(" + std::to_string(s) + ")";
        w.kstar_ = btilde_threshold(s);
        return w;
    }

    static WeightFamily custom(std::string name, std::function<double(std::uint64_t)> log_weight) {
        WeightFamily w;
        w.kind_ = Kind::custom;
        w.name_ = std::move(name);
        w.custom_ = std::move(log_weight);
        return w;
    }

    // Accepts "cesaro", "C:r", "A:r", "B:r", "Btilde:s" (case-insensitive
    // prefix, also tolerates e.g. "B2" for "B:2").
    static WeightFamily parse(std::string_view spec);

    const std::string& name() const { return name_; }
    Kind kind() const { return kind_; }

    // ln alpha_k, k >= 1
    double log_weight(std::uint64_t k) const {
        if (k == 0) throw std::domain_error("weight index must be >= 1");
        switch (kind_) {
        case Kind::cesaro:
            return 0.0;
        case Kind::c_poly:
            return r_ * std::log(static_cast<double>(k));
        case Kind::a_exp:
            return std::pow(static_cast<double>(k), r_);
        case Kind::b_exp:
            if (k == 1) return 0.0;
            return static_cast<double>(k) / std::pow(std::log(static_cast<double>(k)), r_);
        case Kind::btilde: {
            if (k < kstar_) return 0.0;
            return static_cast<double>(k) / h_s(s_, static_cast<double>(k));
        }
        case Kind::custom:
            return custom_(k);
        }
        throw std::logic_error("unreachable");
    }

    // alpha_k as an exact rational (num, den) where representable
    std::optional<std::pair<std::uint64_t, std::uint64_t>> exact_weight(std::uint64_t k) const {
        if (k == 0) return std::nullopt;
        if (kind_ == Kind::cesaro) return std::make_pair(std::uint64_t{1}, std::uint64_t{1});
        if (kind_ == Kind::c_poly) {
            double ri;
            if (std::modf(r_, &ri) != 0.0) return std::nullopt;
            long long r = static_cast<long long>(ri);
            if (r == -1) return std::make_pair(std::uint64_t{1}, k);
            if (r < 0) return std::nullopt;
            std::uint64_t v = 1;
            for (long long i = 0; i < r; ++i) {
                if (v > UINT64_MAX / k) return std::nullopt;
                v *= k;
            }
            return std::make_pair(v, std::uint64_t{1});
        }
        return std::nullopt;
    }

    // ln phi_alpha(n) from the known asymptotic forms; nullopt for families
    // (or horizons) without a usable form.
    std::optional<double> log_phi_asymptotic(std::uint64_t n) const {
        if (n < 30) return std::nullopt;
        double nd = static_cast<double>(n);
        double ln = std::log(nd);
        switch (kind_) {
        case Kind::cesaro:
            return ln;
        case Kind::c_poly:
            if (r_ == -1.0) return std::log(ln + 0.57721566490153286);
            return (r_ + 1.0) * ln - std::log(r_ + 1.0);
        case Kind::a_exp:
            if (r_ == 0.0) return 1.0 + ln; // alpha = e
            if (r_ == 1.0) return nd + std::log(std::exp(1.0) / (std::exp(1.0) - 1.0));
            // (1/r) n^{1-r} e^{n^r}
            return std::pow(nd, r_) + (1.0 - r_) * ln - std::log(r_);
        case Kind::b_exp: {
            if (r_ == 0.0) return nd + std::log(std::exp(1.0) / (std::exp(1.0) - 1.0));
            // ln^r(n) e^{n/ln^r n} / (1 - r/ln n): the leading form of the
            // summation by parts with its first-order correction.
            double corr = 1.0 - r_ / ln;
            if (corr <= 0.0) return std::nullopt;
            return nd / std::pow(ln, r_) + r_ * std::log(ln) - std::log(corr);
        }
        case Kind::btilde: {
            // h_s(n) e^{n/h_s(n)} / (1 - c(n)),
            // c(n) = n h_s'(n)/h_s(n) = 1/ln n + 1/(ln^{(s)} n * prod_{i<s} ln^{(i)} n)
            double h = h_s(s_, nd);
            if (!(h > 0.0)) return std::nullopt;
            double prod = 1.0, v = ln;
            for (int i = 1; i < s_; ++i) {
                prod *= v;
                v = std::log(v);
                if (!(v > 0.0)) return std::nullopt;
            }
            double c = 1.0 / ln + 1.0 / (v * prod);
            if (c >= 1.0) return std::nullopt;
            return nd / h + std::log(h) - std::log(1.0 - c);
        }
        case Kind::custom:
            return std::nullopt;
        }
        return std::nullopt;
    }

    // smallest k with h_s(k) >= 1 (weights below it are 1)
    std::uint64_t btilde_kstar() const { return kstar_; }
    double param_r() const { return r_; }
    int param_s() const { return s_; }

    // h_s(x) = ln(x) * ln^{(s)}(x); NaN/negative while undefined
    static double h_s(int s, double x) {
        double v = std::log(x);
        double first = v;
        for (int i = 1; i < s; ++i) {
            if (!(v > 0.0)) return -1.0;
            v = std::log(v);
        }
        if (!(v > 0.0)) return -1.0;
        return first * v;
    }

private:
    static std::uint64_t btilde_threshold(int s) {
        // h_s is increasing where defined: gallop then bisect
        std::uint64_t hi = 2;
        while (h_s(s, static_cast<double>(hi)) < 1.0) {
            if (hi > (std::uint64_t{1} << 62)) throw std::logic_error("Btilde threshold not found");
            hi *= 2;
        }
        std::uint64_t lo = hi / 2; // h(lo) < 1 (or lo < 2)
        while (lo + 1 < hi) {
            std::uint64_t mid = lo + (hi - lo) / 2;
            (h_s(s, static_cast<double>(mid)) >= 1.0 ? hi : lo) = mid;
        }
        return hi;
    }

    static std::string trim_num(double r) {
        std::string s = std::to_string(r);
        while (!s.empty() && s.back() == '0') s.pop_back();
        if (!s.empty() && s.back() == '.') s.pop_back();
        return s;
    }

    Kind kind_ = Kind::cesaro;
    double r_ = 0.0;
    int s_ = 0;
    std::uint64_t kstar_ = 0;
    std::string name_;
    std::function<double(std::uint64_t)> custom_;
};

inline WeightFamily WeightFamily::parse(std::string_view spec) {
    auto fail = [&] {
        return std::invalid_argument("unknown family spec: " + std::string(spec));
    };
    std::string s(spec);
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "cesaro" || s == "c0" || s == "c:0") return cesaro();
    auto num_tail = [&](std::size_t pos) -> double {
        std::string tail(spec.substr(pos));
        if (!tail.empty() && tail.front() == ':') tail.erase(0, 1);
        if (tail.empty()) throw fail();
        std::size_t used = 0;
        double v = std::stod(tail, &used);
        if (used != tail.size()) throw fail();
        return v;
    };
    if (s.rfind("btilde", 0) == 0) {
        double v = num_tail(6);
        int iv = static_cast<int>(v);
        if (static_cast<double>(iv) != v) throw fail();
        return Btilde(iv);
    }
    if (s.rfind("c", 0) == 0 && s.size() > 1) return C(num_tail(1));
    if (s.rfind("a", 0) == 0 && s.size() > 1) return A(num_tail(1));
    if (s.rfind("b", 0) == 0 && s.size() > 1) return B(num_tail(1));
    throw fail();
}

// ln phi_alpha(n) by streaming accumulation
inline double summatory_log(const WeightFamily& fam, std::uint64_t n) {
    if (n < 1) throw std::invalid_argument("summatory_log requires n >= 1");
    LogAccumulator acc;
    for (std::uint64_t k = 1; k <= n; ++k) acc.add_log(fam.log_weight(k));
    return acc.log_total();
}

struct RegularityReport {
    double max_entry_last_row = 0.0;  // max_k alpha_k / phi(n), Toeplitz (i) proxy
    double row_sum_defect = 0.0;      // |sum_k alpha_k/phi(n) - 1|, Toeplitz (ii)
    double sup_abs_row_sum = 0.0;     // sup over sampled rows, Toeplitz (iii)
    double entry_at_1 = 0.0;          // alpha_1/phi(n), fixed-column decay probe
};

inline RegularityReport regularity_report(const WeightFamily& fam, std::uint64_t horizon) {
    if (horizon < 2) throw std::invalid_argument("regularity horizon must be >= 2");
    LogAccumulator phi;
    double max_ln = -std::numeric_limits<double>::infinity();
    for (std::uint64_t k = 1; k <= horizon; ++k) {
        double lw = fam.log_weight(k);
        if (!std::isfinite(lw)) throw std::domain_error(fam.name() + ": non-finite log weight at k=" + std::to_string(k));
        phi.add_log(lw);
        if (lw > max_ln) max_ln = lw;
    }
    RegularityReport rep;
    // entries alpha_k / phi(n) via the accumulator internals: the stored
    // offset is itself a ln-term, so the subtraction below cancels exactly
    // and no ulp(ln phi) noise enters the entries
    auto entry = [&](double lw) {
        if (auto lin = phi.linear_total(); lin && std::exp(lw) < 1e300)
            return std::exp(lw) / *lin;
        return std::exp(lw - phi.offset()) / phi.mantissa();
    };
    rep.max_entry_last_row = entry(max_ln);
    rep.entry_at_1 = entry(fam.log_weight(1));
    // row sum at the last row, accumulated in the linear domain (entries <= 1)
    {
        double sum = 0.0, c = 0.0;
        for (std::uint64_t k = 1; k <= horizon; ++k) {
            double t = entry(fam.log_weight(k));
            double y = t - c;
            double u = sum + y;
            c = (u - sum) - y;
            sum = u;
        }
        rep.row_sum_defect = std::fabs(sum + c - 1.0);
    }
    // sampled rows for the sup; row sums of an admissible matrix are 1 by
    // construction, so this confirms the uniform bound numerically
    double sup = 0.0;
    for (std::uint64_t row = 2; row <= horizon; row *= 2) {
        LogAccumulator p;
        for (std::uint64_t k = 1; k <= row; ++k) p.add_log(fam.log_weight(k));
        double sum = 0.0;
        for (std::uint64_t k = 1; k <= row; ++k)
            sum += std::exp(fam.log_weight(k) - p.offset()) / p.mantissa();
        sup = std::max(sup, std::fabs(sum));
    }
    sup = std::max(sup, rep.row_sum_defect + 1.0);
    rep.sup_abs_row_sum = sup;
    return rep;
}

} // namespace densilab
