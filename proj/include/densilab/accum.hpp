#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

namespace densilab {

// Streaming accumulator for sums of positive terms given in the natural-log
// domain.  Two tracks are kept:
//  - a plain linear Kahan sum, valid until any term or the running total
//    leaves double range;
//  - a log-domain track: offset + Kahan sum of exp(ln x - offset), with the
//    offset rebased whenever a term dwarfs it or the mantissa sum grows large.
// The linear track, when valid, is preferred (it is exact for small-integer
// weights and avoids exp/log round trips).
class LogAccumulator {
public:
    void add_log(double ln_term) {
        ++count_;
        // linear track
        if (linear_valid_) {
            double t = std::exp(ln_term);
            if (ln_term > 690.0 || !(t < 1e300) || linear_sum_ > 1e300) {
                linear_valid_ = false;
            } else {
                kahan_add(linear_sum_, linear_c_, t);
            }
        }
        // log track
        if (empty_) {
            offset_ = ln_term;
            mant_ = 1.0;
            mant_c_ = 0.0;
            empty_ = false;
            return;
        }
        double d = ln_term - offset_;
        if (d > 350.0) {
            // rebase to the new dominant term
            double scale = std::exp(-d);
            mant_ = (mant_ + mant_c_) * scale;
            mant_c_ = 0.0;
            offset_ = ln_term;
            kahan_add(mant_, mant_c_, 1.0);
        } else {
            kahan_add(mant_, mant_c_, std::exp(d));
            if (mant_ > 1e280) {
                double s = mant_ + mant_c_;
                offset_ += std::log(s);
                mant_ = 1.0;
                mant_c_ = 0.0;
            }
        }
    }

    // ln of the accumulated sum; -inf when nothing was added.
    double log_total() const {
        if (empty_) return -std::numeric_limits<double>::infinity();
        if (linear_valid_ && linear_sum_ > 0.0)
            return std::log(linear_sum_ + linear_c_);
        return offset_ + std::log(mant_ + mant_c_);
    }

    // the sum itself when it fits in a double
    std::optional<double> linear_total() const {
        if (!linear_valid_) return std::nullopt;
        return linear_sum_ + linear_c_;
    }

    std::uint64_t count() const { return count_; }
    bool empty() const { return empty_; }

    // log-track internals; total = exp(offset) * mantissa
    double offset() const { return offset_; }
    double mantissa() const { return mant_ + mant_c_; }

    // a / b without forming the large log totals: the offsets are stored
    // ln-terms and cancel exactly, so the quotient keeps full relative
    // precision even when ln(total) is ~1e5 and a plain
    // exp(log_total - log_total) would lose ~ulp(1e5) in the exponent.
    static double ratio(const LogAccumulator& a, const LogAccumulator& b) {
        if (a.empty_) return 0.0;
        if (b.empty_) return std::numeric_limits<double>::infinity();
        if (a.linear_valid_ && b.linear_valid_)
            return (a.linear_sum_ + a.linear_c_) / (b.linear_sum_ + b.linear_c_);
        return std::exp(a.offset_ - b.offset_) * (a.mantissa() / b.mantissa());
    }

private:
    static void kahan_add(double& sum, double& c, double t) {
        double y = t - c;
        double u = sum + y;
        c = (u - sum) - y;
        sum = u;
    }

    bool empty_ = true;
    bool linear_valid_ = true;
    double linear_sum_ = 0.0, linear_c_ = 0.0;
    double offset_ = 0.0;
    double mant_ = 0.0, mant_c_ = 0.0;
    std::uint64_t count_ = 0;
};

} // namespace densilab
