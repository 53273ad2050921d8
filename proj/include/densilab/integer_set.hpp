#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace densilab {

// A strictly increasing stream of positive integers, given either by a
// 1-based index formula or by a materialized sorted list.
class IntegerSet {
public:
    using Formula = std::function<std::optional<std::uint64_t>(std::uint64_t)>; // 1-based

    static IntegerSet naturals() {
        return from_formula("naturals", [](std::uint64_t i) { return i; });
    }

    static IntegerSet multiples(std::uint64_t m) {
        if (m == 0) throw std::invalid_argument("multiples(0)");
        return from_formula("multiples:" + std::to_string(m),
                            [m](std::uint64_t i) -> std::optional<std::uint64_t> {
                                if (i > UINT64_MAX / m) return std::nullopt;
                                return i * m;
                            });
    }

    static IntegerSet squares() {
        return from_formula("squares", [](std::uint64_t i) -> std::optional<std::uint64_t> {
            if (i >= (std::uint64_t{1} << 32)) return std::nullopt;
            return i * i;
        });
    }

    static IntegerSet powers_of_two() {
        return from_formula("powers2", [](std::uint64_t i) -> std::optional<std::uint64_t> {
            if (i > 63) return std::nullopt;
            return std::uint64_t{1} << i;
        });
    }

    // union of blocks [4^j, 2*4^j), j >= 0, materialized up to limit
    static IntegerSet dyadic_blocks(std::uint64_t limit) {
        std::vector<std::uint64_t> v;
        for (std::uint64_t base = 1; base <= limit; base *= 4) {
            for (std::uint64_t n = base; n < 2 * base && n <= limit; ++n) v.push_back(n);
            if (base > limit / 4) break;
        }
        return from_sorted("blocks4", std::move(v));
    }

    static IntegerSet from_formula(std::string name, Formula f) {
        IntegerSet s;
        s.name_ = std::move(name);
        s.formula_ = std::move(f);
        return s;
    }

    static IntegerSet from_sorted(std::string name, std::vector<std::uint64_t> v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] < 1 || (i > 0 && v[i] <= v[i - 1]))
                throw std::invalid_argument("from_sorted: not strictly increasing positive");
        }
        IntegerSet s;
        s.name_ = std::move(name);
        s.list_ = std::move(v);
        s.materialized_ = true;
        return s;
    }

    // 1-based; nullopt once exhausted
    std::optional<std::uint64_t> nth(std::uint64_t i) const {
        if (i == 0) throw std::invalid_argument("nth is 1-based");
        if (materialized_) {
            if (i > list_.size()) return std::nullopt;
            return list_[i - 1];
        }
        return formula_(i);
    }

    const std::string& name() const { return name_; }

    // Sequential membership walker over 1,2,3,...
    class Cursor {
    public:
        explicit Cursor(const IntegerSet& s) : set_(&s), next_(s.nth(1)) {}
        // call with consecutive n starting at 1
        bool contains_advance(std::uint64_t n) {
            if (next_ && *next_ < n) throw std::logic_error("cursor not strictly increasing");
            if (next_ && *next_ == n) {
                ++idx_;
                auto nx = set_->nth(idx_ + 1);
                if (nx && next_ && *nx <= *next_)
                    throw std::logic_error("set not strictly increasing");
                next_ = nx;
                return true;
            }
            return false;
        }
        std::uint64_t taken() const { return idx_; }

    private:
        const IntegerSet* set_;
        std::uint64_t idx_ = 0;
        std::optional<std::uint64_t> next_;
    };

    Cursor cursor() const { return Cursor(*this); }

private:
    std::string name_;
    Formula formula_;
    std::vector<std::uint64_t> list_;
    bool materialized_ = false;
};

} // namespace densilab
