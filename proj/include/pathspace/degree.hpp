#pragma once

// The index lattice N^k and its extension by a per-coordinate infinity.
// Every path datum in the library is indexed by these values.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace pathspace {

// A coordinate of (N u {inf}); infinity compares greater than every natural.
class ExtNat {
public:
    constexpr ExtNat() = default;
    constexpr ExtNat(std::uint64_t v) : value_(v) {}

    static constexpr ExtNat infinity() {
        ExtNat e;
        e.value_ = kInfBits;
        return e;
    }

    constexpr bool is_infinite() const { return value_ == kInfBits; }

    std::uint64_t finite() const {
        if (is_infinite()) throw Error("ExtNat: finite() on infinity");
        return value_;
    }

    friend constexpr bool operator==(ExtNat a, ExtNat b) = default;
    friend constexpr auto operator<=>(ExtNat a, ExtNat b) {
        return a.value_ <=> b.value_;  // kInfBits is the maximum
    }

    std::string str() const { return is_infinite() ? "inf" : std::to_string(value_); }

private:
    static constexpr std::uint64_t kInfBits = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t value_ = 0;
};

class Degree;

// An element of (N u {inf})^k.  Values are immutable after construction.
class ExtDegree {
public:
    ExtDegree() = default;
    explicit ExtDegree(std::vector<ExtNat> coords) : coords_(std::move(coords)) {}
    ExtDegree(std::initializer_list<ExtNat> coords) : coords_(coords) {}
    ExtDegree(const Degree& d);  // lossless embedding, defined below

    std::size_t rank() const { return coords_.size(); }
    ExtNat operator[](std::size_t i) const { return coords_[i]; }
    const std::vector<ExtNat>& coords() const { return coords_; }

    bool all_finite() const {
        for (auto c : coords_)
            if (c.is_infinite()) return false;
        return true;
    }

    Degree finite() const;  // requires all_finite()

    friend bool operator==(const ExtDegree& a, const ExtDegree& b) = default;

    std::string str() const;

private:
    std::vector<ExtNat> coords_;
};

// An element of N^k.
class Degree {
public:
    Degree() = default;
    explicit Degree(std::vector<std::uint64_t> coords) : coords_(std::move(coords)) {}
    Degree(std::initializer_list<std::uint64_t> coords) : coords_(coords) {}

    static Degree zero(std::size_t rank) { return Degree(std::vector<std::uint64_t>(rank, 0)); }
    static Degree scalar(std::uint64_t n) { return Degree{{n}}; }

    std::size_t rank() const { return coords_.size(); }
    std::uint64_t operator[](std::size_t i) const { return coords_[i]; }
    const std::vector<std::uint64_t>& coords() const { return coords_; }

    std::uint64_t total() const {
        return std::accumulate(coords_.begin(), coords_.end(), std::uint64_t{0});
    }

    bool is_zero() const {
        for (auto c : coords_)
            if (c != 0) return false;
        return true;
    }

    friend bool operator==(const Degree& a, const Degree& b) = default;
    // Lexicographic; used only to fix deterministic enumeration orders.
    friend auto operator<=>(const Degree& a, const Degree& b) = default;

    std::string str() const;

private:
    std::vector<std::uint64_t> coords_;
};

inline ExtDegree::ExtDegree(const Degree& d) {
    coords_.reserve(d.rank());
    for (std::size_t i = 0; i < d.rank(); ++i) coords_.emplace_back(d[i]);
}

inline Degree ExtDegree::finite() const {
    std::vector<std::uint64_t> out;
    out.reserve(coords_.size());
    for (auto c : coords_) out.push_back(c.finite());
    return Degree(std::move(out));
}

namespace detail {
inline void check_rank(std::size_t a, std::size_t b, const char* op) {
    if (a != b)
        throw RankMismatchError(std::string(op) + ": rank " + std::to_string(a) +
                                " vs " + std::to_string(b));
}
}  // namespace detail

// m <= n coordinatewise; any finite value < inf, inf <= inf.
inline bool leq(const ExtDegree& m, const ExtDegree& n) {
    detail::check_rank(m.rank(), n.rank(), "leq");
    for (std::size_t i = 0; i < m.rank(); ++i)
        if (m[i] > n[i]) return false;
    return true;
}

inline bool leq(const Degree& m, const Degree& n) {
    detail::check_rank(m.rank(), n.rank(), "leq");
    for (std::size_t i = 0; i < m.rank(); ++i)
        if (m[i] > n[i]) return false;
    return true;
}

// Coordinatewise maximum.
inline ExtDegree join(const ExtDegree& m, const ExtDegree& n) {
    detail::check_rank(m.rank(), n.rank(), "join");
    std::vector<ExtNat> out(m.rank());
    for (std::size_t i = 0; i < m.rank(); ++i) out[i] = std::max(m[i], n[i]);
    return ExtDegree(std::move(out));
}

inline Degree join(const Degree& m, const Degree& n) {
    detail::check_rank(m.rank(), n.rank(), "join");
    std::vector<std::uint64_t> out(m.rank());
    for (std::size_t i = 0; i < m.rank(); ++i) out[i] = std::max(m[i], n[i]);
    return Degree(std::move(out));
}

inline Degree meet(const Degree& m, const Degree& n) {
    detail::check_rank(m.rank(), n.rank(), "meet");
    std::vector<std::uint64_t> out(m.rank());
    for (std::size_t i = 0; i < m.rank(); ++i) out[i] = std::min(m[i], n[i]);
    return Degree(std::move(out));
}

// Addition is composition in N^k.  Arithmetic is deliberately not defined on
// ExtDegree: infinities only take part in comparisons and joins.
inline Degree add(const Degree& m, const Degree& n) {
    detail::check_rank(m.rank(), n.rank(), "add");
    std::vector<std::uint64_t> out(m.rank());
    for (std::size_t i = 0; i < m.rank(); ++i) out[i] = m[i] + n[i];
    return Degree(std::move(out));
}

// Partial: requires n <= m.
inline Degree sub(const Degree& m, const Degree& n) {
    detail::check_rank(m.rank(), n.rank(), "sub");
    std::vector<std::uint64_t> out(m.rank());
    for (std::size_t i = 0; i < m.rank(); ++i) {
        if (n[i] > m[i])
            throw UnderflowError("sub: " + m.str() + " - " + n.str() + " underflows");
        out[i] = m[i] - n[i];
    }
    return Degree(std::move(out));
}

inline std::string Degree::str() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        if (i) os << ',';
        os << coords_[i];
    }
    os << ')';
    return os.str();
}

inline std::string ExtDegree::str() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        if (i) os << ',';
        os << coords_[i].str();
    }
    os << ')';
    return os.str();
}

}  // namespace pathspace
