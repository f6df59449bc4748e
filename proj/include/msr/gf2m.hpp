#ifndef MSR_GF2M_HPP
#define MSR_GF2M_HPP

#include <cstdint>
#include <vector>

#include "msr/errors.hpp"

namespace msr {

/// Element of GF(2^m) in polynomial basis: bit i is the coefficient of x^i.
using gf_elem = std::uint16_t;

namespace detail {

struct ModulusEntry {
    int m;
    std::uint32_t modulus;
};

// Smallest primitive polynomial of each supported degree for which x itself
// generates the multiplicative group (checked again at construction).
inline constexpr ModulusEntry kModulusTable[] = {
    {4, 0x13},     // x^4 + x + 1
    {6, 0x43},     // x^6 + x + 1
    {8, 0x11d},    // x^8 + x^4 + x^3 + x^2 + 1
    {10, 0x409},   // x^10 + x^3 + 1
    {12, 0x1053},  // x^12 + x^6 + x^4 + x + 1
    {14, 0x402b},  // x^14 + x^5 + x^3 + x + 1
    {16, 0x1002d}, // x^16 + x^5 + x^3 + x^2 + 1
};

} // namespace detail

/// Arithmetic context for GF(2^m), even m in [4, 16].
///
/// Multiplication and inversion go through log/antilog tables built once at
/// construction by walking the powers of lambda = x. Construction verifies
/// that lambda is primitive (the walk must visit every nonzero element
/// exactly once before returning to 1). Immutable afterwards; safe for
/// unrestricted concurrent reads.
class Field {
public:
    explicit Field(int m) : m_(m) {
        if (m % 2 != 0)
            throw param_error("field degree must be even, got m=" + std::to_string(m));
        modulus_ = 0;
        for (const auto& e : detail::kModulusTable)
            if (e.m == m) modulus_ = e.modulus;
        if (modulus_ == 0)
            throw param_error("unsupported field degree m=" + std::to_string(m));

        const std::uint32_t q = size();
        exp_.assign(2 * (q - 1), 0);
        log_.assign(q, 0);
        std::uint32_t v = 1;
        for (std::uint32_t i = 0; i < q - 1; ++i) {
            if (i > 0 && v == 1)
                throw internal_error("modulus table entry is not primitive");
            exp_[i] = static_cast<gf_elem>(v);
            log_[v] = i;
            v <<= 1;
            if (v & q) v ^= modulus_;
        }
        if (v != 1)
            throw internal_error("lambda does not have order Q-1");
        for (std::uint32_t i = q - 1; i < 2 * (q - 1); ++i)
            exp_[i] = exp_[i - (q - 1)];
    }

    int m() const { return m_; }
    std::uint32_t modulus() const { return modulus_; }
    std::uint32_t size() const { return 1u << m_; }       // Q
    std::uint32_t order() const { return size() - 1; }    // Q - 1
    gf_elem lambda() const { return 2; }                  // the class of x
    int elem_bytes() const { return (m_ + 7) / 8; }

    static bool supported(int m) {
        for (const auto& e : detail::kModulusTable)
            if (e.m == m) return true;
        return false;
    }

    gf_elem add(gf_elem a, gf_elem b) const { return a ^ b; }

    gf_elem mul(gf_elem a, gf_elem b) const {
        if (a == 0 || b == 0) return 0;
        return exp_[log_[a] + log_[b]];
    }

    gf_elem inv(gf_elem a) const {
        if (a == 0) throw domain_error("inverse of zero");
        return exp_[order() - log_[a]];
    }

    gf_elem div(gf_elem a, gf_elem b) const { return mul(a, inv(b)); }

    /// a^e with the conventions 0^0 = 1 and 0^e = 0 for e > 0.
    gf_elem pow(gf_elem a, std::int64_t e) const {
        if (a == 0) {
            if (e < 0) throw domain_error("negative power of zero");
            return e == 0 ? 1 : 0;
        }
        const std::int64_t n = order();
        std::int64_t r = (static_cast<std::int64_t>(log_[a]) * (e % n)) % n;
        if (r < 0) r += n;
        return exp_[static_cast<std::size_t>(r)];
    }

    /// Discrete log base lambda; a must be nonzero.
    std::uint32_t log(gf_elem a) const {
        if (a == 0) throw domain_error("log of zero");
        return log_[a];
    }

private:
    int m_;
    std::uint32_t modulus_;
    std::vector<gf_elem> exp_;
    std::vector<std::uint32_t> log_;
};

/// The subgroup G = {lambda^{3i}} of index 3 and its two cosets, in
/// generator-power order. Even m forces 3 | 2^m - 1, so the three sets
/// partition the nonzero field elements.
struct CosetTriple {
    std::vector<gf_elem> g;        // G
    std::vector<gf_elem> gamma_g;  // lambda * G
    std::vector<gf_elem> gamma2_g; // lambda^2 * G
};

inline CosetTriple cosets(const Field& f) {
    const std::uint32_t count = f.order() / 3;
    CosetTriple c;
    c.g.reserve(count);
    c.gamma_g.reserve(count);
    c.gamma2_g.reserve(count);
    const gf_elem lam = f.lambda();
    const gf_elem lam2 = f.mul(lam, lam);
    for (std::uint32_t i = 0; i < count; ++i) {
        gf_elem gi = f.pow(lam, 3 * static_cast<std::int64_t>(i));
        c.g.push_back(gi);
        c.gamma_g.push_back(f.mul(lam, gi));
        c.gamma2_g.push_back(f.mul(lam2, gi));
    }
    return c;
}

} // namespace msr

#endif
