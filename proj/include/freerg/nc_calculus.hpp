#pragma once

#include <vector>

#include "freerg/errors.hpp"
#include "freerg/rational.hpp"

namespace freerg {

// Partition of {1..k}; blocks sorted internally and by least element.
struct SetPartition {
    std::vector<std::vector<int>> blocks;
};

// C_0=1, C_{n+1} = sum C_i C_{n-i}; exact.
Int catalan(int n);

// All non-crossing partitions of {1..k}; k <= 14 (count is Catalan(k)).
std::vector<SetPartition> enumerate_nc(int k);

// No a<b<c<d with {a,c} and {b,d} split across two blocks. Quadratic scan.
bool is_noncrossing(const SetPartition& p);

// All set partitions of {1..k} (test oracle for the crossing filter); k <= 10.
std::vector<SetPartition> enumerate_all_partitions(int k);

// Sequences are order-indexed: v[i] is the order-(i+1) entry; orders 1..K.
using MomentSequence = std::vector<Rat>;
using CumulantSequence = std::vector<Rat>;

namespace detail {

// [x^d] (1 + sum_{j>=1} m[j-1] x^j)^s  -- m has orders 1..K, m_0 = 1 implied.
template <class F>
F conv_power_coeff(const std::vector<F>& m, int s, int d) {
    std::vector<F> p(d + 1, F(0));
    p[0] = F(1);
    for (int rep = 0; rep < s; ++rep) {
        std::vector<F> q(d + 1, F(0));
        for (int i = 0; i <= d; ++i) {
            if (p[i] == F(0)) continue;
            q[i] = q[i] + p[i]; // m_0 = 1 term
            for (int j = 1; i + j <= d; ++j)
                q[i + j] = q[i + j] + p[i] * m[j - 1];
        }
        p = std::move(q);
    }
    return p[d];
}

} // namespace detail

// m_n = sum_{s=1..n} kappa_s * [x^{n-s}] M(x)^s  (first-block recursion over
// non-crossing partitions; polynomial in K, no enumeration).
template <class F>
std::vector<F> moments_from_cumulants(const std::vector<F>& kappa) {
    const int K = static_cast<int>(kappa.size());
    if (K < 1) throw input_error("cumulant sequence must have length >= 1");
    std::vector<F> m;
    m.reserve(K);
    for (int n = 1; n <= K; ++n) {
        F tot(0);
        for (int s = 1; s <= n; ++s)
            tot = tot + kappa[s - 1] * detail::conv_power_coeff(m, s, n - s);
        m.push_back(tot);
    }
    return m;
}

// Triangular inverse of the above: kappa_n enters once, with coefficient 1.
template <class F>
std::vector<F> cumulants_from_moments(const std::vector<F>& m) {
    const int K = static_cast<int>(m.size());
    if (K < 1) throw input_error("moment sequence must have length >= 1");
    std::vector<F> kappa;
    kappa.reserve(K);
    for (int n = 1; n <= K; ++n) {
        F acc(0);
        for (int s = 1; s < n; ++s)
            acc = acc + kappa[s - 1] * detail::conv_power_coeff(m, s, n - s);
        kappa.push_back(m[n - 1] - acc);
    }
    return kappa;
}

// Direct summation over enumerate_nc(k); independent route used to cross-check
// the recursion in tests. K <= 14.
template <class F>
std::vector<F> moments_from_cumulants_nc(const std::vector<F>& kappa) {
    const int K = static_cast<int>(kappa.size());
    if (K > 14) throw input_error("enumeration route limited to order 14");
    std::vector<F> m;
    m.reserve(K);
    for (int k = 1; k <= K; ++k) {
        F tot(0);
        for (const auto& part : enumerate_nc(k)) {
            F prod(1);
            for (const auto& block : part.blocks)
                prod = prod * kappa[block.size() - 1];
            tot = tot + prod;
        }
        m.push_back(tot);
    }
    return m;
}

} // namespace freerg
