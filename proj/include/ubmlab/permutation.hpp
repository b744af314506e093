#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ubmlab {

/// Element of the symmetric group S_n on the labels {0, ..., n-1}.
///
/// A cycle (c_0 c_1 ... c_{l-1}) maps c_k to c_{k+1} and c_{l-1} to c_0.
/// Composition follows function composition: (s * t)(i) = s(t(i)).
class Permutation {
public:
    explicit Permutation(std::vector<std::size_t> one_line) : one_line_(std::move(one_line)) {
        if (one_line_.empty()) throw std::invalid_argument("Permutation: n must be positive");
        std::vector<bool> seen(one_line_.size(), false);
        for (std::size_t v : one_line_) {
            if (v >= one_line_.size() || seen[v]) {
                throw std::invalid_argument("Permutation: one-line form is not a bijection");
            }
            seen[v] = true;
        }
        build_cycles();
    }

    static Permutation identity(std::size_t n) {
        std::vector<std::size_t> p(n);
        std::iota(p.begin(), p.end(), std::size_t{0});
        return Permutation(std::move(p));
    }

    static Permutation from_cycles(std::size_t n, const std::vector<std::vector<std::size_t>>& cycles) {
        std::vector<std::size_t> p(n);
        std::iota(p.begin(), p.end(), std::size_t{0});
        std::vector<bool> used(n, false);
        for (const auto& c : cycles) {
            for (std::size_t k = 0; k < c.size(); ++k) {
                if (c[k] >= n || used[c[k]]) throw std::invalid_argument("Permutation: cycles overlap or exceed n");
                used[c[k]] = true;
                p[c[k]] = c[(k + 1) % c.size()];
            }
        }
        return Permutation(std::move(p));
    }

    static Permutation transposition(std::size_t n, std::size_t i, std::size_t j) {
        if (i == j) throw std::invalid_argument("Permutation: transposition needs distinct labels");
        return from_cycles(n, {{i, j}});
    }

    /// The long cycle (0 1 ... n-1).
    static Permutation full_cycle(std::size_t n) {
        std::vector<std::size_t> c(n);
        std::iota(c.begin(), c.end(), std::size_t{0});
        return from_cycles(n, {c});
    }

    /// All n! permutations in lexicographic order of their one-line form.
    static std::vector<Permutation> all(std::size_t n) {
        std::vector<std::size_t> p(n);
        std::iota(p.begin(), p.end(), std::size_t{0});
        std::vector<Permutation> out;
        do {
            out.emplace_back(p);
        } while (std::next_permutation(p.begin(), p.end()));
        return out;
    }

    std::size_t size() const { return one_line_.size(); }
    std::size_t operator()(std::size_t i) const { return one_line_[i]; }
    const std::vector<std::size_t>& one_line() const { return one_line_; }
    const std::vector<std::vector<std::size_t>>& cycles() const { return cycles_; }
    std::size_t cycle_count() const { return cycles_.size(); }

    Permutation inverse() const {
        std::vector<std::size_t> inv(size());
        for (std::size_t i = 0; i < size(); ++i) inv[one_line_[i]] = i;
        return Permutation(std::move(inv));
    }

    friend Permutation operator*(const Permutation& s, const Permutation& t) {
        if (s.size() != t.size()) throw std::invalid_argument("Permutation: size mismatch in composition");
        std::vector<std::size_t> p(s.size());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = s(t(i));
        return Permutation(std::move(p));
    }

    friend bool operator==(const Permutation& a, const Permutation& b) { return a.one_line_ == b.one_line_; }

    std::string to_string() const {
        std::ostringstream os;
        for (const auto& c : cycles_) {
            os << '(';
            for (std::size_t k = 0; k < c.size(); ++k) os << (k ? " " : "") << c[k];
            os << ')';
        }
        return os.str();
    }

private:
    void build_cycles() {
        std::vector<bool> seen(size(), false);
        for (std::size_t start = 0; start < size(); ++start) {
            if (seen[start]) continue;
            std::vector<std::size_t> c;
            for (std::size_t i = start; !seen[i]; i = one_line_[i]) {
                seen[i] = true;
                c.push_back(i);
            }
            cycles_.push_back(std::move(c));
        }
    }

    std::vector<std::size_t> one_line_;
    std::vector<std::vector<std::size_t>> cycles_;
};

}  // namespace ubmlab
