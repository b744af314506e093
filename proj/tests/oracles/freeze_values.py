"""Independent reference values for the unit tests.

Everything here is computed with mpmath at 40 digits from first principles
(explicit index loops, dense matrix exponentials), without reusing any of the
C++ code paths. The printed literals are pasted into tests/frozen_values.hpp.

    python3 tests/oracles/freeze_values.py
"""
import itertools

import mpmath as mp

mp.mp.dps = 40


def swap_sum(n, N):
    """sum_{i<j} of the factor-permuting operators on (C^N)^{(x)n}, by index loops."""
    dim = N ** n
    T = mp.zeros(dim, dim)
    idx = list(itertools.product(range(N), repeat=n))
    pos = {v: k for k, v in enumerate(idx)}
    for i in range(n):
        for j in range(i + 1, n):
            for v in idx:
                w = list(v)
                w[i], w[j] = w[j], w[i]
                T[pos[tuple(w)], pos[v]] += 1
    return T, idx, pos


def heat_kernel(n, N, t):
    T, idx, pos = swap_sum(n, N)
    return mp.exp(-n * t / 2) * mp.expm(-(t / N) * T), idx, pos


def twisted_moment(X, n, N, t):
    """E (1/N) Tr((X U_t)^n) = (1/N) sum over index loops of X^{(x)n} K contracted along the n-cycle."""
    K, idx, pos = heat_kernel(n, N, t)
    total = mp.mpc(0)
    # Tr((XU)^n) = sum_{a_1..a_n, b_1..b_n} X[a1,b1] U[b1,a2] X[a2,b2] U[b2,a3] ... U[bn,a1]
    # E[U[b1,c1] ... U[bn,cn]] = K[(b1..bn),(c1..cn)] with c_k = a_{k+1}.
    for a in idx:
        c = tuple(a[(k + 1) % n] for k in range(n))
        for b in idx:
            xprod = mp.mpf(1)
            for k in range(n):
                xprod *= X[a[k]][b[k]]
            if xprod == 0:
                continue
            total += xprod * K[pos[b], pos[c]]
    return total / N


def biane_sum(n, N, t):
    s = mp.mpf(0)
    for k in range(n):
        s += (-1) ** k * mp.binomial(N + n - 1 - k, n) * mp.binomial(n - 1, k) * mp.exp(-t * (n * n - (2 * k + 1) * n) / (2 * N))
    return mp.exp(-n * t / 2) * s / N


def ident(N):
    return [[1 if i == j else 0 for j in range(N)] for i in range(N)]


def diag(*d):
    return [[d[i] if i == j else 0 for j in range(len(d))] for i in range(len(d))]


print("// mu_n(N, t) via explicit tensor heat kernel")
for n, N, t in [(1, 3, 1), (2, 2, 1), (2, 4, 4), (3, 3, 0.25), (3, 3, 1), (3, 4, 4)]:
    v = twisted_moment(ident(N), n, N, mp.mpf(t))
    print(f"{{{n}, {N}, {t}, {mp.nstr(v.real, 20)}}},  // biane sum: {mp.nstr(biane_sum(n, N, mp.mpf(t)), 20)}")

print("// nu_n(t) for R = diag(1,1,1,-1), S = diag(1,-1,-1,-1)")
X = diag(1, -1, -1, 1)
for n, t in [(1, 0.5), (2, 1), (3, 0.5)]:
    v = twisted_moment(X, n, 4, mp.mpf(t))
    print(f"{{{n}, {t}, {mp.nstr(v.real, 20)}, {mp.nstr(v.imag, 20)}}},")

print("// F_1 for alpha = 1/2, beta = -1/2, xi = 0")
for t in [0, 0.25, 0.5, 1]:
    t = mp.mpf(t)
    print(mp.nstr(mp.exp(-t) * (0 + mp.mpf(1) / 4) - mp.mpf(1) / 4, 20))

print("// E[U_t (x) U_t] entries for N = 2, t = 0.5: ((0,0),(0,0)), ((0,1),(0,1)), ((0,1),(1,0))")
K, idx, pos = heat_kernel(2, 2, mp.mpf(0.5))
print(mp.nstr(K[0, 0], 20), mp.nstr(K[1, 1], 20), mp.nstr(K[1, 2], 20))
