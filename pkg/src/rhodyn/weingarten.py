"""Exact Haar-measure integrals of unitary matrix-element monomials.

The moment of a balanced degree-p monomial is a double sum over the
symmetric group: delta patterns on row and column indices weighted by
the Weingarten function of the permutation mismatch. Weingarten values
are obtained numerically by inverting the Gram matrix
``G[s, t] = dim^{#cycles(s t^-1)}`` on S_p (p <= 4), which makes the
table self-validating: the defining orthogonality can be asserted to
machine precision instead of trusting transcribed rational functions.

The module also re-derives the averaged density matrix and the average
purity of evolved product states by raw moment summation on tiny
systems; these brute-force sums are the oracles the closed forms in
:mod:`rhodyn.theory` are tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations as _perms

import numpy as np

from .bipartite import BipartiteDims
from .linalg import as_generator, hermitize, sample_haar_unitary

__all__ = [
    "WeingartenTable",
    "weingarten_table",
    "haar_moment",
    "mc_haar_moment",
    "brute_force_mean_density",
    "brute_force_purity",
]

_MAX_DEGREE = 4


def _compose(s, t):
    """(s o t)(i) = s[t[i]]."""
    return tuple(s[t[i]] for i in range(len(s)))


def _inverse(s):
    inv = [0] * len(s)
    for i, v in enumerate(s):
        inv[v] = i
    return tuple(inv)


def _cycle_type(s) -> tuple:
    """Cycle lengths of a permutation, sorted descending."""
    seen = [False] * len(s)
    lengths = []
    for i in range(len(s)):
        if seen[i]:
            continue
        l, j = 0, i
        while not seen[j]:
            seen[j] = True
            j = s[j]
            l += 1
        lengths.append(l)
    return tuple(sorted(lengths, reverse=True))


@dataclass(frozen=True)
class WeingartenTable:
    """Weingarten values per cycle type at fixed degree and dimension."""

    degree: int
    dim: int
    values: dict

    def value(self, perm) -> float:
        return self.values[_cycle_type(perm)]

    def orthogonality_defect(self) -> float:
        """Max deviation from sum_t dim^{#c(s t^-1)} Wg(t) = [s == id]."""
        elements = list(_perms(range(self.degree)))
        worst = 0.0
        for s in elements:
            total = sum(self.dim ** len(_cycle_type(_compose(s, _inverse(t)))) * self.value(t)
                        for t in elements)
            target = 1.0 if s == tuple(range(self.degree)) else 0.0
            worst = max(worst, abs(total - target))
        return worst


def weingarten_table(degree: int, dim: int) -> WeingartenTable:
    """Invert the Gram matrix of permutation overlaps on S_degree.

    Requires ``dim >= degree`` so the Gram matrix is invertible. Values
    must come out constant on cycle types; a spread above 1e-12 raises.
    """
    if not 1 <= degree <= _MAX_DEGREE:
        raise ValueError(f"degree must be in 1..{_MAX_DEGREE}")
    if dim < degree:
        raise ValueError("dimension must be >= degree (singular Gram matrix)")
    elements = list(_perms(range(degree)))
    size = len(elements)
    gram = np.empty((size, size))
    for i, s in enumerate(elements):
        for j, t in enumerate(elements):
            gram[i, j] = float(dim) ** len(_cycle_type(_compose(s, _inverse(t))))
    inv = np.linalg.inv(gram)

    ident = tuple(range(degree))
    id_col = elements.index(ident)
    values: dict = {}
    spread: dict = {}
    for i, s in enumerate(elements):
        # Wg(s) = G^{-1}[s, id] since s o id^{-1} = s
        ctype = _cycle_type(s)
        val = inv[i, id_col]
        if ctype in values:
            spread[ctype] = max(spread[ctype], abs(val - values[ctype]))
        else:
            values[ctype] = val
            spread[ctype] = 0.0
    if max(spread.values()) > 1e-12:
        raise ArithmeticError("Weingarten values not constant on cycle types")
    return WeingartenTable(degree=degree, dim=dim, values=values)


_TABLE_CACHE: dict = {}


def _table(degree: int, dim: int) -> WeingartenTable:
    key = (degree, dim)
    if key not in _TABLE_CACHE:
        _TABLE_CACHE[key] = weingarten_table(degree, dim)
    return _TABLE_CACHE[key]


def haar_moment(a, b, ap, bp, dim: int) -> float:
    """Average of ``prod_i U[a_i, b_i] * prod_i conj(U[ap_i, bp_i])``.

    Sum over permutation pairs (s, t) of the row/column delta patterns
    times ``Wg(dim, s t^-1)``. Zero whenever the index multisets of the
    starred and unstarred factors differ.
    """
    a, b, ap, bp = tuple(a), tuple(b), tuple(ap), tuple(bp)
    p = len(a)
    if not (len(b) == len(ap) == len(bp) == p):
        raise ValueError("index tuples must share one length")
    if not 1 <= p <= _MAX_DEGREE:
        raise ValueError(f"degree must be in 1..{_MAX_DEGREE}")
    table = _table(p, dim)
    elements = list(_perms(range(p)))
    row_matches = [s for s in elements if all(a[i] == ap[s[i]] for i in range(p))]
    if not row_matches:
        return 0.0
    col_matches = [t for t in elements if all(b[i] == bp[t[i]] for i in range(p))]
    total = 0.0
    for s in row_matches:
        for t in col_matches:
            total += table.value(_compose(s, _inverse(t)))
    return total


def mc_haar_moment(a, b, ap, bp, dim: int, samples: int, rng,
                   batch: int = 512) -> tuple:
    """Monte Carlo estimate of :func:`haar_moment` with its standard error.

    Validation oracle only; the exact sum is what production code uses.
    """
    if samples < 1000:
        raise ValueError("need at least 1e3 samples for a meaningful error bar")
    a, b, ap, bp = (np.asarray(ix, dtype=int) for ix in (a, b, ap, bp))
    gen = as_generator(rng)
    chunks = []
    done = 0
    while done < samples:
        size = min(batch, samples - done)
        u = np.stack([sample_haar_unitary(dim, gen) for _ in range(size)])
        mono = np.prod(u[:, a, b], axis=1) * np.prod(u[:, ap, bp].conj(), axis=1)
        chunks.append(mono.real)
        done += size
    vals = np.concatenate(chunks)
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(samples))


def _canonical(pattern) -> tuple:
    """Relabel indices by first appearance; moments only see the pattern."""
    mapping: dict = {}
    out = []
    for v in pattern:
        if v not in mapping:
            mapping[v] = len(mapping)
        out.append(mapping[v])
    return tuple(out)


def brute_force_mean_density(a0: np.ndarray, energies, t: float,
                             dims: BipartiteDims) -> np.ndarray:
    """Eigenvector-averaged density matrix by raw degree-2 moment summation.

    Tiny systems only (total dimension <= 12). Independent of
    :func:`rhodyn.theory.mean_reduced_density`, which it must reproduce
    to 1e-10.
    """
    total = dims.total
    if total > 12:
        raise ValueError("brute-force summation is limited to total dimension <= 12")
    a0 = np.asarray(a0, dtype=np.complex128)
    energies = np.asarray(energies, dtype=float)
    if energies.size != total:
        raise ValueError("spectrum size must equal the total dimension")
    n, m = dims.n, dims.m
    phases = np.exp(-1j * energies * t)
    nz = [(k, mu, a0[k, mu]) for k in range(n) for mu in range(m) if a0[k, mu] != 0]
    cache: dict = {}

    def moment(aa, bb, aap, bbp):
        key = (_canonical(aa + aap), _canonical(bb + bbp))
        if key not in cache:
            cache[key] = haar_moment(aa, bb, aap, bbp, total)
        return cache[key]

    rho = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        for jp in range(n):
            acc = 0.0 + 0.0j
            for nu in range(m):
                row = j * m + nu
                rowp = jp * m + nu
                for k, mu, amp in nz:
                    col = k * m + mu
                    for kp, mup, ampp in nz:
                        colp = kp * m + mup
                        weight = amp * np.conj(ampp)
                        for m1 in range(total):
                            for m2 in range(total):
                                w = moment((row, colp), (m1, m2), (rowp, col), (m2, m1))
                                if w != 0.0:
                                    acc += weight * phases[m1] * np.conj(phases[m2]) * w
            rho[j, jp] = acc
    return hermitize(rho)


def brute_force_purity(a0: np.ndarray, energies, t: float, dims: BipartiteDims) -> float:
    """Average purity of an evolved product state by degree-4 summation.

    The 576-term permutation sum per index assignment is memoized on the
    relabeling-invariant index pattern. Product initial states only
    (single unit coefficient); total dimension <= 6.
    """
    total = dims.total
    if total > 6:
        raise ValueError("brute-force purity is limited to total dimension <= 6")
    a0 = np.asarray(a0, dtype=np.complex128)
    nz = np.argwhere(np.abs(a0) > 1e-14)
    if len(nz) != 1 or abs(abs(a0[tuple(nz[0])]) - 1.0) > 1e-12:
        raise ValueError("brute-force purity supports product initial states only")
    origin = int(nz[0][0]) * dims.m + int(nz[0][1])
    energies = np.asarray(energies, dtype=float)
    if energies.size != total:
        raise ValueError("spectrum size must equal the total dimension")
    n, m = dims.n, dims.m
    phases = np.exp(-1j * energies * t)
    cache: dict = {}

    def moment(aa, bb, aap, bbp):
        key = (_canonical(aa + aap), _canonical(bb + bbp))
        if key not in cache:
            cache[key] = haar_moment(aa, bb, aap, bbp, total)
        return cache[key]

    acc = 0.0 + 0.0j
    for j in range(n):
        for jp in range(n):
            for nu in range(m):
                for nup in range(m):
                    r1 = j * m + nu
                    r2 = jp * m + nu
                    r3 = jp * m + nup
                    r4 = j * m + nup
                    for m1 in range(total):
                        for m2 in range(total):
                            for m3 in range(total):
                                for m4 in range(total):
                                    w = moment((r1, origin, r3, origin),
                                               (m1, m2, m3, m4),
                                               (origin, r2, origin, r4),
                                               (m1, m2, m3, m4))
                                    if w != 0.0:
                                        acc += (phases[m1] * np.conj(phases[m2])
                                                * phases[m3] * np.conj(phases[m4]) * w)
    if abs(acc.imag) > 1e-10:
        raise ArithmeticError("purity sum came out non-real")
    return float(acc.real)
