"""Search for sequences showing that (j, rho) does not act properly.

If j(beta) translates further than rho(beta) while rho(gamma) translates
further than j(gamma), the exponents psi(n) balancing the two keep
mu(rho(beta^n gamma^psi)) - mu(j(beta^n gamma^psi)) bounded, where
mu(g) = d(i, g i).  Bounded gaps are a witness of non-properness; gaps
that grow linearly are what a uniformly contracting deformation gives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..lengths import base_length, _length_from_trace
from ..reps import Representation
from ..words import Word, conjugacy_representatives


def mu_matrix(M) -> np.ndarray:
    """d(i, M i) = arccosh(|M|_F^2 / 2), vectorized."""
    M = np.asarray(M, dtype=float)
    return np.arccosh(np.maximum((M ** 2).sum(axis=(-1, -2)) / 2, 1.0))


@dataclass(frozen=True)
class ProperReport:
    beta: Word
    gamma: Word
    psi: tuple
    gaps: tuple
    witness: list  # (n, psi, gap) when all gaps are <= R, else empty
    slope: float  # least-squares growth of the gaps in n

    def to_json(self):
        return {"beta": str(self.beta), "gamma": str(self.gamma),
                "table": [{"n": n + 1, "psi": int(p), "gap": g}
                          for n, (p, g) in enumerate(zip(self.psi, self.gaps))],
                "witness": [{"n": n, "psi": int(p), "gap": g} for n, p, g in self.witness],
                "slope": self.slope,
                "verdict": "violated" if self.witness else "no-witness"}


def ratio_words(j: Representation, rho: Representation, L: int = 4):
    """(argmin, argmax) of l(rho(w)) / l(j(w)) over cyclically reduced |w| <= L."""
    words = conjugacy_representatives(j.rank, L)
    r = [_length_from_trace(float(np.trace(rho.matrix(w)))) / base_length(j, w) for w in words]
    return words[int(np.argmin(r))], words[int(np.argmax(r))]


def properness_violation_search(j: Representation, rho: Representation, R: float = 2.0,
                                N: int = 12, beta: Word | None = None, gamma: Word | None = None,
                                psi_max: int | None = None) -> ProperReport:
    """Scan psi for each n <= N to minimize the gap; report a witness when
    every gap is at most R.  Truncated search: no witness is not a proof."""
    if beta is None or gamma is None:
        b, g = ratio_words(j, rho)
        beta = b if beta is None else beta
        gamma = g if gamma is None else gamma
    if psi_max is None:
        # balancing exponent ~ n (l_j(beta) - l_rho(beta)) / (l_rho(gamma) - l_j(gamma))
        lj_g = base_length(j, gamma)
        db = base_length(j, beta) - _length_from_trace(float(np.trace(rho.matrix(beta))))
        dg = _length_from_trace(float(np.trace(rho.matrix(gamma)))) - lj_g
        guess = 2 * N * abs(db) / dg + 8 if dg > 1e-9 else 4 * N
        cap = max(8, int(600 / max(lj_g, 1e-9)))  # keep matrix powers finite
        psi_max = int(min(guess, cap, 2000))
    Jb, Rb = j.matrix(beta), rho.matrix(beta)
    Jg, Rg = j.matrix(gamma), rho.matrix(gamma)
    psis = np.arange(-psi_max, psi_max + 1)

    def powers(M):
        up = [np.eye(2)]
        for _ in range(psi_max):
            up.append(up[-1] @ M)
        Mi = np.linalg.inv(M)
        down = [np.eye(2)]
        for _ in range(psi_max):
            down.append(down[-1] @ Mi)
        return np.array(down[:0:-1] + up)
    PJ, PR = powers(Jg), powers(Rg)
    best_psi, gaps = [], []
    Bj, Br = np.eye(2), np.eye(2)
    for _ in range(N):
        Bj, Br = Bj @ Jb, Br @ Rb
        d = np.abs(mu_matrix(Br @ PR) - mu_matrix(Bj @ PJ))
        # ties (e.g. rho = j) go to the smallest |psi|
        tied = np.flatnonzero(d <= d.min() + 1e-12)
        k = int(tied[np.argmin(np.abs(psis[tied]))])
        best_psi.append(int(psis[k]))
        gaps.append(float(d[k]))
    n = np.arange(1, N + 1)
    slope = float(np.polyfit(n, gaps, 1)[0]) if N > 1 else 0.0
    witness = [(int(i), p, g) for i, p, g in zip(n, best_psi, gaps)] if max(gaps) <= R else []
    return ProperReport(beta, gamma, tuple(best_psi), tuple(gaps), witness, slope)
