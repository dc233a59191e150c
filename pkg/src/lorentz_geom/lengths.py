"""Translation-length functionals on words: length ratios, dlambda and the
word-level admissibility test."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonHyperbolicBase
from .lie import translation_length
from .reps import Cocycle, Representation, cocycle_matrices, cocycle_table
from .words import Word, conjugacy_representatives

HYP_TOL = 1e-10


def _length_from_trace(tr):
    t = abs(tr) / 2
    return 2 * math.acosh(t) if t > 1 + HYP_TOL else 0.0


def word_length(rep: Representation, w: Word) -> float:
    return translation_length(rep(w))


def base_length(j: Representation, w: Word) -> float:
    tr = float(np.trace(j.matrix(w)))
    if abs(tr) <= 2 + HYP_TOL:
        raise NonHyperbolicBase(f"j({w}) is not hyperbolic")
    return _length_from_trace(tr)


@dataclass(frozen=True)
class RatioReport:
    value: float
    word: Word
    table: tuple  # (word, length under j, length under rho)

    def to_json(self):
        return {"value": self.value, "word": str(self.word),
                "table": [[str(w), a, b] for w, a, b in self.table]}


def length_ratio_sup(j: Representation, rho: Representation, L: int) -> RatioReport:
    """max over cyclically reduced |w| <= L of l(rho(w)) / l(j(w))."""
    best, arg, rows = -1.0, None, []
    for w in conjugacy_representatives(j.rank, L):
        lj = base_length(j, w)
        lr = _length_from_trace(float(np.trace(rho.matrix(w))))
        ratio = lr / lj
        rows.append((w, lj, lr))
        if ratio > best + 1e-15:
            best, arg = ratio, w
    return RatioReport(best, arg, tuple(rows))


def length_ratio_inf(j: Representation, rho: Representation, L: int):
    best, arg = math.inf, None
    for w in conjugacy_representatives(j.rank, L):
        ratio = _length_from_trace(float(np.trace(rho.matrix(w)))) / base_length(j, w)
        if ratio < best - 1e-15:
            best, arg = ratio, w
    return best, arg


def dlambda(j: Representation, u: Cocycle, w: Word) -> float:
    """First-order change of the translation length of exp(t u(w)) j(w)."""
    U, J = cocycle_matrices(u, w)
    tr = np.trace(J)
    if abs(tr) <= 2 + HYP_TOL:
        raise NonHyperbolicBase(f"j({w}) is not hyperbolic")
    return float(2 * np.sign(tr) * np.trace(U @ J) / math.sqrt(tr * tr - 4))


@dataclass(frozen=True)
class AdmissibilityReport:
    """Three-valued word test.  Only a necessary condition is checked: a
    certified verdict means every word up to length L has dlambda/length
    below -eps, which cannot certify the infinite condition."""

    verdict: str  # certified-negative-slope | violated | inconclusive
    max_slope: float
    min_slope: float
    argmax: Word
    argmin: Word
    witness: Word | None
    opposite_certified: bool
    margins: tuple  # (L', max slope over words up to L') for L' <= L

    def to_json(self):
        return {
            "verdict": self.verdict,
            "max_slope": self.max_slope,
            "min_slope": self.min_slope,
            "argmax": str(self.argmax),
            "argmin": str(self.argmin),
            "witness": None if self.witness is None else str(self.witness),
            "opposite_certified": self.opposite_certified,
            "margins": [list(m) for m in self.margins],
            "note": "word-length truncated necessary-condition test",
        }


def dlambda_many(u: Cocycle, L: int):
    """(words, dlambda, length under j) for the conjugacy representatives up to L."""
    words = conjugacy_representatives(u.rank, L)
    allw, U, J = cocycle_table(u, L)
    index = {w.letters: i for i, w in enumerate(allw)}
    sel = np.array([index[w.letters] for w in words])
    U, J = U[sel], J[sel]
    tr = np.trace(J, axis1=1, axis2=2)
    if np.any(np.abs(tr) <= 2 + HYP_TOL):
        bad = words[int(np.argmin(np.abs(tr)))]
        raise NonHyperbolicBase(f"j({bad}) is not hyperbolic")
    dl = 2 * np.sign(tr) * np.trace(U @ J, axis1=1, axis2=2) / np.sqrt(tr * tr - 4)
    return words, dl, 2 * np.arccosh(np.abs(tr) / 2)


def admissibility_test(j: Representation, u: Cocycle, L: int = 6, eps: float = 1e-6,
                       zero_tol: float = 1e-9) -> AdmissibilityReport:
    words, dl, lengths = dlambda_many(u, L)
    slopes = dl / lengths
    imax, imin = int(np.argmax(slopes)), int(np.argmin(slopes))
    hi, lo = float(slopes[imax]), float(slopes[imin])
    margins = []
    for ell in range(1, L + 1):
        sel = [s for w, s in zip(words, slopes) if len(w) <= ell]
        if sel:
            margins.append((ell, float(max(sel))))
    witness = None
    if hi < -eps:
        verdict = "certified-negative-slope"
    elif hi >= -zero_tol and lo <= zero_tol:
        # some word is non-decreasing for u and some for -u
        verdict = "violated"
        witness = words[imax] if abs(hi) <= abs(lo) else words[imin]
    else:
        verdict = "inconclusive"
    return AdmissibilityReport(verdict, hi, lo, words[imax], words[imin], witness,
                               lo > eps, tuple(margins))
