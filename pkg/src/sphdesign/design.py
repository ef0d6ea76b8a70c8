"""Design strength, tightness, moment identities, and distance invariance.

Strength certification never touches harmonic bases: a configuration is a
t-design exactly when the full double sum of each Gegenbauer polynomial
over its normalized Gram matrix vanishes for degrees 1..t, and those sums
are always nonnegative, so the first nonzero sum is a hard witness.
Everything is exact; a report never says "= t" unless the degree-(t+1)
sum was computed and found nonzero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .configs import GramData, PointConfig, cross_angles, gram, qdot, qneg
from .errors import (
    CountMismatch,
    DegreeCapExceeded,
    HypothesisNotMet,
    NonIntegralSolution,
)
from .gegenbauer import DEGREE_CAP, gegenbauer_poly, monomial_moment
from .scalars import QuadExt, format_scalar


@dataclass(frozen=True)
class DesignReport:
    dim: int
    size: int
    strength: int
    sums: dict  # degree -> exact QuadExt value of the double Gegenbauer sum
    exact: bool  # True when sums[strength+1] was computed and is nonzero
    tight: bool
    bound: int

    def describe(self) -> str:
        rel = "=" if self.exact else ">="
        return f"strength {rel} {self.strength}"


def tight_bound(d: int, t: int) -> int:
    """Lower bound on the size of a t-design on the (d-1)-sphere."""
    if t < 0:
        raise ValueError("t must be >= 0")
    s, rem = divmod(t, 2)
    if rem == 0:
        return math.comb(d + s - 1, s) + math.comb(d + s - 2, s - 1) if s else 1
    return 2 * math.comb(d + s - 1, s)


def gegenbauer_sums(
    g: GramData, d: int, t_max: int, degree_cap: int = DEGREE_CAP
) -> dict:
    """Exact values of sum_{x,y} G_k(<x,y>) for k = 1..t_max."""
    if t_max > degree_cap:
        raise DegreeCapExceeded(f"t_max {t_max} exceeds degree cap {degree_cap}")
    sums = {}
    for k in range(1, t_max + 1):
        poly = gegenbauer_poly(d, k, degree_cap)
        acc = QuadExt(g.size * poly.eval_fraction(Fraction(1)))
        for angle, count in g.angle_counts.items():
            acc = acc + poly.eval_quad(angle) * count
        sums[k] = acc
    return sums


def design_strength_from_gram(
    g: GramData, d: int, t_max: int, degree_cap: int = DEGREE_CAP
) -> DesignReport:
    sums = gegenbauer_sums(g, d, t_max, degree_cap)
    strength = 0
    for k in range(1, t_max + 1):
        if sums[k].sign() < 0:
            raise CountMismatch(
                f"degree-{k} sum {format_scalar(sums[k])} negative"
            )  # impossible for exact data
        if sums[k]:
            break
        strength = k
    exact = strength < t_max
    bound = tight_bound(d, strength)
    return DesignReport(
        dim=d,
        size=g.size,
        strength=strength,
        sums=sums,
        exact=exact,
        tight=(g.size == bound),
        bound=bound,
    )


def design_strength(
    config: PointConfig, t_max: int, degree_cap: int = DEGREE_CAP
) -> DesignReport:
    return design_strength_from_gram(gram(config), config.dim, t_max, degree_cap)


def moment_check(config: PointConfig, y, ell: int):
    """Compare sum_x <y,x>^ell with the degree-ell design moment.

    For a configuration on the sphere of squared radius k the predictions
    are (k/d) |D| <y,y>, (3k^2/(d(d+2))) |D| <y,y>^2 and
    (15k^3/(d(d+2)(d+4))) |D| <y,y>^3 for ell = 2, 4, 6.
    """
    if ell not in (2, 4, 6):
        raise ValueError("moment degree must be 2, 4 or 6")
    y = tuple(QuadExt.of(c) for c in y)
    d = config.dim
    k = config.norm2
    yy = qdot(y, y)
    lhs = QuadExt(0)
    for p in config.points:
        lhs = lhs + qdot(y, p) ** ell
    factor = {
        2: QuadExt(Fraction(1, d)) * k,
        4: QuadExt(Fraction(3, d * (d + 2))) * k * k,
        6: QuadExt(Fraction(15, d * (d + 2) * (d + 4))) * k * k * k,
    }[ell]
    rhs = factor * config.size * yy ** (ell // 2)
    return lhs, rhs, lhs == rhs


@dataclass(frozen=True)
class ValencyTable:
    source_label: str
    target_label: str
    case: str  # "i" or "ii"
    rows: dict  # angle -> count (includes the angle -1 row in case ii)
    corrections: dict = field(compare=False, default_factory=dict)

    def total(self) -> int:
        return sum(self.rows.values())


def _cross_counts(source: PointConfig, target: PointConfig) -> list[dict]:
    """Per-source-point multiset of normalized angles to distinct targets.

    Pairs where the target point literally equals the source point are
    excluded (they are not angles).  Integer numpy path when both
    configurations have rational coordinates.
    """
    import numpy as np

    fs = source.rational_matrix()
    ft = target.rational_matrix()
    if fs is not None and ft is not None and source.norm2.is_rational:
        ms, dens = fs
        mt, dent = ft
        prod = ms @ mt.T
        scale = Fraction(1, dens * dent) / source.norm2.rational_value()
        same = (ms[:, None, :] * dent == mt[None, :, :] * dens).all(axis=-1)
        qmap: dict[int, QuadExt] = {}
        out = []
        for i in range(source.size):
            vals, cnts = np.unique(prod[i][~same[i]], return_counts=True)
            row = {}
            for raw, c in zip(vals.tolist(), cnts.tolist()):
                q = qmap.get(raw)
                if q is None:
                    q = QuadExt(raw * scale)
                    qmap[raw] = q
                row[q] = c
            out.append(row)
        return out

    cross = cross_angles(source, target)
    out = []
    for i, p in enumerate(source.points):
        row: dict = {}
        for j, q in enumerate(target.points):
            if p == target.points[j]:
                continue
            v = cross[i][j]
            row[v] = row.get(v, 0) + 1
        out.append(row)
    return out


def _solve_vandermonde(angles, rhs):
    """Exact solve of V^T p = rhs with V the (angle^lam) Vandermonde matrix."""
    s = len(angles)
    mat = [[QuadExt.of(a) ** lam for a in angles] for lam in range(s)]
    vec = [QuadExt.of(v) for v in rhs]
    # Gaussian elimination over the quadratic field
    for col in range(s):
        piv = next((r for r in range(col, s) if mat[r][col]), None)
        if piv is None:
            raise CountMismatch("singular Vandermonde system (repeated angle?)")
        mat[col], mat[piv] = mat[piv], mat[col]
        vec[col], vec[piv] = vec[piv], vec[col]
        inv = mat[col][col]
        mat[col] = [x / inv for x in mat[col]]
        vec[col] = vec[col] / inv
        for r in range(s):
            if r != col and mat[r][col]:
                f = mat[r][col]
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[col])]
                vec[r] = vec[r] - f * vec[col]
    return vec


def valencies(
    source: PointConfig,
    target: PointConfig,
    target_report: DesignReport | None = None,
) -> ValencyTable:
    """Counts of target points at each inner product from any source point.

    Solved exactly from the moment system of the distance-invariance
    theorem and verified by direct counting from every source point.
    Non-integral or negative solved counts are reported as a structured
    nonexistence signal.
    """
    if source.norm2 != target.norm2 or source.ambient != target.ambient:
        raise HypothesisNotMet("source and target must live on the same sphere")
    d = target.dim
    same = source.point_set() == target.point_set()
    anti = source.point_set() == frozenset(qneg(p) for p in target.points)
    if not same and source.point_set() & target.point_set():
        raise HypothesisNotMet("source and target must be equal or disjoint")

    row_counts = _cross_counts(source, target)
    realized = set()
    for counts in row_counts:
        realized.update(counts)
    angles = sorted(realized, key=lambda v: (v.r, v.a, v.b))
    s = len(angles)

    # target_report.strength is always a verified lower bound; recompute with
    # a large enough degree budget when the caller's report is too shallow.
    if target_report is None or target_report.strength < s - 1:
        target_report = design_strength_from_gram(
            gram(target), d, min(max(s - 1, 1), DEGREE_CAP)
        )
    t_avail = target_report.strength

    minus_one = QuadExt(-1)
    if s - 1 <= t_avail:
        case = "i"
        unknowns = angles
        lams = range(s)
    elif s - 2 <= t_avail and anti:
        case = "ii"
        unknowns = [a for a in angles if a != minus_one]
        lams = range(s - 1)
    else:
        raise HypothesisNotMet(
            f"{s} realized angles but target strength {t_avail} fits neither case"
        )

    rhs = []
    for lam in lams:
        val = QuadExt(Fraction(target.size) * monomial_moment(d, lam))
        if same:
            val = val - 1
        if case == "ii" and anti:
            val = val - QuadExt((-1) ** lam)
        rhs.append(val)
    solved = _solve_vandermonde(unknowns, rhs)

    rows = {}
    for a, v in zip(unknowns, solved):
        if not v.is_rational or v.a.denominator != 1 or v.a < 0:
            raise NonIntegralSolution(
                f"valency at angle {format_scalar(a)} solves to {format_scalar(v)}",
                values={format_scalar(a): format_scalar(v)},
            )
        rows[a] = int(v.a)
    if case == "ii":
        rows[minus_one] = 1

    # direct verification from every source point
    for i, counts in enumerate(row_counts):
        if counts != rows:
            raise CountMismatch(
                f"direct count from source point {i} disagrees with solve"
            )

    corrections = {"self": int(same), "antipode": int(case == "ii" and anti)}
    return ValencyTable(
        source_label=source.label,
        target_label=target.label,
        case=case,
        rows=rows,
        corrections=corrections,
    )
