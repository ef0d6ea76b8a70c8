"""Derived codes of a configuration with respect to a functional.

Two modes:

* ``unit_sphere``: the classical derived code at each inner-product level
  of a direction not (anti)parallel to any point; points reproject to the
  sphere one dimension down.
* ``minimal_type``: the level sets {0, +-1} of a minimal-type functional,
  recentred and rescaled back onto the unit sphere (still orthogonal to
  the functional, hence again one dimension down).

Level Gram matrices are always computed exactly through the angle map
from the parent configuration, so no orthonormal frame of the complement
is ever materialized.  A per-level coordinate model is attached whenever
one exists inside a single quadratic extension; checks that only need
angles run off the Gram data regardless.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .configs import GramData, PointConfig, gram, qdot
from .design import DesignReport, design_strength_from_gram
from .errors import (
    AlphaInD,
    DivisionByZero,
    IncompatibleRadicands,
    InvariantViolation,
    LevelValueOutOfRange,
    NormalizationSingular,
    StrengthShortfall,
)
from .gegenbauer import DEGREE_CAP
from .scalars import QuadExt, format_scalar, quad_sqrt


def derived_angle_map(beta_i, beta_j, gamma):
    """Angle between derived-level points from a parent angle gamma.

    (gamma - b_i b_j) / sqrt((1 - b_i^2)(1 - b_j^2)), computed exactly.
    """
    bi, bj, g = QuadExt.of(beta_i), QuadExt.of(beta_j), QuadExt.of(gamma)
    den2 = (1 - bi * bi) * (1 - bj * bj)
    if not den2:
        raise DivisionByZero("derived angle map needs |beta| < 1")
    num = g - bi * bj
    if den2.is_rational:
        return num / quad_sqrt(den2.rational_value())
    raise IncompatibleRadicands(
        f"normalization {format_scalar(den2)} is not a rational square"
    )


@dataclass(frozen=True)
class DerivedLevel:
    beta: QuadExt  # level label: the declared value of <alpha, x>
    effective_beta: QuadExt  # cosine of the level on the unit sphere
    indices: tuple[int, ...]  # positions in the parent configuration
    dim: int  # sphere dimension of the level (parent dim - 1)
    gram: GramData
    config: PointConfig | None  # coordinate model, when representable

    @property
    def size(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class DerivedFamily:
    mode: str
    alpha: tuple[QuadExt, ...]  # at the scale it was supplied
    alpha_scale: str
    level_values: tuple[QuadExt, ...]
    levels: dict
    dim: int  # derived sphere dimension (parent dim - 1)
    parent_label: str
    parent_size: int

    def level(self, beta) -> DerivedLevel:
        return self.levels[QuadExt.of(beta)]


def _level_gram(parent_gram, indices, eff_beta_sq, den_sq):
    """Gram of one level through the angle map, in exact arithmetic.

    Same-level map: xi = (gamma - eff_beta_sq) / (1 - eff_beta_sq), with
    everything rational-linear in the parent angle gamma.
    """
    n = len(indices)
    one = QuadExt(1)
    entries = []
    cache: dict = {}
    for a in range(n):
        row = []
        for b in range(n):
            if b < a:
                row.append(entries[b][a])
                continue
            if a == b:
                row.append(one)
                continue
            g = parent_gram.entries[indices[a]][indices[b]]
            v = cache.get(g)
            if v is None:
                v = (g - eff_beta_sq) / den_sq
                cache[g] = v
            row.append(v)
        entries.append(row)
    counts: dict = {}
    for a in range(n):
        for b in range(n):
            if a != b:
                v = entries[a][b]
                counts[v] = counts.get(v, 0) + 1
    try:
        angles = tuple(sorted(counts))
    except IncompatibleRadicands:
        angles = tuple(sorted(counts, key=lambda q: (q.r, q.a, q.b)))
    return GramData(
        size=n,
        entries=tuple(tuple(r) for r in entries),
        angles=angles,
        angle_counts=counts,
    )


def _coordinate_model(config, indices, shift_vec, sigma, dim, label):
    """Projected coordinates (x - shift) * sigma, or None if not single-radical."""
    try:
        pts = []
        for idx in indices:
            p = config.points[idx]
            pts.append(tuple((x - s) * sigma for x, s in zip(p, shift_vec)))
        return PointConfig(dim=dim, points=tuple(pts), norm2=QuadExt(1), label=label)
    except (IncompatibleRadicands, InvariantViolation):
        return None


def derive(
    config: PointConfig,
    alpha,
    mode: str,
    alpha_scale: str = "unit",
) -> DerivedFamily:
    """Split a configuration into derived codes along a functional.

    ``alpha_scale`` declares the scale of the supplied vector: "unit"
    means it is calibrated against the unit-normalized configuration,
    "config" against raw coordinates (inner products in {0, +-norm2} for
    the minimal_type mode).
    """
    if mode not in ("unit_sphere", "minimal_type"):
        raise ValueError(f"unknown mode {mode!r}")
    alpha = tuple(QuadExt.of(c) for c in alpha)
    if len(alpha) != config.ambient:
        raise InvariantViolation(
            f"alpha has {len(alpha)} coordinates, ambient is {config.ambient}"
        )
    d = config.dim
    k = config.norm2
    aa = qdot(alpha, alpha)
    raw = [qdot(alpha, p) for p in config.points]
    g = gram(config)

    if mode == "minimal_type":
        target_aa = (
            QuadExt(Fraction(d + 2, 3)) if alpha_scale == "unit" else k * Fraction(d + 2, 3)
        )
        if aa != target_aa:
            raise LevelValueOutOfRange(
                f"<alpha,alpha> = {format_scalar(aa)}, expected {format_scalar(target_aa)}"
            )
        # classify <alpha, x> against {0, +-1} at unit scale
        levels_of = []
        unit_sq = k if alpha_scale == "unit" else k * k * 1
        for i, t in enumerate(raw):
            if not t:
                levels_of.append(QuadExt(0))
                continue
            tsq = t * t
            if tsq == unit_sq:
                levels_of.append(QuadExt(t.sign()))
            else:
                raise LevelValueOutOfRange(
                    f"<alpha, x_{i}> has square {format_scalar(tsq)}, "
                    "not a declared level",
                    point=i,
                    value=t,
                )
        betas = [QuadExt(v) for v in (1, 0, -1)]
        betas = [b for b in betas if any(l == b for l in levels_of)]
        coef = Fraction(3, d + 2)

        def eff_sq(b):
            return QuadExt(coef) * b * b

        # covariant functional: <alpha_c, x> in {0, +-k}; projection shift
        # (3 beta/(d+2)) alpha_c stays in the coordinate field
        alpha_c = None
        try:
            if alpha_scale == "config":
                alpha_c = alpha
            elif k.is_rational:
                sk = quad_sqrt(k.rational_value())
                alpha_c = tuple(x * sk for x in alpha)
        except IncompatibleRadicands:
            alpha_c = None
    else:
        if not aa:
            raise InvariantViolation("alpha must be nonzero")
        # unit-scale level of each point: t / sqrt(<a,a> * k)
        den2 = aa * k
        if not den2.is_rational:
            raise IncompatibleRadicands(
                "level normalization is not a rational square"
            )
        den = quad_sqrt(den2.rational_value())
        levels_of = []
        for i, t in enumerate(raw):
            b = t / den
            if b * b == 1:
                raise AlphaInD(f"point {i} is (anti)parallel to alpha")
            levels_of.append(b)
        betas = sorted(set(levels_of), key=lambda q: (q.r, q.a, q.b), reverse=True)

        def eff_sq(b):
            return b * b

    level_map = {}
    for b in betas:
        idx = tuple(i for i, l in enumerate(levels_of) if l == b)
        esq = eff_sq(b)
        den_sq = QuadExt(1) - esq
        if den_sq.sign() <= 0:
            raise NormalizationSingular(
                f"level {format_scalar(b)} has 1 - beta^2 = {format_scalar(den_sq)}"
            )
        lg = _level_gram(g, idx, esq, den_sq)
        model = None
        label = f"{config.label}_level_{format_scalar(b)}"
        if mode == "minimal_type" and alpha_c is not None and k.is_rational:
            shift = tuple(x * (QuadExt(coef) * b) for x in alpha_c)
            try:
                sigma = quad_sqrt(
                    (QuadExt(1) / (k * den_sq)).rational_value()
                )
                model = _coordinate_model(config, idx, shift, sigma, d - 1, label)
            except IncompatibleRadicands:
                model = None
        elif mode == "unit_sphere":
            model = _axis_model(config, alpha, idx, b, den_sq, d - 1, label)
        level_map[b] = DerivedLevel(
            beta=b,
            effective_beta=_eff_beta(b, esq),
            indices=idx,
            dim=d - 1,
            gram=lg,
            config=model,
        )

    return DerivedFamily(
        mode=mode,
        alpha=alpha,
        alpha_scale=alpha_scale,
        level_values=tuple(betas),
        levels=level_map,
        dim=d - 1,
        parent_label=config.label,
        parent_size=config.size,
    )


def _eff_beta(b: QuadExt, esq: QuadExt) -> QuadExt:
    if not b:
        return QuadExt(0)
    if esq.is_rational:
        v = quad_sqrt(esq.rational_value())
        return v if b.sign() > 0 else -v
    return b  # already the cosine in unit_sphere mode with exact beta


def _axis_model(config, alpha, indices, beta, den_sq, dim, label):
    """Coordinate model for unit-sphere derivation along a coordinate axis."""
    nz = [i for i, c in enumerate(alpha) if c]
    if len(nz) != 1:
        return None
    axis = nz[0]
    k = config.norm2
    if not (k.is_rational and den_sq.is_rational):
        return None
    try:
        sigma = quad_sqrt((QuadExt(1) / (k * den_sq)).rational_value())
        pts = []
        for idx in indices:
            p = config.points[idx]
            pts.append(
                tuple(x * sigma for i, x in enumerate(p) if i != axis)
            )
        return PointConfig(dim=dim, points=tuple(pts), norm2=QuadExt(1), label=label)
    except (IncompatibleRadicands, InvariantViolation):
        return None


def cross_level_angles(family: DerivedFamily, parent: PointConfig, bi, bj):
    """Realized angle set between two levels, through the exact angle map."""
    bi, bj = QuadExt.of(bi), QuadExt.of(bj)
    la, lb = family.levels[bi], family.levels[bj]
    pg = gram(parent)
    ea, eb = la.effective_beta, lb.effective_beta
    den2 = (1 - ea * ea) * (1 - eb * eb)
    if not den2.is_rational:
        raise IncompatibleRadicands("cross-level normalization not rational")
    den = quad_sqrt(den2.rational_value())
    out = set()
    for x in la.indices:
        for y in lb.indices:
            if x == y:
                continue
            # angle 1 can occur between distinct levels in boundary
            # dimensions (two parent points projecting to one derived
            # point); it is recorded like any other realized value
            out.add((pg.entries[x][y] - ea * eb) / den)
    return out


def save_family(family: DerivedFamily, directory) -> dict:
    """Write one configuration file per level plus a manifest.

    Levels without a single-radical coordinate model are recorded in the
    manifest with their exact angle data instead of a file.
    """
    import json
    import os

    from .configs import save_config

    os.makedirs(directory, exist_ok=True)
    manifest = {
        "parent": family.parent_label,
        "mode": family.mode,
        "alpha": [format_scalar(c) for c in family.alpha],
        "alpha_scale": family.alpha_scale,
        "levels": [],
    }
    for b in family.level_values:
        level = family.levels[b]
        entry = {
            "beta": format_scalar(b),
            "size": level.size,
            "dim": level.dim,
            "angles": [format_scalar(a) for a in level.gram.angles],
        }
        if level.config is not None:
            fname = f"level_{format_scalar(b).replace('/', '_')}.cfg"
            save_config(level.config, os.path.join(directory, fname))
            entry["file"] = fname
        manifest["levels"].append(entry)
    path = os.path.join(directory, "family.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return manifest


def verify_derived_strength(
    family: DerivedFamily, parent_report: DesignReport
) -> dict:
    """Check every level meets the guaranteed strength t + 1 - s.

    Returns per-level design reports; a shortfall contradicts the derived
    code theorem and therefore signals an implementation bug.
    """
    s = len(family.level_values)
    t = parent_report.strength
    needed = t + 1 - s
    reports = {}
    for b, level in family.levels.items():
        t_max = max(needed, 1)
        rep = design_strength_from_gram(
            level.gram, family.dim, min(max(t_max, 1), DEGREE_CAP)
        )
        reports[b] = rep
        if rep.strength < needed:
            raise StrengthShortfall(
                f"level {format_scalar(b)} certifies strength {rep.strength}, "
                f"theory guarantees {needed}"
            )
    return reports
