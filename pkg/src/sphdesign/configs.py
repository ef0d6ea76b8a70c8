"""Exact point configurations: the built-in catalog, Gram data, file I/O.

Points live on a sphere of squared radius ``norm2`` (not necessarily 1);
all structural checks consume inner products divided by norm2, so no
irrational normalization of coordinates is ever required.  Configurations
whose natural model spans a proper subspace (e.g. root systems written in
an ambient R^8) keep their ambient coordinates and declare the dimension
of their affine hull as ``dim``.

The catalog covers the small instances the theory is exercised on; the
larger laminated-lattice configurations are supported through file
ingestion only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .codes import BinaryCode, nordstrom_robinson
from .errors import (
    IncompatibleRadicands,
    InvariantViolation,
    ParseError,
    UnknownCatalogName,
)
from .scalars import QuadExt, format_scalar, parse_scalar

Point = tuple[QuadExt, ...]

_Q0 = QuadExt(0)


def qdot(u: Point, v: Point) -> QuadExt:
    acc = _Q0
    for a, b in zip(u, v):
        if a.b == 0 and a.a == 0:
            continue
        if b.b == 0 and b.a == 0:
            continue
        acc = acc + a * b
    return acc


def qneg(p: Point) -> Point:
    return tuple(-x for x in p)


@dataclass(frozen=True)
class PointConfig:
    dim: int
    points: tuple[Point, ...]
    norm2: QuadExt
    label: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise InvariantViolation(f"dim must be >= 1, got {self.dim}")
        if not self.points:
            raise InvariantViolation("empty point list")
        ambient = len(self.points[0])
        if ambient < self.dim:
            raise InvariantViolation(
                f"ambient length {ambient} below declared dim {self.dim}"
            )
        seen = set()
        for i, p in enumerate(self.points):
            if len(p) != ambient:
                raise InvariantViolation(f"point {i} has length {len(p)} != {ambient}")
            if p in seen:
                raise InvariantViolation(f"duplicate point at index {i}")
            seen.add(p)
            n = qdot(p, p)
            if n != self.norm2:
                raise InvariantViolation(
                    f"point {i} has squared norm {format_scalar(n)} != "
                    f"{format_scalar(self.norm2)}"
                )

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def ambient(self) -> int:
        return len(self.points[0])

    def point_set(self) -> frozenset:
        return frozenset(self.points)

    def is_antipodal(self) -> bool:
        s = self.point_set()
        return all(qneg(p) in s for p in self.points)

    def negated(self, label: str | None = None) -> "PointConfig":
        return PointConfig(
            dim=self.dim,
            points=tuple(qneg(p) for p in self.points),
            norm2=self.norm2,
            label=label if label is not None else f"-{self.label}",
        )

    def rational_matrix(self):
        """(integer numpy matrix, scale) with point = row/scale, or None.

        Available when every coordinate is rational; products of scaled
        integer rows are exact, so numpy integer arithmetic can stand in
        for Fraction arithmetic on the hot paths.  The returned matrix is
        shared and must be treated as read-only.
        """
        cached = _rational_matrix_cache.get(id(self))
        if cached is not None and cached[0] is self:
            return cached[1]
        if any(x.b != 0 for p in self.points for x in p):
            result = None
        else:
            den = 1
            for p in self.points:
                for x in p:
                    den = den * x.a.denominator // _gcd(den, x.a.denominator)
            mat = np.array(
                [[int(x.a * den) for x in p] for p in self.points], dtype=np.int64
            )
            result = (mat, den)
        if len(_rational_matrix_cache) > 64:
            _rational_matrix_cache.clear()
        _rational_matrix_cache[id(self)] = (self, result)
        return result


_rational_matrix_cache: dict = {}


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


@dataclass(frozen=True)
class GramData:
    """Normalized inner products <x,y>/norm2 of a configuration."""

    size: int
    entries: tuple[tuple[QuadExt, ...], ...]
    angles: tuple[QuadExt, ...]  # sorted distinct off-diagonal values
    angle_counts: dict = field(compare=False, repr=False, default_factory=dict)

    def row_angle_counts(self, i: int) -> dict:
        counts: dict = {}
        for j, v in enumerate(self.entries[i]):
            if j == i:
                continue
            counts[v] = counts.get(v, 0) + 1
        return counts


def gram(config: PointConfig) -> GramData:
    """Exact Gram data; integer fast path when all coordinates are rational."""
    cached = _gram_cache.get(id(config))
    if cached is not None and cached[0] is config:
        return cached[1]
    result = _compute_gram(config)
    if len(_gram_cache) > 64:
        _gram_cache.clear()
    _gram_cache[id(config)] = (config, result)
    return result


_gram_cache: dict = {}


def _compute_gram(config: PointConfig) -> GramData:
    if not config.norm2:
        raise InvariantViolation("norm2 must be nonzero")
    n = config.size
    fast = config.rational_matrix()
    if fast is not None:
        mat, den = fast
        prod = mat @ mat.T
        norm2 = config.norm2.rational_value()
        scale = Fraction(1, den * den) / norm2
        cache: dict[int, QuadExt] = {}

        def val(raw: int) -> QuadExt:
            q = cache.get(raw)
            if q is None:
                q = QuadExt(raw * scale)
                cache[raw] = q
            return q

        entries = tuple(
            tuple(val(int(prod[i, j])) for j in range(n)) for i in range(n)
        )
    else:
        entries = []
        for i in range(n):
            row = []
            for j in range(n):
                if j < i:
                    row.append(entries[j][i])
                else:
                    row.append(qdot(config.points[i], config.points[j]) / config.norm2)
            entries.append(row)
        entries = tuple(tuple(r) for r in entries)
    counts: dict = {}
    for i in range(n):
        if entries[i][i] != 1:
            raise InvariantViolation(f"diagonal entry {i} is not 1")
        for j in range(n):
            if i != j:
                v = entries[i][j]
                counts[v] = counts.get(v, 0) + 1
    for v in counts:
        if v * v > 1:
            raise InvariantViolation(f"angle {format_scalar(v)} outside [-1, 1]")
    try:
        angles = tuple(sorted(counts))
    except IncompatibleRadicands:
        angles = tuple(sorted(counts, key=lambda q: (q.r, q.a, q.b)))
    return GramData(size=n, entries=entries, angles=angles, angle_counts=counts)


def cross_angles(src: PointConfig, tgt: PointConfig):
    """Matrix of normalized inner products between two same-sphere configs."""
    if src.norm2 != tgt.norm2:
        raise InvariantViolation("cross angles need a common norm2")
    return tuple(
        tuple(qdot(p, q) / src.norm2 for q in tgt.points) for p in src.points
    )


def antipodal_split(config: PointConfig) -> tuple[PointConfig, bool]:
    """One representative per antipodal pair, if the set is antipodal.

    The representative of {p, -p} is the one whose first nonzero
    coordinate is positive, so the split is deterministic.
    """
    s = config.point_set()
    if not all(qneg(p) in s for p in config.points):
        return config, False
    reps = []
    for p in config.points:
        for x in p:
            sg = x.sign()
            if sg:
                break
        else:
            sg = 1
        if sg > 0:
            reps.append(p)
    return (
        PointConfig(
            dim=config.dim,
            points=tuple(reps),
            norm2=config.norm2,
            label=f"{config.label}_half" if config.label else "half",
        ),
        True,
    )


# -- built-in catalog ----------------------------------------------------------

CATALOG_NAMES = (
    "hexagon",
    "icosahedron",
    "d4_min",
    "e6_min",
    "e7_min",
    "e8_min",
    "etf_7_28_design",
    "mub16",
)


def _q(x) -> QuadExt:
    return QuadExt(Fraction(x))


def _hexagon() -> PointConfig:
    h = QuadExt(0, Fraction(1, 2), 3)  # sqrt(3)/2
    half = _q(Fraction(1, 2))
    pts = [
        (_q(1), _q(0)),
        (half, h),
        (-half, h),
        (_q(-1), _q(0)),
        (-half, -h),
        (half, -h),
    ]
    return PointConfig(dim=2, points=tuple(pts), norm2=_q(1), label="hexagon")


def _icosahedron() -> PointConfig:
    phi = QuadExt(Fraction(1, 2), Fraction(1, 2), 5)
    zero, one = _q(0), _q(1)
    pts = []
    for s1, s2 in itertools.product((1, -1), repeat=2):
        a, b = one * s1, phi * s2
        pts.append((zero, a, b))
        pts.append((a, b, zero))
        pts.append((b, zero, a))
    norm2 = QuadExt(Fraction(5, 2), Fraction(1, 2), 5)  # 1 + phi^2
    return PointConfig(dim=3, points=tuple(pts), norm2=norm2, label="icosahedron")


def _pair_roots(n: int):
    for i, j in itertools.combinations(range(n), 2):
        for si, sj in itertools.product((1, -1), repeat=2):
            r = [Fraction(0)] * n
            r[i], r[j] = Fraction(si), Fraction(sj)
            yield tuple(r)


def _e8_root_vectors():
    roots = [r for r in _pair_roots(8)]
    for signs in itertools.product((1, -1), repeat=8):
        if signs.count(-1) % 2 == 0:
            roots.append(tuple(Fraction(s, 2) for s in signs))
    return roots


def _frac_dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _to_points(fracs) -> tuple[Point, ...]:
    cache: dict[Fraction, QuadExt] = {}

    def conv(f: Fraction) -> QuadExt:
        q = cache.get(f)
        if q is None:
            q = QuadExt(f)
            cache[f] = q
        return q

    return tuple(tuple(conv(x) for x in p) for p in fracs)


def _d4_min() -> PointConfig:
    return PointConfig(
        dim=4, points=_to_points(_pair_roots(4)), norm2=_q(2), label="d4_min"
    )


def _e8_min() -> PointConfig:
    return PointConfig(
        dim=8, points=_to_points(_e8_root_vectors()), norm2=_q(2), label="e8_min"
    )


def _e7_min() -> PointConfig:
    fixed = tuple(Fraction(x) for x in (0, 0, 0, 0, 0, 0, 1, 1))
    roots = [r for r in _e8_root_vectors() if _frac_dot(r, fixed) == 0]
    return PointConfig(dim=7, points=_to_points(roots), norm2=_q(2), label="e7_min")


def _e6_min() -> PointConfig:
    u1 = tuple(Fraction(x) for x in (0, 0, 0, 0, 0, 1, -1, 0))
    u2 = tuple(Fraction(x) for x in (0, 0, 0, 0, 0, 0, 1, 1))
    roots = [
        r
        for r in _e8_root_vectors()
        if _frac_dot(r, u1) == 0 and _frac_dot(r, u2) == 0
    ]
    return PointConfig(dim=6, points=_to_points(roots), norm2=_q(2), label="e6_min")


def _etf_7_28() -> PointConfig:
    pts = []
    for i, j in itertools.combinations(range(8), 2):
        v = [Fraction(-1)] * 8
        v[i] = v[j] = Fraction(3)
        pts.append(tuple(v))
    pts += [tuple(-x for x in p) for p in pts]
    return PointConfig(
        dim=7, points=_to_points(pts), norm2=_q(24), label="etf_7_28_design"
    )


def _mub16() -> PointConfig:
    code = nordstrom_robinson()
    pts = []
    for i in range(16):
        v = [Fraction(0)] * 16
        v[i] = Fraction(4)
        pts.append(tuple(v))
        w = list(v)
        w[i] = Fraction(-4)
        pts.append(tuple(w))
    for word in code.words:
        pts.append(tuple(Fraction(1 if b else -1) for b in word))
    return PointConfig(dim=16, points=_to_points(pts), norm2=_q(16), label="mub16")


_BUILDERS = {
    "hexagon": _hexagon,
    "icosahedron": _icosahedron,
    "d4_min": _d4_min,
    "e6_min": _e6_min,
    "e7_min": _e7_min,
    "e8_min": _e8_min,
    "etf_7_28_design": _etf_7_28,
    "mub16": _mub16,
}

# declared (size, angle set) self-test data; angles are normalized values
_DECLARED = {
    "hexagon": (6, ("-1", "-1/2", "1/2")),
    "icosahedron": (12, ("-1", "-1/5*sqrt(5)", "1/5*sqrt(5)")),
    "d4_min": (24, ("-1", "-1/2", "0", "1/2")),
    "e6_min": (72, ("-1", "-1/2", "0", "1/2")),
    "e7_min": (126, ("-1", "-1/2", "0", "1/2")),
    "e8_min": (240, ("-1", "-1/2", "0", "1/2")),
    "etf_7_28_design": (56, ("-1", "-1/3", "1/3")),
    "mub16": (288, ("-1", "-1/4", "0", "1/4")),
}

_catalog_cache: dict[str, PointConfig] = {}


def catalog(name: str) -> PointConfig:
    """A built-in configuration, self-tested against its declared data."""
    if name not in _BUILDERS:
        raise UnknownCatalogName(
            f"unknown catalog name {name!r}; choose from {', '.join(CATALOG_NAMES)}"
        )
    cached = _catalog_cache.get(name)
    if cached is not None:
        return cached
    config = _BUILDERS[name]()
    size, angle_strs = _DECLARED[name]
    if config.size != size:
        raise InvariantViolation(f"{name}: size {config.size} != declared {size}")
    declared = tuple(parse_scalar(s) for s in angle_strs)
    realized = gram(config).angles
    if tuple(realized) != declared:
        raise InvariantViolation(f"{name}: angle set mismatch")
    _catalog_cache[name] = config
    return config


def unbiased_basis_blocks(half: PointConfig) -> list[list[int]]:
    """Partition an antipodal half into orthonormal blocks, greedily.

    Two points go in one block when their inner product is zero; every
    block is verified to have Gram = norm2 * I before it is accepted.
    Works for the real-MUB configurations where the orthogonality graph is
    a disjoint union of cocktail-party complements.
    """
    g = gram(half)
    n = half.size
    unused = list(range(n))
    width = half.dim
    blocks = []
    while unused:
        first = unused[0]
        block = [first]
        for cand in unused[1:]:
            if all(not g.entries[cand][b] for b in block):
                block.append(cand)
            if len(block) == width:
                break
        if len(block) != width:
            raise InvariantViolation(
                f"could not complete an orthonormal block (got {len(block)})"
            )
        blocks.append(block)
        unused = [i for i in unused if i not in set(block)]
    return blocks


# -- configuration file format -------------------------------------------------
#
# Line 1:   config dim=<d> [ambient=<a>] norm2=<scalar> count=<m> label=<text>
# Then m lines of ambient whitespace-separated scalars; '#' starts a comment.
# The ambient key is only needed when the coordinate model is wider than the
# affine hull (root systems kept in R^8, for instance).


def _parse_header(line: str, lineno: int):
    if not line.startswith("config"):
        raise ParseError("expected 'config' header", line=lineno)
    rest = line[len("config") :].strip()
    fields = {}
    while rest:
        if "=" not in rest:
            raise ParseError(f"bad header field near {rest!r}", line=lineno)
        key, rest = rest.split("=", 1)
        key = key.strip()
        if key == "label":
            fields["label"] = rest
            rest = ""
        else:
            parts = rest.split(None, 1)
            fields[key] = parts[0]
            rest = parts[1] if len(parts) > 1 else ""
    for req in ("dim", "norm2", "count"):
        if req not in fields:
            raise ParseError(f"header missing {req}=", line=lineno)
    try:
        dim = int(fields["dim"])
        count = int(fields["count"])
        ambient = int(fields["ambient"]) if "ambient" in fields else dim
    except ValueError as exc:
        raise ParseError(f"bad integer in header: {exc}", line=lineno) from None
    norm2 = parse_scalar(fields["norm2"], line=lineno)
    return dim, ambient, norm2, count, fields.get("label", "")


def load_config(path) -> PointConfig:
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.readlines()
    lines = []
    for idx, text in enumerate(raw, start=1):
        stripped = text.split("#", 1)[0].strip()
        if stripped:
            lines.append((idx, stripped))
    if not lines:
        raise ParseError("empty configuration file", line=1)
    lineno, header = lines[0]
    dim, ambient, norm2, count, label = _parse_header(header, lineno)
    if count < 1:
        raise ParseError("count must be >= 1", line=lineno)
    body = lines[1:]
    if len(body) != count:
        raise ParseError(
            f"expected {count} point lines, found {len(body)}",
            line=body[-1][0] if body else lineno,
        )
    points = []
    for lineno, text in body:
        tokens = text.split()
        if len(tokens) != ambient:
            raise ParseError(
                f"expected {ambient} coordinates, found {len(tokens)}", line=lineno
            )
        points.append(tuple(parse_scalar(t, line=lineno) for t in tokens))
    try:
        return PointConfig(
            dim=dim, points=tuple(points), norm2=norm2, label=label
        )
    except IncompatibleRadicands as exc:
        raise InvariantViolation(str(exc)) from exc


def save_config(config: PointConfig, path) -> None:
    lines = [
        "config dim=%d%s norm2=%s count=%d label=%s"
        % (
            config.dim,
            f" ambient={config.ambient}" if config.ambient != config.dim else "",
            format_scalar(config.norm2),
            config.size,
            config.label,
        )
    ]
    for p in config.points:
        lines.append(" ".join(format_scalar(x) for x in p))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


__all__ = [
    "BinaryCode",
    "CATALOG_NAMES",
    "GramData",
    "Point",
    "PointConfig",
    "antipodal_split",
    "catalog",
    "cross_angles",
    "gram",
    "load_config",
    "nordstrom_robinson",
    "qdot",
    "qneg",
    "save_config",
    "unbiased_basis_blocks",
]
