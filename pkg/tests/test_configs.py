from fractions import Fraction

import pytest

from sphdesign.configs import (
    CATALOG_NAMES,
    PointConfig,
    antipodal_split,
    catalog,
    gram,
    load_config,
    qneg,
    save_config,
    unbiased_basis_blocks,
)
from sphdesign.errors import InvariantViolation, ParseError, UnknownCatalogName
from sphdesign.scalars import QuadExt, format_scalar, parse_scalar

EXPECTED_SIZES = {
    "hexagon": 6,
    "icosahedron": 12,
    "d4_min": 24,
    "e6_min": 72,
    "e7_min": 126,
    "e8_min": 240,
    "etf_7_28_design": 56,
    "mub16": 288,
}


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_catalog_sizes(name):
    assert catalog(name).size == EXPECTED_SIZES[name]


def test_unknown_name():
    with pytest.raises(UnknownCatalogName):
        catalog("leech")


@pytest.mark.parametrize(
    "name, angles",
    [
        ("e8_min", ("-1", "-1/2", "0", "1/2")),
        ("hexagon", ("-1", "-1/2", "1/2")),
        ("etf_7_28_design", ("-1", "-1/3", "1/3")),
        ("mub16", ("-1", "-1/4", "0", "1/4")),
        ("icosahedron", ("-1", "-1/5*sqrt(5)", "1/5*sqrt(5)")),
    ],
)
def test_catalog_angle_sets(name, angles):
    got = gram(catalog(name)).angles
    assert tuple(format_scalar(a) for a in got) == angles


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_gram_symmetric_unit_diagonal(name):
    g = gram(catalog(name))
    n = g.size
    step = max(1, n // 24)
    for i in range(0, n, step):
        assert g.entries[i][i] == 1
        for j in range(0, n, step):
            assert g.entries[i][j] == g.entries[j][i]


@pytest.mark.parametrize(
    "name, half_size", [("e8_min", 120), ("hexagon", 3), ("mub16", 144)]
)
def test_antipodal_split(name, half_size):
    half, anti = antipodal_split(catalog(name))
    assert anti and half.size == half_size
    # representatives cover every pair exactly once
    full = catalog(name).point_set()
    assert all(p in full and qneg(p) in full for p in half.points)


def test_single_point_not_antipodal():
    single = PointConfig(
        dim=2, points=((QuadExt(1), QuadExt(0)),), norm2=QuadExt(1), label="pt"
    )
    cfg, anti = antipodal_split(single)
    assert not anti and cfg is single


def test_mub16_basis_blocks():
    half, anti = antipodal_split(catalog("mub16"))
    assert anti
    blocks = unbiased_basis_blocks(half)
    assert len(blocks) == 9
    assert all(len(b) == 16 for b in blocks)
    g = gram(half)
    quarter = QuadExt(Fraction(1, 4))
    for bi in range(9):
        for i in blocks[bi]:
            for j in blocks[bi]:
                assert g.entries[i][j] == (1 if i == j else 0)
        for bj in range(bi + 1, 9):
            for i in blocks[bi]:
                for j in blocks[bj]:
                    assert abs(g.entries[i][j]) == quarter


def test_file_round_trip(tmp_path):
    for name in ("d4_min", "hexagon", "etf_7_28_design"):
        config = catalog(name)
        path = tmp_path / f"{name}.cfg"
        save_config(config, path)
        loaded = load_config(path)
        assert loaded.points == config.points
        assert loaded.norm2 == config.norm2
        assert loaded.dim == config.dim
        assert loaded.label == config.label


def test_load_with_comments(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text(
        "# a comment\n"
        "config dim=2 norm2=1 count=2 label=pair\n"
        "1 0  # inline comment\n"
        "-1 0\n"
    )
    cfg = load_config(path)
    assert cfg.size == 2 and cfg.label == "pair"


def test_load_norm_mismatch(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("config dim=2 norm2=1 count=2 label=x\n1 0\n1 1\n")
    with pytest.raises(InvariantViolation):
        load_config(path)


def test_load_duplicate_points(tmp_path):
    path = tmp_path / "dup.cfg"
    path.write_text("config dim=2 norm2=1 count=2 label=x\n1 0\n1 0\n")
    with pytest.raises(InvariantViolation):
        load_config(path)


def test_load_empty_points(tmp_path):
    path = tmp_path / "empty.cfg"
    path.write_text("config dim=2 norm2=1 count=0 label=x\n")
    with pytest.raises(ParseError):
        load_config(path)


def test_load_missing_file_is_oserror(tmp_path):
    with pytest.raises(OSError):
        load_config(tmp_path / "nope.cfg")


def test_parse_error_carries_line(tmp_path):
    path = tmp_path / "syntax.cfg"
    path.write_text("config dim=2 norm2=1 count=1 label=x\n1 zebra\n")
    with pytest.raises(ParseError) as err:
        load_config(path)
    assert err.value.line == 2


def test_duplicate_detection_is_exact():
    with pytest.raises(InvariantViolation):
        PointConfig(
            dim=2,
            points=(
                (QuadExt(1), QuadExt(0)),
                (QuadExt(Fraction(2, 2)), QuadExt(0)),
            ),
            norm2=QuadExt(1),
        )


def test_scaled_norm_declared(tmp_path):
    # irrational norm2 survives a file round trip
    ico = catalog("icosahedron")
    path = tmp_path / "ico.cfg"
    save_config(ico, path)
    again = load_config(path)
    assert again.norm2 == ico.norm2
    assert parse_scalar(format_scalar(ico.norm2)) == ico.norm2
