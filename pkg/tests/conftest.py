import pytest

from sphdesign.configs import catalog
from sphdesign.design import design_strength


@pytest.fixture(scope="session")
def reports():
    """Design reports for every catalog entry, computed once."""
    t_max = {"e8_min": 8, "etf_7_28_design": 8}
    return {
        name: design_strength(catalog(name), t_max.get(name, 6))
        for name in (
            "hexagon",
            "icosahedron",
            "d4_min",
            "e6_min",
            "e7_min",
            "e8_min",
            "etf_7_28_design",
            "mub16",
        )
    }
