from pathlib import Path

import pytest

from fansheaf.fans import load_fan

DATA = Path(__file__).resolve().parent.parent / "data" / "fans"


def fan_path(name):
    return DATA / f"{name}.fan"


@pytest.fixture(scope="session")
def corpus():
    """All corpus fans by short name, parsed once."""
    names = [
        "p1",
        "p2",
        "p1xp1",
        "p3",
        "p2blow",
        "cubefan",
        "quadrant",
        "conesquare",
        "conecube",
        "blowquad",
        "starsq",
        "twostep",
    ]
    return {name: load_fan(fan_path(name)) for name in names}
