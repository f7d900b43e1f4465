import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from fractions import Fraction as F

import pytest

from stokes_gaussian.circle import CirclePoint
from stokes_gaussian.linalg import Matrix
from stokes_gaussian.stokes_data import GENERAL, ExponentLayout, StokesMatrices
from stokes_gaussian.scalars import GaussRational


def _m(rows):
    return Matrix([[F(x) for x in r] for r in rows])


@pytest.fixture
def e1():
    """Rank-2 general-form dataset with C = {1, 2}, theta0 = 0, monodromy id."""
    layout = ExponentLayout(
        exponents=(GaussRational(1), GaussRational(2)),
        ranks=(1, 1),
        theta0=CirclePoint(1, 0),
        pure=True,
    )
    return StokesMatrices(
        layout=layout,
        s10=_m([[1, 0], [1, 1]]),
        s21=_m([[1, 1], [0, 1]]),
        s32=_m([[1, 0], [F(-1, 2), 1]]),
        s03=_m([[F(1, 2), -1], [0, 2]]),
        form=GENERAL,
    )


@pytest.fixture
def theta0():
    return CirclePoint(1, 0)
