import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from deepsp.formula import CnfFormula


@pytest.fixture
def eq2_formula():
    """The 9-variable, 4-clause example formula:
    (x1 v x2 v x3)(~x1 v x4 v x5)(~x2 v x6 v x7)(~x3 v x8 v x9)."""
    return CnfFormula.from_signed(
        9, [[1, 2, 3], [-1, 4, 5], [-2, 6, 7], [-3, 8, 9]]
    )


@pytest.fixture
def sol_3sat():
    # satisfies everything
    return [1, 0, 0, 1, 0, 1, 0, 1, 0]


@pytest.fixture
def sol_max3sat():
    # violates exactly the first clause
    return [0, 0, 0, 1, 0, 1, 0, 1, 0]
