import math

import numpy as np
import pytest
from hypothesis import assume
from hypothesis import strategies as st

from vaxjo.kolmogorov import ContextualData


def symmetric_data(p, q, lam):
    """R1 data with p_a = (p, 1-p), t = [[q, 1-q], [1-q, q]] and p_b chosen
    so that lambda(beta_1) equals ``lam``."""
    a, b = p * q, (1 - p) * (1 - q)
    pb1 = a + b + 2 * lam * math.sqrt(a * b)
    t = [[q, 1 - q], [1 - q, q]]
    return ContextualData((1, -1), (1, -1), [p, 1 - p], [pb1, 1 - pb1], t, t)


unit = st.floats(0.02, 0.98)
lam_trig = st.floats(-0.999, 0.999)


@st.composite
def trig_data(draw):
    from vaxjo.qlra import ContextKind, interference_coefficients

    data = symmetric_data(draw(unit), draw(unit), draw(lam_trig))
    assume(0 < data.p_b[0] < 1)
    assume(interference_coefficients(data).kind is ContextKind.TRIGONOMETRIC)
    return data


def random_trig_cases(count, seed):
    """``count`` trigonometric R1 cases drawn with numpy (for bulk checks)."""
    from vaxjo.qlra import ContextKind, interference_coefficients

    rng = np.random.default_rng(seed)
    cases = []
    while len(cases) < count:
        p, q = rng.uniform(0.02, 0.98, size=2)
        data = symmetric_data(p, q, rng.uniform(-0.999, 0.999))
        if interference_coefficients(data).kind is ContextKind.TRIGONOMETRIC:
            cases.append(data)
    return cases


@pytest.fixture
def worked_trig():
    t = [[0.7, 0.3], [0.3, 0.7]]
    return ContextualData((1, -1), (1, -1), [0.5, 0.5], [0.8, 0.2], t, t)


@pytest.fixture
def worked_hyp():
    t = [[0.9, 0.1], [0.1, 0.9]]
    return ContextualData((1, -1), (1, -1), [0.5, 0.5], [0.9, 0.1], t, t)
