"""Hypothesis strategies shared by the test modules."""

import numpy as np
from hypothesis import strategies as st

from upolar.channels import Channel


@st.composite
def channels(draw, max_outputs=6):
    k = draw(st.integers(2, max_outputs))
    a = draw(st.lists(st.floats(0.01, 1.0), min_size=k, max_size=k))
    b = draw(st.lists(st.floats(0.01, 1.0), min_size=k, max_size=k))
    return Channel.from_masses(np.array(a) / sum(a), np.array(b) / sum(b))
