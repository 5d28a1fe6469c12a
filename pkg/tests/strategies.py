"""Hypothesis strategies that drive the seeded generators in ``oddsymp.randgen``."""

import random

from hypothesis import strategies as st

from oddsymp.geometry import Chart
from oddsymp.randgen import FUNCTION_KINDS, random_poly

seeds = st.integers(min_value=0, max_value=2**32 - 1)
ns = st.integers(min_value=1, max_value=3)


@st.composite
def charts(draw, n_max=3, theta=2):
    return Chart(draw(st.integers(1, n_max)), theta)


@st.composite
def polys(draw, chart, kinds=FUNCTION_KINDS, parity=None, terms=4, degree=3):
    rng = random.Random(draw(seeds))
    return random_poly(rng, chart.gens, kinds, terms, degree, parity)
