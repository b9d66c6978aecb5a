import os

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from starfield.scalars import GaussRational, Q

settings.register_profile(
    "default",
    max_examples=int(os.environ.get("STARFIELD_EXAMPLES", "40")),
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

small_ints = st.integers(-6, 6)
rationals = st.builds(Q, small_ints, st.integers(1, 5))
gauss = st.builds(GaussRational, rationals, rationals)


def modes(n, r=2):
    return st.tuples(*[st.integers(-r, r)] * n)
