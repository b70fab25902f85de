import pytest

from braidleg.suites import SUITES


@pytest.mark.parametrize("name, kwargs", [
    ("swap", {"n": 30}),
    ("relations", {"maxdeg": 1}),
    ("jacobi", {"n": 5}),
    ("hj", {"Mmax": 1, "D": 2}),
    ("hamsys", {"Mmax": 1, "D": 1}),
    ("legendre", {"n": 2}),
    ("epoche", {"n": 20}),
])
def test_suites_pass(name, kwargs):
    rep = SUITES[name](seed=3, **kwargs)
    assert rep["ok"], rep
    assert rep["message"].startswith(f"{rep['passed']}/{rep['total']} ")


def test_braiding_suites_are_fixed_to_two_dimensions():
    with pytest.raises(ValueError):
        SUITES["hj"](s=3)
