import cmath

import numpy as np
import pytest
from hypothesis import settings

from refl.kernel import Layer, LayeredStructure

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")

RHO_SI = 2.074e-6


def fresnel_oracle(q, rho_sub, rho_amb=0.0):
    """|(k0 - k1)/(k0 + k1)|^2 written with cmath, independent of the
    matrix code."""
    out = []
    for qi in np.atleast_1d(q):
        k0 = qi / 2.0
        k1 = cmath.sqrt(k0 * k0 - 4.0 * cmath.pi * (rho_sub - rho_amb))
        out.append(abs((k0 - k1) / (k0 + k1)) ** 2)
    return np.array(out)


def parratt_oracle(q, thickness, sld, roughness):
    """Parratt recursion from the substrate upwards, one q at a time."""
    out = []
    n = len(sld)
    for qi in np.atleast_1d(q):
        k0 = qi / 2.0
        k = [cmath.sqrt(k0 * k0 - 4.0 * cmath.pi * (s - sld[0])) for s in sld]
        k = [-x if x.imag < 0 else x for x in k]
        amp = 0j
        for j in range(n - 2, -1, -1):
            r = (k[j] - k[j + 1]) / (k[j] + k[j + 1]) * cmath.exp(-2 * k[j] * k[j + 1] * roughness[j + 1] ** 2)
            phase = cmath.exp(2j * k[j + 1] * thickness[j + 1]) if j + 1 < n - 1 else 0.0
            amp = (r + amp * phase) / (1 + r * amp * phase)
        out.append(abs(amp) ** 2)
    return np.array(out)


@pytest.fixture
def bare_si():
    return LayeredStructure((Layer(0, 0.0, 0, "air"), Layer(0, RHO_SI, 0, "Si")))


@pytest.fixture
def film_on_si():
    return LayeredStructure((
        Layer(0, 0.0, 0, "air"),
        Layer(100.0, 3.5e-6, 3.0, "film"),
        Layer(0, RHO_SI, 3.0, "Si"),
    ))


def random_structure(rng, max_layers=8, rough=True):
    n = int(rng.integers(2, max_layers + 1))
    sld = rng.uniform(-1e-6, 1e-5, n)
    d = rng.uniform(0, 500, n)
    s = rng.uniform(0, 20, n) if rough else np.zeros(n)
    return LayeredStructure.from_arrays(d, sld, s)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """``criterion(label, ok, detail)`` records a PASS/FAIL line, prints it
    and asserts ``ok``."""
    def check(label, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
    return check


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
