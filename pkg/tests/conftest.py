"""Shared fixtures: reference link configuration and cached MC draws."""

import pytest

from cubicber import SystemParams, derive, dbm_to_watts, generate_samples


def make_system(prd=10.0, p_r_dbm=None, r_l=1000.0, **kw):
    """Reference fiber link; only prd, power, and load vary in most tests."""
    kw.setdefault("tau_c", 100e-15)
    kw.setdefault("wavelength", 1.55e-6)
    kw.setdefault("g_amp", 1e5)
    kw.setdefault("p_r", 0.0 if p_r_dbm is None else dbm_to_watts(p_r_dbm))
    return SystemParams(prd=prd, r_l=r_l, **kw)


@pytest.fixture(scope="session")
def ref_system():
    sp = make_system(prd=10.0, p_r_dbm=33.0)
    return sp, derive(sp)


@pytest.fixture(scope="session")
def mc_small(ref_system):
    """20k trials of all three orders for both bits; reused across files."""
    sp, dp = ref_system
    sets = {bit: generate_samples(sp, dp, bit, 20_000, orders=(1, 2, 3),
                                  seed=77)
            for bit in (0, 1)}
    return sp, dp, sets
