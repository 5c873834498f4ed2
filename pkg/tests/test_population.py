import math

import pytest
from scipy import stats

from leolink.constants import EARTH_RADIUS_KM, J2_EARTH, MU_EARTH
from leolink.population import generate_population, preset, sso_inclination_deg
from leolink.timebase import parse_utc

EPOCH = parse_utc("2021-03-20T09:37:29Z")


def test_population_counts_and_tags():
    users = generate_population(123, epoch=EPOCH)
    assert len(users) == 1200
    tags = [u.tag for u in users]
    assert tags.count("montecarlo") == 1000
    assert tags.count("shell_band") == 200


def test_population_determinism():
    a = generate_population(7, epoch=EPOCH)
    b = generate_population(7, epoch=EPOCH)
    assert all(
        u.elements == v.elements and u.user_id == v.user_id for u, v in zip(a, b)
    )
    c = generate_population(8, epoch=EPOCH)
    assert any(u.elements != v.elements for u, v in zip(a, c))


def test_population_bounds_and_circularity():
    users = generate_population(5, epoch=EPOCH)
    for u in users:
        assert u.elements.eccentricity == 0.0
        assert 350.0 <= u.altitude_km <= 1200.0
        assert 0.0 <= u.inclination_deg <= 180.0
    mains = [u for u in users if u.tag == "montecarlo"]
    bands = [u for u in users if u.tag == "shell_band"]
    lo = [u for u in bands if u.altitude_km <= 570.0]
    hi = [u for u in bands if u.altitude_km >= 1100.0]
    assert len(lo) == len(hi) == 100
    assert all(470.0 <= u.altitude_km <= 570.0 for u in lo)
    assert all(1100.0 <= u.altitude_km <= 1200.0 for u in hi)
    assert len(mains) == 1000


def test_population_scalable_strata():
    users = generate_population(42, n_main=100, n_band=10, epoch=EPOCH)
    assert len(users) == 120
    assert sum(1 for u in users if u.tag == "montecarlo") == 100


def test_altitude_distribution_ks():
    # pooled main stratum over 10 seeds against U[350, 1200]
    alts = []
    for seed in range(10):
        users = generate_population(seed, epoch=EPOCH)
        alts.extend(u.altitude_km for u in users if u.tag == "montecarlo")
    res = stats.kstest(alts, stats.uniform(loc=350.0, scale=850.0).cdf)
    assert res.pvalue > 0.01


def test_sso_inclination_value():
    assert sso_inclination_deg(500.0) == pytest.approx(97.40, abs=0.05)


def test_sso_inclination_satisfies_precession_condition():
    # invert: plug the returned inclination back into the J2 nodal rate and
    # require one revolution per tropical year
    alt = 500.0
    inc = math.radians(sso_inclination_deg(alt))
    a = EARTH_RADIUS_KM + alt
    n = math.sqrt(MU_EARTH / a**3)
    rate = -1.5 * J2_EARTH * n * (EARTH_RADIUS_KM / a) ** 2 * math.cos(inc)
    year = 365.2421897 * 86400.0
    assert rate == pytest.approx(2.0 * math.pi / year, rel=1e-9)


def test_sso_out_of_range():
    with pytest.raises(ValueError):
        sso_inclination_deg(60000.0)


def test_presets():
    iss = preset("iss", epoch=EPOCH)
    assert iss.altitude_km == pytest.approx(420.0)
    assert iss.elements.inclination == 51.6
    assert iss.tag == "iss_preset"
    sso = preset("sso_eo", epoch=EPOCH, raan_deg=83.5)
    assert sso.altitude_km == pytest.approx(500.0)
    assert sso.elements.inclination == pytest.approx(97.40, abs=0.05)
    assert sso.elements.raan == 83.5
    assert sso.tag == "sso_preset"
    with pytest.raises(ValueError):
        preset("hubble")
