import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaspipe import PipeParameters, ValidationError, case_study, derive_constants, load_params, params_from_config, steady_profile
from gaspipe.errors import PressureCollapseError
from gaspipe.params import CONFIG_KEYS


def test_case_study_frozen_values(consts):
    # values computed once from the defining formulas and frozen here
    assert consts.alpha == pytest.approx(0.0051056693810935033, rel=1e-12)
    assert consts.t_d == pytest.approx(116.66666666666667, rel=1e-15)
    assert consts.omega0 == pytest.approx(0.013463968515384827, rel=1e-12)
    assert consts.k_g == pytest.approx(5.206408125964586, rel=1e-12)
    assert consts.beta == pytest.approx(0.30381908933559171, rel=1e-12)


def test_alpha_matches_velocity_form(consts):
    # alpha = f_c * v / (4 D) with the nominal gas velocity v = q_m c^2 / (p_m A)
    p = case_study()
    v = p.q_m * p.c**2 / (p.p_m * math.pi * p.D**2 / 4)
    assert consts.alpha == pytest.approx(p.f_c * v / (4 * p.D), rel=1e-13)


def test_k_g_reference_gap_is_about_three_percent(consts):
    assert 0.02 < consts.k_g / 5.064 - 1 < 0.03


def test_with_alpha_zero_is_lossless(consts):
    k0 = consts.with_alpha(0.0)
    assert k0.beta == 1.0
    assert k0.k_g == consts.k_g
    with pytest.raises(ValidationError):
        consts.with_alpha(-1.0)


@pytest.mark.parametrize("field", ["L", "D", "c", "p_m"])
@given(bad=st.one_of(st.floats(max_value=0.0), st.just(math.nan), st.just(math.inf)))
def test_rejects_nonpositive_or_nonfinite(field, bad):
    with pytest.raises(ValidationError):
        case_study().replace(**{field: bad})


@pytest.mark.parametrize("field", ["f_c", "q_m"])
def test_friction_and_flow_may_be_zero_but_not_negative(field):
    assert derive_constants(case_study().replace(**{field: 0.0})).alpha == 0.0
    with pytest.raises(ValidationError):
        case_study().replace(**{field: -1e-3})


def test_steady_profile_shape():
    prof = steady_profile(case_study(), 11)
    assert prof.pressures[0] == pytest.approx(8.0e6)
    assert np.all(np.diff(prof.pressures) < 0)
    assert prof.positions[-1] == pytest.approx(35_000.0)
    p = case_study()
    slope = p.f_c * p.c**2 * p.q_m**2 / (2 * p.D * p.area**2)
    assert prof.pressures[-1] == pytest.approx(math.sqrt(p.p_m**2 - slope * p.L))


def test_steady_profile_collapse():
    with pytest.raises(PressureCollapseError):
        steady_profile(case_study().replace(q_m=2000.0), 5)
    with pytest.raises(ValidationError):
        steady_profile(case_study(), 1)


def test_config_round_trip(tmp_path):
    path = tmp_path / "pipe.json"
    path.write_text(json.dumps(case_study().to_config()))
    assert load_params(path) == case_study()


@pytest.mark.parametrize(
    "edit",
    [
        lambda d: d.update(extra=1.0),
        lambda d: d.pop("length_m"),
        lambda d: d.update(length_m="35 km"),
        lambda d: d.update(length_m=True),
    ],
)
def test_config_rejections(edit):
    doc = case_study().to_config()
    edit(doc)
    with pytest.raises(ValidationError):
        params_from_config(doc)


def test_config_keys_cover_every_field():
    assert sorted(CONFIG_KEYS.values()) == sorted(["L", "D", "f_c", "c", "q_m", "p_m"])
    assert isinstance(case_study(), PipeParameters)
