"""End-to-end checks that the extension module exposes working, exact APIs."""

from fractions import Fraction

import pytest

import polyaurn as pu


def test_measure_normalize_exact():
    nu = pu.normalize(pu.Measure([2, 3, 5]))
    assert nu.weights == [Fraction(1, 5), Fraction(3, 10), Fraction(1, 2)]
    assert nu.mass == Fraction(1)
    assert nu.is_probability()


def test_rationals_cross_the_boundary_as_fractions():
    nu = pu.Measure([Fraction(1, 5), Fraction(3, 10), Fraction(1, 2)])
    assert nu[1] == Fraction(3, 10)
    assert isinstance(nu[1], Fraction)


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        pu.Measure([0.2, 0.3, 0.5])


def test_validation_errors_surface():
    with pytest.raises(pu.ValidationError):
        pu.Measure([1, -1, 1])
    assert issubclass(pu.ValidationError, pu.Error)


def test_partition_family_predictive_and_joint():
    nu = pu.Measure([Fraction(1, 5), Fraction(3, 10), Fraction(1, 2)])
    part = pu.Partition([0, 1, 1])
    kern = pu.conditional_kernel(nu, part)
    fam = pu.PredictiveFamily.mvps(concentration=2, base=nu, reinforcement=kern)
    assert fam.predictive([1]).weights == [
        Fraction(2, 15),
        Fraction(13, 40),
        Fraction(13, 24),
    ]
    assert fam.joint_probability([1, 2]) == Fraction(13, 80)
    assert fam.joint_probability([2, 1]) == Fraction(13, 80)


def test_characterize_recovers_concentration():
    nu = pu.Measure([Fraction(1, 5), Fraction(3, 10), Fraction(1, 2)])
    part = pu.Partition([0, 1, 1])
    kern = pu.conditional_kernel(nu, part)
    fam = pu.PredictiveFamily.sufficientness_closed_form(
        base=nu, reinforcement=kern, concentration=2
    )
    result = pu.characterize(fam, max_len=4)
    assert result["verdict"] == "mvps"
    assert result["concentration_hat"] == Fraction(2)
    assert result["counterexample"] is None


def test_characterize_flags_off_form_coefficients():
    half = pu.Measure([Fraction(1, 2), Fraction(1, 2)])
    fam = pu.PredictiveFamily.sufficientness(
        base=half,
        reinforcement=pu.Kernel.identity(2),
        coefficients=[Fraction(1, 3), Fraction(1, 3)],
    )
    result = pu.characterize(fam, max_len=3)
    assert result["verdict"] == "non_exchangeable"
    assert result["counterexample"] is not None
    assert len(result["counterexample"]["trajectory"]) <= 3


def test_identity_checks_are_exact():
    nu = pu.Measure([Fraction(1, 5), Fraction(3, 10), Fraction(1, 2)])
    kern = pu.conditional_kernel(nu, pu.Partition([0, 1, 1]))
    assert pu.check_detailed_balance(nu, kern) == 0
    assert pu.check_kernel_identity(nu, kern, 0) == 0
    assert pu.recover_partition(nu, kern).assignment == [0, 1, 1]


def test_bell_number_is_a_python_int():
    assert pu.bell_number(4) == 15
    assert isinstance(pu.bell_number(4), int)
    assert pu.bell_number(20) == 51724158235372


def test_general_model_block_law():
    model = pu.GeneralModel(
        1, [(0.0, 1.0, Fraction(1, 2)), (1.0, 2.0, Fraction(1, 2))]
    )
    assert model.exact_block_law([0, 0]) == Fraction(3, 8)
    assert model.exact_block_law([0, 1]) == Fraction(1, 8)
    values, blocks = model.sample_urn(20, seed=7)
    assert [model.bin_of(v) for v in values] == blocks


def test_sampling_is_deterministic():
    nu = pu.Measure([Fraction(1, 2), Fraction(1, 2)])
    fam = pu.PredictiveFamily.mvps(
        concentration=1, base=nu, reinforcement=pu.Kernel.identity(2)
    )
    assert fam.sample(100, seed=42) == fam.sample(100, seed=42)
    assert fam.sample(100, seed=42) != fam.sample(100, seed=43)


def test_fit_model_on_short_data():
    nu = pu.Measure([Fraction(1, 2), Fraction(1, 2)])
    fam = pu.PredictiveFamily.mvps(
        concentration=1, base=nu, reinforcement=pu.Kernel.identity(2)
    )
    traj = fam.sample(120, seed=5)
    result = pu.fit_model(traj, nu=[0.5, 0.5])
    assert len(result["table"]) == 2
    assert not result["base_estimated"]
    statuses = {row["status"] for row in result["table"]}
    assert statuses <= {"ok", "flat", "edge_maximum"}
