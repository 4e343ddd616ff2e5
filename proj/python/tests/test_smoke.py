import math

import pytest

import vlgreedy as vg


def two_four(depth):
    half = 1 << (depth - 1)
    return vg.ExponentField(1, depth, [2.0] * half + [4.0] * half)


def test_field_properties():
    p = two_four(4)
    assert (p.p_minus, p.p_plus) == (2.0, 4.0)
    assert len(p) == 16
    assert vg.harmonic_mean_exponent(p, "0:0") == pytest.approx(8 / 3)


def test_norms():
    p = two_four(6)
    middle = [0.0] * 16 + [1.0] * 32 + [0.0] * 16
    expected = 1 / math.sqrt((-1 + math.sqrt(17)) / 2)
    assert vg.luxemburg_norm(middle, p) == pytest.approx(expected, rel=1e-12)
    assert vg.char_norm(p, "1:1") == pytest.approx(2 ** -0.25, rel=1e-12)


def test_haar_round_trip():
    p = vg.ExponentField.constant(1, 5, 3.0)
    values = [math.sin(i) for i in range(32)]
    back = vg.synthesize(p, vg.analyze(p, values))
    assert back == pytest.approx(values, abs=1e-12)


def test_greedy_and_oracle():
    p = two_four(6)
    f = vg.mixed_mass_function(p, 10, 3)
    for n in range(1, 10):
        assert vg.best_subset_residual(p, f, n) <= vg.greedy_residual(p, f, n) + 1e-9


def test_democracy():
    p = vg.ExponentField.constant(1, 8, 2.0)
    assert vg.democracy_norm(p, ["0:0", "1:0", "2:3"]) == pytest.approx(math.sqrt(3))
    tower = ["0:0", "1:0", "2:0"]
    assert vg.square_sum_norm(p, tower) == pytest.approx(math.sqrt(3))
    assert vg.linearized_norm(p, tower) == pytest.approx(math.sqrt(2))
    rec = vg.estimate_democracy(p, [1, 2, 4, 8], seed=1, random_families=5)
    assert rec["slope_r"] == pytest.approx(0.5)
    assert [r["N"] for r in rec["rows"]] == [1, 2, 4, 8]


def test_gamma_and_fit():
    p = two_four(6)
    assert len(vg.construct_gamma1(p, 0.5, 4)) == 4
    fit = vg.fit_exponent([(1, 1), (4, 2), (16, 4)])
    assert fit["slope"] == pytest.approx(0.5)


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        vg.ExponentField.constant(1, 4, 1.0)
    with pytest.raises(vg.VlgError):
        vg.char_norm(two_four(4), "9:0")
