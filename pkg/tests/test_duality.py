import numpy as np
import pytest

from helpers import random_coefficient, random_metric
from walkergeom.curvature import ricci_scalar
from walkergeom.duality import (
    HODGE,
    classify_wplus,
    form_inner,
    form_vector,
    frame,
    selfdual_residuals,
    two_form_basis,
    wminus_components,
    wpm_matrix,
    wpm_oracle,
    wplus_eigenvalues,
)
from walkergeom.families import (
    SelfDualCoefficients,
    TypeIICoefficients,
    make_antiselfdual_example,
    make_selfdual,
    make_typeII,
)
from walkergeom.metric import WalkerMetric, metric_matrix


def _random_selfdual(rng):
    names = [f for f in SelfDualCoefficients.__dataclass_fields__]
    return make_selfdual(SelfDualCoefficients(**{n: random_coefficient(rng) for n in names}))


class TestFrame:
    def test_flat_e1(self, flat):
        e = frame(flat, (0, 0, 0, 0)).e
        assert list(e[0]) == [0.5, 0.0, 1.0, 0.0]

    def test_orthonormal(self, m1, rng):
        for p in [(1, 2, 0, 0)] + list(rng.uniform(-2, 2, (5, 4))):
            fr = frame(m1, p)
            g = metric_matrix(m1, p).g
            gram = fr.e @ g @ fr.e.T
            assert np.allclose(gram, np.diag(fr.eps), atol=1e-12)

    def test_random_metrics(self, rng):
        for _ in range(5):
            W = random_metric(rng)
            p = rng.uniform(-2, 2, 4)
            fr = frame(W, p)
            gram = fr.e @ metric_matrix(W, p).g @ fr.e.T
            assert np.abs(gram - np.diag(fr.eps)).max() <= 1e-12 * max(1.0, np.abs(gram).max())


def test_two_forms_are_hodge_eigenvectors():
    for sign, ev in (("self", 1.0), ("anti", -1.0)):
        for E in two_form_basis(sign):
            v = form_vector(E)
            assert np.allclose(HODGE @ v, ev * v)
    assert HODGE @ HODGE == pytest.approx(np.eye(6))


def test_two_form_norms():
    for sign in ("self", "anti"):
        norms = [form_inner(E, E) for E in two_form_basis(sign)]
        assert norms == pytest.approx([1.0, -1.0, -1.0])


class TestWpm:
    def test_flat_zero(self, flat):
        for sign in ("self", "anti"):
            assert not wpm_matrix(flat, (0, 0, 0, 0), sign).m.any()
            assert np.abs(wpm_oracle(flat, (0, 0, 0, 0), sign).m).max() == 0.0

    def test_bad_sign(self, m1):
        with pytest.raises(ValueError):
            wpm_matrix(m1, (0, 0, 0, 0), "both")

    def test_matches_oracle(self, rng):
        for _ in range(5):
            W = random_metric(rng)
            for p in rng.uniform(-2, 2, (5, 4)):
                for sign in ("self", "anti"):
                    a, b = wpm_matrix(W, p, sign).m, wpm_oracle(W, p, sign).m
                    assert np.all(np.abs(a - b) <= 1e-9 * (1 + np.abs(b)))

    def test_shape_and_trace(self, rng):
        W = random_metric(rng)
        for sign in ("self", "anti"):
            m = wpm_matrix(W, rng.uniform(-2, 2, 4), sign).m
            # rows 2 and 3 carry the minus signs, so the lower 2x2 block stays symmetric
            assert m[1, 0] == -m[0, 1] and m[2, 0] == -m[0, 2] and m[2, 1] == m[1, 2]
            assert abs(np.trace(m)) <= 1e-10 * max(1.0, np.abs(m).max())

    def test_m1_eigenvalues(self, m1, rng):
        for p in rng.uniform(-2, 2, (5, 4)):
            assert wplus_eigenvalues(m1, p) == pytest.approx([-0.5, -0.5, 1.0], abs=1e-12)

    def test_eigenvalue_law_random(self, rng):
        for _ in range(5):
            W = random_metric(rng)
            for p in rng.uniform(-1, 1, (5, 4)):
                tau = ricci_scalar(W, p).tau
                ev = wplus_eigenvalues(W, p)
                scale = max(1.0, np.linalg.norm(wpm_matrix(W, p, "self").m))
                expected = sorted([tau / 6, -tau / 12, -tau / 12])
                assert np.allclose(np.real(ev), expected, atol=1e-8 * scale)

    def test_strict_wminus_zero(self, strict_x4, rng):
        p = rng.uniform(-2, 2, 4)
        assert not wpm_matrix(strict_x4, p, "anti").m.any()
        assert np.abs(wpm_oracle(strict_x4, p, "anti").m).max() <= 1e-12


class TestSelfDual:
    def test_flat(self, flat):
        assert selfdual_residuals(flat, (1, 2, 3, 4)) == (0, 0, 0, 0, 0)

    def test_x2_squared(self):
        W = WalkerMetric.from_strings("x2^2", "0", "0")
        assert selfdual_residuals(W, (0.1, 0.2, 0.3, 0.4))[0] == 2.0

    def test_family_is_selfdual(self, rng):
        for _ in range(3):
            W = _random_selfdual(rng)
            for p in rng.uniform(-2, 2, (5, 4)):
                assert max(map(abs, selfdual_residuals(W, p))) <= 1e-10
                assert np.abs(wpm_matrix(W, p, "anti").m).max() <= 1e-9

    def test_residuals_agree_with_wminus(self, rng):
        # zero residuals iff zero W- on a mix of self-dual and generic metrics
        cases = [_random_selfdual(rng) for _ in range(3)] + [random_metric(rng) for _ in range(3)]
        for W in cases:
            p = rng.uniform(-2, 2, 4)
            zero_res = max(map(abs, selfdual_residuals(W, p))) <= 1e-10
            zero_wm = max(abs(v) for v in wminus_components(W.jet(p)).values()) <= 1e-9
            assert zero_res == zero_wm


class TestClassifyWplus:
    def test_flat_zero(self, flat):
        assert classify_wplus(flat, (0, 0, 0, 0)).jordan == "zero"

    def test_bad_tol(self, m1):
        with pytest.raises(ValueError):
            classify_wplus(m1, (0, 0, 0, 0), tol=0)

    def test_m1_diagonalizable(self, m1, rng):
        d = classify_wplus(m1, rng.uniform(-2, 2, 4))
        assert d.jordan == "Ia-diagonalizable"
        assert abs(d.delta) <= 1e-9 * d.scale
        assert d.delta == d.tau ** 2 + 12 * d.tau * d.w11 + 48 * d.w12 ** 2

    def test_typeII_double_root(self, rng):
        W = make_typeII(TypeIICoefficients(tau=24, Q="x4^2"))
        for p in rng.uniform(-1, 1, (5, 4)):
            d = classify_wplus(W, p)
            assert abs(d.delta) > 1e-3 * d.scale
            assert d.jordan == "II-double-root" and not d.indeterminate

    def test_typeII_q_x3_degenerates_to_ia(self, rng):
        # this coefficient choice makes delta vanish identically
        W = make_typeII(TypeIICoefficients(tau=24, Q="x3"))
        for p in rng.uniform(-1, 1, (5, 4)):
            d = classify_wplus(W, p)
            assert abs(d.delta) <= 1e-12 * d.scale
            assert d.jordan == "Ia-diagonalizable"

    def test_strict_nilpotent(self, strict_x4, rng):
        d = classify_wplus(strict_x4, rng.uniform(-2, 2, 4))
        assert d.tau == 0.0 and d.w12 == 0.0 and d.w11 != 0.0
        assert d.jordan == "two-step-nilpotent"

    def test_three_step(self):
        W = WalkerMetric.from_strings("-x1*x4", "0", "x2*x3")
        d = classify_wplus(W, (0.2, 0.1, 0.3, 0.4))
        assert d.tau == 0.0
        assert d.jordan == "three-step-nilpotent"

    def test_antiselfdual_example_has_zero_wplus(self, rng):
        W = make_antiselfdual_example()
        p = rng.uniform(-2, 2, 4)
        assert classify_wplus(W, p).jordan == "zero"
        assert np.abs(wpm_matrix(W, p, "anti").m).max() > 0.1
