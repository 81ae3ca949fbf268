import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cvtele.errors import (
    InconsistentMeasurement,
    InvalidArgument,
    UnphysicalParameter,
    UnsupportedOperation,
)
from cvtele.gaussian import (
    GaussianState,
    QuadPair,
    SymplecticTransform,
    apply_symplectic,
    attenuate,
    beta_from_tau,
    displace,
    from_db,
    homodyne_condition,
    loss_channel,
    make_symplectic,
    omega,
    product_state,
    squeezed_thermal_state,
    symplectic_eigenvalues,
    tau_from_beta,
    to_db,
    vacuum_state,
    visibility_correct,
    wigner_value,
)
from cvtele.teleport import make_epr

from conftest import random_physical_cov

finite = dict(allow_nan=False, allow_infinity=False)


class TestVacuum:
    def test_single_mode(self):
        v = vacuum_state(1)
        np.testing.assert_array_equal(v.mean, [0, 0])
        np.testing.assert_array_equal(v.cov, np.diag([0.25, 0.25]))
        assert v.is_physical()
        assert np.linalg.det(v.cov) == 1 / 16

    def test_three_modes(self):
        v = vacuum_state(3)
        np.testing.assert_array_equal(v.cov, 0.25 * np.eye(6))
        assert v.n_modes == 3

    def test_zero_modes_rejected(self):
        with pytest.raises(InvalidArgument):
            vacuum_state(0)


class TestStateValidation:
    def test_asymmetric_cov_rejected(self):
        with pytest.raises(InvalidArgument):
            GaussianState(np.zeros(2), [[0.25, 0.1], [0.0, 0.25]])

    def test_odd_dimension_rejected(self):
        with pytest.raises(InvalidArgument):
            GaussianState(np.zeros(3), np.eye(3))

    def test_arrays_are_read_only(self):
        v = vacuum_state(1)
        with pytest.raises(ValueError):
            v.cov[0, 0] = 1.0

    def test_unphysical_detected(self):
        s = GaussianState(np.zeros(2), np.diag([0.1, 0.1]))
        assert not s.is_physical()
        with pytest.raises(UnphysicalParameter):
            s.require_physical()


class TestSqueezedThermal:
    def test_pure_unsqueezed_is_vacuum(self):
        assert squeezed_thermal_state(0.0, 1.0).allclose(vacuum_state(1))

    def test_measured_input_variances(self):
        # r and tau obtained by inverting the variance relations at -2.92 / +7.68 dB
        s = squeezed_thermal_state(0.6102, 1.7298)
        q = s.quad_pair()
        assert q.sigma_x == pytest.approx(0.1276, abs=1e-4)
        assert q.sigma_p == pytest.approx(1.4652, abs=2e-4)
        assert q.x_db == pytest.approx(-2.92, abs=0.01)
        assert q.p_db == pytest.approx(7.68, abs=0.01)

    def test_quarter_turn_swaps_quadratures(self):
        a = squeezed_thermal_state(0.5, 1.0).cov
        b = squeezed_thermal_state(0.5, 1.0, theta=math.pi / 2).cov
        np.testing.assert_allclose(b, np.diag([a[1, 1], a[0, 0]]), atol=1e-15)

    def test_displacement_sets_mean(self):
        s = squeezed_thermal_state(0.3, 1.2, 0.4, 1 - 2j)
        np.testing.assert_array_equal(s.mean, [1, -2])

    def test_tau_below_one_rejected(self):
        with pytest.raises(UnphysicalParameter):
            squeezed_thermal_state(0.1, 0.99)

    @given(st.floats(-3, 3), st.floats(1, 50), st.floats(0, 2 * math.pi))
    def test_determinant_is_tau_squared_over_16(self, r, tau, theta):
        axis = squeezed_thermal_state(r, tau)
        assert np.linalg.det(axis.cov) == pytest.approx(tau**2 / 16, rel=1e-12)
        s = squeezed_thermal_state(r, tau, theta)
        # rotated entries cancel in the determinant; the floor is eps * |cov|^2
        floor = 1e-15 * np.abs(s.cov).max() ** 2
        assert np.linalg.det(s.cov) == pytest.approx(tau**2 / 16, rel=1e-12, abs=floor)
        assert s.is_physical()

    def test_beta_tau_round_trip(self):
        for tau in (1.0001, 1.7, 30.0):
            assert tau_from_beta(beta_from_tau(tau)) == pytest.approx(tau, rel=1e-12)
        assert beta_from_tau(1.0) == math.inf
        assert tau_from_beta(math.inf) == 1.0


class TestSymplectic:
    def test_rotation_zero_is_identity(self):
        np.testing.assert_array_equal(make_symplectic("rotation", [0], theta=0.0).matrix, np.eye(2))

    def test_balanced_beamsplitter_action(self):
        S = make_symplectic("beamsplitter", (0, 1), transmittance=0.5).matrix
        xa, pa, xb, pb = 1.3, -0.2, 0.4, 2.0
        out = S @ [xa, pa, xb, pb]
        h = 1 / math.sqrt(2)
        np.testing.assert_allclose(out, [h * (xa + xb), h * (pa + pb), h * (xa - xb), h * (pa - pb)])

    def test_vacuum_is_beamsplitter_invariant(self):
        bs = make_symplectic("beamsplitter", (0, 1), transmittance=0.5)
        assert apply_symplectic(vacuum_state(2), bs).allclose(vacuum_state(2), atol=1e-15)

    def test_squeezer_on_vacuum(self):
        r = 0.7
        s = apply_symplectic(vacuum_state(1), make_symplectic("squeezer", [0], r=r))
        np.testing.assert_allclose(s.cov, np.diag([math.exp(-2 * r) / 4, math.exp(2 * r) / 4]))

    def test_squeeze_unsqueeze(self):
        s0 = squeezed_thermal_state(0.2, 1.4, 0.3, 0.5 + 0.1j)
        s1 = apply_symplectic(s0, make_symplectic("squeezer", [0], r=0.3776))
        s2 = apply_symplectic(s1, make_symplectic("squeezer", [0], r=-0.3776))
        assert s2.allclose(s0, atol=1e-12)

    def test_identity(self):
        s = squeezed_thermal_state(0.2, 1.4, 0.3, 0.5 + 0.1j)
        assert apply_symplectic(s, SymplecticTransform(np.eye(2))).allclose(s, atol=0)

    def test_epr_from_matrix_algebra(self):
        """Two squeezed vacua, one turned by pi/2, on a 50/50 beamsplitter."""
        r = 0.3776
        sq = make_symplectic("squeezer", [0, 1], 2, r=r)
        rot = make_symplectic("rotation", [0], 2, theta=math.pi / 2)
        bs = make_symplectic("beamsplitter", (0, 1), 2, transmittance=0.5)
        state = apply_symplectic(apply_symplectic(apply_symplectic(vacuum_state(2), sq), rot), bs)
        # hand-built oracle: mode a squeezed in p, mode b squeezed in x
        e, E = math.exp(-2 * r) / 4, math.exp(2 * r) / 4
        cov = 0.5 * np.array(
            [[E + e, 0, E - e, 0], [0, e + E, 0, e - E], [E - e, 0, E + e, 0], [0, e - E, 0, e + E]]
        )
        np.testing.assert_allclose(state.cov, cov, atol=1e-15)
        u, v = np.array([1, 0, -1, 0]), np.array([0, 1, 0, 1])
        assert u @ cov @ u + v @ cov @ v == pytest.approx(math.exp(-2 * r), rel=1e-12)
        np.testing.assert_allclose(make_epr(r, r).cov, cov, atol=1e-15)

    @pytest.mark.parametrize("modes,n", [((0, 0), 2), ((0, 2), 2), ((-1,), 1)])
    def test_bad_modes(self, modes, n):
        kind = "beamsplitter" if len(modes) == 2 else "rotation"
        with pytest.raises(InvalidArgument):
            make_symplectic(kind, modes, n)

    def test_bad_transmittance(self):
        with pytest.raises(InvalidArgument):
            make_symplectic("beamsplitter", (0, 1), transmittance=1.2)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidArgument):
            apply_symplectic(vacuum_state(1), make_symplectic("rotation", [1], 2))

    @given(
        st.sampled_from(["beamsplitter", "rotation", "squeezer"]),
        st.floats(0, 1),
        st.floats(-10, 10),
        st.floats(-3, 3),
        st.integers(2, 4),
        st.data(),
    )
    def test_symplectic_condition(self, kind, T, theta, r, n, data):
        if kind == "beamsplitter":
            modes = data.draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
            S = make_symplectic(kind, modes, n, transmittance=T)
        else:
            modes = data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=n, unique=True))
            S = make_symplectic(kind, modes, n, theta=theta, r=r)
        om = omega(n)
        assert np.max(np.abs(S.matrix @ om @ S.matrix.T - om)) <= 1e-12 * max(1, np.abs(S.matrix).max() ** 2)

    @given(st.integers(0, 2**32 - 1))
    def test_symplectic_spectrum_preserved(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 4))
        state = GaussianState(np.zeros(2 * n), random_physical_cov(rng, n))
        S = make_symplectic("squeezer", [0], n, r=rng.uniform(-1, 1))
        if n > 1:
            S = make_symplectic("beamsplitter", (0, n - 1), n, transmittance=rng.uniform()) @ S
        before = state.symplectic_eigenvalues()
        after = apply_symplectic(state, S).symplectic_eigenvalues()
        np.testing.assert_allclose(after, before, atol=1e-10)


class TestDisplaceAndLoss:
    def test_zero_displacement(self):
        s = squeezed_thermal_state(0.3, 1.1)
        assert displace(s, 0, 0).allclose(s, atol=0)

    def test_displace_vacuum(self):
        s = displace(vacuum_state(1), 0, 1 + 2j)
        np.testing.assert_array_equal(s.mean, [1, 2])
        np.testing.assert_array_equal(s.cov, vacuum_state(1).cov)

    def test_displace_inverse(self):
        s = squeezed_thermal_state(0.3, 1.1, alpha0=0.2j)
        assert displace(displace(s, 0, 3 - 1j), 0, -3 + 1j).allclose(s, atol=1e-15)

    def test_displace_bad_mode(self):
        with pytest.raises(InvalidArgument):
            displace(vacuum_state(1), 1, 1)

    def test_loss_identity_and_total(self):
        s = make_epr(0.5, 0.6)
        assert loss_channel(s, 0, 1.0).allclose(s, atol=0)
        lost = loss_channel(s, 1, 0.0)
        np.testing.assert_allclose(lost.mode_cov(1), 0.25 * np.eye(2))
        np.testing.assert_allclose(lost.cov[:2, 2:], 0)

    def test_loss_on_squeezed_variance(self):
        s = loss_channel(QuadPair(0.127632, 1.0).to_state(), 0, 0.937024)
        assert s.cov[0, 0] == pytest.approx(0.135339, abs=1e-6)
        assert to_db(s.cov[0, 0]) == pytest.approx(-2.67, abs=0.005)

    def test_loss_matches_beamsplitter_with_vacuum(self):
        """Loss equals mixing with an ancilla vacuum and tracing it out."""
        eta = 0.63
        s = make_epr(0.4, 0.7)
        s = displace(s, 0, 0.5 - 0.3j)
        big = product_state(s, vacuum_state(1))
        bs = make_symplectic("beamsplitter", (0, 2), 3, transmittance=eta)
        ref = apply_symplectic(big, bs).reduced([0, 1])
        assert loss_channel(s, 0, eta).allclose(ref, atol=1e-14)

    def test_loss_bad_eta(self):
        with pytest.raises(InvalidArgument):
            loss_channel(vacuum_state(1), 0, 1.5)

    @given(st.integers(0, 2**32 - 1), st.floats(0, 1))
    def test_loss_preserves_physicality(self, seed, eta):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 4))
        state = GaussianState(np.zeros(2 * n), random_physical_cov(rng, n))
        out = loss_channel(state, int(rng.integers(n)), eta)
        assert out.symplectic_eigenvalues().min() - 0.25 >= -1e-9


class TestVisibilityAndDecibels:
    def test_visibility_squeezing(self):
        s = visibility_correct(from_db(-2.66), 0.968)
        assert to_db(s) == pytest.approx(-2.92, abs=0.02)

    def test_visibility_antisqueezing(self):
        s = visibility_correct(from_db(7.45), 0.968)
        assert to_db(s) == pytest.approx(7.68, abs=0.02)

    def test_unit_visibility(self):
        assert visibility_correct(0.3, 1.0) == 0.3

    def test_inconsistent(self):
        with pytest.raises(InconsistentMeasurement):
            visibility_correct(0.01, 0.5)

    def test_bad_visibility(self):
        with pytest.raises(InvalidArgument):
            visibility_correct(0.3, 0.0)

    @given(st.floats(1e-3, 100), st.floats(0.05, 1))
    def test_correct_inverts_loss(self, sigma, vis):
        assert visibility_correct(attenuate(sigma, vis**2), vis) == pytest.approx(sigma, rel=1e-12, abs=1e-12)

    def test_db_anchors(self):
        assert to_db(0.25) == 0.0
        assert to_db(0.75) == pytest.approx(4.77, abs=0.005)
        assert from_db(2.90) == pytest.approx(0.48745, abs=1e-4)

    def test_db_rejects_non_positive(self):
        with pytest.raises(InvalidArgument):
            to_db(0.0)

    @given(st.floats(-60, 60, **finite))
    def test_db_round_trip(self, db):
        assert to_db(from_db(db)) == pytest.approx(db, abs=1e-10)

    def test_quadpair_db_accessors(self):
        q = QuadPair.from_db(2.9, 3.01)
        assert (q.x_db, q.p_db) == (pytest.approx(2.9), pytest.approx(3.01))


class TestWigner:
    def test_vacuum_origin(self):
        assert wigner_value(vacuum_state(1), (0, 0)) == pytest.approx(2 / math.pi, rel=1e-15)

    def test_maximum_at_displacement(self):
        s = squeezed_thermal_state(0.4, 1.3, 0.6, 1.5 - 0.5j)
        peak = wigner_value(s, (1.5, -0.5))
        for dx, dp in [(0.01, 0), (-0.01, 0), (0, 0.01), (0, -0.01), (0.01, 0.01)]:
            assert wigner_value(s, (1.5 + dx, -0.5 + dp)) < peak

    def test_matches_rotated_coordinate_form(self):
        """Density written in the rotated primed coordinates of the state."""
        r, tau, th = 0.45, 1.6, 0.8
        s = squeezed_thermal_state(r, tau, th, 0.3 + 0.7j)
        sx, sp = math.exp(-2 * r) * tau / 4, math.exp(2 * r) * tau / 4
        for x, p in [(0.0, 0.0), (0.5, 1.0), (-0.4, 0.2)]:
            dx, dp = x - 0.3, p - 0.7
            xr = dx * math.cos(th) + dp * math.sin(th)
            pr = -dx * math.sin(th) + dp * math.cos(th)
            ref = math.exp(-xr**2 / (2 * sx) - pr**2 / (2 * sp)) / (2 * math.pi * math.sqrt(sx * sp))
            assert wigner_value(s, (x, p)) == pytest.approx(ref, rel=1e-12)

    @pytest.mark.parametrize("args", [(0.0, 1.0, 0.0, 0j), (0.6, 1.7, 0.9, 0.4 - 1j)])
    def test_normalised(self, args):
        s = squeezed_thermal_state(*args)
        sd = math.sqrt(np.linalg.eigvalsh(s.cov).max())
        xs = np.linspace(s.mean[0] - 12 * sd, s.mean[0] + 12 * sd, 801)
        ps = np.linspace(s.mean[1] - 12 * sd, s.mean[1] + 12 * sd, 801)
        X, P = np.meshgrid(xs, ps, indexing="ij")
        grid = wigner_value(s, np.stack([X, P], axis=-1))
        total = np.trapezoid(np.trapezoid(grid, ps, axis=1), xs)
        assert total == pytest.approx(1.0, abs=1e-6)
        assert grid.min() >= 0

    def test_multimode_unsupported(self):
        with pytest.raises(UnsupportedOperation):
            wigner_value(vacuum_state(2), (0, 0))


class TestHomodyne:
    def test_uncorrelated(self):
        rest, var = homodyne_condition(vacuum_state(2), 0, "x", 0.7)
        assert var == 0.25
        assert rest.allclose(vacuum_state(1), atol=0)

    def test_epr_conditioning_against_schur_complement(self):
        r = -0.5 * math.log(0.47)
        epr = make_epr(r, r)
        outcome = 0.3
        rest, var = homodyne_condition(epr, 0, "x", outcome)
        C = epr.cov
        # explicit Schur complement on x1 with a plain inverse
        B = C[[2, 3], 0]
        ref = C[2:, 2:] - np.outer(B, B) / C[0, 0]
        np.testing.assert_allclose(rest.cov, ref, atol=1e-15)
        np.testing.assert_allclose(rest.mean, B / C[0, 0] * outcome, atol=1e-15)
        assert var == C[0, 0]
        assert rest.cov[0, 0] < 0.25

    def test_covariance_independent_of_outcome(self):
        s = make_epr(0.4, 0.5)
        a, _ = homodyne_condition(s, 1, "p", -1.0)
        b, _ = homodyne_condition(s, 1, "p", 2.5)
        np.testing.assert_array_equal(a.cov, b.cov)
        assert not np.allclose(a.mean, b.mean)

    def test_zero_variance_measurement_is_exact(self):
        cov = np.diag([0.0, 10.0, 0.25, 0.25])
        s = GaussianState(np.zeros(4), cov)
        rest, var = homodyne_condition(s, 0, "x", 1.0)
        assert var == 0.0
        assert rest.allclose(vacuum_state(1), atol=0)

    def test_single_mode_rejected(self):
        with pytest.raises(InvalidArgument):
            homodyne_condition(vacuum_state(1), 0, "x", 0.0)

    @given(st.integers(0, 2**32 - 1), st.sampled_from(["x", "p"]))
    def test_marginal_variance_is_diagonal_entry(self, seed, quad):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 4))
        state = GaussianState(rng.normal(size=2 * n), random_physical_cov(rng, n))
        mode = int(rng.integers(n))
        _, var = homodyne_condition(state, mode, quad, rng.normal())
        assert var == state.cov[2 * mode + (quad == "p"), 2 * mode + (quad == "p")]


def test_symplectic_eigenvalues_of_thermal():
    cov = np.diag([0.3, 0.3, 0.7, 0.7])
    np.testing.assert_allclose(symplectic_eigenvalues(cov), [0.3, 0.7])
