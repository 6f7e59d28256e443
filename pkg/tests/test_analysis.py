import math

import numpy as np
import pytest

from atompair import (
    InitialAmplitudes,
    SystemParams,
    bell_state,
    concurrence,
    concurrence_series,
    density_matrix,
    disentanglement_time,
    integrate_pseudomode,
    sample_closed_form,
    steady_state_verdict,
)

from conftest import INV_SQRT2, SQRT3_2, equal_params, fig_params, random_init, random_params

DARK_PLATEAU = (3.0 + 2.0 * math.sqrt(3.0)) / 8.0  # 0.8080127..., r1 = sqrt(3)/2 case


class TestDensityMatrix:
    def test_single_excited_atom(self):
        rho = density_matrix(1.0, 0.0)
        expected = np.zeros((4, 4), dtype=complex)
        expected[1, 1] = 1.0
        assert np.allclose(rho, expected, atol=1e-15)

    def test_bell_minus_projector(self):
        rho = density_matrix(INV_SQRT2, -INV_SQRT2)
        block = rho[1:3, 1:3]
        assert np.allclose(
            block, 0.5 * np.array([[1.0, -1.0], [-1.0, 1.0]]), atol=1e-12
        )
        assert abs(rho[3, 3]) < 1e-12

    def test_partial_decay_entries(self):
        rho = density_matrix(0.6, 0.3j)
        assert rho[3, 3] == pytest.approx(0.55, abs=1e-12)
        assert rho[1, 2] == pytest.approx(-0.18j, abs=1e-12)

    def test_structure(self, rng):
        for _ in range(20):
            c = random_init(rng)
            scale = rng.uniform(0.1, 1.0)
            c1, c2 = scale * c.c10, scale * c.c20
            rho = density_matrix(c1, c2)
            assert np.allclose(rho, rho.conj().T, atol=1e-14)
            assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
            assert np.abs(rho[0, :]).max() == 0.0
            assert np.abs(rho[:, 0]).max() == 0.0
            evals = np.sort(np.linalg.eigvalsh(rho))
            assert evals[0] > -1e-12
            pop = abs(c1) ** 2 + abs(c2) ** 2
            expected = np.sort([0.0, 0.0, pop, 1.0 - pop])
            assert np.abs(evals - expected).max() < 1e-10

    def test_rejects_unphysical_population(self):
        with pytest.raises(ValueError, match="exceeds 1"):
            density_matrix(1.0, 0.5)


class TestConcurrence:
    def test_examples(self):
        assert concurrence(INV_SQRT2, INV_SQRT2) == pytest.approx(1.0, abs=1e-12)
        assert concurrence(1.0, 0.0) == 0.0
        assert concurrence(0.6, 0.3j) == pytest.approx(0.36, abs=1e-12)

    def test_range_and_zeroterms(self, rng):
        for _ in range(30):
            c = random_init(rng)
            scale = rng.uniform(0.0, 1.0)
            val = concurrence(scale * c.c10, scale * c.c20)
            assert 0.0 <= val <= 1.0
        assert concurrence(0.0, 0.9) == 0.0

    def test_rejects_unphysical_population(self):
        with pytest.raises(ValueError):
            concurrence(0.9, 0.9)

    def test_phase_invariance(self, rng):
        c = random_init(rng)
        ph = np.exp(0.37j)
        assert concurrence(c.c10, c.c20) == pytest.approx(
            concurrence(ph * c.c10, ph * c.c20), rel=1e-14
        )


class TestVerdict:
    def test_equal_coupling_single_excitation(self):
        v = steady_state_verdict(equal_params(K=3.0), InitialAmplitudes(1.0, 0.0))
        assert v.steady and v.regime == "equal_coupling"
        assert v.asymptotic_concurrence == pytest.approx(0.5, abs=1e-12)
        assert v.surviving_pole == pytest.approx(3j, abs=1e-12)

    def test_equal_coupling_protected_bell(self):
        v = steady_state_verdict(equal_params(K=11.0), bell_state("minus"))
        assert v.asymptotic_concurrence == pytest.approx(1.0, abs=1e-12)

    def test_zero_dipole_dark_projection(self):
        p = fig_params(K=0.0)
        v = steady_state_verdict(p, bell_state("minus"))
        assert v.steady and v.regime == "zero_K"
        assert v.surviving_pole == 0.0
        assert v.asymptotic_concurrence == pytest.approx(DARK_PLATEAU, abs=1e-12)
        # long-horizon integration agrees
        traj = integrate_pseudomode(p, bell_state("minus"), 200.0)
        _, conc = concurrence_series(traj)
        assert conc[-1] == pytest.approx(DARK_PLATEAU, abs=1e-4)

    def test_generic_case_decays(self):
        v = steady_state_verdict(fig_params(K=2.0), bell_state("minus"))
        assert not v.steady
        assert v.regime == "decaying"
        assert v.surviving_pole is None
        assert v.asymptotic_concurrence == 0.0

    def test_rejects_decoupled_reservoir(self):
        p = SystemParams(lam=1.0, W=0.0, alpha1=1.0, alpha2=1.0, K=2.0)
        with pytest.raises(ValueError, match="W > 0"):
            steady_state_verdict(p, bell_state("minus"))

    def test_verdict_matches_longtime_numerics(self, rng):
        # steady iff |c1 c2| survives at the spectral-gap horizon
        from atompair import asymptotic_t_end, residue_coefficients

        cases = []
        for _ in range(6):
            cases.append(fig_params(K=0.0, R=rng.uniform(2.0, 15.0), r1=rng.uniform(0.1, 0.9)))
            cases.append(equal_params(K=rng.uniform(-15.0, 15.0), R=rng.uniform(2.0, 15.0)))
            cases.append(random_params(rng))
        for p in cases:
            init = random_init(rng)
            v = steady_state_verdict(p, init)
            t_end = asymptotic_t_end(p)
            c1, c2, _ = residue_coefficients(p, init).evolve(t_end)
            survived = abs(c1 * c2) > 1e-6
            assert survived == v.steady

    def test_phase_invariant(self, rng):
        p = fig_params(K=0.0)
        init = random_init(rng)
        ph = np.exp(1.2j)
        shifted = InitialAmplitudes(ph * init.c10, ph * init.c20)
        a = steady_state_verdict(p, init)
        b = steady_state_verdict(p, shifted)
        assert a.regime == b.regime
        assert a.asymptotic_concurrence == pytest.approx(
            b.asymptotic_concurrence, rel=1e-12
        )


class TestSeries:
    def test_protected_state_stays_maximal(self):
        p = equal_params(K=7.0)
        traj = sample_closed_form(p, bell_state("minus"), np.linspace(0.0, 50.0, 501))
        _, conc = concurrence_series(traj)
        assert np.abs(conc - 1.0).max() < 1e-9

    def test_bell_states_start_maximal(self):
        for sign in ("plus", "minus"):
            traj = sample_closed_form(
                fig_params(K=2.0), bell_state(sign), np.linspace(0.0, 1.0, 11)
            )
            _, conc = concurrence_series(traj)
            assert conc[0] == pytest.approx(1.0, abs=1e-9)

    def test_single_excitation_never_entangles(self):
        p = SystemParams(lam=1.0, W=10.0, alpha1=1.0, alpha2=0.0, K=0.0)
        traj = integrate_pseudomode(p, InitialAmplitudes(1.0, 0.0), 10.0)
        _, conc = concurrence_series(traj)
        assert conc.max() == 0.0


class TestDisentanglementTime:
    def test_steady_case_never_crosses(self):
        p = fig_params(K=0.0)
        traj = sample_closed_form(p, bell_state("minus"), np.linspace(0.0, 80.0, 8001))
        series = concurrence_series(traj)
        assert disentanglement_time(series, 0.1, window=1.0) is None

    def test_decaying_case_crosses(self):
        p = fig_params(K=7.0)
        traj = sample_closed_form(p, bell_state("minus"), np.linspace(0.0, 40.0, 4001))
        series = concurrence_series(traj)
        td = disentanglement_time(series, 0.1, window=1.0)
        assert td is not None and 0.0 < td < 20.0

    def test_constant_series_never_crosses(self):
        t = np.linspace(0.0, 10.0, 101)
        assert disentanglement_time((t, np.ones_like(t)), 0.5, window=1.0) is None

    def test_debounce_skips_transient_dips(self):
        t = np.linspace(0.0, 10.0, 1001)
        vals = np.ones_like(t)
        vals[(t > 2.0) & (t < 2.5)] = 0.01  # short dip, shorter than the window
        vals[t > 6.0] = 0.01               # final crossing
        td = disentanglement_time((t, vals), 0.1, window=1.0)
        assert td == pytest.approx(t[t > 6.0][0], abs=1e-9)

    def test_unconfirmed_tail_is_not_a_crossing(self):
        t = np.linspace(0.0, 10.0, 101)
        vals = np.ones_like(t)
        vals[t > 9.5] = 0.01  # crosses, but the series ends inside the window
        assert disentanglement_time((t, vals), 0.1, window=1.0) is None

    def test_threshold_validation(self):
        t = np.linspace(0.0, 1.0, 11)
        with pytest.raises(ValueError, match="threshold"):
            disentanglement_time((t, np.ones_like(t)), 1.5, window=1.0)


class TestPublishedFormDiscrepancy:
    def test_published_zero_dipole_form_overshoots(self):
        # A published closed form for the zero-dipole asymptote evaluates to
        # ~1.29 (> 1) for the protected Bell state at r1 = sqrt(3)/2, while
        # the dark-projection value matches long-time numerics; they differ
        # by the factor r1^4 + r2^4.
        r1, r2 = SQRT3_2, 0.5
        alpha = r1 / r2
        init = bell_state("minus")
        published = (
            2.0
            * abs(init.c10 / alpha - init.c20)
            * abs(alpha * init.c20 - init.c10)
            / (alpha ** 2 + alpha ** -2)
        )
        assert published > 1.0
        dark = 2.0 * r1 * r2 * abs(r2 * init.c10 - r1 * init.c20) ** 2
        assert dark == pytest.approx(DARK_PLATEAU, abs=1e-12)
        assert published == pytest.approx(dark / (r1 ** 4 + r2 ** 4), rel=1e-12)
