import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from minlen_delta import (PotentialSpec, bound_energy_series, bound_wavefunction, kempf_bound_energy,
                          make_deformation, norm_integral, solve_bound_state)
from minlen_delta.bound import bound_wavefunction_grid, printed_prefactor, spectral_function

# mpmath references (tests/oracles/generate.py)
KEMPF_E = {1.0: -0.190983005625052575897706582817,
           0.1: -0.318733462447556558545141444093,
           0.01: -0.419601084501919787163358542192}
CUTOFF_B10_Q = 0.940313297809739070068730978522
KEMPF_BY_B = {  # b: (q, N, psi(0))
    1.0: (0.540725011832535039201371727565, 0.142481348474691098208790457132,
          0.447618357641656846514650037117),
    10.0: (0.878713059941533649745987184508, 0.264142830034484483705452326203,
           0.829829174334753845794273431904),
}

NORM_CASES = [("undeformed", {}), ("cutoff", dict(b=10.0)), ("kempf", dict(beta=0.1)),
              ("maxmomentum", dict(beta=0.1))]


def test_potential_spec():
    pot = PotentialSpec(2.0, hbar=0.5, m=3.0)
    assert pot.vtilde == 3.0 * 2.0 / (math.pi * 0.5)
    assert PotentialSpec.from_vtilde(pot.vtilde, 0.5, 3.0).V0 == pytest.approx(2.0, rel=1e-15)
    for bad in (dict(V0=0.0), dict(V0=1.0, hbar=-1.0), dict(V0=1.0, m=math.nan)):
        with pytest.raises(ValueError):
            PotentialSpec(**bad)


class TestSpectralFunction:
    def test_undeformed_closed_form(self):
        d = make_deformation("undeformed")
        pot = PotentialSpec(1.0)
        for q in (0.3, 1.0, 4.0):
            assert spectral_function(d, pot, q) == pytest.approx(math.pi * pot.vtilde / q - 1, abs=1e-10)
        assert abs(spectral_function(d, pot, math.pi * pot.vtilde)) < 1e-10

    @given(q=st.floats(min_value=0.05, max_value=20), beta=st.sampled_from([0.01, 0.3, 1.0]))
    def test_kempf_closed_form(self, q, beta):
        d = make_deformation("kempf", beta=beta)
        pot = PotentialSpec(1.3)
        expected = math.pi * pot.vtilde / (q * (1 + math.sqrt(beta) * q)) - 1
        assert spectral_function(d, pot, q) == pytest.approx(expected, rel=1e-10, abs=1e-11)

    def test_strictly_decreasing(self, builtin, unit_potential):
        qs = np.geomspace(0.01, 50, 50)
        F = [spectral_function(builtin, unit_potential, q) for q in qs]
        assert np.all(np.diff(F) < 0)

    def test_rejects_nonpositive_q(self, builtin, unit_potential):
        with pytest.raises(ValueError):
            spectral_function(builtin, unit_potential, 0.0)


class TestSolve:
    def test_undeformed(self, unit_potential):
        state = solve_bound_state(make_deformation("undeformed"), unit_potential)
        assert state.q == pytest.approx(1.0, abs=1e-10)
        assert state.E == pytest.approx(-0.5, abs=1e-10)

    @pytest.mark.parametrize("beta", sorted(KEMPF_E))
    def test_kempf(self, beta, unit_potential):
        state = solve_bound_state(make_deformation("kempf", beta=beta), unit_potential)
        assert state.E == pytest.approx(KEMPF_E[beta], abs=1e-10)

    def test_cutoff(self, unit_potential):
        state = solve_bound_state(make_deformation("cutoff", b=10.0), unit_potential)
        assert state.q == pytest.approx(CUTOFF_B10_Q, abs=1e-10)

    def test_state_invariants(self, builtin, unit_potential):
        state = solve_bound_state(builtin, unit_potential)
        assert state.E == -state.q ** 2 / 2
        assert state.i2 > 0
        assert state.norm_const == pytest.approx(1 / math.sqrt(2 * math.pi * state.i2), rel=1e-15)

    def test_bracket_expands_for_strong_coupling(self):
        state = solve_bound_state(make_deformation("undeformed"), PotentialSpec(500.0))
        assert state.q == pytest.approx(500.0, rel=1e-10)

    @given(beta=st.floats(min_value=1e-6, max_value=0.05))
    def test_minimal_length_lifts_level(self, beta):
        pot = PotentialSpec(1.0)
        assert kempf_bound_energy(beta, pot) > -0.5


class TestKempfClosedForm:
    @pytest.mark.parametrize("beta", sorted(KEMPF_E))
    def test_matches_oracle(self, beta, unit_potential):
        assert kempf_bound_energy(beta, unit_potential) == pytest.approx(KEMPF_E[beta], abs=1e-14)

    def test_undeformed_limit(self, unit_potential):
        assert kempf_bound_energy(1e-10, unit_potential) == pytest.approx(-0.5, abs=1e-4)

    def test_series_terms(self, unit_potential):
        assert bound_energy_series(0.0, unit_potential) == -0.5
        assert bound_energy_series(0.01, unit_potential) == pytest.approx(-0.425, abs=1e-15)

    def test_series_defect_oracle(self, unit_potential):
        # series minus closed form at beta = 1e-4 and 1e-6
        for beta, defect in ((1e-4, -6.79639241501411e-6), (1e-6, -6.97906578621258e-9)):
            got = bound_energy_series(beta, unit_potential) - kempf_bound_energy(beta, unit_potential)
            assert got == pytest.approx(defect, rel=1e-6)


class TestWavefunction:
    @given(x=st.floats(min_value=0, max_value=30))
    def test_even(self, x):
        d = make_deformation("kempf", beta=1.0)
        pot = PotentialSpec(1.0)
        state = solve_bound_state(d, pot)
        assert bound_wavefunction(d, state, pot, -x) == bound_wavefunction(d, state, pot, x)

    def test_large_cutoff_approaches_textbook(self, unit_potential):
        d = make_deformation("cutoff", b=1e3)
        state = solve_bound_state(d, unit_potential)
        assert bound_wavefunction(d, state, unit_potential, 1.0) == pytest.approx(math.exp(-1), abs=1e-3)

    def test_undeformed_is_textbook(self, unit_potential):
        d = make_deformation("undeformed")
        state = solve_bound_state(d, unit_potential)
        for x in (0.0, 0.5, 2.0):
            assert bound_wavefunction(d, state, unit_potential, x) == pytest.approx(math.exp(-x), abs=1e-9)

    @pytest.mark.parametrize("b", sorted(KEMPF_BY_B))
    def test_kempf_normalisation_oracle(self, b, unit_potential):
        q, N, psi0 = KEMPF_BY_B[b]
        d = make_deformation("kempf", b=b)
        state = solve_bound_state(d, unit_potential)
        assert state.q == pytest.approx(q, rel=1e-12)
        assert state.norm_const == pytest.approx(N, rel=1e-10)
        assert bound_wavefunction(d, state, unit_potential, 0.0) == pytest.approx(psi0, rel=1e-10)

    def test_narrow_domain_lowers_peak(self, unit_potential):
        peaks = {}
        for b in (1.0, 10.0):
            d = make_deformation("kempf", b=b)
            peaks[b] = bound_wavefunction(d, solve_bound_state(d, unit_potential), unit_potential, 0.0)
        assert peaks[10.0] > peaks[1.0]

    def test_printed_prefactor_ratio(self, unit_potential):
        d = make_deformation("kempf", beta=0.3)
        state = solve_bound_state(d, unit_potential)
        assert printed_prefactor(d, state) / state.norm_const == pytest.approx(math.sqrt(2 * math.pi), rel=1e-10)
        alt = bound_wavefunction(d, state, unit_potential, 0.7, normalization="printed")
        ref = bound_wavefunction(d, state, unit_potential, 0.7)
        assert alt / ref == pytest.approx(math.sqrt(2 * math.pi), rel=1e-10)
        with pytest.raises(ValueError):
            printed_prefactor(make_deformation("cutoff", b=3.0), state)

    def test_grid_matches_pointwise(self, unit_potential):
        d = make_deformation("maxmomentum", beta=0.1)
        state = solve_bound_state(d, unit_potential)
        xs = np.array([-7.0, -1.3, 0.0, 0.4, 12.5])
        pointwise = [bound_wavefunction(d, state, unit_potential, x) for x in xs]
        assert np.allclose(bound_wavefunction_grid(d, state, unit_potential, xs), pointwise, atol=1e-11)

    @pytest.mark.parametrize("kind,kwargs", NORM_CASES)
    def test_normalised(self, kind, kwargs, unit_potential):
        d = make_deformation(kind, **kwargs)
        state = solve_bound_state(d, unit_potential)
        assert norm_integral(d, state, unit_potential) == pytest.approx(1.0, abs=1e-5)
