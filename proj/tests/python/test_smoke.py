"""Smoke tests for the python bindings."""

import math

import pytest

import dstomo


@pytest.fixture(scope="module")
def design():
    return dstomo.reference_design()


def test_slit_mode_peak():
    assert dstomo.slit_mode(1, -2.0, 2.0) == pytest.approx(math.pi ** -0.25, rel=1e-12)


def test_propagation_matches_slit_plane():
    v = dstomo.propagate_mode(2, 0.7, 0.0, 2.0)
    assert v.real == pytest.approx(dstomo.slit_mode(2, 0.7, 2.0), rel=1e-12)
    assert abs(v.imag) < 1e-14


def test_envelope_even_and_positive():
    for xi in (0.0, 0.5, 2.2, 7.0):
        a = dstomo.intensity_envelope(xi, 3.4678, 2.76444)
        b = dstomo.intensity_envelope(-xi, 3.4678, 2.76444)
        assert a > 0
        assert a == pytest.approx(b, rel=1e-12)


def test_bloch_curve_unit_norm():
    s = dstomo.bloch_of_w(0.5, 3.0)
    assert sum(v * v for v in s) == pytest.approx(1.0, abs=1e-12)
    assert dstomo.bloch_of_w(0.0, 1.0)[0] == pytest.approx(1.0)


def test_reference_design_is_balanced(design):
    assert design.solution.zeta == pytest.approx(3.4678, abs=1e-3)
    assert design.delta == pytest.approx(2.76444, abs=1e-3)
    povm = dstomo.build_povm(design.solution, design.delta)
    assert povm.closure_residual < 1e-6
    for el in povm.elements:
        assert el.weight == pytest.approx(0.5, abs=1e-6)
    assert dstomo.gram_max_error(design.solution) < 1e-9


def test_search_finds_reference():
    sols = dstomo.search_tetrahedra(3.0, 4.0, n_starts=300, seed=7)
    assert len(sols) >= 1
    assert sols[0].zeta == pytest.approx(3.4678, abs=1e-3)
    assert sols[0].residual < 1e-12


def test_probabilities_and_inversion(design):
    povm = dstomo.build_povm(design.solution, design.delta)
    p = dstomo.ideal_probabilities([0.0, 0.0, 0.0], povm)
    assert list(p) == pytest.approx([0.25] * 4, abs=1e-12)

    r = [0.3, -0.2, 0.4]
    p = dstomo.ideal_probabilities(r, povm)
    r_hat = dstomo.linear_invert(p, povm)
    assert list(r_hat) == pytest.approx(r, abs=1e-10)


def test_simulate_and_reconstruct(design):
    layout = dstomo.make_layout(design.solution, design.delta, 0.01)
    povm = dstomo.build_povm(design.solution, design.delta, 0.01)
    truth = povm.elements[0].s
    counts = dstomo.simulate_counts(truth, layout, 3_000_000, seed=5)
    assert counts.accepted() > 10_000
    r_hat = dstomo.mle_reconstruct(counts, povm)
    assert dstomo.fidelity(truth, r_hat) > 0.99


def test_sampling_is_deterministic(design):
    layout = dstomo.make_layout(design.solution, design.delta)
    a = dstomo.sample_positions([0.0, 0.0, 0.0], layout, 1000, seed=42)
    b = dstomo.sample_positions([0.0, 0.0, 0.0], layout, 1000, seed=42)
    assert a == b


def test_physical_geometry_round_trip(design):
    g = dstomo.to_physical(design.solution, design.delta, 650e-9, 100e-6)
    assert g.two_d_m * 1e6 == pytest.approx(553, abs=1)
    assert g.z_det_m * 100 == pytest.approx(33.53, abs=0.05)
    delta, zeta, _ = dstomo.from_physical(g)
    assert delta == pytest.approx(design.delta, rel=1e-12)
    assert zeta == pytest.approx(design.solution.zeta, rel=1e-12)


def test_unphysical_state_rejected():
    with pytest.raises(ValueError):
        dstomo.detection_pdf([1.5, 0.0, 0.0], 0.0, 1.0, 2.0)


def test_fidelity_bounds():
    assert dstomo.fidelity([0, 0, 1], [0, 0, -1]) == pytest.approx(0.0, abs=1e-12)
    assert dstomo.trace_distance([0, 0, 1], [0, 0, -1]) == pytest.approx(1.0)
