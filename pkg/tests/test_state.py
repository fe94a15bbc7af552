import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lindfringe.state import (
    BlochState,
    DensityMatrix,
    ExitProjector,
    Orientation,
    Port,
    StateError,
    from_bloch,
    initial_state,
    intensity,
    intensity_from_vector,
    to_bloch,
)

angles = st.floats(-20.0, 20.0, allow_nan=False)


@st.composite
def bloch_vectors(draw, radius=0.5):
    v = np.array([draw(st.floats(-1, 1)) for _ in range(3)])
    r = draw(st.floats(0, radius))
    n = np.linalg.norm(v)
    if n == 0:
        return BlochState(0.0, 0.0, 0.0)
    v = v / n * r
    return BlochState(*v)


@pytest.mark.parametrize(
    "dm, expected",
    [
        (DensityMatrix(0.5, 0.5, 0.5), (0.5, 0.0, 0.0)),
        (DensityMatrix(1.0, 0.0, 0.0), (0.0, 0.0, 0.5)),
        (DensityMatrix(0.5, 0.5, -0.5), (-0.5, 0.0, 0.0)),
    ],
)
def test_to_bloch_examples(dm, expected):
    assert to_bloch(dm).as_array().tolist() == list(expected)


@pytest.mark.parametrize(
    "b, expected",
    [
        (BlochState(0.5, 0, 0), (0.5, 0.5, 0.5, 0.0)),
        (BlochState(0, 0, 0), (0.5, 0.5, 0.0, 0.0)),
        (BlochState(0, 0, -0.5), (0.0, 1.0, 0.0, 0.0)),
    ],
)
def test_from_bloch_examples(b, expected):
    dm = from_bloch(b)
    assert (dm.rho1, dm.rho2, dm.rho3_re, dm.rho3_im) == expected


def test_imaginary_coherence_maps_to_r2():
    dm = DensityMatrix(0.5, 0.5, 0.0, 0.25)
    assert to_bloch(dm).r2 == -0.25
    assert np.allclose(dm.matrix(), dm.matrix().conj().T)


def test_dyadic_round_trip_is_exact():
    for r in [(0.25, -0.125, 0.0625), (0.0, 0.5, 0.0), (-0.375, 0.0, 0.25)]:
        b = BlochState(*r)
        assert to_bloch(from_bloch(b)) == b


@given(bloch_vectors())
def test_round_trip_within_one_ulp(b):
    back = to_bloch(from_bloch(b)).as_array()
    assert np.all(np.abs(back - b.as_array()) <= 2.3e-16)


@given(bloch_vectors())
def test_density_matrix_positive_iff_inside_ball(b):
    eig = np.linalg.eigvalsh(from_bloch(b).matrix())
    assert eig.min() >= -1e-12
    assert eig.sum() == pytest.approx(1.0, abs=1e-15)


def test_invalid_states_rejected():
    with pytest.raises(StateError):
        DensityMatrix(0.7, 0.7)
    with pytest.raises(StateError):
        DensityMatrix(0.5, 0.5, 0.6)
    with pytest.raises(StateError):
        BlochState(0.5, 0.1, 0.0)
    with pytest.raises(StateError):
        DensityMatrix.from_matrix([[0.5, 0.1], [0.3, 0.5]])


def test_from_matrix_round_trip():
    m = np.array([[0.75, 0.25 + 0.125j], [0.25 - 0.125j, 0.25]])
    assert np.array_equal(DensityMatrix.from_matrix(m).matrix(), m)


def test_initial_states():
    assert initial_state(Orientation.ONE) == BlochState(0.5, 0, 0)
    assert initial_state(Orientation.TWO) == BlochState(-0.5, 0, 0)
    for o in Orientation:
        assert initial_state(o).norm == 0.5


def test_intensity_examples():
    s = initial_state()
    assert intensity(s, ExitProjector(0.0, Port.PLUS)) == 1.0
    assert intensity(s, ExitProjector(math.pi / 2, Port.PLUS)) == pytest.approx(0.5, abs=1e-16)


@given(bloch_vectors(), angles)
def test_ports_sum_to_one(b, theta):
    total = intensity(b, ExitProjector(theta, Port.PLUS)) + intensity(b, ExitProjector(theta, Port.MINUS))
    assert abs(total - 1.0) <= 1e-15


@given(bloch_vectors(), angles, st.sampled_from(list(Port)))
def test_intensity_is_trace_with_projector(b, theta, port):
    proj = ExitProjector(theta, port)
    expected = np.trace(from_bloch(b).matrix() @ proj.matrix()).real
    assert intensity(b, proj) == pytest.approx(expected, abs=1e-14)
    assert 0.0 <= intensity(b, proj) <= 1.0 + 1e-12


@given(angles, st.sampled_from(list(Port)))
def test_projector_is_idempotent_and_ports_complete(theta, port):
    m = ExitProjector(theta, port).matrix()
    assert np.allclose(m @ m, m, atol=1e-15)
    total = ExitProjector(theta, Port.PLUS).matrix() + ExitProjector(theta, Port.MINUS).matrix()
    assert np.allclose(total, np.eye(2), atol=1e-15)


@given(angles)
def test_second_orientation_swaps_ports(theta):
    one, two = initial_state(Orientation.ONE), initial_state(Orientation.TWO)
    assert intensity(two, ExitProjector(theta, Port.PLUS)) == pytest.approx(
        intensity(one, ExitProjector(theta, Port.MINUS)), abs=1e-15)
    assert intensity(two, ExitProjector(theta, Port.PLUS)) == pytest.approx(
        intensity(one, ExitProjector(theta + math.pi, Port.PLUS)), abs=1e-14)


def test_vectorised_intensity():
    theta = np.linspace(0, 2 * np.pi, 7)
    out = intensity_from_vector(0.5, 0.0, theta, "-")
    assert out.shape == theta.shape
    assert np.allclose(out, 0.5 * (1 - np.cos(theta)))


def test_port_parse():
    assert Port.parse("+") is Port.PLUS and Port.parse("minus") is Port.MINUS
    assert Port.parse(-1) is Port.MINUS
    with pytest.raises(ValueError):
        Port.parse("sideways")
