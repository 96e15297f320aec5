import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coexsim.errors import DomainError, ParameterError
from coexsim.lattice import RadialKernel, Torus, shell_size
from coexsim.rng import NoiseStream, replica_seeds, stream_key


# ---- random streams

def test_blocks_are_pure_functions_of_seed_stream_and_step():
    a = NoiseStream(3, 7).normals(12, (4, 5))
    b = NoiseStream(3, 7).normals(12, (4, 5))
    np.testing.assert_array_equal(a, b)


def test_steps_and_streams_are_distinct():
    s = NoiseStream(3, 7)
    assert not np.array_equal(s.normals(0, 100), s.normals(1, 100))
    assert not np.array_equal(s.normals(0, 100), s.spawn(8).normals(0, 100))
    assert not np.array_equal(s.normals(0, 100), NoiseStream(4, 7).normals(0, 100))


def test_step_can_be_regenerated_out_of_order():
    s = NoiseStream(1, 0)
    later = s.normals(500, 10)
    for k in range(5):
        s.normals(k, 10)
    np.testing.assert_array_equal(s.normals(500, 10), later)


def test_increments_have_requested_variance():
    x = NoiseStream(2, 0).increments(0, 200000, 0.01)
    assert abs(x.var() - 0.01) < 3 * 0.01 * np.sqrt(2 / 200000)


def test_negative_seed_rejected():
    with pytest.raises(ValueError):
        stream_key(-1)


def test_replica_seeds_do_not_depend_on_batch_size():
    a = replica_seeds(9, 10)
    b = replica_seeds(9, 1000)
    np.testing.assert_array_equal(a, b[:10])
    assert len(set(b.tolist())) == 1000
    assert not np.array_equal(replica_seeds(9, 10, stream_id=1), a)


# ---- kernels and torus

def test_shell_sizes():
    assert [shell_size(r, 1) for r in range(4)] == [1, 2, 2, 2]
    assert [shell_size(r, 2) for r in range(3)] == [1, 8, 16]


@given(w=st.lists(st.floats(0, 10), min_size=1, max_size=4), d=st.integers(1, 3))
def test_kernel_total_equals_stencil_sum(w, d):
    k = RadialKernel(w)
    assert k.total(d) == pytest.approx(k.stencil(d).sum(), rel=1e-12, abs=1e-12)
    assert k.total(d, include_diagonal=False) == pytest.approx(k.total(d) - k(0), abs=1e-9)


def test_kernel_range_and_call():
    k = RadialKernel([1.0, 0.0, 2.0, 0.0])
    assert k.range == 2 and k.offdiag_range == 2
    assert k(2) == 2.0 and k(7) == 0.0 and k(-1) == 0.0
    assert RadialKernel.zero().is_zero
    assert RadialKernel([3.0]).offdiag_range == 0


def test_negative_weight_rejected():
    with pytest.raises(ParameterError):
        RadialKernel([1.0, -0.1])


def test_kernel_must_not_wrap():
    t = Torus(1, 4)
    with pytest.raises(DomainError):
        t.check_kernel(RadialKernel([0.0, 1.0]))
    Torus(1, 5).check_kernel(RadialKernel([0.0, 1.0]))
    Torus(2, 1).check_kernel(RadialKernel([2.0]))
    with pytest.raises(DomainError):
        Torus(2, 1).check_kernel(RadialKernel([0.0, 1.0]))


@given(seed=st.integers(0, 2**31), d=st.integers(1, 2), w=st.lists(st.floats(0, 3), min_size=1, max_size=3))
def test_apply_matches_dense_migration_matrix(seed, d, w):
    kernel = RadialKernel(w)
    torus = Torus(d, 7)
    field = np.random.default_rng(seed).random(torus.shape)
    dense = torus.migration_matrix(kernel) @ field.ravel() + kernel(0) * field.ravel()
    np.testing.assert_allclose(torus.apply(kernel, field).ravel(), dense, rtol=1e-12, atol=1e-12)


def test_apply_handles_batch_axes():
    torus = Torus(2, 6)
    kernel = RadialKernel([0.5, 1.0])
    batch = np.random.default_rng(0).random((3,) + torus.shape)
    out = torus.apply(kernel, batch)
    for r in range(3):
        np.testing.assert_allclose(out[r], torus.apply(kernel, batch[r]))


def test_box_max_wraps():
    torus = Torus(1, 8)
    field = np.zeros(8)
    field[7] = 1.0
    out = torus.box_max(field, 1)
    np.testing.assert_array_equal(out, [1, 0, 0, 0, 0, 0, 1, 1])
    with pytest.raises(DomainError):
        torus.box_max(field, 4)


def test_coordinates_and_indices():
    torus = Torus(2, 5)
    np.testing.assert_array_equal(torus.coords(), [0, 1, 2, -2, -1])
    assert torus.index((-1, 2)) == (4, 2)
    assert torus.norm_from_origin()[4, 2] == 2


def test_neighbor_table_rows_match_kernel_total():
    torus = Torus(2, 8)
    kernel = RadialKernel([0.0, 0.25, 0.1])
    targets, weights = torus.neighbor_table(kernel)
    assert targets.shape == (64, 24)
    assert weights.sum() == pytest.approx(kernel.total(2, include_diagonal=False))
    mat = torus.migration_matrix(kernel)
    np.testing.assert_allclose(mat, mat.T)
    np.testing.assert_allclose(mat.sum(axis=1), weights.sum())
