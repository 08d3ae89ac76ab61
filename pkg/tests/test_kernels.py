"""Parity between the numpy fallback and the compiled kernels.

Labels and counts must agree exactly; accumulated floats may differ in the
last bits because summation order differs, so those compare at 1e-10.
"""

import numpy as np
import pytest

from helpers import silhouette_oracle
from traitspace import kernels

pytestmark = pytest.mark.skipif(
    not kernels._HAVE_NUMBA, reason="numba not importable; nothing to compare"
)


def _case(rng, n=40, d=5, k=4):
    x = rng.normal(size=(n, d))
    centroids = rng.normal(size=(k, d))
    labels = rng.integers(0, k, size=n).astype(np.int64)
    return x, centroids, labels


def test_assign_labels_parity(rng):
    for _ in range(5):
        x, centroids, _ = _case(rng)
        lab_np, d2_np = kernels._assign_labels_np(x, centroids)
        lab_nb, d2_nb = kernels._assign_labels_nb(x, centroids)
        assert np.array_equal(lab_np, lab_nb)
        assert np.allclose(d2_np, d2_nb, atol=1e-10)


def test_assign_labels_tie_goes_to_lowest_index():
    x = np.array([[0.0, 0.0]])
    centroids = np.array([[1.0, 0.0], [-1.0, 0.0]])
    for impl in (kernels._assign_labels_np, kernels._assign_labels_nb):
        labels, _ = impl(x, centroids)
        assert labels[0] == 0


def test_centroid_sums_parity(rng):
    x, _, labels = _case(rng)
    sums_np, counts_np = kernels._centroid_sums_np(x, labels, 4)
    sums_nb, counts_nb = kernels._centroid_sums_nb(x, labels, 4)
    assert np.array_equal(counts_np, counts_nb)
    assert np.allclose(sums_np, sums_nb, atol=1e-10)


def test_centroid_sums_empty_cluster_row_is_zero(rng):
    x = np.ones((3, 2))
    labels = np.zeros(3, dtype=np.int64)
    sums, counts = kernels.centroid_sums(x, labels, 3)
    assert counts.tolist() == [3, 0, 0]
    assert np.all(sums[1:] == 0.0)


def test_min_sqdist_update_parity(rng):
    x, centroids, _ = _case(rng)
    d2_np = np.full(x.shape[0], np.inf)
    d2_nb = np.full(x.shape[0], np.inf)
    for c in centroids:
        kernels._min_sqdist_update_np(x, c, d2_np)
        kernels._min_sqdist_update_nb(x, c, d2_nb)
    assert np.allclose(d2_np, d2_nb, atol=1e-10)


def test_silhouette_parity_and_oracle(rng):
    for _ in range(3):
        x, _, labels = _case(rng, n=25, d=3, k=3)
        s_np = kernels._silhouette_mean_np(x, labels, 3)
        s_nb = kernels._silhouette_mean_nb(x, labels, 3)
        oracle = silhouette_oracle(x, labels)
        assert abs(s_np - s_nb) < 1e-10
        assert abs(s_np - oracle) < 1e-9


def test_dispatch_uses_selected_backend():
    assert kernels.BACKEND in ("numba", "numpy")
    x = np.array([[0.0], [4.0]])
    centroids = np.array([[1.0]])
    labels, d2 = kernels.assign_labels(x, centroids)
    assert labels.tolist() == [0, 0]
    assert np.allclose(d2, [1.0, 9.0])


def test_numpy_backend_selectable_via_env(tmp_path):
    import subprocess
    import sys

    code = "from traitspace import kernels; print(kernels.BACKEND)"
    out = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True,
        text=True,
        env={"PATH": "/usr/bin:/bin", "TRAITSPACE_KERNELS": "numpy"},
    )
    assert out.stdout.strip() == "numpy"


def test_bad_env_value_rejected():
    import subprocess
    import sys

    code = "import traitspace.kernels"
    out = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True,
        text=True,
        env={"PATH": "/usr/bin:/bin", "TRAITSPACE_KERNELS": "sideways"},
    )
    assert out.returncode != 0
