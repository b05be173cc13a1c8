"""Compiled vs pure kernel equivalence.

The two backends are meant to be arithmetic-identical, not merely close:
every assertion here is bit-exact.
"""

import numpy as np
import pytest

from gtvsoftmax import SolverConfig, backend, graph_softmax
from gtvsoftmax.solver import gradient

from conftest import random_adjacency

pytestmark = pytest.mark.skipif(
    not backend.HAVE_COMPILED, reason="Cython kernels not built"
)


def kernels():
    return backend.compiled_kernels()


class TestKernelParity:
    def test_projection_bit_identical(self):
        rng = np.random.default_rng(0)
        for _ in range(300):
            n = int(rng.integers(1, 200))
            scale = 10.0 ** rng.integers(-6, 7)
            a = rng.uniform(-scale, scale, size=n)
            pure = backend.pure_project_simplex(a)
            compiled = kernels().project_simplex(a)
            assert (pure == compiled).all()

    def test_projection_with_ties(self):
        a = np.array([0.3, 0.3, 0.3, -0.1, -0.1])
        assert (backend.pure_project_simplex(a) == kernels().project_simplex(a)).all()

    def test_matvec_bit_identical(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            n = int(rng.integers(2, 120))
            adj = random_adjacency(rng, n, per_row=3)
            m = adj.matrix
            x = rng.normal(size=n)
            pure = backend.pure_matvec(m, x)
            compiled = kernels().csr_matvec(m.indptr, m.indices, m.data, x)
            assert (pure == compiled).all()

    def test_rmatvec_bit_identical(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            n = int(rng.integers(2, 120))
            adj = random_adjacency(rng, n, per_row=3)
            m = adj.matrix
            x = rng.normal(size=n)
            pure = backend.pure_rmatvec(m, x)
            compiled = kernels().csr_rmatvec(m.indptr, m.indices, m.data, x, n)
            assert (pure == compiled).all()

    def test_matvec_against_dense(self):
        rng = np.random.default_rng(3)
        adj = random_adjacency(rng, 25, per_row=4)
        dense = adj.matrix.toarray()
        x = rng.normal(size=25)
        np.testing.assert_allclose(backend.matvec(adj.matrix, x), dense @ x, atol=1e-14)
        np.testing.assert_allclose(backend.rmatvec(adj.matrix, x), dense.T @ x, atol=1e-14)


class TestSolveParity:
    def test_graph_softmax_backend_independent(self, monkeypatch):
        rng = np.random.default_rng(4)
        for variant in ("norm", "squared_norm"):
            n = int(rng.integers(20, 80))
            adj = random_adjacency(rng, n)
            z = rng.normal(size=n) * 3
            cfg = SolverConfig(lam=1.2, tv_variant=variant, init="uniform", max_iters=30)

            compiled_res = graph_softmax(z, adj, cfg)
            monkeypatch.setattr(backend, "matvec", backend.pure_matvec)
            monkeypatch.setattr(backend, "rmatvec", backend.pure_rmatvec)
            monkeypatch.setattr(backend, "project_simplex", backend.pure_project_simplex)
            pure_res = graph_softmax(z, adj, cfg)
            monkeypatch.undo()

            assert (compiled_res.x == pure_res.x).all()
            assert compiled_res.trace == pure_res.trace
            assert compiled_res.objective_trace == pure_res.objective_trace

    def test_gradient_backend_independent(self, monkeypatch):
        rng = np.random.default_rng(5)
        n = 60
        adj = random_adjacency(rng, n)
        x = rng.dirichlet(np.ones(n))
        z = rng.normal(size=n)
        cfg = SolverConfig(lam=0.9)
        compiled_g = gradient(x, z, adj, cfg)
        monkeypatch.setattr(backend, "matvec", backend.pure_matvec)
        monkeypatch.setattr(backend, "rmatvec", backend.pure_rmatvec)
        pure_g = gradient(x, z, adj, cfg)
        assert (compiled_g == pure_g).all()
