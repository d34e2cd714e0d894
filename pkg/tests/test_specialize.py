import numpy as np
import pytest

from wrdpm import (
    BlockModelSpec,
    ChungLuSpec,
    DomainError,
    NotPSDError,
    SymmetricOffDiagonal,
    WeightedGraph,
    complete_diagonal,
    dot_product_grid,
    draw_vectors,
    factor_psd,
    fit_poisson_er,
    make_chung_lu,
    make_er,
    make_sbm,
    sample_network,
    total_weight,
)

# block parameter matrix worked through in the assortative example
B_EXAMPLE = np.array([
    [0.50, 0.05, 0.10],
    [0.05, 0.40, 0.05],
    [0.10, 0.05, 0.30],
])


def random_offdiag(rng, n, scale=5.0):
    a = rng.uniform(-scale, scale, (n, n))
    a = np.triu(a, 1)
    return SymmetricOffDiagonal(a + a.T)


class TestCompleteDiagonal:
    def test_two_by_two_dominant(self):
        m = SymmetricOffDiagonal(np.array([[0.0, 1.0], [1.0, 0.0]]))
        c = complete_diagonal(m, "dominant", 1.0)
        assert np.array_equal(np.diag(c), [2.0, 2.0])
        assert np.allclose(np.linalg.eigvalsh(c), [1.0, 3.0])

    def test_zero_offdiagonal(self):
        m = SymmetricOffDiagonal(np.zeros((4, 4)))
        c = complete_diagonal(m, "dominant", 1.0)
        assert np.array_equal(c, np.eye(4))

    def test_laplacian_abs_anti_assortative_is_psd_singular(self):
        m = SymmetricOffDiagonal(np.array([[0.0, 1.0], [1.0, 0.0]]))
        c = complete_diagonal(m, "laplacian_abs")
        eigs = np.linalg.eigvalsh(c)
        assert eigs[0] == pytest.approx(0.0, abs=1e-12)
        assert eigs[1] > 0

    def test_delta_must_be_positive(self):
        m = SymmetricOffDiagonal(np.zeros((3, 3)))
        with pytest.raises(ValueError):
            complete_diagonal(m, "dominant", 0.0)

    def test_min_eigenvalue_property(self, rng):
        for _ in range(200):
            m = random_offdiag(rng, int(rng.integers(5, 51)))
            c = complete_diagonal(m, "dominant", 1.0)
            assert np.linalg.eigvalsh(c)[0] >= 1.0 - 1e-9


class TestFactorPsd:
    def test_block_matrix_factorization(self):
        x = factor_psd(B_EXAMPLE)
        assert np.abs(x @ x.T - B_EXAMPLE).max() < 1e-10
        assert np.dot(x[0], x[0]) == pytest.approx(0.5, abs=1e-12)

    def test_identity(self):
        x = factor_psd(np.eye(4))
        assert np.allclose(x @ x.T, np.eye(4), atol=1e-12)
        assert np.allclose(x.T @ x, np.eye(4), atol=1e-12)

    def test_rank_one(self):
        v = np.array([1.0, -2.0, 3.0])
        x = factor_psd(np.outer(v, v), d=1)
        assert np.allclose(np.abs(x[:, 0]), np.abs(v))
        assert np.allclose(np.outer(x[:, 0], x[:, 0]), np.outer(v, v))

    def test_not_psd_reports_eigenvalue(self):
        m = np.array([[0.0, 1.0], [1.0, 0.0]])
        with pytest.raises(NotPSDError, match="-1"):
            factor_psd(m)

    def test_canonical_orientation_deterministic(self, rng):
        m = random_offdiag(rng, 8)
        c = complete_diagonal(m, "dominant", 1.0)
        assert np.array_equal(factor_psd(c), factor_psd(c))

    def test_roundtrip_after_completion(self, rng):
        for _ in range(100):
            m = random_offdiag(rng, int(rng.integers(5, 30)))
            c = complete_diagonal(m, "dominant", 1.0)
            x = factor_psd(c)
            assert np.linalg.norm(x @ x.T - c) <= 1e-10 * np.linalg.norm(c)


class TestMakeEr:
    def test_bernoulli_quarter(self):
        m = make_er(5, "bernoulli", 0.25, d=1)
        assert m.sources[0].vector[0] == pytest.approx(0.5)

    def test_poisson_norm(self):
        m = make_er(5, "poisson", 4.0, d=2)
        v = m.sources[0].vector
        assert np.dot(v, v) == pytest.approx(4.0)

    def test_grid_is_constant(self):
        m = make_er(6, "poisson", 2.0)
        grid = dot_product_grid(draw_vectors(m, 0))
        off = grid[~np.eye(6, dtype=bool)]
        assert np.allclose(off, 2.0)

    def test_out_of_domain(self):
        with pytest.raises(DomainError):
            make_er(5, "bernoulli", 1.5)


class TestFitPoissonEr:
    def test_three_node_example(self):
        w = np.zeros((3, 3))
        w[0, 1] = w[1, 0] = 2
        w[1, 2] = w[2, 1] = 3
        w[0, 2] = w[2, 0] = 1
        m = fit_poisson_er(WeightedGraph(w))
        v = m.sources[0].vector
        assert np.dot(v, v) == pytest.approx(2.0)

    def test_empty_graph_degenerate(self):
        m = fit_poisson_er(WeightedGraph(np.zeros((6, 6))))
        g = sample_network(m, draw_vectors(m, 0), seed=1)
        assert total_weight(g) == 0

    def test_mle_is_exact_ratio(self, rng):
        from fractions import Fraction

        for _ in range(20):
            n = int(rng.integers(2, 20))
            w = rng.integers(0, 6, (n, n)).astype(float)
            w = np.triu(w, 1)
            g = WeightedGraph(w + w.T)
            m = fit_poisson_er(g)
            v = m.sources[0].vector
            lam = float(np.dot(v, v))
            exact = Fraction(int(total_weight(g)), n * (n - 1) // 2)
            assert lam == pytest.approx(float(exact), rel=1e-15)


class TestMakeSbm:
    def test_paper_block_matrix_grid(self):
        spec = BlockModelSpec(B_EXAMPLE, (2, 2, 2))
        m = make_sbm(spec, "poisson")
        vecs = m.sources[0].vectors
        assert np.abs(vecs @ vecs.T - B_EXAMPLE).max() < 1e-10

    def test_all_ones_collapses_to_er(self):
        p = 0.3
        spec = BlockModelSpec(np.full((3, 3), p), (2, 3, 4))
        m = make_sbm(spec, "bernoulli")
        grid = dot_product_grid(draw_vectors(m, 0))
        off = grid[~np.eye(9, dtype=bool)]
        assert np.allclose(off, p, atol=1e-12)

    def test_anti_assortative_not_psd(self):
        spec = BlockModelSpec(np.array([[0.0, 1.0], [1.0, 0.0]]), (2, 2))
        with pytest.raises(NotPSDError):
            make_sbm(spec, "poisson")

    def test_bernoulli_domain_checked_first(self):
        spec = BlockModelSpec(np.array([[0.5, 1.5], [1.5, 0.5]]), (2, 2))
        with pytest.raises(DomainError):
            make_sbm(spec, "bernoulli")

    def test_grid_law_by_community(self):
        spec = BlockModelSpec(B_EXAMPLE, (3, 2, 4))
        m = make_sbm(spec, "poisson")
        grid = dot_product_grid(draw_vectors(m, 0))
        comm = spec.assignment()
        for j in range(spec.n):
            for l in range(spec.n):
                if j != l and comm[j] != comm[l]:
                    assert grid[j, l] == pytest.approx(
                        B_EXAMPLE[comm[j], comm[l]], abs=1e-12
                    )

    def test_magnitude_normalization_equalizes_lengths(self):
        spec = BlockModelSpec(np.array([[0.0, 1.0], [1.0, 0.0]]), (3, 3))
        m = make_sbm(spec, "poisson", magnitude_normalization=True)
        vecs = m.sources[0].vectors
        lengths = np.linalg.norm(vecs, axis=1)
        assert np.allclose(lengths, lengths[0])
        grid = dot_product_grid(draw_vectors(m, 0))
        comm = spec.assignment()
        inter = grid[np.ix_(comm == 0, comm == 1)]
        assert np.allclose(inter, 1.0, atol=1e-12)


class TestMakeChungLu:
    def test_equal_weights(self):
        m = make_chung_lu(ChungLuSpec(np.ones(4)), "bernoulli")
        grid = dot_product_grid(draw_vectors(m, 0))
        off = grid[~np.eye(4, dtype=bool)]
        assert np.allclose(off, 0.25, atol=1e-14)

    def test_poisson_expected_weight(self):
        m = make_chung_lu(ChungLuSpec(np.array([1.0, 2.0, 3.0])), "poisson")
        grid = dot_product_grid(draw_vectors(m, 0))
        assert grid[1, 2] == pytest.approx(1.0, abs=1e-12)

    def test_bernoulli_domain_violation(self):
        with pytest.raises(DomainError):
            make_chung_lu(ChungLuSpec(np.array([10.0, 10.0])), "bernoulli")

    def test_grid_law_random_weights(self, rng):
        w = rng.uniform(0.1, 2.0, 30)
        m = make_chung_lu(ChungLuSpec(w), "poisson")
        grid = dot_product_grid(draw_vectors(m, 0))
        expected = np.outer(w, w) / w.sum()
        assert np.abs(grid - expected).max() < 1e-12


def test_corollary_roundtrip_random_parameters(rng):
    # arbitrary in-domain edge parameters are reproduced exactly off-diagonal
    for _ in range(30):
        n = int(rng.integers(3, 20))
        params = rng.uniform(0.0, 4.0, (n, n))
        params = np.triu(params, 1)
        params = params + params.T
        c = complete_diagonal(SymmetricOffDiagonal(params), "dominant", 1.0)
        x = factor_psd(c)
        grid = x @ x.T
        off = ~np.eye(n, dtype=bool)
        assert np.abs(grid - params)[off].max() < 1e-9
