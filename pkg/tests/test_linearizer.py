"""Forward paths, complexity accounting, and parameter serialization."""

import json
import time

import numpy as np
import pytest

from memlin import (
    HammersteinParams,
    NonlinearityKind,
    ProposedParams,
    ValidationError,
    bias_grid,
    hammerstein_forward,
    mult_add_count,
    nonlinearity,
    params_from_dict,
    params_to_dict,
    proposed_forward,
)
from memlin.linearizer import load_params, save_params

ABS, RELU = NonlinearityKind.ABS, NonlinearityKind.RELU


def random_proposed(rng, n=5, kind=ABS):
    biases = np.sort(rng.uniform(-1, 1, n))
    while np.any(np.diff(biases) == 0):
        biases = np.sort(rng.uniform(-1, 1, n))
    return ProposedParams(
        c0=rng.normal() * 0.01,
        delta_c1=rng.normal() * 0.1,
        weights=rng.normal(size=n) * 0.3,
        biases=biases,
        kind=kind,
    )


def test_nonlinearity_values():
    assert nonlinearity(ABS, -0.3) == 0.3
    assert nonlinearity(RELU, -0.3) == 0.0
    assert nonlinearity(RELU, 0.2) == 0.2


class TestBiasGrid:
    def test_three_point_grid(self):
        assert np.array_equal(bias_grid(1.0, 3), [-1.0, 0.0, 1.0])

    def test_two_point_grid(self):
        assert np.array_equal(bias_grid(0.5, 2), [-0.5, 0.5])

    def test_five_point_grid(self):
        assert np.array_equal(bias_grid(0.75, 5), [-0.75, -0.375, 0.0, 0.375, 0.75])

    def test_symmetric(self):
        for n in (2, 5, 16, 21):
            grid = bias_grid(0.8, n)
            np.testing.assert_allclose(grid, -grid[::-1], atol=1e-15)

    def test_single_branch_rejected(self):
        with pytest.raises(ValidationError):
            bias_grid(1.0, 1)

    def test_nonpositive_span_rejected(self):
        with pytest.raises(ValidationError):
            bias_grid(0.0, 4)


class TestProposedForward:
    def test_zero_coefficients_pass_through(self, rng):
        v = rng.uniform(-1, 1, 256)
        params = ProposedParams(0.0, 0.0, np.zeros(3), bias_grid(0.5, 3), ABS)
        assert np.array_equal(proposed_forward(params, v), v)

    def test_single_abs_branch_cancels_negative_input(self):
        params = ProposedParams(0.0, 0.0, [1.0], [0.0], ABS)
        y = proposed_forward(params, np.array([-0.4]))
        assert y[0] == 0.0

    def test_abs_relu_reparameterization_equivalence(self, rng):
        # |v| = 2*max(0, v) - v lifts any ABS corrector to an exact RELU one
        v = rng.uniform(-1.2, 1.2, 2048)
        for _ in range(5):
            p = random_proposed(rng, n=7, kind=ABS)
            q = ProposedParams(
                c0=p.c0 - float(np.sum(p.weights * p.biases)),
                delta_c1=p.delta_c1 - float(np.sum(p.weights)),
                weights=2.0 * p.weights,
                biases=p.biases,
                kind=RELU,
            )
            np.testing.assert_allclose(
                proposed_forward(p, v), proposed_forward(q, v), atol=1e-12
            )

    def test_memoryless(self, rng):
        v = rng.uniform(-1, 1, 512)
        perm = rng.permutation(512)
        p = random_proposed(rng)
        assert np.array_equal(proposed_forward(p, v)[perm], proposed_forward(p, v[perm]))

    def test_throughput(self, rng):
        # engineering target: >= 1e7 samples/second per branch
        p = random_proposed(rng, n=8)
        v = rng.uniform(-1, 1, 2**20)
        proposed_forward(p, v)  # warm up
        rate = 0.0
        for _ in range(3):
            t0 = time.perf_counter()
            proposed_forward(p, v)
            rate = max(rate, v.size / (time.perf_counter() - t0))
        assert rate * p.n_branches > 1e7


class TestHammersteinForward:
    def test_zero_coefficients_pass_through(self, rng):
        v = rng.uniform(-1, 1, 128)
        params = HammersteinParams(0.0, 0.0, np.zeros(4))
        assert np.array_equal(hammerstein_forward(params, v), v)

    def test_quadratic_term(self):
        params = HammersteinParams(0.0, 0.0, [1.0])
        assert hammerstein_forward(params, np.array([0.5]))[0] == 0.75

    def test_matches_polyval(self, rng):
        params = HammersteinParams(0.02, -0.1, rng.normal(size=5) * 0.1)
        v = rng.uniform(-1, 1, 64)
        full = np.concatenate(([params.c0, 1 + params.delta_c1], params.poly_weights))
        expected = np.polynomial.polynomial.polyval(v, full)
        np.testing.assert_allclose(hammerstein_forward(params, v), expected, atol=1e-14)

    def test_memoryless(self, rng):
        v = rng.uniform(-1, 1, 256)
        perm = rng.permutation(256)
        p = HammersteinParams(0.01, 0.05, [0.1, -0.05, 0.02])
        assert np.array_equal(
            hammerstein_forward(p, v)[perm], hammerstein_forward(p, v[perm])
        )


class TestMultAddCount:
    def test_hammerstein_k3(self):
        assert mult_add_count(HammersteinParams(0, 0, [0.1, 0.2])) == (5, 3)

    def test_proposed_n4(self):
        p = ProposedParams(0, 0, np.ones(4), bias_grid(1.0, 4), ABS)
        assert mult_add_count(p) == (5, 9)

    def test_proposed_n1(self):
        p = ProposedParams(0, 0, [1.0], [0.0], RELU)
        assert mult_add_count(p) == (2, 3)


class TestParamValidation:
    def test_biases_must_increase(self):
        with pytest.raises(ValidationError):
            ProposedParams(0, 0, [1.0, 1.0], [0.5, -0.5], ABS)

    def test_lengths_must_match(self):
        with pytest.raises(ValidationError):
            ProposedParams(0, 0, [1.0, 2.0], [0.0], ABS)

    def test_empty_weights_rejected(self):
        with pytest.raises(ValidationError):
            ProposedParams(0, 0, [], [], ABS)


class TestSerialization:
    def test_proposed_schema(self, rng):
        p = random_proposed(rng, kind=RELU)
        doc = params_to_dict(p)
        assert doc["type"] == "proposed"
        assert doc["kind"] == "relu"
        assert set(doc) == {"type", "kind", "c0", "delta_c1", "weights", "biases"}

    def test_round_trip_is_lossless(self, tmp_path, rng):
        # gnarly IEEE doubles must survive the JSON text exactly
        weights = np.array([0.1 + 0.2, 1e-300, np.pi, -2.2250738585072014e-308, 0.3])
        p = ProposedParams(1 / 3, -1e-17, weights, np.sort(rng.uniform(-1, 1, 5)), ABS)
        path = tmp_path / "p.json"
        save_params(path, p)
        q = load_params(path)
        assert p == q

    def test_hammerstein_round_trip(self, tmp_path):
        p = HammersteinParams(0.125, -0.07, [0.1, -0.033333333333333333])
        path = tmp_path / "h.json"
        save_params(path, p)
        assert load_params(path) == p

    def test_json_text_round_trip(self, rng):
        p = random_proposed(rng)
        doc = json.loads(json.dumps(params_to_dict(p)))
        assert params_from_dict(doc) == p

    def test_unknown_type_rejected(self):
        with pytest.raises(ValidationError):
            params_from_dict({"type": "volterra"})
