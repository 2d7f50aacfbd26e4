# Copyright (c) 2024, The entroscope authors.  All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import numpy as np
import pytest
from scipy.optimize import linprog
from scipy.special import rel_entr

from entroscope.entropies import (
    d_hypo,
    d_hypo_classical,
    d_max,
    d_max_sdp,
    d_max_smooth,
    d_min,
    dmax_smoothing_witness,
    dmin_smoothing_witness,
    evaluate_quantity,
    fidelity_sdp,
    h_cond_vn,
    h_hypo,
    h_max,
    h_min,
    h_min_fixed_ratio,
    hypothesis_test_from_config,
    kl_div,
    renyi0,
    trace_distance_sdp,
    von_neumann,
)
from entroscope.states.quantum_state import InvalidStateError, QState, SystemLayout
from entroscope.utils.distance_utils import generalized_trace_distance, purified_distance
from entroscope.utils.linalg_utils import fidelity_norm, min_eigenvalue
from entroscope.utils.sampling_utils import random_state
from entroscope.utils.state_utils import bell_state, maximally_mixed, tensor_product

PARTITION = (["A"], ["B"])


def neyman_pearson_lp(p, q, epsilon):
    """D_H^eps of commuting inputs from scipy's LP solver."""
    result = linprog(
        c=np.asarray(q) / epsilon,
        A_ub=-np.asarray(p).reshape(1, -1),
        b_ub=[-epsilon],
        bounds=[(0.0, 1.0)] * len(p),
        method="highs",
    )
    return -math.log2(result.fun)


def diagonal(values):
    return QState(np.diag(values))


@pytest.fixture
def worked_pair():
    return diagonal([0.9, 0.1]), diagonal([0.5, 0.5])


class TestHypothesisTesting:
    def test_worked_example(self, worked_pair):
        rho, sigma = worked_pair
        result = d_hypo(rho, sigma, 0.9)
        assert result.value == pytest.approx(math.log2(1.8), abs=1e-5), \
            f"Expected {math.log2(1.8)} but got {result.value}"

    def test_worked_example_classical(self):
        result = d_hypo_classical([0.9, 0.1], [0.5, 0.5], 0.9)
        assert result.value == pytest.approx(math.log2(1.8), abs=1e-12)

    @pytest.mark.parametrize("seed", range(4))
    @pytest.mark.parametrize("epsilon", [0.1, 0.5, 0.9])
    def test_classical_matches_lp(self, seed, epsilon):
        rng = np.random.default_rng(seed)
        p, q = rng.dirichlet(np.ones(4)), rng.dirichlet(np.ones(4))
        expected = neyman_pearson_lp(p, q, epsilon)
        exact = d_hypo_classical(p, q, epsilon).value
        sdp = d_hypo(diagonal(p), np.diag(q), epsilon).value
        assert exact == pytest.approx(expected, abs=1e-8), f"Expected {expected} but got {exact}"
        assert sdp == pytest.approx(expected, abs=1e-6), f"Expected {expected} but got {sdp}"

    def test_equal_states(self):
        rho = random_state(3, rank=2, seed=1)
        value = d_hypo(rho, rho, 0.3).value
        assert value == pytest.approx(0.0, abs=1e-6), f"Expected 0 but got {value}"

    @pytest.mark.parametrize("seed", range(3))
    def test_nonnegative_and_dual(self, seed):
        rho = random_state(3, seed=seed)
        sigma = random_state(3, rank=2, seed=seed + 10)
        result = d_hypo(rho, sigma, 0.25)
        assert result.value >= -1e-7, f"Expected a nonnegative value, got {result.value}"
        assert result.dual_value <= result.primal_value + 1e-7, "Expected the dual to bound the primal"
        assert result.primal_value - result.dual_value < 1e-5, \
            f"Expected a small duality gap, got {result.primal_value - result.dual_value}"
        constraint = min_eigenvalue(sigma.matrix + result.X - result.mu * rho.matrix)
        assert constraint >= -1e-9, f"Expected mu rho <= sigma + X, got {constraint}"

    def test_orthogonal_support(self):
        result = d_hypo(diagonal([1.0, 0.0]), np.diag([0.0, 1.0]), 0.5)
        assert math.isinf(result.value) and result.value > 0, f"Expected +inf but got {result.value}"

    @pytest.mark.parametrize("epsilon", [0.0, -0.1, 1.5])
    def test_invalid_epsilon(self, worked_pair, epsilon):
        rho, sigma = worked_pair
        with pytest.raises(ValueError):
            d_hypo(rho, sigma, epsilon)

    def test_trace_below_epsilon(self):
        with pytest.raises(ValueError):
            d_hypo(diagonal([0.2, 0.1]), np.eye(2) / 2, 0.5)

    def test_renyi_zero_at_one(self):
        p, q = [0.6, 0.4, 0.0], [0.2, 0.3, 0.5]
        value = d_hypo_classical(p, q, 1.0).value
        expected = renyi0(np.diag(p), np.diag(q))
        assert value == pytest.approx(expected, abs=1e-12), f"Expected {expected} but got {value}"
        assert expected == pytest.approx(1.0)

    @pytest.mark.parametrize("seed", range(50))
    def test_renyi_zero_rank_deficient(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 5))
        rho = random_state(d, rank=int(rng.integers(1, d + 1)), seed=rng)
        sigma = random_state(d, rank=int(rng.integers(1, d + 1)), seed=rng)
        result = d_hypo(rho, sigma, 1.0)
        expected = renyi0(rho, sigma)
        assert result.value == pytest.approx(expected, abs=1e-5), f"Expected {expected} but got {result.value}"
        gap = abs(result.primal_value - result.dual_value)
        assert gap <= 1e-6 * (1.0 + result.primal_value), f"Expected matching primal and dual, got gap {gap}"

    def test_renyi_zero_block_diagonal(self):
        rho, sigma = diagonal([0.6, 0.4, 0.0]), np.diag([0.2, 0.3, 0.5])
        result = d_hypo(rho, sigma, 1.0)
        assert result.value == pytest.approx(1.0, abs=1e-9), f"Expected 1 bit but got {result.value}"
        assert result.max_slackness <= 1e-9, f"Expected exact witnesses, got {result.slackness}"

    @pytest.mark.parametrize("seed", range(10))
    def test_witness_slackness(self, seed):
        rng = np.random.default_rng(seed)
        self.assert_certified(rng)

    @pytest.mark.slow
    def test_witness_slackness_sweep(self):
        rng = np.random.default_rng(2024)
        for _ in range(200):
            self.assert_certified(rng)

    @staticmethod
    def assert_certified(rng):
        d = int(rng.integers(2, 5))
        epsilon = float(rng.uniform(0.05, 0.95))
        rho = random_state(d, rank=int(rng.integers(1, d + 1)), seed=rng)
        sigma = random_state(d, rank=int(rng.integers(1, d + 1)), seed=rng)
        result = d_hypo(rho, sigma, epsilon)
        if math.isinf(result.value):
            return
        gap = abs(result.primal_value - result.dual_value) / (1.0 + abs(result.primal_value))
        assert gap <= 1e-6, f"Expected a relative gap below 1e-6, got {gap} (d={d}, eps={epsilon})"
        assert result.max_slackness <= 1e-6, \
            f"Expected slackness residuals below 1e-6, got {result.slackness} (d={d}, eps={epsilon})"
        feasibility = min_eigenvalue(sigma.matrix + result.X - result.mu * rho.matrix)
        assert feasibility >= -1e-9, f"Expected mu rho <= sigma + X, got {feasibility}"
        assert min_eigenvalue(result.Q) >= -1e-12 and min_eigenvalue(np.eye(d) - result.Q) >= -1e-12

    def test_small_epsilon_limit(self):
        # H_H^eps(A|B) reaches H_min(A|B)_{rho|rho} once eps is below the weight of the top direction
        rho = QState(np.diag([0.005, 0.6, 0.0, 0.395]), SystemLayout.from_dims([2, 2]))
        fixed = h_min_fixed_ratio(rho, PARTITION).bits
        gaps = [abs(h_hypo(rho, PARTITION, epsilon).bits - fixed) for epsilon in (1e-2, 1e-3, 1e-4)]
        for wide, narrow in zip(gaps, gaps[1:]):
            assert narrow <= wide + 1e-7, f"Expected shrinking gaps, got {gaps}"
        assert gaps[-1] < gaps[0], f"Expected a strictly smaller gap at 1e-4, got {gaps}"
        assert gaps[-1] <= 1e-6, f"Expected H_H to reach H_min, got {gaps}"

    def test_bell_state(self):
        value = h_hypo(bell_state(), PARTITION, 0.1).bits
        assert value == pytest.approx(-1.0, abs=1e-6), f"Expected -1 but got {value}"

    def test_conditional_needs_normalized(self):
        rho = QState(np.eye(4) / 8, SystemLayout.from_dims([2, 2]))
        with pytest.raises(InvalidStateError):
            h_hypo(rho, PARTITION, 0.1)

    @pytest.mark.parametrize("seed", range(3))
    def test_trace_distance_sdp(self, seed):
        rho = QState(0.8 * random_state(3, seed=seed).matrix)
        sigma = QState(0.5 * random_state(3, rank=1, seed=seed + 5).matrix)
        expected = generalized_trace_distance(rho, sigma)
        got = trace_distance_sdp(sigma, rho)
        assert got == pytest.approx(expected, abs=1e-6), f"Expected {expected} but got {got}"


class TestDistanceRelations:
    @pytest.mark.parametrize("seed", range(20))
    def test_subnormalized_pairs(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 5))
        rho = QState(rng.uniform(0.3, 1.0) * random_state(d, rank=int(rng.integers(1, d + 1)), seed=rng).matrix)
        sigma = QState(rng.uniform(0.3, 1.0) * random_state(d, rank=int(rng.integers(1, d + 1)), seed=rng).matrix)
        trace_distance = generalized_trace_distance(rho, sigma)
        distance = purified_distance(rho, sigma)
        assert trace_distance <= distance + 1e-9, f"Expected D <= P, got {trace_distance} > {distance}"
        assert distance <= math.sqrt(2.0 * trace_distance) + 1e-9, \
            f"Expected P <= sqrt(2D), got {distance} > {math.sqrt(2.0 * trace_distance)}"
        sdp = trace_distance_sdp(rho, sigma)
        assert sdp == pytest.approx(trace_distance, abs=1e-6), f"Expected {trace_distance} but got {sdp}"


class TestMinMax:
    def test_d_max_classical(self):
        value = d_max(diagonal([0.7, 0.3]), np.diag([0.5, 0.5])).bits
        assert value == pytest.approx(math.log2(1.4)), f"Expected log2(1.4) but got {value}"

    def test_d_max_sdp_agrees(self):
        rho = random_state(3, seed=4)
        sigma = random_state(3, seed=5)
        spectral = d_max(rho, sigma).bits
        sdp = d_max_sdp(rho, sigma).bits
        assert sdp == pytest.approx(spectral, abs=1e-6), f"Expected {spectral} but got {sdp}"

    def test_d_max_support_violation(self):
        value = d_max(diagonal([0.5, 0.5]), np.diag([1.0, 0.0])).bits
        assert value == math.inf, f"Expected +inf but got {value}"

    def test_d_min_classical(self):
        p, q = np.array([0.7, 0.3]), np.array([0.5, 0.5])
        expected = -2.0 * math.log2(np.sum(np.sqrt(p * q)))
        value = d_min(np.diag(p), np.diag(q)).bits
        assert value == pytest.approx(expected), f"Expected {expected} but got {value}"

    def test_fidelity_sdp(self):
        rho = random_state(2, seed=6)
        sigma = random_state(2, seed=7)
        expected = fidelity_norm(rho.matrix, sigma.matrix) ** 2
        got = fidelity_sdp(rho, sigma)
        assert got == pytest.approx(expected, abs=1e-6), f"Expected {expected} but got {got}"

    def test_smoothing_lowers_d_max(self):
        rho = random_state(2, seed=8)
        sigma = random_state(2, seed=9)
        exact = d_max(rho, sigma).bits
        assert d_max_smooth(rho, sigma, 0.0).bits == pytest.approx(exact)
        small = d_max_smooth(rho, sigma, 0.1).bits
        large = d_max_smooth(rho, sigma, 0.3).bits
        assert small <= exact + 1e-6, f"Expected smoothing to lower D_max, got {small} > {exact}"
        assert large <= small + 1e-6, f"Expected monotonicity in epsilon, got {large} > {small}"

    def test_smoothing_ball_contains_zero(self):
        rho = QState(np.diag([0.005, 0.005]))
        value = d_max_smooth(rho, np.eye(2) / 2, 0.2).bits
        assert value == -math.inf, f"Expected -inf but got {value}"

    def test_dmax_witness(self):
        rho = random_state(2, seed=10)
        sigma = random_state(2, seed=11)
        epsilon = 0.1
        result = d_hypo(rho, sigma, epsilon)
        witness = dmax_smoothing_witness(rho, sigma, epsilon, result=result)
        dominated = min_eigenvalue(sigma.matrix - result.mu * witness.matrix)
        assert dominated >= -1e-9, f"Expected mu rho~ <= sigma, got {dominated}"
        distance = purified_distance(rho, witness)
        assert distance <= math.sqrt(2 * epsilon) + 1e-6, f"Expected P <= sqrt(2 eps), got {distance}"

    def test_dmin_witness(self):
        rho = random_state(2, seed=12)
        sigma = random_state(2, seed=13)
        epsilon = 0.1
        witness = dmin_smoothing_witness(rho, sigma, epsilon)
        distance = purified_distance(rho, witness)
        assert distance <= math.sqrt(2 * epsilon) + 1e-6, f"Expected P <= sqrt(2 eps), got {distance}"

    def test_bell_conditional_entropies(self):
        phi = bell_state()
        h_minimum = h_min(phi, PARTITION).bits
        h_maximum = h_max(phi, PARTITION).bits
        fixed = h_min_fixed_ratio(phi, PARTITION).bits
        assert h_minimum == pytest.approx(-1.0, abs=1e-6), f"Expected H_min = -1 but got {h_minimum}"
        assert h_maximum == pytest.approx(-1.0, abs=1e-6), f"Expected H_max = -1 but got {h_maximum}"
        assert fixed == pytest.approx(-1.0, abs=1e-9), f"Expected -1 but got {fixed}"

    def test_product_state_min_entropy(self):
        rho = tensor_product(maximally_mixed(2), QState(np.diag([0.7, 0.3])))
        rho = rho.with_layout(SystemLayout.from_dims([2, 2]))
        value = h_min(rho, PARTITION).bits
        assert value == pytest.approx(1.0, abs=1e-6), f"Expected 1 but got {value}"

    def test_max_above_min(self):
        rho = random_state([2, 2], seed=14)
        low = h_min(rho, PARTITION).bits
        high = h_max(rho, PARTITION).bits
        assert low <= high + 1e-6, f"Expected H_min <= H_max, got {low} > {high}"


class TestVonNeumann:
    def test_maximally_mixed(self):
        assert von_neumann(maximally_mixed(2)) == pytest.approx(1.0)

    def test_bell_conditional(self):
        assert h_cond_vn(bell_state(), PARTITION) == pytest.approx(-1.0, abs=1e-9)

    def test_kl_classical(self):
        p, q = np.array([0.7, 0.3]), np.array([0.5, 0.5])
        expected = float(np.sum(rel_entr(p, q)) / math.log(2))
        assert kl_div(diagonal(p), np.diag(q)) == pytest.approx(expected)
        assert expected == pytest.approx(0.118709, abs=1e-6)

    def test_kl_support_violation(self):
        assert kl_div(diagonal([0.5, 0.5]), np.diag([1.0, 0.0])) == math.inf

    def test_renyi0_disjoint(self):
        assert renyi0(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == math.inf


class TestQuantities:
    def test_evaluate(self, worked_pair):
        rho, sigma = worked_pair
        value = evaluate_quantity("d_hypo", rho, sigma, 0.9)
        assert value.bits == pytest.approx(math.log2(1.8), abs=1e-5)
        assert value.to_dict()["epsilon"] == pytest.approx(0.9)

    def test_fidelity_is_unitless(self, worked_pair):
        rho, sigma = worked_pair
        value = evaluate_quantity("fidelity_sdp", rho, sigma)
        record = value.to_dict()
        assert value.unit is None
        assert "value_bits" not in record
        assert record["value"] == pytest.approx(0.8, abs=1e-5)
        assert evaluate_quantity("kl_div", rho, sigma).to_dict().keys() >= {"value_bits"}

    def test_missing_sigma(self, worked_pair):
        rho, _ = worked_pair
        with pytest.raises(ValueError):
            evaluate_quantity("kl_div", rho)

    def test_missing_epsilon(self, worked_pair):
        rho, sigma = worked_pair
        with pytest.raises(ValueError):
            evaluate_quantity("d_hypo", rho, sigma)

    def test_unexpected_epsilon(self, worked_pair):
        rho, _ = worked_pair
        with pytest.raises(ValueError):
            evaluate_quantity("von_neumann", rho, epsilon=0.1)

    def test_unknown_quantity(self, worked_pair):
        rho, sigma = worked_pair
        with pytest.raises(ValueError):
            evaluate_quantity("d_hypothetical", rho, sigma)

    def test_from_config(self):
        compute = hypothesis_test_from_config({"quantity": "h_hypo", "epsilon": 0.1, "partition": PARTITION})
        assert compute(bell_state()).bits == pytest.approx(-1.0, abs=1e-6)
