import math

import numpy as np
import pytest

from sonoclass.errors import KOutOfRange, LengthMismatch
from sonoclass.feature_select import (
    FeatureMatrix,
    apply_selection,
    discretize,
    mutual_information,
    select_top_k,
)

# Frozen from the direct evaluation of the joint table [[0.4, 0.1], [0.1, 0.4]]
# (computed with mi_table_oracle below before being pinned here).
MI_2X2_BITS = 0.27807190511263774


def mi_table_oracle(joint):
    """Direct textbook evaluation over an explicit probability table."""
    joint = np.asarray(joint, dtype=float)
    joint = joint / joint.sum()
    p_x = joint.sum(axis=1)
    p_y = joint.sum(axis=0)
    total = 0.0
    for i in range(joint.shape[0]):
        for j in range(joint.shape[1]):
            if joint[i, j] > 0:
                total += joint[i, j] * math.log2(joint[i, j] / (p_x[i] * p_y[j]))
    return total


def samples_from_counts(counts, seed=0):
    """Expand a count table into (x, y) sample arrays, shuffled."""
    xs, ys = [], []
    for i in range(counts.shape[0]):
        for j in range(counts.shape[1]):
            xs += [i] * counts[i, j]
            ys += [j] * counts[i, j]
    xs = np.array(xs)
    ys = np.array(ys)
    order = np.random.default_rng(seed).permutation(xs.size)
    return xs[order], ys[order]


class TestDiscretize:
    def test_equal_width_halves(self):
        assert np.array_equal(discretize(np.array([0, 1, 2, 3]), 2), [0, 0, 1, 1])

    def test_constant_column(self):
        assert np.array_equal(discretize(np.full(5, 2.2), 4), np.zeros(5))

    def test_max_goes_to_top_bin(self):
        out = discretize(np.array([0.0, 0.5, 1.0]), 8)
        assert out[-1] == 7

    def test_needs_two_bins(self):
        with pytest.raises(ValueError):
            discretize(np.array([1.0, 2.0]), 1)


class TestMutualInformation:
    def test_identity_uniform_binary_is_one_bit(self):
        y = np.array([0, 1] * 8)
        assert mutual_information(y, y) == pytest.approx(1.0)

    def test_constant_is_independent(self):
        x = np.zeros(12, dtype=int)
        y = np.array([0, 1, 2] * 4)
        assert mutual_information(x, y) == 0.0

    def test_worked_2x2_table(self):
        counts = np.array([[4, 1], [1, 4]])
        x, y = samples_from_counts(counts)
        assert mutual_information(x, y) == pytest.approx(MI_2X2_BITS, abs=1e-12)
        assert mi_table_oracle(counts) == pytest.approx(MI_2X2_BITS, abs=1e-15)

    def test_symmetry_exact(self):
        rng = np.random.default_rng(0)
        x = rng.integers(0, 4, size=60)
        y = rng.integers(0, 3, size=60)
        assert mutual_information(x, y) == mutual_information(y, x)

    def test_nonnegative_on_random_tables(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            x = rng.integers(0, 5, size=40)
            y = rng.integers(0, 4, size=40)
            assert mutual_information(x, y) >= 0.0

    def test_matches_table_oracle_on_random_tables(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            counts = rng.integers(0, 6, size=(rng.integers(2, 5), rng.integers(2, 5)))
            if counts.sum() == 0:
                continue
            x, y = samples_from_counts(counts, seed=int(rng.integers(1 << 30)))
            assert mutual_information(x, y) == pytest.approx(
                mi_table_oracle(counts), abs=1e-12
            )

    def test_data_processing_never_increases(self):
        # merging x's bins is deterministic processing: I(f(X); Y) <= I(X; Y)
        rng = np.random.default_rng(3)
        for _ in range(50):
            x = rng.integers(0, 8, size=80)
            y = rng.integers(0, 3, size=80)
            assert mutual_information(x // 2, y) <= mutual_information(x, y) + 1e-12

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            mutual_information(np.arange(4), np.arange(5))


class TestSelectTopK:
    def make_matrix(self, seed=4, s=48, d=6):
        rng = np.random.default_rng(seed)
        labels = rng.integers(0, 2, size=s)
        values = rng.normal(size=(s, d))
        return FeatureMatrix(values=values, labels=labels), labels

    def test_k_equals_d_returns_all_sorted(self):
        matrix, _ = self.make_matrix()
        sel = select_top_k(matrix, k=6, n_bins=4)
        assert sorted(sel.selected.tolist()) == list(range(6))
        ranked = sel.scores[sel.selected]
        assert np.all(np.diff(ranked) <= 1e-15)

    def test_label_copy_ranks_first_with_entropy_score(self):
        matrix, labels = self.make_matrix()
        values = matrix.values.copy()
        values[:, 3] = labels
        matrix = FeatureMatrix(values=values, labels=labels)
        sel = select_top_k(matrix, k=6, n_bins=4)
        assert sel.selected[0] == 3
        p1 = labels.mean()
        entropy = -(p1 * math.log2(p1) + (1 - p1) * math.log2(1 - p1))
        assert sel.scores[3] == pytest.approx(entropy, abs=1e-12)

    def test_constructed_three_features(self):
        rng = np.random.default_rng(5)
        labels = np.array([0, 1] * 24)
        values = np.column_stack([
            labels.astype(float),           # perfect predictor
            rng.normal(size=48),            # noise
            np.full(48, 3.14),              # constant
        ])
        sel = select_top_k(FeatureMatrix(values, labels), k=3, n_bins=4)
        assert sel.selected[0] == 0
        assert sel.scores[2] == 0.0
        x, y = values[:, 0].astype(int), labels
        counts = np.zeros((2, 2), dtype=int)
        for xi, yi in zip(x, y):
            counts[xi, yi] += 1
        assert sel.scores[0] == pytest.approx(mi_table_oracle(counts), abs=1e-12)

    def test_ties_break_to_lower_index(self):
        labels = np.array([0, 1] * 10)
        col = np.array([0.0, 1.0] * 10)
        values = np.column_stack([col, col, col])
        sel = select_top_k(FeatureMatrix(values, labels), k=2, n_bins=2)
        assert sel.selected.tolist() == [0, 1]

    def test_k_out_of_range(self):
        matrix, _ = self.make_matrix()
        for k in (0, 7):
            with pytest.raises(KOutOfRange):
                select_top_k(matrix, k=k)

    def test_single_class_rejected(self):
        values = np.random.default_rng(6).normal(size=(10, 3))
        with pytest.raises(ValueError):
            select_top_k(FeatureMatrix(values, np.zeros(10, dtype=int)), k=2)

    def test_bin_edges_clamp_out_of_range(self):
        matrix, _ = self.make_matrix()
        sel = select_top_k(matrix, k=3, n_bins=4)
        binned = sel.bin_column(np.array([-1e9, 0.0, 1e9]), feature_index=0)
        assert binned[0] == 0 and binned[-1] == 3


class TestApplySelection:
    def make_selection(self, selected, d):
        from sonoclass.feature_select import MiSelection
        return MiSelection(
            scores=np.zeros(d),
            selected=np.asarray(selected, dtype=np.int64),
            bin_edges=np.zeros((d, 5)),
            n_bins=4,
        )

    def test_gather_order(self):
        sel = self.make_selection([2, 0], d=3)
        assert np.array_equal(apply_selection(np.array([1.0, 2.0, 3.0]), sel), [3.0, 1.0])

    def test_identity_permutation(self):
        sel = self.make_selection([0, 1, 2], d=3)
        v = np.array([4.0, 5.0, 6.0])
        assert np.array_equal(apply_selection(v, sel), v)

    def test_identity_idempotent(self):
        sel = self.make_selection([0, 1, 2], d=3)
        v = np.array([4.0, 5.0, 6.0])
        assert np.array_equal(apply_selection(apply_selection(v, sel), sel), v)

    def test_matrix_rows(self):
        sel = self.make_selection([1], d=2)
        out = apply_selection(np.array([[1.0, 2.0], [3.0, 4.0]]), sel)
        assert np.array_equal(out, [[2.0], [4.0]])

    def test_length_mismatch(self):
        sel = self.make_selection([0], d=3)
        with pytest.raises(LengthMismatch):
            apply_selection(np.zeros(4), sel)
