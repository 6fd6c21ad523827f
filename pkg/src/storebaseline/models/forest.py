"""CART regression trees and a bagged random forest built on them."""

from __future__ import annotations

from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor

import numpy as np

LEAF = -1


@dataclass(frozen=True)
class Tree:
    """Array-encoded binary tree; node 0 is the root.

    Internal nodes send ``x[feature] <= threshold`` to ``left``. Leaves have
    ``feature == -1`` and predict ``value``.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def apply(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=np.int64)
        active = self.feature[node] != LEAF
        while active.any():
            rows = np.flatnonzero(active)
            cur = node[rows]
            go_left = X[rows, self.feature[cur]] <= self.threshold[cur]
            node[rows] = np.where(go_left, self.left[cur], self.right[cur])
            active[rows] = self.feature[node[rows]] != LEAF
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(
            feature=np.asarray(d["feature"], dtype=np.int64),
            threshold=np.asarray(d["threshold"], dtype=float),
            left=np.asarray(d["left"], dtype=np.int64),
            right=np.asarray(d["right"], dtype=np.int64),
            value=np.asarray(d["value"], dtype=float),
        )


def _best_split(x: np.ndarray, y: np.ndarray, min_leaf: int):
    """Best variance-reduction split of one column, or None.

    ``y`` is assumed centred on the node mean. Returns (gain, threshold).
    """
    n = len(x)
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    k = np.arange(min_leaf, n - min_leaf + 1)
    if k.size == 0:
        return None
    k = k[xs[k - 1] < xs[k]]
    if k.size == 0:
        return None
    csum = np.cumsum(ys)
    total = csum[-1]
    left = csum[k - 1]
    score = left * left / k + (total - left) ** 2 / (n - k) - total * total / n
    best = int(np.argmax(score))
    kb = k[best]
    return float(score[best]), 0.5 * (xs[kb - 1] + xs[kb])


def build_tree(
    X: np.ndarray, y: np.ndarray, mtry: int, min_leaf: int, rng: np.random.Generator
) -> Tree:
    """Grow a CART regression tree until nodes cannot hold two ``min_leaf`` children.

    At each node ``mtry`` randomly ordered columns are searched; when none
    of them admits a split the search continues through the remaining
    columns, so a node only becomes a leaf if no column can split it.
    """
    n_features = X.shape[1]
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(idx):
        ys = y[idx]
        lo, hi = ys.min(), ys.max()
        v = lo if lo == hi else min(max(ys.mean(), lo), hi)
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(float(v))
        return len(feature) - 1

    root = np.arange(len(y))
    stack = [(new_node(root), root)]
    while stack:
        node, idx = stack.pop()
        ys = y[idx]
        if len(idx) < 2 * min_leaf or ys.min() == ys.max():
            continue
        centred = ys - ys.mean()
        sse = float(centred @ centred)
        best = None
        for tried, f in enumerate(rng.permutation(n_features)):
            if tried >= mtry and best is not None:
                break
            found = _best_split(X[idx, f], centred, min_leaf)
            if found is not None and found[0] > 1e-12 * sse and (best is None or found[0] > best[0]):
                best = (found[0], int(f), found[1])
        if best is None:
            continue
        _, f, thr = best
        mask = X[idx, f] <= thr
        li, ri = idx[mask], idx[~mask]
        ln, rn = new_node(li), new_node(ri)
        feature[node], threshold[node], left[node], right[node] = f, thr, ln, rn
        stack.append((rn, ri))
        stack.append((ln, li))

    return Tree(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=float),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        value=np.asarray(value, dtype=float),
    )


def tree_rng(seed: int, tree_index: int) -> np.random.Generator:
    # Independent stream per tree so results do not depend on build order.
    return np.random.default_rng([tree_index, seed])


def _fit_one(X, y, seed, index, mtry, min_leaf, bootstrap):
    rng = tree_rng(seed, index)
    if bootstrap:
        rows = rng.integers(0, len(y), size=len(y))
        return build_tree(X[rows], y[rows], mtry, min_leaf, rng)
    return build_tree(X, y, mtry, min_leaf, rng)


def fit_forest(
    X: np.ndarray,
    y: np.ndarray,
    n_trees: int,
    mtry: int,
    min_leaf: int,
    bootstrap: bool,
    seed: int,
    workers: int = 1,
) -> list[Tree]:
    args = [(X, y, seed, i, mtry, min_leaf, bootstrap) for i in range(n_trees)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(lambda a: _fit_one(*a), args))
    return [_fit_one(*a) for a in args]


def predict_forest(trees: list[Tree], X: np.ndarray, lo: float, hi: float) -> np.ndarray:
    pred = np.mean([t.predict(X) for t in trees], axis=0)
    return np.clip(pred, lo, hi)
