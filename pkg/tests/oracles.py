"""Independent oracles for the test suite.

Everything here deliberately avoids the code paths it checks: eigenpairs come
from hand-rolled power iteration with deflation (never ``numpy.linalg.eigh``),
correlations from the textbook covariance formula, components from plain BFS,
and aggregations from dict loops.
"""

from __future__ import annotations

import math
from collections import defaultdict

import numpy as np


def pivot_by_dict(records):
    """Sum-by-key aggregation oracle: dict of dicts, first-appearance order."""
    totals: dict[str, dict[str, float]] = defaultdict(dict)
    locations: list[str] = []
    activities: list[str] = []
    for rec in records:
        if rec.location not in totals or rec.activity not in totals[rec.location]:
            totals[rec.location][rec.activity] = 0.0
        if rec.location not in locations:
            locations.append(rec.location)
        if rec.activity not in activities:
            activities.append(rec.activity)
        totals[rec.location][rec.activity] += rec.value
    values = np.zeros((len(locations), len(activities)))
    for i, loc in enumerate(locations):
        for j, act in enumerate(activities):
            values[i, j] = totals[loc].get(act, 0.0)
    return values, locations, activities


def rca_by_loops(x: np.ndarray) -> np.ndarray:
    """Entrywise specialization ratio computed with explicit loops."""
    n_loc, n_act = x.shape
    row = [sum(x[c]) for c in range(n_loc)]
    col = [sum(x[:, p]) for p in range(n_act)]
    grand = sum(row)
    out = np.zeros_like(x, dtype=float)
    for c in range(n_loc):
        for p in range(n_act):
            out[c, p] = x[c, p] * grand / (row[c] * col[p])
    return out


def pearson_by_formula(a, b) -> float:
    """Plain covariance / (std_a * std_b)."""
    a = [float(v) for v in a]
    b = [float(v) for v in b]
    n = len(a)
    mean_a = sum(a) / n
    mean_b = sum(b) / n
    cov = sum((x - mean_a) * (y - mean_b) for x, y in zip(a, b)) / n
    var_a = sum((x - mean_a) ** 2 for x in a) / n
    var_b = sum((y - mean_b) ** 2 for y in b) / n
    return cov / math.sqrt(var_a * var_b)


def ranks_with_ties(values) -> list[float]:
    """Average ranks, 1-based."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        average = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = average
        i = j + 1
    return ranks


def spearman_by_definition(a, b) -> float:
    return pearson_by_formula(ranks_with_ties(a), ranks_with_ties(b))


def bfs_bipartite_components(values: np.ndarray) -> list[tuple[set[int], set[int]]]:
    """Connected components of the bipartite graph as (location, activity) index sets."""
    n_loc, n_act = values.shape
    seen_loc: set[int] = set()
    seen_act: set[int] = set()
    components = []
    for start in range(n_loc):
        if start in seen_loc:
            continue
        locs = {start}
        acts: set[int] = set()
        frontier = [("loc", start)]
        seen_loc.add(start)
        while frontier:
            side, node = frontier.pop()
            if side == "loc":
                for p in range(n_act):
                    if values[node, p] and p not in seen_act:
                        seen_act.add(p)
                        acts.add(p)
                        frontier.append(("act", p))
            else:
                for c in range(n_loc):
                    if values[c, node] and c not in seen_loc:
                        seen_loc.add(c)
                        locs.add(c)
                        frontier.append(("loc", c))
        components.append((locs, acts))
    for p in range(n_act):
        if p not in seen_act:
            components.append((set(), {p}))
    return components


def power_iteration_eigenpairs(
    matrix: np.ndarray, count: int, iterations: int = 20000, seed: int = 7
) -> tuple[np.ndarray, np.ndarray]:
    """Top eigenpairs (by |eigenvalue|) of a symmetric matrix via power
    iteration with deflation. Independent of any library eigensolver."""
    work = np.array(matrix, dtype=float)
    rng = np.random.default_rng(seed)
    n = work.shape[0]
    eigenvalues = []
    vectors = []
    for _ in range(count):
        v = rng.standard_normal(n)
        v /= math.sqrt(float(v @ v))
        value = 0.0
        for _ in range(iterations):
            w = work @ v
            norm = math.sqrt(float(w @ w))
            if norm == 0.0:
                break
            w /= norm
            new_value = float(w @ work @ w)
            if abs(new_value - value) <= 1e-14 * max(1.0, abs(new_value)):
                v, value = w, new_value
                break
            v, value = w, new_value
        eigenvalues.append(value)
        vectors.append(v)
        work = work - value * np.outer(v, v)
    return np.array(eigenvalues), np.array(vectors).T


def symmetrized_intensive(m_values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric similar form of the intensive location matrix, plus sqrt weights.

    Built directly from the definition with loops so it does not share code
    with the implementation under test.
    """
    n_loc, n_act = m_values.shape
    div = m_values.sum(axis=1).astype(float)
    ubi = m_values.sum(axis=0).astype(float)
    sym = np.zeros((n_loc, n_loc))
    for c in range(n_loc):
        for c2 in range(n_loc):
            total = 0.0
            for p in range(n_act):
                total += m_values[c, p] * m_values[c2, p] / ubi[p]
            sym[c, c2] = total / math.sqrt(div[c] * div[c2])
    return sym, np.sqrt(div)
