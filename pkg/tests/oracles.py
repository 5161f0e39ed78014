"""Slow reference computations used as test oracles.

Nothing here imports the package's search or entropy code.
"""
import itertools
import math

import numpy as np


def brute_mis(n, edges):
    """Maximal independent sets of a small graph, by subset enumeration."""
    adj = [[False] * n for _ in range(n)]
    for a, b in edges:
        adj[a][b] = adj[b][a] = True
    indep = []
    for mask in range(1, 1 << n):
        vs = [v for v in range(n) if mask >> v & 1]
        if all(not adj[a][b] for a, b in itertools.combinations(vs, 2)):
            indep.append(mask)
    return [m for m in indep if not any(o != m and o & m == m for o in indep)]


def compositions(total, parts):
    """All nonnegative integer vectors of the given length summing to total."""
    for cuts in itertools.combinations(range(total + parts - 1), parts - 1):
        prev, out = -1, []
        for c in cuts:
            out.append(c - prev - 1)
            prev = c
        out.append(total + parts - 2 - prev)
        yield out


def korner_grid(n, edges, probs, step=0.01):
    """min over distributions q on maximal independent sets of
    -sum_x p(x) log2(sum_{W containing x} q(W)), on a grid of the simplex.

    This is the vertex-packing form of Korner's entropy; it is minimized by
    the same distributions as the mutual-information form."""
    p = np.asarray(probs, dtype=float)
    live = p > 0
    mis = brute_mis(n, edges)
    member = np.array([[m >> v & 1 for v in range(n)] for m in mis], dtype=float)
    total = int(round(1 / step))
    grid = np.array(list(compositions(total, len(mis))), dtype=float) / total
    best = math.inf
    for chunk in np.array_split(grid, max(1, len(grid) // 200_000)):
        a = chunk @ member                       # vertex packing points
        with np.errstate(divide="ignore"):
            vals = -(np.log2(a[:, live]) * p[live]).sum(axis=1)
        best = min(best, float(vals.min()))
    return best


def brute_min_entropy_coloring(n, edges, probs):
    """Exhaustive minimum over all proper colorings (restricted growth strings)."""
    adj = [set() for _ in range(n)]
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    p = np.asarray(probs, dtype=float)
    best = math.inf

    def rec(v, col, used):
        nonlocal best
        if v == n:
            mass = np.bincount(col, weights=p)
            mass = mass[mass > 0]
            best = min(best, float(-(mass * np.log2(mass)).sum()))
            return
        for c in range(used + 1):
            if all(col[u] != c for u in adj[v] if u < v):
                col.append(c)
                rec(v + 1, col, max(used, c + 1))
                col.pop()

    rec(0, [], 0)
    return max(best, 0.0)


def shannon_h(p):
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def char_edges(pmf, table, i):
    """Characteristic graph edges of source i (two sources), from the definition."""
    pmf = np.asarray(pmf)
    table = np.asarray(table)
    if i == 1:
        pmf, table = pmf.T, table.T
    edges = set()
    for a, b in itertools.combinations(range(pmf.shape[0]), 2):
        for y in range(pmf.shape[1]):
            if pmf[a, y] > 0 and pmf[b, y] > 0 and table[a, y] != table[b, y]:
                edges.add((a, b))
    return edges
