"""Regenerate corpus.json: small SDP instances with optimal t from CLARABEL.

    python3 make_corpus.py > corpus.json
"""
import json
import math

import cvxpy as cp
import numpy as np


def optimal_t(d, eps, c2):
    k = len(d)
    K = cp.Variable((k, k), PSD=True)
    t = cp.Variable()
    cons = []
    for i in range(k):
        for j in range(i + 1, k):
            e = K[i, i] + K[j, j] - 2 * K[i, j]
            d2 = d[i][j] ** 2
            if d[i][j] < eps:
                cons += [e - d2 <= t * d2, d2 - e <= t * d2]
            cons += [e >= c2 ** 2 * d2]
    prob = cp.Problem(cp.Minimize(t), cons)
    for tol in (1e-11, 1e-10, 1e-9, 1e-8):
        prob.solve(solver="CLARABEL", tol_gap_abs=tol, tol_gap_rel=tol, tol_feas=tol)
        if prob.status == "optimal":
            break
    if prob.status == "optimal":
        return float(t.value)
    # accept an inaccurate CLARABEL answer only when SCS agrees with it
    assert prob.status == "optimal_inaccurate", prob.status
    first = float(t.value)
    prob.solve(solver="SCS", eps=1e-10, max_iters=200000)
    assert abs(first - float(t.value)) < 1e-6, (first, t.value)
    return first


def circle(n, idx=None):
    idx = list(range(n)) if idx is None else idx
    a = [2 * math.pi * i / n for i in idx]
    d = [[min(abs(x - y), 2 * math.pi - abs(x - y)) for y in a] for x in a]
    return d


def euclid(p):
    p = np.asarray(p)
    return np.linalg.norm(p[:, None] - p[None], axis=2).tolist()


def sphere(p):
    p = np.asarray(p)
    p = p / np.linalg.norm(p, axis=1, keepdims=True)
    g = np.clip(p @ p.T, -1, 1)
    d = np.arccos(g)
    np.fill_diagonal(d, 0)
    return d.tolist()


def graph_metric(w):
    w = np.asarray(w, dtype=float)
    k = len(w)
    d = w.copy()
    for m in range(k):
        d = np.minimum(d, d[:, [m]] + d[[m], :])
    np.fill_diagonal(d, 0)
    return d.tolist()


def main():
    rng = np.random.default_rng(20240611)
    c2 = 2 / math.pi
    tri = [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
    inst = []

    def add(name, d, eps, c=c2):
        inst.append({"name": name, "d": d, "eps": eps, "c2": c})

    add("triangle", tri, 2.0)
    add("triangle-c2-10", tri, 2.0, 10.0)
    add("isosceles", [[0, 1, 1], [1, 0, 1.9], [1, 1.9, 0]], 3.0)
    add("circle8", circle(8), math.pi / 2 + 1e-9)
    add("circle10", circle(10), 1.3)
    add("circle6-adjacent", circle(6), 1.1)
    add("circle7", circle(7), 2.0)
    add("circle16-arc9", circle(16, list(range(9))), 1.0)
    add("circle20-sub8", circle(20, sorted(rng.choice(20, 8, replace=False).tolist())), 1.5)
    add("square-cycle", graph_metric([[0, 1, 9, 1], [1, 0, 1, 9], [9, 1, 0, 1], [1, 9, 1, 0]]), 2.5)
    add("segment5", [[abs(i - j) / 4 for j in range(5)] for i in range(5)], 0.3)
    for s, (k, dim) in enumerate([(5, 2), (7, 3), (10, 2)]):
        add(f"euclidean-{k}-{dim}d", euclid(rng.normal(size=(k, dim))), 1.5)
    for s, k in enumerate([6, 8, 10]):
        add(f"sphere-{k}", sphere(rng.normal(size=(k, 3))), 1.2)
    for s, k in enumerate([5, 7, 9]):
        w = rng.uniform(0.5, 2.0, size=(k, k))
        w = (w + w.T) / 2
        add(f"graph-{k}", graph_metric(w), 1.6)
    assert len(inst) == 20
    for it in inst:
        it["t_ref"] = optimal_t(it["d"], it["eps"], it["c2"])
    print(json.dumps({"solver": "CLARABEL via cvxpy", "instances": inst}, indent=1))


if __name__ == "__main__":
    main()
