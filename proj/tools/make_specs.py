#!/usr/bin/env python3
"""Regenerates the bundled demo and defect specs under data/."""

import itertools
import json
import pathlib
import random

ROOT = pathlib.Path(__file__).resolve().parent.parent / "data"
rng = random.Random(20240611)


def c(re, im=0.0):
    return [round(re, 6), round(im, 6)]


def rand_c(scale=1.0):
    return c(rng.gauss(0, scale), rng.gauss(0, scale))


def rand_mat(rows, cols, scale=1.0):
    return [[rand_c(scale) for _ in range(cols)] for _ in range(rows)]


def herm(n, scale=1.0):
    m = rand_mat(n, n, scale)
    return [[c((m[i][j][0] + m[j][i][0]) / 2, (m[i][j][1] - m[j][i][1]) / 2) for j in range(n)] for i in range(n)]


def eye(n):
    return [[c(1.0 if i == j else 0.0) for j in range(n)] for i in range(n)]


def subsets(points):
    for r in range(len(points) + 1):
        yield from itertools.combinations(points, r)


GRID3 = {"times": [0.1, 0.4, 0.7], "weights": [0.3, 0.3, 0.3], "d": 1, "n_max": 3}


def write(kind, name, spec):
    path = ROOT / kind / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(spec, indent=1, sort_keys=True) + "\n")


def random_kernel(n, dim_h, count):
    entries = []
    for _ in range(count):
        roles = {"w_pm": [], "w_cm": [], "w_pc": [], "w_cc": []}
        for x in range(n):
            r = rng.randrange(5)
            if r > 0:
                roles[["w_pm", "w_cm", "w_pc", "w_cc"][r - 1]].append(x)
        entries.append({**roles, "block": rand_mat(dim_h, dim_h)})
    return entries


def m_entries(n, dim_h, future_roles):
    entries = []
    points = list(range(n))
    entries += [{"theta": {}, "upsilon": {"w_cc": list(s)}, "block": eye(dim_h)} for s in subsets(points)]
    for x in points:
        for role in ("w_pc", "w_cm", "w_pm", "w_cc"):
            block = rand_mat(dim_h, dim_h, 0.5)
            rest = [y for y in points if y != x]
            for s in subsets(rest):
                entries.append({"theta": {role: [x]}, "upsilon": {"w_cc": list(s)}, "block": block})
    if future_roles:
        entries.append({"theta": {}, "upsilon": {"w_pc": [2]}, "block": rand_mat(dim_h, dim_h, 0.5)})
        entries.append({"theta": {"w_pc": [0]}, "upsilon": {"w_cm": [2]}, "block": rand_mat(dim_h, dim_h, 0.5)})
        entries.append({"theta": {"w_cm": [1]}, "upsilon": {"w_pm": [2]}, "block": rand_mat(dim_h, dim_h, 0.5)})
    return entries


def hamiltonian(dim_h, d=1, scale=0.7):
    return {"H_cc": herm(dim_h * d, scale), "H_pc": rand_mat(dim_h * d, dim_h, scale), "H_pm": herm(dim_h, scale)}


def main():
    write("demo", "algebra_hp.json", {"algebra": {"preset": "hp_vacuum"}})
    write("demo", "algebra_poisson.json", {"algebra": {"preset": "poisson", "lambda": 2.0}})
    write("demo", "gns_wiener.json", {"algebra": {"preset": "wiener"}, "sample": [[c(1), c(0)], [c(0), c(1)], [c(0.5, 0.2), c(-1, 0.3)]]})
    hp_basis = [[c(1 if i == j else 0) for i in range(4)] for j in range(4)]
    write("demo", "gns_hp.json", {"algebra": {"preset": "hp_vacuum"}, "sample": hp_basis})

    def wiener_el():
        return [rand_c(0.5), rand_c(0.5)]

    write("demo", "pi_rep_wiener.json", {
        "algebra": {"preset": "wiener"},
        "sample": [[c(1), c(0)], [c(0), c(1)]],
        "grid": GRID3,
        "elements": [wiener_el() for _ in range(3)],
        "elements_b": [wiener_el() for _ in range(3)],
        "vector": {"coeffs": [c(1), c(0.5, -0.25)],
                   "labels": [[[rand_c(0.5)] for _ in range(3)] for _ in range(2)]},
    })
    write("demo", "kernel_mul.json", {"grid": GRID3, "dim_h": 2, "K": random_kernel(3, 2, 12), "L": random_kernel(3, 2, 12)})
    write("demo", "ito_adapted.json", {"grid": GRID3, "dim_h": 2, "t": 1.0, "adapted": True, "M": m_entries(3, 2, False)})
    write("demo", "ito_nonadapted.json", {"grid": GRID3, "dim_h": 2, "t": 1.0, "adapted": False, "M": m_entries(3, 2, True)})
    write("demo", "solve.json", {"grid": GRID3, "dim_h": 2, "t": 1.0, "K0": eye(2),
                                 "generators": [hamiltonian(2) for _ in range(3)]})
    write("demo", "decompose.json", hamiltonian(2))

    write("defect", "algebra_not_hermitian.json", {"algebra": {"dim": 1, "names": ["dt"], "c": [[[c(0, 1)]]]}})
    write("defect", "algebra_bad_rank.json", {"algebra": {"dim": 2, "c": [[c(0), c(0)], [c(0), c(1)]]}})
    write("defect", "gns_not_cpd.json", {"algebra": {"dim": 1, "names": ["dt"], "c": [[[c(-1)]]]}, "sample": [[c(1)]]})
    bad = random_kernel(3, 2, 4)
    bad[1]["block"] = rand_mat(3, 2)
    write("defect", "kernel_mul_bad_block.json", {"grid": GRID3, "dim_h": 2, "K": bad, "L": random_kernel(3, 2, 4)})
    write("defect", "ito_claimed_adapted.json", {"grid": GRID3, "dim_h": 2, "t": 1.0, "adapted": True, "M": m_entries(3, 2, True)})
    write("defect", "solve_not_pseudo_unitary.json", {
        "grid": GRID3, "dim_h": 2, "t": 1.0, "K0": eye(2),
        "S": [{"S_pm": rand_mat(2, 2), "S_cm": rand_mat(2, 2), "S_pc": rand_mat(2, 2), "S_cc": rand_mat(2, 2)} for _ in range(3)]})
    h = hamiltonian(2)
    h["H_cc"][0][1] = c(h["H_cc"][0][1][0] + 0.5, h["H_cc"][0][1][1])
    write("defect", "decompose_not_selfadjoint.json", h)
    write("defect", "grid_not_increasing.json", {"grid": {"times": [0.4, 0.1, 0.7], "weights": [0.3, 0.3, 0.3]},
                                                  "dim_h": 1, "K": [], "L": []})


if __name__ == "__main__":
    main()
