#!/usr/bin/env python3
"""Generate the bundled pi-electron FCIDUMP fixtures.

Each system is a Pariser-Parr-Pople (PPP) model on carbon pi sites with Ohno
repulsion, transformed to the Hueckel molecular-orbital basis so the lowest
orbitals hold the Hartree-Fock occupation. Output is deterministic.

    python3 tools/make_fixtures.py fixtures/
"""
import math
import pathlib
import sys

import numpy as np

HARTREE_EV = 27.211386245988
ONSITE_U = 11.13 / HARTREE_EV  # eV -> hartree
OHNO_A = 14.397 / HARTREE_EV  # e^2/(4 pi eps0) in hartree * angstrom


def ring_positions(n, radius):
    return np.array([[radius * math.cos(2 * math.pi * i / n),
                      radius * math.sin(2 * math.pi * i / n), 0.0] for i in range(n)])


def zigzag_positions(n, bond=1.40):
    pts = []
    for i in range(n):
        x = i * bond * math.cos(math.radians(30))
        y = 0.0 if i % 2 == 0 else bond * math.sin(math.radians(30))
        pts.append([x, y, 0.0])
    return np.array(pts)


def ppp_integrals(pos, bonds):
    n = len(pos)
    gamma = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            r = np.linalg.norm(pos[i] - pos[j])
            gamma[i, j] = ONSITE_U / math.sqrt(1.0 + (ONSITE_U * r / OHNO_A) ** 2)
    hop = np.zeros((n, n))
    for (i, j), t in bonds.items():
        hop[i, j] = hop[j, i] = -t
    h_site = hop.copy()
    for i in range(n):
        h_site[i, i] = -sum(gamma[i, j] for j in range(n) if j != i)
    e_core = 0.5 * sum(gamma[i, j] for i in range(n) for j in range(n) if i != j)

    _, coeff = np.linalg.eigh(hop)
    # Fix MO sign: largest-magnitude component positive.
    for k in range(n):
        m = np.argmax(np.abs(coeff[:, k]))
        if coeff[m, k] < 0:
            coeff[:, k] *= -1
    h1 = coeff.T @ h_site @ coeff
    h2 = np.einsum("ip,iq,ij,jr,js->pqrs", coeff, coeff, gamma, coeff, coeff)
    return h1, h2, e_core


def write_fcidump(path, h1, h2, e_core, nelec, tol=1e-12):
    n = h1.shape[0]
    lines = [f" &FCI NORB={n:3d},NELEC={nelec:3d},MS2=0,",
             "  ORBSYM=" + ",".join("1" for _ in range(n)) + ",",
             "  ISYM=1,", " &END"]
    for i in range(n):
        for j in range(i + 1):
            for k in range(n):
                for l in range(k + 1):
                    if i * (i + 1) // 2 + j < k * (k + 1) // 2 + l:
                        continue
                    v = h2[i, j, k, l]
                    if abs(v) > tol:
                        lines.append(f"{v:24.16e} {i + 1:4d} {j + 1:4d} {k + 1:4d} {l + 1:4d}")
    for i in range(n):
        for j in range(i + 1):
            v = h1[i, j]
            if abs(v) > tol:
                lines.append(f"{v:24.16e} {i + 1:4d} {j + 1:4d} {0:4d} {0:4d}")
    lines.append(f"{e_core:24.16e} {0:4d} {0:4d} {0:4d} {0:4d}")
    path.write_text("\n".join(lines) + "\n")


T_DOUBLE = 2.60 / HARTREE_EV
T_SINGLE = 2.20 / HARTREE_EV
T_FORMING = 0.90 / HARTREE_EV


def systems():
    # ethylene pi bond
    yield "ethylene_2e2o", zigzag_positions(2, 1.34), {(0, 1): T_DOUBLE}, 2
    # cyclopentadiene diene unit (s-cis butadiene)
    pos = ring_positions(5, 1.21)[:4]
    yield "cyclopentadiene_4e4o", pos, {(0, 1): T_DOUBLE, (1, 2): T_SINGLE,
                                        (2, 3): T_DOUBLE}, 4
    # transition state: diene + dienophile closing a six-ring through long bonds
    pos = ring_positions(6, 1.75)
    yield "ts_6e6o", pos, {(0, 1): 0.5 * (T_DOUBLE + T_SINGLE), (1, 2): T_SINGLE * 1.1,
                           (2, 3): 0.5 * (T_DOUBLE + T_SINGLE), (3, 4): T_FORMING,
                           (4, 5): T_DOUBLE * 0.95, (5, 0): T_FORMING}, 6
    # octatetraene chain for the 8-qubit configuration
    bonds = {(i, i + 1): (T_DOUBLE if i % 2 == 0 else T_SINGLE) for i in range(7)}
    yield "octatetraene_8e8o", zigzag_positions(8), bonds, 8
    # stretched two-site bond: strong static correlation
    yield "stretched_2e2o", zigzag_positions(2, 2.40), {(0, 1): 0.8 / HARTREE_EV}, 2


def frozen_core(h1, h2, e_core, start, size):
    """Fold doubly occupied orbitals [0, start) into an active window."""
    core = range(start)
    act = slice(start, start + size)
    e = e_core + sum(2 * h1[c, c] for c in core)
    e += sum(2 * h2[c, c, d, d] - h2[c, d, d, c] for c in core for d in core)
    f = h1.copy()
    for c in core:
        f += 2 * h2[:, :, c, c] - h2[:, c, c, :]
    return f[act, act], h2[act, act, act, act], e


def main(argv):
    out = pathlib.Path(argv[1] if len(argv) > 1 else "fixtures")
    out.mkdir(parents=True, exist_ok=True)
    for name, pos, bonds, nelec in systems():
        h1, h2, e_core = ppp_integrals(pos, bonds)
        write_fcidump(out / f"{name}.fcidump", h1, h2, e_core, nelec)
        print(f"wrote {name}.fcidump (norb={h1.shape[0]}, nelec={nelec})")
        if name == "ts_6e6o":
            # PT2 companion: core orbital 0, active 1..4, virtual 5
            a1, a2, ae = frozen_core(h1, h2, e_core, 1, 4)
            write_fcidump(out / "ts_6e6o_cas4.fcidump", a1, a2, ae, nelec - 2)
            print("wrote ts_6e6o_cas4.fcidump (norb=4, nelec=4)")


if __name__ == "__main__":
    main(sys.argv)
