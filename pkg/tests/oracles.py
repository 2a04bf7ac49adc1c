"""Brute-force reference computations, written without the package.

Everything here is full-matrix Kronecker algebra on plain numpy arrays so it
shares no code with qswitch.qcore.  The frozen numbers at the bottom were
worked out by hand.
"""
import math
from functools import reduce

import numpy as np

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
IY = np.array([[0, 1], [-1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
HAD = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
PAULI = {"I": I2, "X": X, "iY": IY, "Z": Z}

s = 1 / math.sqrt(2)
BELL = {
    "psi+": np.array([s, 0, 0, s], dtype=complex),
    "psi-": np.array([s, 0, 0, -s], dtype=complex),
    "phi+": np.array([0, s, s, 0], dtype=complex),
    "phi-": np.array([0, s, -s, 0], dtype=complex),
}


def kron(*ms):
    return reduce(np.kron, ms)


def embed(op, targets, n):
    """Full 2^n x 2^n matrix of ``op`` acting on ``targets`` (qubit 0 = MSB)."""
    k = len(targets)
    d = 2 ** n
    out = np.zeros((d, d), dtype=complex)
    rest = [q for q in range(n) if q not in targets]
    for col in range(d):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        sub = int("".join(str(bits[t]) for t in targets), 2) if k else 0
        for row_sub in range(2 ** k):
            amp = op[row_sub, sub]
            if amp == 0:
                continue
            new = list(bits)
            for j, t in enumerate(targets):
                new[t] = (row_sub >> (k - 1 - j)) & 1
            row = int("".join(map(str, new)), 2)
            out[row, col] += amp
    assert all(q in range(n) for q in rest)
    return out


def ad_ops(eta):
    return [np.array([[1, 0], [0, math.sqrt(1 - eta)]], dtype=complex),
            np.array([[0, math.sqrt(eta)], [0, 0]], dtype=complex)]


def pd_ops(eta):
    return [math.sqrt(1 - eta) * I2.astype(complex),
            math.sqrt(eta) * np.diag([1, 0]).astype(complex),
            math.sqrt(eta) * np.diag([0, 1]).astype(complex)]


def zeta(theta, phi):
    return np.array([math.sin(theta), math.cos(theta) * np.exp(1j * phi)])


def bcst_fidelity(kind, eta, t1, t2, p1=0.0, p2=0.0):
    """Noisy BCST, outcome |00>|00>, with the same-index pairing (S1,R2), (R1,S2).

    Qubits: 0 S1, 1 S1', 2 R1, 3 S2, 4 S2', 5 R2.  Pairs (S1,R1) and
    (S2,R2) start in psi+.
    """
    n = 6
    # build |psi+>_{S1 R1} |psi+>_{S2 R2} |z1>_{S1'} |z2>_{S2'} in order (S1,S1',R1,S2,S2',R2)
    z1, z2 = zeta(t1, p1), zeta(t2, p2)
    psi = np.zeros(64, dtype=complex)
    bell = BELL["psi+"]
    for a in range(2):
        for c in range(2):
            for b in range(2):
                for d in range(2):
                    for x in range(2):
                        for y in range(2):
                            amp = bell[2 * a + c] * bell[2 * b + d] * z1[x] * z2[y]
                            idx = int(f"{a}{x}{c}{b}{y}{d}", 2)
                            psi[idx] += amp
    rho = np.outer(psi, psi.conj())
    ops = ad_ops(eta) if kind == "AD" else pd_ops(eta)
    for group in ((0, 5), (2, 3)):
        new = np.zeros_like(rho)
        for e in ops:
            full = embed(np.kron(e, e), list(group), n)
            new += full @ rho @ full.conj().T
        rho = new
    sender = np.kron(HAD, I2) @ CNOT
    u = embed(sender, [1, 0], n) @ embed(sender, [4, 3], n)
    rho = u @ rho @ u.conj().T
    proj = embed(np.diag([1, 0]), [0], n) @ embed(np.diag([1, 0]), [1], n) \
        @ embed(np.diag([1, 0]), [3], n) @ embed(np.diag([1, 0]), [4], n)
    rho = proj @ rho @ proj
    rho = rho / np.trace(rho).real
    # keep R1 (2) and R2 (5)
    t = rho.reshape([2] * 12)
    t = np.einsum("abcdefabCdeF->cfCF", t)
    red = t.reshape(4, 4)
    target = np.kron(z1, z2)
    return float(np.vdot(target, red @ target).real), red


def cqd_fidelity(kind, eta, initial, a, b):
    """Joint routing: correlated channel on (home, travel), U_A, channel, U_B, channel."""
    ops = ad_ops(eta) if kind == "AD" else pd_ops(eta)
    psi = BELL[initial]
    rho = np.outer(psi, psi.conj())
    rho = sum(np.kron(e, e) @ rho @ np.kron(e, e).conj().T for e in ops)
    ua, ub = np.kron(I2, PAULI[a]), np.kron(I2, PAULI[b])
    rho = ua @ rho @ ua.conj().T
    rho = sum(np.kron(I2, e) @ rho @ np.kron(I2, e).conj().T for e in ops)
    rho = ub @ rho @ ub.conj().T
    rho = sum(np.kron(I2, e) @ rho @ np.kron(I2, e).conj().T for e in ops)
    rho = rho / np.trace(rho).real
    target = ub @ ua @ psi
    return float(np.vdot(target, rho @ target).real)


def teleport_fidelity_no_correction(state):
    """|<psi|X|psi>|^2, the fidelity when X was needed but I was applied."""
    return abs(np.vdot(state, X @ state)) ** 2


# -- frozen values (derived by hand) -------------------------------------------------

ENTROPY_1_3 = math.log2(3) + 1 / 3          # H(1/3,1/3,1/6,1/6) = 1.918295834...
REVEALED_1_3 = 2 - ENTROPY_1_3              # 0.081704165...
WRONG_PAULI_HAAR = 1 / 3                    # E|<psi|P|psi>|^2 over Haar, P a non-identity Pauli
UNDISCLOSED_FIDELITY = 0.25 * 1 + 0.75 / 3  # right kind w.p. 1/4, else 1/3
DETECTION_RATE = 0.25                       # 1/2 wrong basis x 1/2 flipped
ABORT_N16 = 1 - 0.75 ** 8                   # 8 checked decoys, any error aborts


def withheld_accuracy(n):
    """Symbol accuracy when Bob pairs with a uniformly random permutation.

    A slot is paired correctly w.p. 1/n; otherwise the two Bell pairs are
    different and the symbol is uniform, right w.p. 1/4.
    """
    return 1 / n + (1 - 1 / n) / 4
