"""Brute-force references for the SU(2) ⋈ K = SL(2,C) instance.

Nothing here uses the closed-form formulas of :mod:`bowtie_mech.sl2c`. The
references are built from 2x2 complex matrix algebra only: commutators,
Gram-Schmidt factorization and a fixed linear solve for the splitting
sl(2,C) = su(2) + K.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# su(2) basis and the K basis (a, b, c) -> [[c/2, 0], [a + ib, -c/2]]
E_SU2 = np.array([
    [[0, -0.5j], [-0.5j, 0]],
    [[0, -0.5], [0.5, 0]],
    [[-0.5j, 0], [0, 0.5j]],
], dtype=complex)
E_K = np.array([
    [[0, 0], [1, 0]],
    [[0, 0], [1j, 0]],
    [[0.5, 0], [0, -0.5]],
], dtype=complex)
BASIS = np.concatenate([E_SU2, E_K])


def _realify(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    return np.concatenate([M.real.ravel(), M.imag.ravel()])


# traceless 2x2 complex matrices form a 6-dim real space; columns are the basis
_TRACELESS_ROWS = [0, 1, 2, 4, 5, 6]  # drop the (1,1) entries, fixed by tracelessness
_SYSTEM = np.column_stack([_realify(b)[_TRACELESS_ROWS] for b in BASIS])
_SYSTEM_INV = np.linalg.inv(_SYSTEM)


def embed_algebra(X, Y) -> np.ndarray:
    """(X, Y) -> X_1 e_1 + X_2 e_2 + X_3 e_3 + mat_K(Y)."""
    z = np.concatenate([np.asarray(X, float), np.asarray(Y, float)])
    return np.tensordot(z, BASIS, axes=1)


def decompose_algebra(M, check: bool = True):
    """Unique (X, Y) with M = mat_su2(X) + mat_K(Y)."""
    M = np.asarray(M, dtype=complex)
    if check and abs(np.trace(M)) > 1e-12 * max(1.0, np.abs(M).max()):
        raise ValueError("decompose_algebra expects a trace-free matrix")
    z = _SYSTEM_INV @ _realify(M)[_TRACELESS_ROWS]
    if check:
        resid = np.abs(embed_algebra(z[:3], z[3:]) - M).max()
        if resid > 1e-13 * max(1.0, np.abs(M).max()):
            raise ValueError(f"decomposition residual {resid:.3e}")
    return z[:3], z[3:]


def commutator_bracket(z1, z2):
    """Matrix-commutator bracket on (X, Y) pairs (each a length-6 array or a pair)."""
    x1, y1 = _split(z1)
    x2, y2 = _split(z2)
    M1 = embed_algebra(x1, y1)
    M2 = embed_algebra(x2, y2)
    return decompose_algebra(M1 @ M2 - M2 @ M1, check=False)


def _split(z):
    if hasattr(z, "xi"):
        return np.asarray(z.xi, float), np.asarray(z.eta, float)
    if isinstance(z, tuple):
        return np.asarray(z[0], float), np.asarray(z[1], float)
    z = np.asarray(z, dtype=float)
    return z[:3], z[3:]


@lru_cache(maxsize=1)
def structure_constants() -> np.ndarray:
    """c[i, j, k]: k-th coordinate of [b_i, b_j] in the basis (e_1, e_2, e_3 | K basis)."""
    E = np.eye(6)
    c = np.zeros((6, 6, 6))
    for i in range(6):
        for j in range(6):
            x, y = commutator_bracket(E[i], E[j])
            c[i, j] = np.concatenate([x, y])
    c.setflags(write=False)
    return c


def jacobi_residual(c: np.ndarray) -> float:
    # sum over cyclic permutations of c[j,k,l] c[i,l,m]
    t = np.einsum("jkl,ilm->ijkm", c, c)
    return float(np.abs(t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)).max())


# group-level references

def iwasawa_factor(M):
    """M = A @ L with A in SU(2) and L lower triangular with positive real diagonal.

    Returns (A, (a, b, c)) where L is the K element with triple (a, b, c).
    Gram-Schmidt is run on the columns in reverse order, so the second
    column of M fixes the second column of A.
    """
    M = np.asarray(M, dtype=complex)
    c1 = M[:, 1]
    l11 = np.linalg.norm(c1)
    a1 = c1 / l11
    l10 = np.vdot(a1, M[:, 0])
    r = M[:, 0] - l10 * a1
    l00 = np.linalg.norm(r)
    a0 = r / l00
    A = np.column_stack([a0, a1])
    # K shape: l00 = sqrt(1+c), l11 = 1/sqrt(1+c), l10 = (a+ib)/sqrt(1+c)
    z = l10 * l00
    return A, np.array([z.real, z.imag, l00 * l00 - 1.0])


def k_matrix(t) -> np.ndarray:
    a, b, c = t
    s = np.sqrt(1.0 + c)
    return np.array([[1 + c, 0], [a + 1j * b, 1]], dtype=complex) / s


def su2_expm(X) -> np.ndarray:
    """Exponential of mat_su2(X) by scaling and squaring of the Taylor series."""
    M = np.tensordot(np.asarray(X, float), E_SU2, axes=1)
    return _expm(M)


def k_expm(Y) -> np.ndarray:
    return _expm(np.tensordot(np.asarray(Y, float), E_K, axes=1))


def _expm(M: np.ndarray) -> np.ndarray:
    nrm = np.abs(M).sum(axis=1).max()
    s = max(0, int(np.ceil(np.log2(nrm))) + 1) if nrm > 0 else 0
    A = M / 2.0**s
    out = np.eye(2, dtype=complex)
    term = np.eye(2, dtype=complex)
    for n in range(1, 20):
        term = term @ A / n
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


# reference Euler-Poincare integration on the full 6-dim algebra

@dataclass
class ReferenceTrajectory:
    t: np.ndarray
    z: np.ndarray   # velocities, shape (N, 6)
    m: np.ndarray   # momenta, shape (N, 6)
    energy: np.ndarray


def reference_ep(sc: np.ndarray, inertia: np.ndarray, z0, step: float, t_end: float) -> ReferenceTrajectory:
    """RK4 for dm/dt = -ad*_z m, i.e. <dm/dt, w> = <m, [z, w]>, with m = 2 * inertia @ z.

    ``inertia`` is the full (6, 6) symmetric positive-definite matrix, so a
    block-diagonal argument reproduces L = I1 X.X + I2 Y.Y.
    """
    sc = np.asarray(sc, float)
    inertia = np.asarray(inertia, float)
    inv = np.linalg.inv(2.0 * inertia)
    n = int(np.floor(t_end / step + 1e-9))

    def f(m):
        z = inv @ m
        # (dm/dt)_w = sum_{a,b} z_a c[a, w, b] m_b
        return np.einsum("a,awb,b->w", z, sc, m)

    m = 2.0 * inertia @ np.asarray(z0, float)
    ms = np.empty((n + 1, 6))
    ms[0] = m
    for i in range(n):
        k1 = f(m)
        k2 = f(m + 0.5 * step * k1)
        k3 = f(m + 0.5 * step * k2)
        k4 = f(m + step * k3)
        m = m + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(m)):
            raise FloatingPointError(f"reference_ep: non-finite state at step {i + 1}")
        ms[i + 1] = m
    zs = ms @ inv.T
    energy = np.einsum("ni,ni->n", zs, ms) * 0.5
    return ReferenceTrajectory(np.arange(n + 1) * step, zs, ms, energy)


# finite differences

@dataclass
class FDResult:
    value: np.ndarray
    half_step: np.ndarray     # estimate at h/2
    richardson: np.ndarray    # (4 D(h/2) - D(h)) / 3
    truncation: float         # |D(h) - D(h/2)|, a scale for the O(h^2) error
    roundoff: float           # eps * |f| / h
    roundoff_dominated: bool


def finite_difference(fn, point, direction, h: float = 1e-4, retract=None) -> FDResult:
    """Central difference of ``fn`` along ``direction`` at ``point``.

    ``retract(point, v)`` realizes point ⊕ v in the chart (group exponential
    etc.); plain vector addition is used when it is None. The result flags
    steps where roundoff exceeds the observable truncation error, which is
    the symptom of a step that is too small.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    point = np.asarray(point) if retract is None else point
    direction = np.asarray(direction, float)
    if retract is None:
        def retract(p, v):
            return p + v

    def central(step):
        fp = np.asarray(fn(retract(point, step * direction)))
        fm = np.asarray(fn(retract(point, -step * direction)))
        return (fp - fm) / (2 * step), max(np.abs(fp).max(), np.abs(fm).max())

    d1, scale = central(h)
    d2, _ = central(h / 2)
    trunc = float(np.abs(d1 - d2).max())
    rnd = float(np.finfo(float).eps * max(scale, 1.0) / h)
    return FDResult(d1, d2, (4 * d2 - d1) / 3, trunc, rnd, rnd > trunc)
