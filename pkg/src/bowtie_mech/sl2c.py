"""SL(2,C) = SU(2) ⋈ K in closed form.

Charts
  su(2):  X = (r, s, t)  <->  r e1 + s e2 + t e3, with
          e1 = [[0, -i/2], [-i/2, 0]], e2 = [[0, -1/2], [1/2, 0]], e3 = [[-i/2, 0], [0, i/2]]
          The bracket is the cross product.
  K:      triple (a, b, c) with c > -1, product
          (a1, b1, c1) * (a2, b2, c2) = (a1 (1+c2) + a2, b1 (1+c2) + b2, c1 (1+c2) + c2)
          2x2 form  [[1+c, 0], [a+ib, 1]] / sqrt(1+c)
          3x3 form  [[1+c, 0, 0], [0, 1+c, 0], [-a, -b, 1]]
  Lie(K): Y = (a, b, c) <-> [[c/2, 0], [a+ib, -c/2]], bracket k x (Y1 x Y2).

SL(2,C) elements are embedded as A @ B (SU(2) factor first). All formulas
here are closed forms; :mod:`bowtie_mech.oracle` certifies them. See
CONVENTIONS.md for sign conventions and the variants that fail.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .matched_algebra import MatchedPairStructure

K_VEC = np.array([0.0, 0.0, 1.0])
E1 = np.array([[0, -0.5j], [-0.5j, 0]])
E2 = np.array([[0, -0.5], [0.5, 0]], dtype=complex)
E3 = np.array([[-0.5j, 0], [0, 0.5j]])
_E11 = np.diag([1.0, 0.0]).astype(complex)
_E22 = np.diag([0.0, 1.0]).astype(complex)


class ClosureError(ArithmeticError):
    """A group-level formula produced a matrix outside the expected subgroup."""


# --- group elements -------------------------------------------------------

@dataclass(frozen=True)
class SU2Element:
    m: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError("SU2Element needs a 2x2 matrix")
        if np.abs(m.conj().T @ m - np.eye(2)).max() > 1e-12 or abs(np.linalg.det(m) - 1) > 1e-12:
            raise ClosureError("matrix is not in SU(2)")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    @classmethod
    def identity(cls):
        return cls(np.eye(2))


@dataclass(frozen=True)
class KElement:
    a: float
    b: float
    c: float

    def __post_init__(self):
        for f in ("a", "b", "c"):
            object.__setattr__(self, f, float(getattr(self, f)))
        for v in (self.a, self.b, self.c):
            if not np.isfinite(v):
                raise ValueError("KElement entries must be finite")
        if not self.c > -1:
            raise ValueError(f"KElement needs c > -1, got {self.c}")

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c])

    @classmethod
    def from_vec(cls, v):
        return cls(float(v[0]), float(v[1]), float(v[2]))

    @classmethod
    def identity(cls):
        return cls(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class MatchedGroupElement:
    A: SU2Element
    B: KElement

    @classmethod
    def identity(cls):
        return cls(SU2Element.identity(), KElement.identity())


def _kv(B) -> np.ndarray:
    return B.vec if isinstance(B, KElement) else np.asarray(B, dtype=float)


def _am(A) -> np.ndarray:
    return A.m if isinstance(A, SU2Element) else np.asarray(A, dtype=complex)


# --- su(2) and SU(2) ------------------------------------------------------

def su2_mat(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return X[0] * E1 + X[1] * E2 + X[2] * E3


def su2_vec(M) -> np.ndarray:
    """Coordinates of a 2x2 matrix in (e1, e2, e3); the anti-Hermitian traceless part is used."""
    M = np.asarray(M, dtype=complex)
    return np.array([-(M[1, 0] + M[0, 1]).imag, (M[1, 0] - M[0, 1]).real, (M[1, 1] - M[0, 0]).imag])


def su2_project(m) -> np.ndarray:
    """Nearest SU(2) matrix (polar factor, then phase fix)."""
    u, _, vh = np.linalg.svd(np.asarray(m, dtype=complex))
    q = u @ vh
    return q / np.sqrt(np.linalg.det(q))


def su2_mul(A1, A2) -> SU2Element:
    return SU2Element(_am(A1) @ _am(A2))


def su2_inv(A) -> SU2Element:
    return SU2Element(_am(A).conj().T)


def su2_exp(X) -> SU2Element:
    X = np.asarray(X, dtype=float)
    th = float(np.linalg.norm(X))
    # mat(X)^2 = -(th/2)^2 I
    s = 0.5 if th < 1e-8 else np.sin(th / 2) / th
    m = np.cos(th / 2) * np.eye(2) + 2 * s * su2_mat(X)
    return SU2Element(su2_project(m))


def su2_ad_inv(A, X) -> np.ndarray:
    """Ad_{A^-1} X = A^-1 mat(X) A in coordinates."""
    A = _am(A)
    return su2_vec(A.conj().T @ su2_mat(X) @ A)


# --- K --------------------------------------------------------------------

def k_mul(B1, B2) -> KElement:
    a1, b1, c1 = _kv(B1)
    a2, b2, c2 = _kv(B2)
    s = 1.0 + c2
    return KElement(a1 * s + a2, b1 * s + b2, c1 * s + c2)


def k_inv(B) -> KElement:
    a, b, c = _kv(B)
    s = 1.0 + c
    return KElement(-a / s, -b / s, -c / s)


def k_exp(Y) -> KElement:
    a, b, c = np.asarray(Y, dtype=float)
    f = 1.0 if c == 0 else np.expm1(c) / c
    return KElement(a * f, b * f, float(np.expm1(c)))


def k_mat3(B) -> np.ndarray:
    a, b, c = _kv(B)
    return np.array([[1 + c, 0, 0], [0, 1 + c, 0], [-a, -b, 1]])


def k_mat2(B) -> np.ndarray:
    a, b, c = _kv(B)
    s = np.sqrt(1 + c)
    return np.array([[s, 0], [(a + 1j * b) / s, 1 / s]])


def k_alg2(Y) -> np.ndarray:
    a, b, c = np.asarray(Y, dtype=float)
    return np.array([[c / 2, 0], [a + 1j * b, -c / 2]])


def k_alg3(Y) -> np.ndarray:
    a, b, c = np.asarray(Y, dtype=float)
    return np.array([[c, 0, 0], [0, c, 0], [-a, -b, 0]])


def k_from_matrix(M, tol: float = 1e-12) -> KElement:
    M = np.asarray(M)
    if M.shape == (3, 3):
        M = M.real if np.iscomplexobj(M) else M
        c = M[0, 0] - 1
        ref = k_mat3((-M[2, 0], -M[2, 1], c))
        if np.abs(M - ref).max() > tol:
            raise ValueError("3x3 matrix is not of K shape")
        return KElement(-M[2, 0], -M[2, 1], c)
    if M.shape == (2, 2):
        s = M[0, 0].real
        if not s > 0:
            raise ValueError("2x2 matrix is not of K shape")
        z = M[1, 0] * s
        B = KElement(z.real, z.imag, s * s - 1)
        if np.abs(k_mat2(B) - M).max() > tol:
            raise ValueError("2x2 matrix is not of K shape")
        return B
    raise ValueError(f"cannot read a K element from shape {M.shape}")


def k_convert(B, target: str):
    """Convert between 'triple', 'mat3' and 'mat2' representations."""
    if not isinstance(B, KElement):
        arr = np.asarray(B)
        B = KElement.from_vec(arr) if arr.shape == (3,) else k_from_matrix(arr)
    if target == "triple":
        return B.vec
    if target == "mat3":
        return k_mat3(B)
    if target == "mat2":
        return k_mat2(B)
    raise ValueError(f"unknown representation {target!r}")


def k_left_jac(B) -> np.ndarray:
    """Jacobian of Y -> B * Y at Y = e in the triple chart: I + B k^T."""
    return np.eye(3) + np.outer(_kv(B), K_VEC)


def k_right_jac(B) -> np.ndarray:
    """Jacobian of Y -> Y * B at Y = e in the triple chart: (1 + c) I."""
    return (1 + _kv(B)[2]) * np.eye(3)


def k_ad_inv(B, Y) -> np.ndarray:
    """Ad_{B^-1} Y in the triple chart."""
    a, b, c = _kv(B)
    y1, y2, y3 = np.asarray(Y, dtype=float)
    s = 1 + c
    return np.array([s * y1 - y3 * a, s * y2 - y3 * b, y3])


# --- mutual group actions -------------------------------------------------

def group_act_left(B, A, check: bool = True) -> SU2Element:
    """B ▷ A: the SU(2) factor of B A."""
    Bm = k_mat2(B)
    Am = _am(A)
    BA2 = Bm @ Am @ _E22
    out = (BA2 + np.linalg.inv(Bm.conj().T) @ Am @ _E11) / np.linalg.norm(BA2)
    if check and (np.abs(out.conj().T @ out - np.eye(2)).max() > 1e-10
                  or abs(np.linalg.det(out) - 1) > 1e-10):
        raise ClosureError("B ▷ A left SU(2)")
    return SU2Element(su2_project(out)) if check else out


def group_act_right(B, A) -> KElement:
    """B ◁ A: the K factor of B A.

    (B ◁ A)^† (B ◁ A) = A^† (B^† B) A, and a K element is fixed by B^† B:
    its (1,1) entry is 1/(1+c) and its (1,0) entry is (a + ib)/(1+c).
    """
    Bm = k_mat2(B)
    Am = _am(A)
    P = Am.conj().T @ (Bm.conj().T @ Bm) @ Am
    s = 1.0 / P[1, 1].real
    z = P[1, 0] * s
    if not s > 0:
        raise ClosureError("B ◁ A left K")
    return KElement(z.real, z.imag, s - 1.0)


def group_act_right_uncorrected(B, A, reading: str = "literal"):
    """Diagnostic: the shifted-conjugation candidate for B ◁ A, in two readings.

    reading='literal' works with the 2x2 matrix of B and returns the raw 2x2
    result; reading='r3' conjugates the R^3 vector of B by A and returns a
    triple. Neither agrees with the factorization; kept for tests.
    """
    Bv = _kv(B)
    lam = Bv @ Bv / (2 * (Bv[2] + 1))
    Am = _am(A)
    if reading == "literal":
        return lam * E3 + Am @ (k_mat2(B) - lam * E3) @ Am.conj().T
    if reading == "r3":
        return su2_vec(lam * E3 + Am @ su2_mat(Bv - lam * K_VEC) @ Am.conj().T)
    raise ValueError(reading)


def embed(p: MatchedGroupElement) -> np.ndarray:
    return p.A.m @ k_mat2(p.B)


def matched_mul(p1: MatchedGroupElement, p2: MatchedGroupElement) -> MatchedGroupElement:
    g = su2_mul(p1.A, group_act_left(p1.B, p2.A))
    h = k_mul(group_act_right(p1.B, p2.A), p2.B)
    return MatchedGroupElement(g, h)


def matched_inv(p: MatchedGroupElement) -> MatchedGroupElement:
    hi = k_inv(p.B)
    gi = su2_inv(p.A)
    return MatchedGroupElement(group_act_left(hi, gi), group_act_right(hi, gi))


# --- infinitesimal actions ------------------------------------------------

def mutual_inf_actions(Y, X):
    """(Y ▷ X, Y ◁ X) for Y in Lie(K), X in su(2)."""
    Y = np.asarray(Y, dtype=float)
    X = np.asarray(X, dtype=float)
    return np.cross(Y, np.cross(X, K_VEC)), np.cross(Y, X)


def mutual_inf_actions_uncorrected(Y, X):
    """Diagnostic: Y ◁ X = X x Y, which breaks the Jacobi identity."""
    return np.cross(Y, np.cross(X, K_VEC)), np.cross(X, Y)


def B_act_X(B, X) -> np.ndarray:
    return k_mat3(B) @ np.asarray(X, dtype=float)


def x_on_b_jac(B) -> np.ndarray:
    """Matrix of X -> B ◁ X (tangent at B in the triple chart)."""
    a, b, c = _kv(B)
    u = a * a - b * b
    v = 2 * a * b
    d = c * c + 2 * c
    return np.array([
        [-v / 2, (u - d) / 2, b],
        [(u + d) / 2, v / 2, -a],
        [-(1 + c) * b, (1 + c) * a, 0.0],
    ])


def X_act_B(B, X) -> np.ndarray:
    return x_on_b_jac(B) @ np.asarray(X, dtype=float)


def b_tilde(B) -> np.ndarray:
    Bv = _kv(B)
    c = Bv[2]
    return Bv / (c + 1) - (Bv @ Bv) / (2 * (c + 1) ** 2) * K_VEC


def X_act_B_uncorrected(B, X) -> np.ndarray:
    """Diagnostic: T_eR_B (X x B~), which does not match the group action."""
    return k_right_jac(B) @ np.cross(np.asarray(X, dtype=float), b_tilde(B))


def Y_act_A(Y, A):
    """Derivatives at t = 0 of k_exp(tY) ▷ A (left-trivialized at A) and of k_exp(tY) ◁ A."""
    Am = _am(A)
    N = Am.conj().T @ k_alg2(Y) @ Am
    a1 = Am[:, 1]
    r = np.real(np.vdot(a1, k_alg2(Y) @ a1))
    left = su2_vec(N @ _E22 - N.conj().T @ _E11 - r * np.eye(2))
    # K part of A^-1 mat_K(Y) A: lower-left entry and diagonal of the remainder
    rem = N - su2_mat(left)
    right = np.array([rem[1, 0].real, rem[1, 0].imag, 2 * rem[0, 0].real])
    return left, right


# --- dual actions ---------------------------------------------------------

def ad_star_su2(X, Phi) -> np.ndarray:
    return np.cross(X, Phi)


def ad_star_k(Y, Psi) -> np.ndarray:
    Y = np.asarray(Y, dtype=float)
    Psi = np.asarray(Psi, dtype=float)
    return Y[2] * Psi - (Psi @ Y) * K_VEC


def phi_star_B(Phi, B) -> np.ndarray:
    """Φ ◁* B = B^T Φ (B in its 3x3 form)."""
    return k_mat3(B).T @ np.asarray(Phi, dtype=float)


def phi_star_Y(Phi, Y) -> np.ndarray:
    """Φ ◁* Y, dual to X -> Y ▷ X."""
    Phi = np.asarray(Phi, dtype=float)
    Y = np.asarray(Y, dtype=float)
    return Y[2] * Phi - Phi[2] * Y


def x_star_psi(X, Psi) -> np.ndarray:
    """X ▷* Ψ, dual to Y -> Y ◁ X."""
    return np.cross(X, Psi)


def a_star(Y, Psi) -> np.ndarray:
    """𝔞*_Y Ψ, dual to X -> Y ◁ X."""
    return np.cross(Psi, Y)


def b_star(X, Phi) -> np.ndarray:
    """𝔟*_X Φ, dual to Y -> Y ▷ X."""
    X = np.asarray(X, dtype=float)
    Phi = np.asarray(Phi, dtype=float)
    return (Phi @ X) * K_VEC - Phi[2] * X


UNCORRECTED_STAR = {
    "x_star_psi": lambda X, Psi: np.cross(Psi, X),
    "a_star": lambda Y, Psi: np.cross(Y, Psi),
    "b_star": lambda X, Phi: Phi[2] * np.asarray(X, float) - (np.asarray(Phi, float) @ X) * K_VEC,
}


def star_actions(X, Y, B, Phi, Psi) -> dict[str, np.ndarray]:
    return {
        "phi_star_B": phi_star_B(Phi, B),
        "phi_star_Y": phi_star_Y(Phi, Y),
        "x_star_psi": x_star_psi(X, Psi),
        "a_star": a_star(Y, Psi),
        "b_star": b_star(X, Phi),
    }


def matrix_chart_dual(P) -> np.ndarray:
    """Triple-chart covector of a covector given on 3x3 matrices (trace pairing)."""
    P = np.asarray(P, dtype=float)
    return np.array([-P[2, 0], -P[2, 1], P[0, 0] + P[1, 1]])


def cotangent_sigma(B, Psi_B) -> np.ndarray:
    """T*_e σ_B: transpose of X -> B ◁ X.

    Psi_B is a covector at B, either a triple-chart 3-vector or a 3x3 matrix
    paired with tangent matrices through the trace.
    """
    Psi_B = np.asarray(Psi_B, dtype=float)
    if Psi_B.shape == (3, 3):
        Psi_B = matrix_chart_dual(Psi_B)
    return x_on_b_jac(B).T @ Psi_B


def _vee(S) -> np.ndarray:
    S = 0.5 * (S - S.T)
    return np.array([S[2, 1], S[0, 2], S[1, 0]])


def cotangent_sigma_uncorrected(B, Psi_B) -> np.ndarray:
    """Diagnostic: B~ x vee(Ψ_B B^T) with Ψ_B a 3x3 matrix."""
    return np.cross(b_tilde(B), _vee(np.asarray(Psi_B, dtype=float) @ k_mat3(B).T))


def left_trans_dual(B, psi) -> np.ndarray:
    """T*_e L_B ψ = ψ + (B . ψ) k."""
    psi = np.asarray(psi, dtype=float)
    return psi + (_kv(B) @ psi) * K_VEC


def el_group_terms(B, dL_dB):
    """Group-dependent cotangent terms for the equations on K ⋉ (su(2) ⋈ K)."""
    return cotangent_sigma(B, dL_dB), left_trans_dual(B, dL_dB)


# --- equations of motion --------------------------------------------------

def ep_rhs_sl2c(L, X, Y):
    """Matched Euler-Poincaré right-hand side on R^3 ⋈ R^3 for L = I1 X.X + I2 Y.Y."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    mu = 2.0 * (L.I1 @ X)
    nu = 2.0 * (L.I2 @ Y)
    dmu = -ad_star_su2(X, mu) + phi_star_Y(mu, Y) + a_star(Y, nu)
    dnu = -ad_star_k(Y, nu) - x_star_psi(X, nu) - b_star(X, mu)
    return dmu, dnu


def ep_rhs_sl2c_uncorrected(L, X, Y):
    """Diagnostic: the R^3 ⋈ R^3 equations with the uncorrected signs of CONVENTIONS.md."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    mu = 2.0 * (L.I1 @ X)
    nu = 2.0 * (L.I2 @ Y)
    k = K_VEC
    dmu = -np.cross(X, mu) + (Y @ k) * mu - (mu @ k) * Y + np.cross(Y, nu)
    dnu = -(k @ Y) * nu - (nu @ Y) * k - np.cross(nu, X) - (mu @ k) * X + (mu @ X) * k
    return dmu, dnu


def reconstruct(A, B, X, Y):
    """(dA/dt, dB/dt) for body velocity (X, Y) at (A, B); dB/dt in the triple chart."""
    Am = _am(A)
    dA = Am @ su2_mat(B_act_X(B, X))
    dB = X_act_B(B, X) + k_left_jac(B) @ np.asarray(Y, dtype=float)
    return dA, dB


def body_velocity(A, B, dA, dB):
    """Inverse of :func:`reconstruct`: decompose M^-1 dM/dt with M = A B."""
    from .oracle import decompose_algebra
    Bm = k_mat2(B)
    M = _am(A) @ Bm
    # d/dt of the 2x2 K matrix, by the chain rule in the triple chart
    a, b, c = _kv(B)
    s = np.sqrt(1 + c)
    da, db, dc = dB
    dBm = np.array([[dc / (2 * s), 0],
                    [(da + 1j * db) / s - (a + 1j * b) * dc / (2 * s ** 3), -dc / (2 * s ** 3)]])
    dM = np.asarray(dA) @ Bm + _am(A) @ dBm
    # measured tangents (finite differences) carry a small trace; the splitting ignores it
    return decompose_algebra(np.linalg.solve(M, dM), check=False)


def triv_isomorphism(g, xi, h, eta):
    """((g, ξ), (h, η)) in TG ⋈ TH -> ((g, h), (ξ', η')) in T(G ⋈ H) (left trivialized)."""
    hi = k_inv(h)
    xi = np.asarray(xi, dtype=float)
    xi_p = B_act_X(hi, xi)
    eta_p = k_right_jac(h) @ X_act_B(hi, xi) + np.asarray(eta, dtype=float)
    return (g, h), (xi_p, eta_p)


def triv_isomorphism_inverse(g, h, xi_p, eta_p):
    """Inverse of :func:`triv_isomorphism`: returns ((g, ξ), (h, η))."""
    xi = B_act_X(h, xi_p)
    eta = np.asarray(eta_p, dtype=float) + k_left_jac(k_inv(h)) @ X_act_B(h, xi_p)
    return (g, xi), (h, eta)


def adjoint_matched(p: MatchedGroupElement, X, Y):
    """Ad_{(A,B)^-1}(X, Y), the body form of conjugation by p."""
    A, B = p.A, p.B
    y_left, y_right = Y_act_A(Y, A)
    zeta = su2_ad_inv(A, X) + y_left
    Bi = k_inv(B)
    xi = B_act_X(Bi, zeta)
    eta = k_right_jac(B) @ X_act_B(Bi, zeta) + k_ad_inv(B, y_right)
    return xi, eta


# --- the structure --------------------------------------------------------

@lru_cache(maxsize=1)
def sl2c_structure() -> MatchedPairStructure:
    return MatchedPairStructure.from_callables(
        3, 3,
        np.cross,
        lambda y1, y2: np.cross(K_VEC, np.cross(y1, y2)),
        lambda y, x: mutual_inf_actions(y, x)[0],
        lambda y, x: mutual_inf_actions(y, x)[1],
        name="sl2c",
    )


def sl2c_structure_uncorrected() -> MatchedPairStructure:
    """Diagnostic structure with Y ◁ X = X x Y."""
    return MatchedPairStructure.from_callables(
        3, 3,
        np.cross,
        lambda y1, y2: np.cross(K_VEC, np.cross(y1, y2)),
        lambda y, x: mutual_inf_actions_uncorrected(y, x)[0],
        lambda y, x: mutual_inf_actions_uncorrected(y, x)[1],
        name="sl2c_uncorrected",
    )


# --- dynamics helpers -----------------------------------------------------

def el_provider():
    from .matched_dynamics import GroupTermProvider
    return GroupTermProvider(
        terms=el_group_terms,
        velocity=lambda B, X, Y: X_act_B(B, X) + k_left_jac(B) @ np.asarray(Y, dtype=float),
    )


def integrate_with_group(L, X0, Y0, A0, B0, config, L_full=None):
    """RK4/Euler on (μ, ν, A, B) with the SU(2) factor projected back after each step.

    Returns (trajectory, A path of shape (N, 2, 2), B path of shape (N, 3)).
    With ``L_full`` (a LagrangianOnH) the group forces on K are included.
    """
    from .matched_dynamics import ReducedState, _trajectory, march, momenta

    s = sl2c_structure()
    kin = L if L_full is None else L_full.kinetic
    prov = el_provider()

    def f(y):
        mu, nu = y[:3], y[3:6]
        A = (y[6:10] + 1j * y[10:14]).reshape(2, 2)
        B = y[14:17]
        X, Y = kin.inverse(mu, nu)
        if L_full is None:
            from .matched_dynamics import ep_rhs
            dmu, dnu = ep_rhs(s, kin, ReducedState(X, Y))
        else:
            from .matched_dynamics import el_rhs_on_H
            dmu, dnu, _ = el_rhs_on_H(s, L_full, ReducedState(X, Y), B, prov)
        dA, dB = reconstruct(A, B, X, Y)
        return np.concatenate([dmu, dnu, dA.real.ravel(), dA.imag.ravel(), dB])

    def post(y):
        if not y[16] > -1.0:
            raise ValueError(f"K factor left the chart (c = {y[16]:.6g})")
        A = su2_project((y[6:10] + 1j * y[10:14]).reshape(2, 2))
        y = y.copy()
        y[6:10], y[10:14] = A.real.ravel(), A.imag.ravel()
        return y

    A0 = _am(A0)
    mu0, nu0 = momenta(kin, ReducedState(X0, Y0))
    y0 = np.concatenate([mu0, nu0, A0.real.ravel(), A0.imag.ravel(), _kv(B0)])
    ys = march(f, y0, config, post=post)
    As = (ys[:, 6:10] + 1j * ys[:, 10:14]).reshape(-1, 2, 2)
    Bs = ys[:, 14:17]
    efn = None if L_full is None else (lambda i, x, e: L_full.energy(Bs[i], x, e))
    tr = _trajectory(kin, ys[:, :6], 3, config, energy_fn=efn, group=Bs)
    return tr, As, Bs
