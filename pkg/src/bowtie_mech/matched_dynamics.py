"""Reduced Lagrangian dynamics on a matched pair g ⋈ h.

The momenta (μ, ν) = (δL/δξ, δL/δη) are the ODE unknowns; velocities are
recovered by the inverse Legendre map at every stage. The matched
Euler-Poincaré equations read

    dμ/dt = -ad*_ξ μ + μ ◁* η + 𝔞*_η ν
    dν/dt = -ad*_η ν - ξ ▷* ν - 𝔟*_ξ μ

which is minus the coadjoint action of (ξ, η) on (μ, ν).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .matched_algebra import MatchedPairStructure, _as_vec, coadjoint_raw


class NumericalAbort(RuntimeError):
    def __init__(self, step: int, t: float, what: str = "non-finite state"):
        super().__init__(f"{what} at step {step} (t={t:.6g})")
        self.step = step
        self.t = t
        self.what = what


def _check_spd(M, name: str) -> np.ndarray:
    M = np.array(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square")
    if np.abs(M - M.T).max() > 1e-14 * max(1.0, np.abs(M).max()):
        raise ValueError(f"{name} is not symmetric")
    if np.linalg.eigvalsh(M).min() <= 0:
        raise ValueError(f"{name} is not positive definite")
    M.setflags(write=False)
    return M


@dataclass(frozen=True, eq=False)
class QuadraticLagrangian:
    """L(ξ, η) = I1 ξ·ξ + I2 η·η."""
    I1: np.ndarray
    I2: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "I1", _check_spd(self.I1, "I1"))
        object.__setattr__(self, "I2", _check_spd(self.I2, "I2"))
        object.__setattr__(self, "_inv1", np.linalg.inv(2.0 * self.I1))
        object.__setattr__(self, "_inv2", np.linalg.inv(2.0 * self.I2))

    @classmethod
    def identity(cls, n: int = 3, m: int = 3):
        return cls(np.eye(n), np.eye(m))

    @property
    def dim_g(self):
        return self.I1.shape[0]

    @property
    def dim_h(self):
        return self.I2.shape[0]

    def value(self, xi, eta) -> float:
        return float(xi @ self.I1 @ xi + eta @ self.I2 @ eta)

    def d_xi(self, xi, eta):
        return 2.0 * (self.I1 @ xi)

    def d_eta(self, xi, eta):
        return 2.0 * (self.I2 @ eta)

    def inverse(self, mu, nu):
        return self._inv1 @ mu, self._inv2 @ nu


@dataclass(frozen=True, eq=False)
class GeneralLagrangian:
    """User-supplied L(ξ, η) with its two partial derivatives.

    The derivatives are checked against central differences of ``value`` at
    construction. The inverse Legendre map is a Newton-type root solve.
    """
    dim_g: int
    dim_h: int
    value_fn: Callable
    d_xi_fn: Callable
    d_eta_fn: Callable
    fd_tol: float = 1e-6

    def __post_init__(self):
        err = self.validate()
        if err > self.fd_tol:
            raise ValueError(f"Lagrangian derivatives disagree with finite differences ({err:.2e})")

    def value(self, xi, eta) -> float:
        return float(self.value_fn(xi, eta))

    def d_xi(self, xi, eta):
        return np.asarray(self.d_xi_fn(xi, eta), dtype=float)

    def d_eta(self, xi, eta):
        return np.asarray(self.d_eta_fn(xi, eta), dtype=float)

    def validate(self, points: int = 3, h: float = 1e-5, seed: int = 0) -> float:
        rng = np.random.default_rng(seed)
        n = self.dim_g + self.dim_h
        worst = 0.0
        for _ in range(points):
            z = rng.uniform(-1, 1, n)
            grad = np.concatenate([self.d_xi(z[:self.dim_g], z[self.dim_g:]),
                                   self.d_eta(z[:self.dim_g], z[self.dim_g:])])
            for i in range(n):
                e = np.zeros(n)
                e[i] = h
                fp = self.value((z + e)[:self.dim_g], (z + e)[self.dim_g:])
                fm = self.value((z - e)[:self.dim_g], (z - e)[self.dim_g:])
                worst = max(worst, abs((fp - fm) / (2 * h) - grad[i]) / max(1.0, abs(grad[i])))
        return worst

    def inverse(self, mu, nu, guess=None):
        from scipy.optimize import root
        n = self.dim_g
        target = np.concatenate([mu, nu])

        def resid(z):
            return np.concatenate([self.d_xi(z[:n], z[n:]), self.d_eta(z[:n], z[n:])]) - target

        z0 = np.zeros_like(target) if guess is None else guess
        sol = root(resid, z0, method="hybr", tol=1e-14)
        # hybr may report "no progress" at a root already exact to rounding; judge by the residual
        if np.abs(resid(sol.x)).max() > 1e-10 * max(1.0, np.abs(target).max()):
            raise NumericalAbort(-1, float("nan"), "Legendre inversion failed")
        return sol.x[:n], sol.x[n:]


@dataclass(frozen=True)
class ReducedState:
    xi: np.ndarray
    eta: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "xi", np.asarray(self.xi, dtype=float))
        object.__setattr__(self, "eta", np.asarray(self.eta, dtype=float))


SCHEMES = ("rk4", "euler")


@dataclass(frozen=True)
class IntegratorConfig:
    step: float
    t_end: float
    scheme: str = "rk4"

    def __post_init__(self):
        if not (self.step > 0 and np.isfinite(self.step)):
            raise ValueError("step must be positive")
        if not self.step < self.t_end:
            raise ValueError("step must be smaller than t_end")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")

    @property
    def n_steps(self) -> int:
        return int(np.floor(self.t_end / self.step + 1e-9))


@dataclass(frozen=True)
class GroupTermProvider:
    """Group-dependent pieces of the equations on H ⋉ (g ⋈ h).

    terms(h, dL_dh) -> (covector in g*, covector in h*)
    velocity(h, xi, eta) -> dh/dt in the chart of H
    """
    terms: Callable
    velocity: Callable


@dataclass(frozen=True, eq=False)
class LagrangianOnH:
    """L(h, ξ, η) = kinetic(ξ, η) - V(h)."""
    kinetic: QuadraticLagrangian
    potential: Callable
    potential_grad: Callable

    def dL_dh(self, h):
        return -np.asarray(self.potential_grad(h), dtype=float)

    def energy(self, h, xi, eta) -> float:
        return self.kinetic.value(xi, eta) + float(self.potential(h))


def linear_potential(chi) -> tuple[Callable, Callable]:
    chi = np.asarray(chi, dtype=float)
    return (lambda h: float(chi @ np.asarray(h, dtype=float))), (lambda h: chi)


@dataclass
class Trajectory:
    t: np.ndarray
    xi: np.ndarray
    eta: np.ndarray
    mu: np.ndarray
    nu: np.ndarray
    energy: np.ndarray
    group: Optional[np.ndarray] = None
    extra: dict = field(default_factory=dict)

    def header(self) -> list[str]:
        n, m = self.xi.shape[1], self.eta.shape[1]
        return (["t"] + [f"xi{i + 1}" for i in range(n)] + [f"eta{i + 1}" for i in range(m)]
                + [f"mu{i + 1}" for i in range(n)] + [f"nu{i + 1}" for i in range(m)] + ["energy"])

    def rows(self):
        data = np.column_stack([self.t, self.xi, self.eta, self.mu, self.nu, self.energy])
        return data

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.header())
            for row in self.rows():
                w.writerow([repr(float(v)) for v in row])

    def energy_drift(self) -> float:
        return float(np.abs(self.energy - self.energy[0]).max())

    def final_state(self) -> np.ndarray:
        return np.concatenate([self.xi[-1], self.eta[-1]])


# --- right-hand sides -----------------------------------------------------

def momenta(L, state: ReducedState):
    return L.d_xi(state.xi, state.eta), L.d_eta(state.xi, state.eta)


def legendre_inverse(L, mu, nu):
    return L.inverse(np.asarray(mu, dtype=float), np.asarray(nu, dtype=float))


def _ep_from_velocities(s, xi, eta, mu, nu):
    g, h = coadjoint_raw(s, xi, eta, mu, nu)
    return -g, -h


def ep_rhs(s: MatchedPairStructure, L, state: ReducedState):
    """(dμ/dt, dν/dt) of the matched Euler-Poincaré equations."""
    _as_vec(state.xi, s.dim_g, "xi")
    _as_vec(state.eta, s.dim_h, "eta")
    mu, nu = momenta(L, state)
    return _ep_from_velocities(s, state.xi, state.eta, mu, nu)


def _action_is_zero(T: np.ndarray) -> bool:
    return float(np.abs(T).max(initial=0.0)) < 1e-14


def semidirect_ep_rhs(s: MatchedPairStructure, L, state: ReducedState, which: str):
    """Term-deleted equations when one action vanishes.

    which='left_trivial'  (▷ = 0): dμ = -ad*_ξ μ + 𝔞*_η ν,   dν = -ad*_η ν - ξ ▷* ν
    which='right_trivial' (◁ = 0): dμ = -ad*_ξ μ + μ ◁* η,   dν = -ad*_η ν - 𝔟*_ξ μ
    """
    if which == "left_trivial":
        if not _action_is_zero(s.act_left):
            raise ValueError("semidirect_ep_rhs: act_left is not the zero map")
    elif which == "right_trivial":
        if not _action_is_zero(s.act_right):
            raise ValueError("semidirect_ep_rhs: act_right is not the zero map")
    else:
        raise ValueError(f"unknown semidirect variant {which!r}")
    xi, eta = _as_vec(state.xi, s.dim_g, "xi"), _as_vec(state.eta, s.dim_h, "eta")
    mu, nu = momenta(L, state)
    if which == "left_trivial":
        dmu = -(s.ad_star_g(xi, mu) - s.a_star(eta, nu))
        dnu = -(s.ad_star_h(eta, nu) + s.xi_left_star(xi, nu))
    else:
        dmu = -(s.ad_star_g(xi, mu) - s.mu_right_star(mu, eta))
        dnu = -(s.ad_star_h(eta, nu) + s.b_star(xi, mu))
    return dmu, dnu


def lie_ep_rhs(C: np.ndarray, xi, mu):
    """Single-algebra Euler-Poincaré right-hand side -ad*_ξ μ for structure constants C."""
    n = C.shape[0]
    return (xi @ C.reshape(n, -1)).reshape(n, n) @ mu


def el_rhs_on_H(s: MatchedPairStructure, L_full: LagrangianOnH, state: ReducedState, group_point,
                provider: GroupTermProvider):
    """Equations on H ⋉ (g ⋈ h): the EP terms plus the group forces, and dh/dt."""
    dmu, dnu = ep_rhs(s, L_full.kinetic, state)
    dL = L_full.dL_dh(group_point)
    fg, fh = provider.terms(group_point, dL)
    hdot = provider.velocity(group_point, state.xi, state.eta)
    return dmu + fg, dnu + fh, np.asarray(hdot, dtype=float)


def reduced_energy(L, state: ReducedState) -> float:
    mu, nu = momenta(L, state)
    return float(mu @ state.xi + nu @ state.eta - L.value(state.xi, state.eta))


# --- integration ----------------------------------------------------------

def _advance(f, y, dt, scheme):
    if scheme == "euler":
        return y + dt * f(y)
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def march(f, y0, config: IntegratorConfig, post=None):
    """Fixed-step explicit integration; returns the (n_steps + 1, len(y0)) array of states."""
    n = config.n_steps
    ys = np.empty((n + 1, len(y0)))
    y = np.asarray(y0, dtype=float)
    ys[0] = y
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(n):
            try:
                y = _advance(f, y, config.step, config.scheme)
                if post is not None:
                    y = post(y)
            except (ValueError, ArithmeticError, NumericalAbort) as exc:
                # a stage evaluation left the domain (non-finite input, chart breach)
                what = exc.what if isinstance(exc, NumericalAbort) else str(exc)
                raise NumericalAbort(i + 1, (i + 1) * config.step, what) from None
            if not np.all(np.isfinite(y)):
                raise NumericalAbort(i + 1, (i + 1) * config.step)
            ys[i + 1] = y
    return ys


RHS_SELECTORS = ("ep", "left_trivial", "right_trivial")


def integrate(s: MatchedPairStructure, L, state0: ReducedState, config: IntegratorConfig,
              rhs: str = "ep") -> Trajectory:
    """Integrate the momentum ODE from state0; rhs is 'ep' or a semidirect variant."""
    n, m = s.dim_g, s.dim_h
    xi0 = _as_vec(state0.xi, n, "xi")
    eta0 = _as_vec(state0.eta, m, "eta")
    if rhs not in RHS_SELECTORS:
        raise ValueError(f"rhs must be one of {RHS_SELECTORS}")
    if rhs != "ep":
        # validates the declared trivial action once
        semidirect_ep_rhs(s, L, state0, rhs)

    def f(y):
        mu, nu = y[:n], y[n:]
        xi, eta = L.inverse(mu, nu)
        if rhs == "ep":
            g, h = _ep_from_velocities(s, xi, eta, mu, nu)
        else:
            g, h = semidirect_ep_rhs(s, L, ReducedState(xi, eta), rhs)
        return np.concatenate([g, h])

    mu0, nu0 = momenta(L, ReducedState(xi0, eta0))
    ys = march(f, np.concatenate([mu0, nu0]), config)
    return _trajectory(L, ys, n, config, state0.t)


def _trajectory(L, ys, n, config, t0=0.0, energy_fn=None, group=None) -> Trajectory:
    mus, nus = ys[:, :n], ys[:, n:]
    if isinstance(L, QuadraticLagrangian):
        xis, etas = mus @ L._inv1.T, nus @ L._inv2.T
    else:
        vel = [legendre_inverse(L, a, b) for a, b in zip(mus, nus)]
        xis = np.array([v[0] for v in vel])
        etas = np.array([v[1] for v in vel])
    if energy_fn is None and isinstance(L, QuadraticLagrangian):
        energy = (np.einsum("ij,jk,ik->i", xis, L.I1, xis) + np.einsum("ij,jk,ik->i", etas, L.I2, etas))
    elif energy_fn is None:
        energy = np.array([float(a @ x + b @ e - L.value(x, e))
                           for a, b, x, e in zip(mus, nus, xis, etas)])
    else:
        energy = np.array([energy_fn(i, xis[i], etas[i]) for i in range(len(ys))])
    t = t0 + np.arange(len(ys)) * config.step
    return Trajectory(t, xis, etas, mus, nus, energy, group=group)


def integrate_on_H(s: MatchedPairStructure, L_full: LagrangianOnH, state0: ReducedState, h0,
                   config: IntegratorConfig, provider: GroupTermProvider) -> Trajectory:
    """Integrate (μ, ν, h) for a Lagrangian that also depends on the H-point."""
    n, m = s.dim_g, s.dim_h
    h0 = np.asarray(h0, dtype=float)
    kin = L_full.kinetic

    def f(y):
        mu, nu, h = y[:n], y[n:n + m], y[n + m:]
        xi, eta = legendre_inverse(kin, mu, nu)
        dmu, dnu, hd = el_rhs_on_H(s, L_full, ReducedState(xi, eta), h, provider)
        return np.concatenate([dmu, dnu, hd])

    mu0, nu0 = momenta(kin, state0)
    ys = march(f, np.concatenate([mu0, nu0, h0]), config)
    hs = ys[:, n + m:]
    tr = _trajectory(kin, ys[:, :n + m], n, config, state0.t,
                     energy_fn=lambda i, x, e: L_full.energy(hs[i], x, e), group=hs)
    return tr
