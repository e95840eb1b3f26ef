"""Matched pair Lie algebras g ⋈ h.

A structure is stored as four dense real tensors in the standard bases:

    bracket_g[i, j, k]  k-th coordinate of [g_i, g_j]
    bracket_h[i, j, k]  k-th coordinate of [h_i, h_j]
    act_left[i, j, k]   k-th coordinate of h_i ▷ g_j   (lies in g)
    act_right[i, j, k]  k-th coordinate of h_i ◁ g_j   (lies in h)

Structures are usually built from bilinear callables through
:meth:`MatchedPairStructure.from_callables`, which evaluates them on basis
pairs once. Every later evaluation (brackets, actions, starred maps) goes
through the tensors, so an exported and re-imported structure behaves
bit-for-bit like the original.

Duals are identified with coordinate vectors through the dot product.
Coadjoint convention: <ad*_z m, w> = -<m, [z, w]>.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

Vector = np.ndarray
Bilinear = Callable[[np.ndarray, np.ndarray], np.ndarray]

FORMAT_TAG = "bowtie-mech-structure/1"
INDEX_LAYOUT = {
    "bracket_g": "[i][j][k] = k-th coord of [g_i, g_j], shape (dim_g, dim_g, dim_g)",
    "bracket_h": "[i][j][k] = k-th coord of [h_i, h_j], shape (dim_h, dim_h, dim_h)",
    "act_left": "[i][j][k] = k-th coord of h_i |> g_j in g, shape (dim_h, dim_g, dim_g)",
    "act_right": "[i][j][k] = k-th coord of h_i <| g_j in h, shape (dim_h, dim_g, dim_h)",
}


class DimensionError(ValueError):
    pass


def _as_vec(x, dim: int, name: str = "vector") -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (dim,):
        raise DimensionError(f"{name}: expected shape ({dim},), got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name}: non-finite entries")
    return v


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _bilinear(T: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # sum_ij x_i y_j T[i, j, :]
    n = T.shape[0]
    return y @ (x @ T.reshape(n, -1)).reshape(T.shape[1], T.shape[2])


@dataclass(frozen=True)
class MatchedElement:
    xi: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "xi", _frozen(self.xi))
        object.__setattr__(self, "eta", _frozen(self.eta))

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.xi, self.eta])

    @classmethod
    def from_array(cls, v, dim_g: int) -> "MatchedElement":
        v = np.asarray(v, dtype=float)
        return cls(v[:dim_g], v[dim_g:])


@dataclass(frozen=True, eq=False)
class MatchedPairStructure:
    dim_g: int
    dim_h: int
    bracket_g: np.ndarray
    bracket_h: np.ndarray
    act_left: np.ndarray
    act_right: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        if self.dim_g < 1 or self.dim_h < 1:
            raise DimensionError("zero-dimensional algebras are not supported")
        n, m = self.dim_g, self.dim_h
        shapes = {
            "bracket_g": (n, n, n),
            "bracket_h": (m, m, m),
            "act_left": (m, n, n),
            "act_right": (m, n, m),
        }
        for field, shape in shapes.items():
            arr = _frozen(getattr(self, field))
            if arr.shape != shape:
                raise DimensionError(f"{field}: expected shape {shape}, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{field}: non-finite entries")
            object.__setattr__(self, field, arr)

    @classmethod
    def from_callables(cls, dim_g: int, dim_h: int, bracket_g: Bilinear, bracket_h: Bilinear,
                       act_left: Bilinear, act_right: Bilinear, name: str = "custom"):
        """Tabulate bilinear callables on the standard bases.

        ``act_left(eta, xi)`` is eta ▷ xi and ``act_right(eta, xi)`` is eta ◁ xi.
        """
        Eg, Eh = np.eye(dim_g), np.eye(dim_h)
        cg = np.array([[bracket_g(Eg[i], Eg[j]) for j in range(dim_g)] for i in range(dim_g)])
        ch = np.array([[bracket_h(Eh[i], Eh[j]) for j in range(dim_h)] for i in range(dim_h)])
        tl = np.array([[act_left(Eh[i], Eg[j]) for j in range(dim_g)] for i in range(dim_h)])
        tr = np.array([[act_right(Eh[i], Eg[j]) for j in range(dim_g)] for i in range(dim_h)])
        return cls(dim_g, dim_h, cg, ch, tl, tr, name=name)

    # primitive operations
    def bg(self, x, y) -> np.ndarray:
        return _bilinear(self.bracket_g, x, y)

    def bh(self, x, y) -> np.ndarray:
        return _bilinear(self.bracket_h, x, y)

    def left(self, eta, xi) -> np.ndarray:
        """eta ▷ xi"""
        return _bilinear(self.act_left, eta, xi)

    def right(self, eta, xi) -> np.ndarray:
        """eta ◁ xi"""
        return _bilinear(self.act_right, eta, xi)

    # starred maps, all obtained by contracting the tensors against the dual slot
    def ad_star_g(self, xi, mu) -> np.ndarray:
        n = self.dim_g
        return -((xi @ self.bracket_g.reshape(n, -1)).reshape(n, n) @ mu)

    def ad_star_h(self, eta, nu) -> np.ndarray:
        m = self.dim_h
        return -((eta @ self.bracket_h.reshape(m, -1)).reshape(m, m) @ nu)

    def mu_right_star(self, mu, eta) -> np.ndarray:
        """μ ◁* η in g*: <μ ◁* η, ξ> = <μ, η ▷ ξ>."""
        n = self.dim_g
        return (eta @ self.act_left.reshape(self.dim_h, -1)).reshape(n, n) @ mu

    def a_star(self, eta, nu) -> np.ndarray:
        """𝔞*_η ν in g*: <𝔞*_η ν, ξ> = <ν, η ◁ ξ>."""
        return (eta @ self.act_right.reshape(self.dim_h, -1)).reshape(self.dim_g, self.dim_h) @ nu

    def xi_left_star(self, xi, nu) -> np.ndarray:
        """ξ ▷* ν in h*: <ξ ▷* ν, η> = <ν, η ◁ ξ>."""
        return (self.act_right @ nu) @ xi

    def b_star(self, xi, mu) -> np.ndarray:
        """𝔟*_ξ μ in h*: <𝔟*_ξ μ, η> = <μ, η ▷ ξ>."""
        return (self.act_left @ mu) @ xi

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.dim_g},{self.dim_h};".encode())
        for arr in (self.bracket_g, self.bracket_h, self.act_left, self.act_right):
            h.update(np.ascontiguousarray(arr, dtype="<f8").tobytes())
        return h.hexdigest()

    def to_dict(self) -> dict:
        return {
            "format": FORMAT_TAG,
            "name": self.name,
            "index_layout": INDEX_LAYOUT,
            "dim_g": self.dim_g,
            "dim_h": self.dim_h,
            "bracket_g": self.bracket_g.tolist(),
            "bracket_h": self.bracket_h.tolist(),
            "act_left": self.act_left.tolist(),
            "act_right": self.act_right.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MatchedPairStructure":
        if d.get("format") != FORMAT_TAG:
            raise ValueError(f"unrecognized structure format {d.get('format')!r}")
        try:
            return cls(int(d["dim_g"]), int(d["dim_h"]), d["bracket_g"], d["bracket_h"],
                       d["act_left"], d["act_right"], name=d.get("name", "custom"))
        except KeyError as exc:
            raise ValueError(f"structure document missing field {exc}") from None

    def scaled(self, left: float = 1.0, right: float = 1.0) -> "MatchedPairStructure":
        """Copy with the actions multiplied by constants (used for fault injection)."""
        return MatchedPairStructure(self.dim_g, self.dim_h, self.bracket_g, self.bracket_h,
                                    left * self.act_left, right * self.act_right,
                                    name=f"{self.name}*({left},{right})")


def save_structure(s: MatchedPairStructure, path) -> None:
    Path(path).write_text(json.dumps(s.to_dict(), indent=1))


def load_structure(path) -> MatchedPairStructure:
    return MatchedPairStructure.from_dict(json.loads(Path(path).read_text()))


def _check_element(s: MatchedPairStructure, z: MatchedElement, name="element"):
    _as_vec(z.xi, s.dim_g, f"{name}.xi")
    _as_vec(z.eta, s.dim_h, f"{name}.eta")


def matched_bracket(s: MatchedPairStructure, a: MatchedElement, b: MatchedElement) -> MatchedElement:
    _check_element(s, a, "a")
    _check_element(s, b, "b")
    xi = s.bg(a.xi, b.xi) + s.left(a.eta, b.xi) - s.left(b.eta, a.xi)
    eta = s.bh(a.eta, b.eta) + s.right(a.eta, b.xi) - s.right(b.eta, a.xi)
    return MatchedElement(xi, eta)


def transpose_map(f: Callable[[np.ndarray], np.ndarray], w, dim_in: int) -> np.ndarray:
    """Return f* w where <f* w, v> = <w, f(v)>.

    The matrix of f is assembled column by column from its values on the
    standard basis of the domain.
    """
    w = np.asarray(w, dtype=float)
    E = np.eye(dim_in)
    F = np.column_stack([np.asarray(f(E[i]), dtype=float) for i in range(dim_in)])
    if F.shape[0] != w.shape[0]:
        raise DimensionError(f"dual vector has dim {w.shape[0]}, map codomain has dim {F.shape[0]}")
    return F.T @ w


def matched_coadjoint(s: MatchedPairStructure, z: MatchedElement, m):
    """ad*_(ξ,η)(μ,ν) with <ad*_z m, w> = -<m, [z, w]>."""
    _check_element(s, z, "z")
    if isinstance(m, MatchedElement):  # dual pairs may arrive in the same container
        m = (m.xi, m.eta)
    mu = _as_vec(m[0], s.dim_g, "mu")
    nu = _as_vec(m[1], s.dim_h, "nu")
    return coadjoint_raw(s, z.xi, z.eta, mu, nu)


def coadjoint_raw(s: MatchedPairStructure, xi, eta, mu, nu):
    """Unchecked core of :func:`matched_coadjoint` on plain arrays."""
    out_g = s.ad_star_g(xi, mu) - s.mu_right_star(mu, eta) - s.a_star(eta, nu)
    out_h = s.ad_star_h(eta, nu) + s.xi_left_star(xi, nu) + s.b_star(xi, mu)
    return out_g, out_h


def axiom_residuals(s: MatchedPairStructure, xs, ys) -> dict[str, float]:
    """Residuals of all matched-pair identities on given samples.

    ``xs`` has shape (N, 3, dim_g) and ``ys`` shape (N, 3, dim_h).
    """
    res = dict.fromkeys([
        "antisymmetry_g", "antisymmetry_h", "jacobi_g", "jacobi_h",
        "module_left", "module_right", "compat_1", "compat_2",
        "antisymmetry_matched", "jacobi_matched",
    ], 0.0)

    def upd(key, v):
        res[key] = max(res[key], float(np.max(np.abs(v))))

    bg, bh, L, R = s.bg, s.bh, s.left, s.right
    for (x1, x2, x3), (y1, y2, y3) in zip(xs, ys):
        upd("antisymmetry_g", bg(x1, x2) + bg(x2, x1))
        upd("antisymmetry_h", bh(y1, y2) + bh(y2, y1))
        upd("jacobi_g", bg(x1, bg(x2, x3)) + bg(x2, bg(x3, x1)) + bg(x3, bg(x1, x2)))
        upd("jacobi_h", bh(y1, bh(y2, y3)) + bh(y2, bh(y3, y1)) + bh(y3, bh(y1, y2)))
        upd("module_left", L(bh(y1, y2), x1) - L(y1, L(y2, x1)) + L(y2, L(y1, x1)))
        upd("module_right", R(y1, bg(x1, x2)) - R(R(y1, x1), x2) + R(R(y1, x2), x1))
        upd("compat_1", L(y1, bg(x1, x2)) - bg(L(y1, x1), x2) - bg(x1, L(y1, x2))
            - L(R(y1, x1), x2) + L(R(y1, x2), x1))
        upd("compat_2", R(bh(y1, y2), x1) - bh(y1, R(y2, x1)) - bh(R(y1, x1), y2)
            - R(y1, L(y2, x1)) + R(y2, L(y1, x1)))
        a, b, c = MatchedElement(x1, y1), MatchedElement(x2, y2), MatchedElement(x3, y3)
        ab = matched_bracket(s, a, b)
        ba = matched_bracket(s, b, a)
        upd("antisymmetry_matched", ab.as_array() + ba.as_array())
        j = (matched_bracket(s, a, matched_bracket(s, b, c)).as_array()
             + matched_bracket(s, b, matched_bracket(s, c, a)).as_array()
             + matched_bracket(s, c, ab).as_array())
        upd("jacobi_matched", j)
    return res


def check_axioms(s: MatchedPairStructure, samples: int = 1000, seed=0) -> dict[str, float]:
    """Max absolute residual of every matched-pair identity over random triples in [-1, 1]."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-1, 1, size=(samples, 3, s.dim_g))
    ys = rng.uniform(-1, 1, size=(samples, 3, s.dim_h))
    return axiom_residuals(s, xs, ys)


# small catalogue of structures

def direct_sum(dim_g: int, dim_h: int, bracket_g: Bilinear, bracket_h: Bilinear,
               name="direct_sum") -> MatchedPairStructure:
    """Both actions trivial."""
    return MatchedPairStructure.from_callables(
        dim_g, dim_h, bracket_g, bracket_h,
        lambda eta, xi: np.zeros(dim_g), lambda eta, xi: np.zeros(dim_h), name=name)


def so3_left_trivial() -> MatchedPairStructure:
    """g = so(3), h = R^3 abelian, η ◁ ξ = η × ξ and trivial ▷ (heavy-top type)."""
    return MatchedPairStructure.from_callables(
        3, 3, np.cross, lambda a, b: np.zeros(3),
        lambda eta, xi: np.zeros(3), lambda eta, xi: np.cross(eta, xi),
        name="semidirect_left_trivial")


def so3_right_trivial() -> MatchedPairStructure:
    """g = R^3 abelian, h = so(3), η ▷ ξ = η × ξ and trivial ◁."""
    return MatchedPairStructure.from_callables(
        3, 3, lambda a, b: np.zeros(3), np.cross,
        lambda eta, xi: np.cross(eta, xi), lambda eta, xi: np.zeros(3),
        name="semidirect_right_trivial")


def so3_direct_sum() -> MatchedPairStructure:
    return direct_sum(3, 3, np.cross, np.cross, name="so3_direct_sum")
