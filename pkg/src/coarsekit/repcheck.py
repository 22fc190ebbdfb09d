"""Exact finite-dimensional checks of the left-right representation identities.

Hilbert-Schmidt vectors are plain ``(n, n)`` arrays with the inner product
``<A, B> = sum conj(A) * B``.  Vector-valued matrices carry an extra trailing
axis of length ``k`` for the coefficient space ``K``.

A permutation ``gamma`` with positive weights ``h`` acts on both by

    Omega  ->  (h gamma) Omega gamma^-1,   (x, y) -> h(x) Omega(gamma^-1 x, gamma^-1 y).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .actions import PartialTranslation
from .coarse import ExtendedMetric
from .roe import compress, propagation

__all__ = [
    "CheckReport",
    "hs_inner",
    "hs_norm",
    "left_right_apply",
    "diag_embed",
    "norm_reduction",
    "translate",
    "lemma_inequalities",
    "compression_state_identity",
    "ghost_vanishing",
]


@dataclass(frozen=True)
class CheckReport:
    """One verification outcome, serializable as report JSON."""

    check: str
    residual: float
    slack: float
    passed: bool
    seed: int | None = None

    def to_json(self) -> dict:
        out = asdict(self)
        out["pass"] = bool(out.pop("passed"))
        return out


def _arr(a) -> np.ndarray:
    return a.entries if hasattr(a, "entries") else np.asarray(a)


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product, conjugate-linear in the first slot.

    Also accepts vector-valued matrices, where it sums over the ``K`` axis.
    """
    return complex(np.vdot(a, b))


def hs_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(np.ravel(a)))


def left_right_apply(a, b, omega: np.ndarray) -> np.ndarray:
    """``a Omega b``."""
    a, b, omega = _arr(a), _arr(b), np.asarray(omega)
    if not a.shape == b.shape == omega.shape:
        raise ValueError(f"dimension mismatch: {a.shape}, {omega.shape}, {b.shape}")
    return a @ omega @ b


def diag_embed(xi: np.ndarray) -> np.ndarray:
    return np.diag(np.asarray(xi))


def norm_reduction(zeta: np.ndarray) -> np.ndarray:
    """Entrywise ``K``-norms ``eta(x, y) = ||zeta(x, y)||``."""
    zeta = np.asarray(zeta)
    if zeta.ndim == 2:
        return np.abs(zeta)
    if zeta.ndim != 3:
        raise ValueError(f"expected an (n, n, k) array, got shape {zeta.shape}")
    return np.linalg.norm(zeta, axis=2)


def translate(omega: np.ndarray, h: np.ndarray, gamma: PartialTranslation) -> np.ndarray:
    """``(h gamma) Omega gamma^-1`` for a permutation ``gamma``, any trailing ``K`` axis moved along."""
    omega = np.asarray(omega)
    if not gamma.is_total():
        raise ValueError("gamma must be a permutation")
    inv = np.array(gamma.inverse().mapping)
    moved = omega[np.ix_(inv, inv)]
    scale = np.asarray(h).reshape((-1,) + (1,) * (omega.ndim - 1))
    return scale * moved


def lemma_inequalities(
    zeta: np.ndarray,
    h: np.ndarray,
    gamma: PartialTranslation,
    f: np.ndarray,
    seed: int | None = None,
    tol: float = 1e-10,
) -> dict:
    """Compare ``zeta`` with its norm reduction ``eta`` under the translation action.

    Checks, with ``U = (h gamma) . gamma^-1``:

    (i)   ``<eta, U eta> >= |<zeta, U zeta>|``
    (ii)  ``||U eta|| == ||U zeta||``
    (iii) ``<eta, f eta> == <zeta, f zeta>`` for a real diagonal ``f``

    Returns a mapping from check name to :class:`CheckReport`.
    """
    zeta = np.asarray(zeta)
    if zeta.ndim == 2:
        zeta = zeta[:, :, None]
    n = zeta.shape[0]
    h = np.asarray(h, dtype=float)
    f = np.asarray(f, dtype=float)
    if zeta.shape[:2] != (n, n) or h.shape != (n,) or f.shape != (n,) or gamma.n != n:
        raise ValueError("shape mismatch between zeta, h, f and gamma")
    if np.any(h <= 0):
        raise ValueError("h must be entrywise positive")
    eta = norm_reduction(zeta)

    lhs = hs_inner(eta, translate(eta, h, gamma)).real
    rhs = abs(hs_inner(zeta, translate(zeta, h, gamma)))
    slack = lhs - rhs

    res_norm = abs(hs_norm(translate(eta, h, gamma)) - hs_norm(translate(zeta, h, gamma)))

    left = hs_inner(eta, f[:, None] * eta)
    right = hs_inner(zeta, f[:, None, None] * zeta)
    res_diag = abs(left - right)

    return {
        "inner-product-bound": CheckReport("inner-product-bound", 0.0, float(slack), slack >= -tol, seed),
        "translated-norm": CheckReport("translated-norm", float(res_norm), 0.0, res_norm <= tol, seed),
        "diagonal-state": CheckReport("diagonal-state", float(res_diag), 0.0, res_diag <= tol, seed),
    }


def compression_state_identity(
    eta: np.ndarray,
    a,
    radius: float,
    d: ExtendedMetric,
    seed: int | None = None,
    tol: float = 1e-12,
) -> CheckReport:
    """``<eta, a eta>`` against the sum of ball-block states ``<w_y, P a P* w_y>``.

    ``w_y`` is column ``y`` of ``eta`` restricted to ``Ball(y, radius)``.
    The two agree exactly once ``eta`` has propagation at most ``radius``.

    Raises
    ------
    ValueError
        If ``eta`` has propagation larger than ``radius``.
    """
    eta = np.asarray(eta)
    a = _arr(a)
    prop = propagation(eta, d)
    if prop > radius:
        raise ValueError(f"eta has propagation {prop}, larger than radius {radius}")
    left = hs_inner(eta, a @ eta)
    comp = compress(a, radius, d)
    right = 0j
    for y, ball in enumerate(comp.balls):
        omega = eta[ball, y]
        right += np.vdot(omega, comp.blocks[y] @ omega)
    residual = abs(left - right)
    return CheckReport("compression-state-identity", float(residual), 0.0, residual <= tol, seed)


def ghost_vanishing(eta: np.ndarray, a, radius: float, d: ExtendedMetric, seed: int | None = None) -> CheckReport:
    """``<eta, a eta> == 0`` exactly when ``eta`` avoids every centre with a nonzero ball block.

    Precondition: ``eta`` has propagation at most ``radius`` and its
    nonzero columns all sit at centres whose compression block vanishes.
    """
    eta = np.asarray(eta)
    a = _arr(a)
    if propagation(eta, d) > radius:
        raise ValueError("eta exceeds the compression radius")
    live = compress(a, radius, d).zero_outside()
    used = np.flatnonzero(np.any(eta != 0, axis=0))
    clash = sorted(set(live).intersection(used.tolist()))
    if clash:
        raise ValueError(f"eta has nonzero columns at centres {clash[:5]} where the operator is live")
    value = hs_inner(eta, a @ eta)
    return CheckReport("ghost-vanishing", abs(value), 0.0, value == 0, seed)
