r"""Quadrature rules for integrals over finite intervals and the half-line.

The integrals in this package share a few shapes:

* subordination integrals :math:`\int_0^\infty F(\tau)\,\tau^{-1-s}\,d\tau`,
  handled by the substitution :math:`\tau = e^\sigma` on a finite
  :math:`\sigma`-window plus analytic end corrections;
* Gaussian convolutions, handled by Gauss--Hermite rules;
* integrands concentrated on a known window, handled by composite
  Gauss--Legendre panels, optionally graded towards an endpoint.

Node tables come from :mod:`numpy.polynomial` and :mod:`scipy.special`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy import special


@lru_cache(maxsize=64)
def _leggauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=64)
def _hermgauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    # scipy's Golub-Welsch based routine stays accurate at orders where numpy's overflows.
    x, w = special.roots_hermite(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights for :math:`\\int_a^b f(x)\\,dx \\approx \\sum_i w_i f(x_i)`.

    ``tail_bound`` certifies the magnitude of anything the rule leaves out
    (truncated tails); it is added to error estimates by callers.
    """

    nodes: np.ndarray
    weights: np.ndarray
    lower: float
    upper: float
    tail_bound: float = 0.0
    label: str = ""

    def __post_init__(self) -> None:
        if self.nodes.shape != self.weights.shape:
            raise ValueError("nodes and weights must have the same shape")

    def __len__(self) -> int:
        return self.nodes.size

    def integrate(self, values) -> np.ndarray | float:
        """Contract ``values`` (last axis matching the nodes) against the weights."""
        out = np.asarray(values) @ self.weights
        return float(out) if np.ndim(out) == 0 else out

    def with_tail(self, bound: float) -> QuadratureRule:
        return replace(self, tail_bound=self.tail_bound + abs(bound))


def gauss_legendre(lower: float, upper: float, order: int = 32, panels: int = 1) -> QuadratureRule:
    """Composite Gauss--Legendre rule with equal panels on ``[lower, upper]``."""
    edges = np.linspace(lower, upper, panels + 1)
    return panel_gauss_legendre(edges, order)


def panel_gauss_legendre(edges, order: int = 32) -> QuadratureRule:
    """Composite Gauss--Legendre rule on consecutive panels ``edges[i]..edges[i+1]``."""
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("panel edges must be strictly increasing")
    x, w = _leggauss(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return QuadratureRule(nodes, weights, float(edges[0]), float(edges[-1]), label="gauss-legendre")


def graded_gauss_legendre(
    lower: float, upper: float, order: int = 32, panels: int = 8, grading: float = 2.0
) -> QuadratureRule:
    r"""Panels whose edges cluster at ``lower`` like :math:`(k/K)^{grading}`.

    Suited to integrands with a weak endpoint singularity or boundary layer
    at ``lower``.
    """
    if grading < 1:
        raise ValueError("grading exponent must be >= 1")
    frac = np.linspace(0.0, 1.0, panels + 1) ** grading
    edges = lower + (upper - lower) * frac
    rule = panel_gauss_legendre(edges, order)
    return replace(rule, label="graded-gauss-legendre")


def power_substitution(
    upper: float, power: float, order: int = 32, panels: int = 4
) -> QuadratureRule:
    r"""Rule on ``[0, upper]`` through :math:`x = upper\, w^{power}`, :math:`w\in[0,1]`.

    Removes endpoint singularities of type :math:`x^{1/power - 1}` and
    smoother ones such as :math:`\sqrt{x}` for ``power = 2``.
    """
    base = gauss_legendre(0.0, 1.0, order, panels)
    w = base.nodes
    nodes = upper * w**power
    weights = base.weights * upper * power * w ** (power - 1.0)
    return QuadratureRule(nodes, weights, 0.0, float(upper), label="power-substitution")


def log_rule(
    lower: float, upper: float, order: int = 24, panels_per_decade: float = 1.5
) -> QuadratureRule:
    r"""Rule on ``[lower, upper]`` (both > 0) via :math:`x = e^{\sigma}`.

    The returned weights include the Jacobian, so ``rule.integrate(f(nodes))``
    approximates :math:`\int f(x)\,dx` directly.
    """
    if not 0 < lower < upper:
        raise ValueError("log_rule needs 0 < lower < upper")
    s0, s1 = np.log(lower), np.log(upper)
    panels = max(1, int(np.ceil((s1 - s0) / np.log(10.0) * panels_per_decade)))
    base = gauss_legendre(s0, s1, order, panels)
    nodes = np.exp(base.nodes)
    return QuadratureRule(nodes, base.weights * nodes, float(lower), float(upper), label="log")


def gauss_hermite(order: int = 64) -> QuadratureRule:
    r"""Gauss--Hermite rule for :math:`\int_{\mathbb{R}} e^{-z^2} f(z)\,dz`.

    The Gaussian weight is *not* folded into ``weights``.
    """
    x, w = _hermgauss(order)
    return QuadratureRule(np.array(x), np.array(w), -np.inf, np.inf, label="gauss-hermite")


def tensor_nodes(rule: QuadratureRule, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor-product nodes of shape ``(M**dim, dim)`` and weights of shape ``(M**dim,)``."""
    grids = np.meshgrid(*([rule.nodes] * dim), indexing="ij")
    wgrids = np.meshgrid(*([rule.weights] * dim), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    return nodes, weights
