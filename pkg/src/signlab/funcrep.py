"""Radial function representations.

A :class:`FunctionSpec` couples a dimension with one of three representations:

* :class:`ClosedForm` - a catalog entry ``amplitude * base(dilation * r)``, or a
  ``custom`` expression tree built from sums, dilations, products,
  convolutions and the three-atom Dirac symmetrisation;
* :class:`EigenExpansion` - a finite combination of the Laguerre-Gaussian
  Fourier eigenfunctions restricted to one parity, so fhat = sign * f exactly;
* :class:`SampledProfile` - radial samples with spline interpolation and a
  declared tail.

Every function is radial, so ``evaluate`` takes a radius (negative input is
read as its absolute value).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, lru_cache
from typing import Any, Union

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import betainc

from .quadrature import gauss_legendre
from .special import ball_volume, eigen_basis, radial_kernel, sphere_area

__all__ = [
    "Kind",
    "ClosedForm",
    "EigenExpansion",
    "SampledProfile",
    "Tail",
    "FunctionSpec",
    "Combination",
    "Dilation",
    "Product",
    "Convolution",
    "DiracSym",
    "DiracWeight",
    "TailModel",
    "SpecError",
    "evaluate",
    "parse_spec",
    "serialize_spec",
    "spec_to_dict",
    "spec_from_dict",
    "l1_norm",
    "closed",
    "eigen",
    "sampled",
    "custom",
    "combine",
    "scale",
    "dilate",
    "support_radius",
    "kinks",
    "tail_model",
    "decay_radius",
    "bump_l2_norm_sq",
]


class SpecError(ValueError):
    """Schema or invariant violation, carrying a JSON path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class Kind(str, Enum):
    TENT = "tent"
    SINC_SQ = "sinc_sq"
    BANDLIMITED = "bandlimited_minimizer"
    BANDLIMITED_HAT = "bandlimited_minimizer_hat"
    GAUSSIAN = "gaussian"
    CHI = "chi"
    CHI_HAT = "chi_hat"
    BALL_AUTOCORR = "ball_autocorr"
    BALL_AUTOCORR_HAT = "ball_autocorr_hat"
    BUMP = "bump"
    BUMP_HAT = "bump_hat"
    BUMP_AUTOCORR = "bump_autocorr"
    BUMP_AUTOCORR_HAT = "bump_autocorr_hat"
    CUSTOM = "custom"


# kinds whose closed-form transform exists only on the line
ONE_DIM_KINDS = {Kind.TENT, Kind.SINC_SQ, Kind.BANDLIMITED, Kind.BANDLIMITED_HAT}
NONNEG_KINDS = {
    Kind.TENT, Kind.SINC_SQ, Kind.GAUSSIAN, Kind.CHI, Kind.BALL_AUTOCORR,
    Kind.BALL_AUTOCORR_HAT, Kind.BUMP, Kind.BUMP_AUTOCORR, Kind.BUMP_AUTOCORR_HAT,
}
# support radius of the undilated base function
_BASE_SUPPORT = {
    Kind.TENT: 1.0, Kind.BANDLIMITED_HAT: 0.5, Kind.CHI: 1.0, Kind.BALL_AUTOCORR: 2.0,
    Kind.BUMP: 1.0, Kind.BUMP_AUTOCORR: 2.0,
}


# ---------------------------------------------------------------------------
# data model


@dataclass(frozen=True)
class Tail:
    """Behaviour past the last sample: ``zero`` or a power-law ``decay`` with
    the bound |f(r)| <= c r^(-p)."""

    kind: str = "zero"
    c: float = 0.0
    p: float = 0.0

    def __post_init__(self):
        if self.kind not in ("zero", "decay"):
            raise SpecError("$.sampled.tail.kind", f"unknown tail kind {self.kind!r}")
        if self.kind == "decay" and not (self.c >= 0 and self.p > 0):
            raise SpecError("$.sampled.tail", "decay tail needs c >= 0 and p > 0")


@dataclass(frozen=True)
class ClosedForm:
    kind: Kind
    amplitude: float = 1.0
    dilation: float = 1.0
    expr: Any = None  # expression node when kind is CUSTOM

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if math.isnan(self.amplitude) or math.isnan(self.dilation):
            raise SpecError("$.closed_form", "NaN parameter")
        if not self.dilation > 0:
            raise SpecError("$.closed_form.dilation", "dilation must be positive")
        if (self.kind is Kind.CUSTOM) != (self.expr is not None):
            raise SpecError("$.closed_form.expr", "expr is required exactly for kind 'custom'")


@dataclass(frozen=True)
class EigenExpansion:
    sign: int
    coeffs: tuple

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise SpecError("$.eigen.sign", "sign must be +1 or -1")
        c = tuple(float(v) for v in np.asarray(self.coeffs, dtype=float).ravel())
        if not c:
            raise SpecError("$.eigen.coeffs", "empty coefficient vector")
        for k, v in enumerate(c):
            if math.isnan(v):
                raise SpecError(f"$.eigen.coeffs[{k}]", "NaN coefficient")
            if v != 0.0 and (-1) ** k != self.sign:
                raise SpecError(
                    f"$.eigen.coeffs[{k}]",
                    f"index {k} has eigenvalue {(-1) ** k:+d}, inconsistent with sign {self.sign:+d}",
                )
        object.__setattr__(self, "coeffs", c)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coeffs)

    @property
    def degree(self) -> int:
        nz = np.nonzero(self.array)[0]
        return int(nz[-1]) if nz.size else 0


@dataclass(frozen=True)
class SampledProfile:
    radii: tuple
    values: tuple
    interpolation: str = "cubic"
    tail: Tail = field(default_factory=Tail)

    def __post_init__(self):
        r = tuple(float(v) for v in np.asarray(self.radii, dtype=float).ravel())
        v = tuple(float(x) for x in np.asarray(self.values, dtype=float).ravel())
        if len(r) != len(v):
            raise SpecError("$.sampled.values", "radii and values differ in length")
        if len(r) < 2:
            raise SpecError("$.sampled.radii", "need at least two samples")
        if r[0] != 0.0:
            raise SpecError("$.sampled.radii[0]", "grid must start at 0")
        if np.any(np.diff(r) <= 0):
            raise SpecError("$.sampled.radii", "grid must be strictly increasing")
        if any(map(math.isnan, v)):
            raise SpecError("$.sampled.values", "NaN sample")
        if self.interpolation not in ("linear", "cubic"):
            raise SpecError("$.sampled.interpolation", "must be 'linear' or 'cubic'")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "values", v)

    @cached_property
    def _spline(self):
        # clamped: zero slope at the origin (radial symmetry) and at the end
        return CubicSpline(np.array(self.radii), np.array(self.values), bc_type="clamped")

    def __call__(self, x):
        x = np.abs(np.asarray(x, dtype=float))
        r = np.array(self.radii)
        last = r[-1]
        inside = x <= last
        out = np.zeros_like(x)
        if self.interpolation == "cubic":
            out[inside] = self._spline(x[inside])
        else:
            out[inside] = np.interp(x[inside], r, np.array(self.values))
        if self.tail.kind == "decay":
            far = ~inside
            out[far] = self.values[-1] * (last / x[far]) ** self.tail.p
        return out


@dataclass(frozen=True)
class FunctionSpec:
    dim: int
    rep: Union[ClosedForm, EigenExpansion, SampledProfile]
    metadata: str | None = None

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise SpecError("$.dim", f"dimension must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))

    def __call__(self, x):
        return evaluate(self, x)

    def with_metadata(self, text: str | None) -> "FunctionSpec":
        return FunctionSpec(self.dim, self.rep, text)

    @property
    def kind(self) -> str:
        if isinstance(self.rep, ClosedForm):
            return self.rep.kind.value
        return "eigen" if isinstance(self.rep, EigenExpansion) else "sampled"


# expression nodes for ClosedForm(kind=CUSTOM)


@dataclass(frozen=True)
class Combination:
    terms: tuple  # of (coef, FunctionSpec)


@dataclass(frozen=True)
class Dilation:
    spec: FunctionSpec
    factor: float


@dataclass(frozen=True)
class Product:
    left: FunctionSpec
    right: FunctionSpec


@dataclass(frozen=True)
class Convolution:
    left: FunctionSpec
    right: FunctionSpec


@dataclass(frozen=True)
class DiracSym:
    """Convolution with the radialised comb delta_{x0} + delta_{-x0} + 2 delta_0."""

    spec: FunctionSpec
    x0: float


@dataclass(frozen=True)
class DiracWeight:
    """Multiplication by the comb transform 2 + 2 K(2 pi x0 |x|)."""

    spec: FunctionSpec
    x0: float


Node = Union[Combination, Dilation, Product, Convolution, DiracSym, DiracWeight]


# ---------------------------------------------------------------------------
# constructors


def closed(kind, dim: int = 1, amplitude: float = 1.0, dilation: float = 1.0, metadata=None) -> FunctionSpec:
    return FunctionSpec(dim, ClosedForm(Kind(kind), float(amplitude), float(dilation)), metadata)


def eigen(dim: int, sign: int, coeffs, metadata=None) -> FunctionSpec:
    return FunctionSpec(dim, EigenExpansion(int(sign), tuple(np.asarray(coeffs, dtype=float))), metadata)


def sampled(dim: int, radii, values, interpolation="cubic", tail: Tail | None = None, metadata=None) -> FunctionSpec:
    return FunctionSpec(dim, SampledProfile(tuple(radii), tuple(values), interpolation, tail or Tail()), metadata)


def custom(dim: int, node: Node, metadata=None) -> FunctionSpec:
    for child in _children(node):
        if child.dim != dim:
            raise SpecError("$.closed_form.expr", f"child dimension {child.dim} differs from {dim}")
    return FunctionSpec(dim, ClosedForm(Kind.CUSTOM, expr=node), metadata)


def _children(node) -> list:
    if isinstance(node, Combination):
        return [s for _, s in node.terms]
    if isinstance(node, (Dilation, DiracSym, DiracWeight)):
        return [node.spec]
    return [node.left, node.right]


def _node(f: FunctionSpec):
    rep = f.rep
    return rep.expr if isinstance(rep, ClosedForm) and rep.kind is Kind.CUSTOM else None


def scale(f: FunctionSpec, c: float) -> FunctionSpec:
    """c * f, kept in the simplest representation."""
    c = float(c)
    rep = f.rep
    if isinstance(rep, ClosedForm) and rep.kind is not Kind.CUSTOM:
        return FunctionSpec(f.dim, ClosedForm(rep.kind, rep.amplitude * c, rep.dilation), f.metadata)
    if isinstance(rep, EigenExpansion):
        return FunctionSpec(f.dim, EigenExpansion(rep.sign, tuple(c * v for v in rep.coeffs)), f.metadata)
    if isinstance(rep, SampledProfile):
        tail = rep.tail if rep.tail.kind == "zero" else Tail("decay", abs(c) * rep.tail.c, rep.tail.p)
        return FunctionSpec(f.dim, SampledProfile(rep.radii, tuple(c * v for v in rep.values), rep.interpolation, tail), f.metadata)
    return combine([(c, f)])


def dilate(f: FunctionSpec, lam: float) -> FunctionSpec:
    """x -> f(lam * x)."""
    lam = float(lam)
    if not lam > 0:
        raise ValueError("dilation factor must be positive")
    rep = f.rep
    if lam == 1.0:
        return f
    if isinstance(rep, ClosedForm) and rep.kind is not Kind.CUSTOM:
        return FunctionSpec(f.dim, ClosedForm(rep.kind, rep.amplitude, rep.dilation * lam), f.metadata)
    if isinstance(rep, SampledProfile):
        tail = rep.tail if rep.tail.kind == "zero" else Tail("decay", rep.tail.c * lam ** (-rep.tail.p), rep.tail.p)
        return FunctionSpec(f.dim, SampledProfile(tuple(r / lam for r in rep.radii), rep.values, rep.interpolation, tail), f.metadata)
    node = _node(f)
    if isinstance(node, Dilation):
        return dilate(node.spec, node.factor * lam)
    return custom(f.dim, Dilation(f, lam))


def combine(terms) -> FunctionSpec:
    """Linear combination sum c_i f_i with flattening and merging of eigen
    expansions of equal sign and of identical closed-form kinds."""
    flat: list[tuple[float, FunctionSpec]] = []

    def push(c, f):
        node = _node(f)
        if isinstance(node, Combination):
            for c2, g in node.terms:
                push(c * c2, g)
        elif c != 0.0:
            flat.append((float(c), f))

    for c, f in terms:
        push(c, f)
    if not flat:
        raise ValueError("combination of no nonzero terms")
    dims = {f.dim for _, f in flat}
    if len(dims) != 1:
        raise SpecError("$.closed_form.expr", "dimension mismatch in combination")
    dim = dims.pop()
    merged: list[tuple[float, FunctionSpec]] = []
    eig: dict[int, np.ndarray] = {}
    cat: dict[tuple, float] = {}
    order: list = []
    for c, f in flat:
        rep = f.rep
        if isinstance(rep, EigenExpansion):
            cur = eig.get(rep.sign)
            v = c * rep.array
            if cur is None:
                eig[rep.sign] = v
                order.append(("eig", rep.sign))
            else:
                n = max(cur.size, v.size)
                eig[rep.sign] = np.pad(cur, (0, n - cur.size)) + np.pad(v, (0, n - v.size))
        elif isinstance(rep, ClosedForm) and rep.kind is not Kind.CUSTOM:
            key = (rep.kind, rep.dilation)
            if key not in cat:
                order.append(("cat", key))
                cat[key] = 0.0
            cat[key] += c * rep.amplitude
        else:
            order.append(("other", len(merged)))
            merged.append((c, f))
    out: list[tuple[float, FunctionSpec]] = []
    for tag, key in order:
        if tag == "eig":
            arr = eig[key]
            if np.any(arr != 0):
                out.append((1.0, FunctionSpec(dim, EigenExpansion(key, tuple(arr)))))
        elif tag == "cat":
            if cat[key] != 0.0:
                out.append((1.0, FunctionSpec(dim, ClosedForm(key[0], cat[key], key[1]))))
        else:
            out.append(merged[key])
    if not out:
        # exact cancellation: represent zero by an empty-amplitude gaussian
        return FunctionSpec(dim, ClosedForm(Kind.GAUSSIAN, 0.0))
    if len(out) == 1 and out[0][0] == 1.0:
        return out[0][1]
    return custom(dim, Combination(tuple(out)))


# ---------------------------------------------------------------------------
# evaluation


def bump0(r):
    r = np.abs(np.asarray(r, dtype=float))
    out = np.zeros_like(r)
    m = r < 1.0
    out[m] = np.exp(-1.0 / (1.0 - r[m] ** 2))
    return out


@lru_cache(maxsize=32)
def bump_l2_norm_sq(d: int) -> float:
    """||psi_0||_2^2 for the unnormalised bump exp(-1/(1-|x|^2)) in R^d."""
    x, w = gauss_legendre(200)
    r = 0.5 * (x + 1.0)
    return float(sphere_area(d) * np.sum(0.5 * w * r ** (d - 1) * bump0(r) ** 2))


def _bump_hat(d: int, rho: np.ndarray) -> np.ndarray:
    # Hankel transform of the bump over its support [0, 1]
    out = np.empty_like(rho)
    x, w = gauss_legendre(48)
    for lo in range(0, rho.size, 256):
        rr = rho[lo:lo + 256]
        cells = int(8 + 2 * np.ceil(np.max(rr, initial=0.0)))
        e = np.linspace(0.0, 1.0, cells + 1)
        mid = 0.5 * (e[1:] + e[:-1])
        half = 0.5 * (e[1:] - e[:-1])
        nodes = (mid[:, None] + half[:, None] * x).ravel()
        wts = (half[:, None] * w).ravel() * nodes ** (d - 1) * bump0(nodes)
        ker = radial_kernel(d, 2.0 * math.pi * np.outer(rr, nodes))
        out[lo:lo + 256] = sphere_area(d) * ker @ wts
    return out


def _bump_autocorr(d: int, r: np.ndarray) -> np.ndarray:
    # psi_0 * psi_0, supported on [0, 2]
    out = np.zeros_like(r)
    m = r < 2.0
    rr = r[m]
    if d == 1:
        x, w = gauss_legendre(96)
        lo = rr - 1.0
        half = 0.5 * (1.0 - lo)
        mid = 0.5 * (1.0 + lo)
        y = mid[:, None] + half[:, None] * x
        out[m] = half * np.sum(w * bump0(y) * bump0(rr[:, None] - y), axis=1)
        return out
    xr, wr = gauss_legendre(64)
    xt, wt = gauss_legendre(64)
    rho = 0.5 * (xr + 1.0)
    th = 0.5 * math.pi * (xt + 1.0)
    wrho = 0.5 * wr * rho ** (d - 1) * bump0(rho)
    wth = 0.5 * math.pi * wt * np.sin(th) ** (d - 2)
    cst = sphere_area(d - 1)
    for i, x0 in enumerate(rr):
        dist = np.sqrt(np.maximum(x0 * x0 + rho[:, None] ** 2 - 2 * x0 * rho[:, None] * np.cos(th), 0.0))
        out[np.flatnonzero(m)[i]] = cst * wrho @ (bump0(dist) @ wth)
    return out


def _bandlimited_minimizer(r: np.ndarray) -> np.ndarray:
    # sin^2(pi (r-1)/2) / (r^2 - 1), Taylor branch within 1e-3 of r = 1
    h = r - 1.0
    out = np.empty_like(r)
    near = np.abs(h) < 1e-3
    hn = h[~near]
    out[~near] = np.sin(0.5 * math.pi * hn) ** 2 / (hn * (r[~near] + 1.0))
    hs = h[near]
    y2 = (0.5 * math.pi * hs) ** 2
    # sin^2(y)/y^2 = 1 - y^2/3 + 2y^4/45 - y^6/315 + 2y^8/14175 - 2y^10/467775
    series = 1.0 + y2 * (-1.0 / 3 + y2 * (2.0 / 45 + y2 * (-1.0 / 315 + y2 * (2.0 / 14175 - y2 * 2.0 / 467775))))
    out[near] = (0.25 * math.pi ** 2) * hs * series / (2.0 + hs)
    return out


def _base(kind: Kind, d: int, r: np.ndarray) -> np.ndarray:
    if kind is Kind.TENT:
        return np.maximum(1.0 - r, 0.0)
    if kind is Kind.SINC_SQ:
        return np.sinc(r) ** 2
    if kind is Kind.BANDLIMITED:
        return _bandlimited_minimizer(r)
    if kind is Kind.BANDLIMITED_HAT:
        return np.where(r <= 0.5, -0.5 * math.pi * np.sin(2.0 * math.pi * r), 0.0)
    if kind is Kind.GAUSSIAN:
        return np.exp(-math.pi * r * r)
    if kind is Kind.CHI:
        return (r <= 1.0).astype(float)
    if kind is Kind.CHI_HAT:
        return ball_volume(d) * radial_kernel(d + 2, 2.0 * math.pi * r)
    if kind is Kind.BALL_AUTOCORR:
        z = np.clip(1.0 - 0.25 * r * r, 0.0, 1.0)
        return np.where(r < 2.0, ball_volume(d) * betainc(0.5 * (d + 1), 0.5, z), 0.0)
    if kind is Kind.BALL_AUTOCORR_HAT:
        return _base(Kind.CHI_HAT, d, r) ** 2
    if kind is Kind.BUMP:
        return bump0(r)
    if kind is Kind.BUMP_HAT:
        return _bump_hat(d, r)
    if kind is Kind.BUMP_AUTOCORR:
        return _bump_autocorr(d, r)
    if kind is Kind.BUMP_AUTOCORR_HAT:
        return _bump_hat(d, r) ** 2
    raise ValueError(f"no base function for {kind}")


def _eval_node(f: FunctionSpec, node, x: np.ndarray) -> np.ndarray:
    if isinstance(node, Combination):
        out = np.zeros_like(x)
        for c, g in node.terms:
            out += c * evaluate(g, x)
        return out
    if isinstance(node, Dilation):
        return evaluate(node.spec, node.factor * x)
    if isinstance(node, Product):
        return evaluate(node.left, x) * evaluate(node.right, x)
    if isinstance(node, Convolution):
        from .transforms import convolution_values

        return convolution_values(node.left, node.right, x)
    if isinstance(node, DiracSym):
        g, x0 = node.spec, node.x0
        if f.dim == 1:
            return evaluate(g, np.abs(x - x0)) + evaluate(g, x + x0) + 2.0 * evaluate(g, x)
        return 2.0 * evaluate(g, x) + 2.0 * sphere_average(g, x, x0)
    if isinstance(node, DiracWeight):
        return evaluate(node.spec, x) * (2.0 + 2.0 * radial_kernel(f.dim, 2.0 * math.pi * node.x0 * x))
    raise TypeError(f"unknown node {type(node).__name__}")


def sphere_average(g: FunctionSpec, x: np.ndarray, x0: float, n: int = 96) -> np.ndarray:
    """Mean of g(|x - x0 w|) over unit vectors w in R^d (d >= 2)."""
    d = g.dim
    t, w = gauss_legendre(n)
    th = 0.5 * math.pi * (t + 1.0)
    wt = 0.5 * math.pi * w * np.sin(th) ** (d - 2)
    wt = wt / np.sum(wt)
    dist = np.sqrt(np.maximum(x[:, None] ** 2 + x0 * x0 - 2.0 * x0 * x[:, None] * np.cos(th), 0.0))
    return evaluate(g, dist.ravel()).reshape(dist.shape) @ wt


def evaluate(f: FunctionSpec, x) -> np.ndarray | float:
    """f at radius |x|; accepts scalars or arrays."""
    xa = np.asarray(x, dtype=float)
    if np.any(np.isnan(xa)):
        raise ValueError("NaN radius")
    scalar = xa.ndim == 0
    r = np.abs(np.atleast_1d(xa)).ravel()
    rep = f.rep
    if isinstance(rep, ClosedForm):
        if rep.kind is Kind.CUSTOM:
            out = _eval_node(f, rep.expr, r)
        elif rep.amplitude == 0.0:
            out = np.zeros_like(r)
        else:
            out = rep.amplitude * _base(rep.kind, f.dim, rep.dilation * r)
    elif isinstance(rep, EigenExpansion):
        c = rep.array
        keep = np.nonzero(c)[0]
        if keep.size == 0:
            out = np.zeros_like(r)
        else:
            out = eigen_basis(f.dim, int(keep[-1]), r)[:, : keep[-1] + 1] @ c[: keep[-1] + 1]
    else:
        out = rep(r)
    out = out.reshape(np.shape(np.atleast_1d(xa)))
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# structural facts used by quadrature and sign certification


@dataclass(frozen=True)
class TailModel:
    """For r >= start, f(r) = sum coef * cos(omega r) / (r^2 - b^2) exactly
    (empty terms mean f vanishes there)."""

    start: float
    terms: tuple = ()

    def envelope(self, r):
        r = np.asarray(r, dtype=float)
        return sum(abs(c) / (r * r - b * b) for c, _, b in self.terms) if self.terms else np.zeros_like(r)


def support_radius(f: FunctionSpec) -> float:
    rep = f.rep
    if isinstance(rep, EigenExpansion):
        return 0.0 if not np.any(rep.array) else math.inf
    if isinstance(rep, SampledProfile):
        return rep.radii[-1] if rep.tail.kind == "zero" else math.inf
    if rep.kind is not Kind.CUSTOM:
        if rep.amplitude == 0.0:
            return 0.0
        return _BASE_SUPPORT.get(rep.kind, math.inf) / rep.dilation
    node = rep.expr
    if isinstance(node, Combination):
        return max(support_radius(g) for _, g in node.terms)
    if isinstance(node, Dilation):
        return support_radius(node.spec) / node.factor
    if isinstance(node, Product):
        return min(support_radius(node.left), support_radius(node.right))
    if isinstance(node, Convolution):
        return support_radius(node.left) + support_radius(node.right)
    if isinstance(node, DiracSym):
        return support_radius(node.spec) + node.x0
    return support_radius(node.spec)


def kinks(f: FunctionSpec) -> list[float]:
    """Radii where f may fail to be smooth (useful quadrature breakpoints)."""
    rep = f.rep
    if isinstance(rep, EigenExpansion):
        return []
    if isinstance(rep, SampledProfile):
        return [rep.radii[-1]] if rep.tail.kind == "zero" else []
    if rep.kind is not Kind.CUSTOM:
        s = _BASE_SUPPORT.get(rep.kind)
        return [s / rep.dilation] if s else []
    node = rep.expr
    out: set[float] = set()
    if isinstance(node, Combination):
        for _, g in node.terms:
            out.update(kinks(g))
    elif isinstance(node, Dilation):
        out.update(k / node.factor for k in kinks(node.spec))
    elif isinstance(node, Product):
        out.update(kinks(node.left) + kinks(node.right))
    elif isinstance(node, Convolution):
        a = [0.0] + kinks(node.left)
        b = [0.0] + kinks(node.right)
        out.update(abs(p + s * q) for p in a for q in b for s in (1, -1))
    elif isinstance(node, DiracSym):
        for k in [0.0] + kinks(node.spec):
            out.update((k, abs(k - node.x0), k + node.x0))
    else:
        out.update(kinks(node.spec))
    return sorted(v for v in out if v > 0)


def decay_radius(f: FunctionSpec, eps: float = 1e-17) -> float:
    """Radius beyond which |f| is below eps times its scale, for compactly
    supported or super-polynomially decaying f; inf for slow tails."""
    rep = f.rep
    if isinstance(rep, EigenExpansion):
        return _eigen_decay_radius(f.dim, rep.coeffs, eps)
    if isinstance(rep, SampledProfile):
        return support_radius(f)
    if rep.kind is not Kind.CUSTOM:
        if rep.kind is Kind.GAUSSIAN:
            return math.sqrt(math.log(1.0 / eps) / math.pi) / rep.dilation
        if rep.kind is Kind.BUMP_HAT:
            return (math.log(1.0 / eps) ** 2 / (4 * math.pi) + 4.0 * f.dim) / rep.dilation
        if rep.kind is Kind.BUMP_AUTOCORR_HAT:
            return (math.log(1.0 / eps) ** 2 / (16 * math.pi) + 4.0 * f.dim) / rep.dilation
        return support_radius(f)
    node = rep.expr
    if isinstance(node, Combination):
        return max(decay_radius(g, eps) for _, g in node.terms)
    if isinstance(node, Dilation):
        return decay_radius(node.spec, eps) / node.factor
    if isinstance(node, Product):
        return min(decay_radius(node.left, eps), decay_radius(node.right, eps))
    if isinstance(node, Convolution):
        return decay_radius(node.left, eps) + decay_radius(node.right, eps)
    if isinstance(node, DiracSym):
        return decay_radius(node.spec, eps) + node.x0
    return decay_radius(node.spec, eps)


@lru_cache(maxsize=256)
def _eigen_decay_radius(d: int, coeffs: tuple, eps: float) -> float:
    c = np.abs(np.array(coeffs))
    if not np.any(c):
        return 0.0
    k = int(np.nonzero(c)[0][-1])
    # past u = 4k + 4d + 40 the Gaussian dominates every basis polynomial
    r_mono = math.sqrt((4 * k + 4 * d + 40) / (2 * math.pi))
    r = np.linspace(0.0, r_mono + 6.0, 2000)
    env = np.abs(eigen_basis(d, k, r)) @ c[: k + 1]
    peak = float(np.max(env))
    above = np.nonzero(env > eps * peak)[0]
    return float(r[min(above[-1] + 1, r.size - 1)]) if above.size else 0.0


def tail_model(f: FunctionSpec) -> TailModel | None:
    """Exact rational-trigonometric description of f past some radius."""
    rep = f.rep
    sup = support_radius(f)
    if math.isfinite(sup):
        return TailModel(sup)
    if isinstance(rep, ClosedForm) and rep.kind is not Kind.CUSTOM:
        a, lam = rep.amplitude, rep.dilation
        if rep.kind is Kind.SINC_SQ:
            c = a / (2 * math.pi ** 2 * lam ** 2)
            return TailModel(1.0 / lam, ((c, 0.0, 0.0), (-c, 2 * math.pi * lam, 0.0)))
        if rep.kind is Kind.BANDLIMITED:
            c = a / (2 * lam ** 2)
            return TailModel(2.0 / lam, ((c, 0.0, 1.0 / lam), (c, math.pi * lam, 1.0 / lam)))
        if rep.kind is Kind.BALL_AUTOCORR_HAT and f.dim == 1:
            c = a / (2 * math.pi ** 2 * lam ** 2)
            return TailModel(1.0 / lam, ((c, 0.0, 0.0), (-c, 4 * math.pi * lam, 0.0)))
        return None
    node = _node(f)
    if isinstance(node, Combination):
        start, terms = 0.0, []
        for c, g in node.terms:
            m = tail_model(g)
            if m is None:
                dr = decay_radius(g)
                if not math.isfinite(dr):
                    return None
                m = TailModel(dr)
            start = max(start, m.start)
            terms.extend((c * t[0], t[1], t[2]) for t in m.terms)
        return TailModel(start, tuple(terms))
    if isinstance(node, Dilation):
        m = tail_model(node.spec)
        if m is None:
            return None
        lam = node.factor
        return TailModel(m.start / lam, tuple((c / lam ** 2, w * lam, b / lam) for c, w, b in m.terms))
    return None


# ---------------------------------------------------------------------------
# integrals


def l1_norm(f: FunctionSpec):
    """||f||_1 = omega_{d-1} int_0^inf r^(d-1) |f(r)| dr, as a QuadratureResult."""
    from .transforms import integrate

    res = integrate(f, weight="r^(d-1)", interval=(0.0, math.inf), absolute=True)
    cst = sphere_area(f.dim)
    return type(res)(cst * res.value, cst * res.error_estimate, res.evaluations)


# ---------------------------------------------------------------------------
# JSON


def spec_to_dict(f: FunctionSpec) -> dict:
    out: dict[str, Any] = {"dim": f.dim}
    rep = f.rep
    if isinstance(rep, ClosedForm):
        cf: dict[str, Any] = {"kind": rep.kind.value}
        if rep.kind is Kind.CUSTOM:
            cf["expr"] = _node_to_dict(rep.expr)
        else:
            if rep.amplitude != 1.0:
                cf["amplitude"] = rep.amplitude
            if rep.dilation != 1.0:
                cf["dilation"] = rep.dilation
        out["closed_form"] = cf
    elif isinstance(rep, EigenExpansion):
        out["eigen"] = {"sign": "+" if rep.sign > 0 else "-", "coeffs": list(rep.coeffs)}
    else:
        smp: dict[str, Any] = {"radii": list(rep.radii), "values": list(rep.values)}
        if rep.interpolation != "cubic":
            smp["interpolation"] = rep.interpolation
        tail: dict[str, Any] = {"kind": rep.tail.kind}
        if rep.tail.kind == "decay":
            tail.update(c=rep.tail.c, p=rep.tail.p)
        smp["tail"] = tail
        out["sampled"] = smp
    if f.metadata is not None:
        out["metadata"] = f.metadata
    return out


def _node_to_dict(node) -> dict:
    if isinstance(node, Combination):
        return {"op": "combination", "terms": [{"coef": c, "spec": spec_to_dict(g)} for c, g in node.terms]}
    if isinstance(node, Dilation):
        return {"op": "dilation", "factor": node.factor, "spec": spec_to_dict(node.spec)}
    if isinstance(node, (Product, Convolution)):
        op = "product" if isinstance(node, Product) else "convolution"
        return {"op": op, "left": spec_to_dict(node.left), "right": spec_to_dict(node.right)}
    op = "dirac_sym" if isinstance(node, DiracSym) else "dirac_weight"
    return {"op": op, "x0": node.x0, "spec": spec_to_dict(node.spec)}


def _expect(obj, typ, path):
    if not isinstance(obj, typ) or isinstance(obj, bool) and typ is not bool:
        name = typ.__name__ if isinstance(typ, type) else "/".join(t.__name__ for t in typ)
        raise SpecError(path, f"expected {name}, got {type(obj).__name__}")
    return obj


def _real(obj, path) -> float:
    _expect(obj, (int, float), path)
    v = float(obj)
    if math.isnan(v):
        raise SpecError(path, "NaN value")
    return v


def _keys(obj: dict, allowed: set, path: str):
    extra = set(obj) - allowed
    if extra:
        raise SpecError(path, f"unexpected keys {sorted(extra)}")


def spec_from_dict(obj, path: str = "$") -> FunctionSpec:
    _expect(obj, dict, path)
    _keys(obj, {"dim", "closed_form", "eigen", "sampled", "metadata"}, path)
    if "dim" not in obj:
        raise SpecError(path, "missing key 'dim'")
    dim = _expect(obj["dim"], int, path + ".dim")
    if dim < 1:
        raise SpecError(path + ".dim", "dimension must be >= 1")
    reps = [k for k in ("closed_form", "eigen", "sampled") if k in obj]
    if len(reps) != 1:
        raise SpecError(path, "exactly one of 'closed_form', 'eigen', 'sampled' is required")
    meta = obj.get("metadata")
    if meta is not None:
        _expect(meta, str, path + ".metadata")
    key = reps[0]
    p = f"{path}.{key}"
    body = _expect(obj[key], dict, p)
    try:
        if key == "closed_form":
            _keys(body, {"kind", "amplitude", "dilation", "expr"}, p)
            kind_name = _expect(body.get("kind"), str, p + ".kind")
            try:
                kind = Kind(kind_name)
            except ValueError:
                raise SpecError(p + ".kind", f"unknown kind {kind_name!r}; known: {[k.value for k in Kind]}") from None
            if kind is Kind.CUSTOM:
                if "expr" not in body:
                    raise SpecError(p, "custom kind needs 'expr'")
                node = _node_from_dict(body["expr"], p + ".expr", dim)
                return custom(dim, node, meta)
            if "expr" in body:
                raise SpecError(p + ".expr", "only custom kinds carry an expression")
            amp = _real(body.get("amplitude", 1.0), p + ".amplitude")
            dil = _real(body.get("dilation", 1.0), p + ".dilation")
            if dil <= 0:
                raise SpecError(p + ".dilation", "must be positive")
            return FunctionSpec(dim, ClosedForm(kind, amp, dil), meta)
        if key == "eigen":
            _keys(body, {"sign", "coeffs"}, p)
            sign = body.get("sign")
            if sign not in ("+", "-"):
                raise SpecError(p + ".sign", "sign must be '+' or '-'")
            coeffs = _expect(body.get("coeffs"), list, p + ".coeffs")
            vals = [_real(v, f"{p}.coeffs[{i}]") for i, v in enumerate(coeffs)]
            return FunctionSpec(dim, EigenExpansion(1 if sign == "+" else -1, tuple(vals)), meta)
        _keys(body, {"radii", "values", "interpolation", "tail"}, p)
        radii = [_real(v, f"{p}.radii[{i}]") for i, v in enumerate(_expect(body.get("radii"), list, p + ".radii"))]
        values = [_real(v, f"{p}.values[{i}]") for i, v in enumerate(_expect(body.get("values"), list, p + ".values"))]
        interp = body.get("interpolation", "cubic")
        tail_obj = _expect(body.get("tail"), dict, p + ".tail")
        _keys(tail_obj, {"kind", "c", "p"}, p + ".tail")
        tk = tail_obj.get("kind")
        if tk == "zero":
            tail = Tail()
        elif tk == "decay":
            tail = Tail("decay", _real(tail_obj.get("c"), p + ".tail.c"), _real(tail_obj.get("p"), p + ".tail.p"))
        else:
            raise SpecError(p + ".tail.kind", "must be 'zero' or 'decay'")
        return FunctionSpec(dim, SampledProfile(tuple(radii), tuple(values), interp, tail), meta)
    except SpecError as exc:
        if exc.path.startswith("$.") and path != "$" and not exc.path.startswith(path):
            raise SpecError(path + exc.path[1:], str(exc).split(": ", 1)[1]) from None
        raise


def _node_from_dict(obj, path, dim):
    _expect(obj, dict, path)
    op = obj.get("op")
    if op == "combination":
        _keys(obj, {"op", "terms"}, path)
        terms = []
        for i, t in enumerate(_expect(obj.get("terms"), list, path + ".terms")):
            tp = f"{path}.terms[{i}]"
            _expect(t, dict, tp)
            _keys(t, {"coef", "spec"}, tp)
            terms.append((_real(t.get("coef"), tp + ".coef"), _child(t.get("spec"), tp + ".spec", dim)))
        if not terms:
            raise SpecError(path + ".terms", "empty combination")
        return Combination(tuple(terms))
    if op == "dilation":
        _keys(obj, {"op", "factor", "spec"}, path)
        fac = _real(obj.get("factor"), path + ".factor")
        if fac <= 0:
            raise SpecError(path + ".factor", "must be positive")
        return Dilation(_child(obj.get("spec"), path + ".spec", dim), fac)
    if op in ("product", "convolution"):
        _keys(obj, {"op", "left", "right"}, path)
        cls = Product if op == "product" else Convolution
        return cls(_child(obj.get("left"), path + ".left", dim), _child(obj.get("right"), path + ".right", dim))
    if op in ("dirac_sym", "dirac_weight"):
        _keys(obj, {"op", "x0", "spec"}, path)
        x0 = _real(obj.get("x0"), path + ".x0")
        cls = DiracSym if op == "dirac_sym" else DiracWeight
        return cls(_child(obj.get("spec"), path + ".spec", dim), x0)
    raise SpecError(path + ".op", f"unknown op {op!r}")


def _child(obj, path, dim):
    g = spec_from_dict(obj, path)
    if g.dim != dim:
        raise SpecError(path + ".dim", f"dimension {g.dim} differs from parent {dim}")
    return g


def parse_spec(text: str | dict) -> FunctionSpec:
    """JSON document (text or already-decoded dict) -> FunctionSpec."""
    if isinstance(text, (str, bytes)):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError("$", f"invalid JSON: {exc}") from None
    else:
        obj = text
    return spec_from_dict(obj)


def serialize_spec(f: FunctionSpec, indent: int | None = 2) -> str:
    return json.dumps(spec_to_dict(f), indent=indent)
