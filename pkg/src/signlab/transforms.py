"""Fourier transforms of radial functions under the convention
fhat(xi) = int f(x) exp(-2 pi i <x, xi>) dx.

For a radial f on R^d,
    fhat(rho) = omega_{d-1} int_0^inf f(r) r^(d-1) K_d(2 pi rho r) dr,
with K_d(z) = Gamma(d/2) (2/z)^(d/2-1) J_{d/2-1}(z), which is cos(z) for d = 1.

``fourier_transform`` is structural (catalog pairs, eigen parities, expression
rules); ``numeric_fourier`` and ``hankel_radial_ft`` integrate.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import sici

from .funcrep import (
    ClosedForm,
    Combination,
    Convolution,
    DiracSym,
    DiracWeight,
    Dilation,
    EigenExpansion,
    FunctionSpec,
    Kind,
    ONE_DIM_KINDS,
    Product,
    SampledProfile,
    Tail,
    TailModel,
    combine,
    custom,
    decay_radius,
    dilate,
    evaluate,
    kinks,
    scale,
    support_radius,
    tail_model,
)
from .quadrature import QuadratureError, QuadratureResult, gauss_kronrod, gauss_legendre, integrate_piecewise
from .special import radial_kernel, sphere_area

__all__ = [
    "fourier_transform",
    "numeric_fourier",
    "hankel_radial_ft",
    "hankel_values",
    "convolution_values",
    "convolve_radial",
    "integrate",
    "tail_cosine_integral",
    "TransformError",
    "QuadratureError",
    "QuadratureResult",
]

_PAIRS = {
    Kind.TENT: Kind.SINC_SQ,
    Kind.SINC_SQ: Kind.TENT,
    Kind.BANDLIMITED: Kind.BANDLIMITED_HAT,
    Kind.BANDLIMITED_HAT: Kind.BANDLIMITED,
    Kind.GAUSSIAN: Kind.GAUSSIAN,
    Kind.CHI: Kind.CHI_HAT,
    Kind.CHI_HAT: Kind.CHI,
    Kind.BALL_AUTOCORR: Kind.BALL_AUTOCORR_HAT,
    Kind.BALL_AUTOCORR_HAT: Kind.BALL_AUTOCORR,
    Kind.BUMP: Kind.BUMP_HAT,
    Kind.BUMP_HAT: Kind.BUMP,
    Kind.BUMP_AUTOCORR: Kind.BUMP_AUTOCORR_HAT,
    Kind.BUMP_AUTOCORR_HAT: Kind.BUMP_AUTOCORR,
}


class TransformError(ValueError):
    pass


# ---------------------------------------------------------------------------
# structural transform


def fourier_transform(f: FunctionSpec) -> FunctionSpec:
    """Fourier transform of f as a new FunctionSpec (exact whenever the
    representation allows; sampled profiles go through the Hankel integral)."""
    d = f.dim
    rep = f.rep
    if isinstance(rep, EigenExpansion):
        return FunctionSpec(d, EigenExpansion(rep.sign, tuple(rep.sign * c for c in rep.coeffs)))
    if isinstance(rep, SampledProfile):
        return hankel_radial_ft(f, d)
    if rep.kind is not Kind.CUSTOM:
        if rep.kind in ONE_DIM_KINDS and d != 1:
            if math.isfinite(decay_radius(f)):
                return hankel_radial_ft(f, d)
            raise TransformError(f"no closed-form transform of {rep.kind.value} in d={d} and the tail is too slow for the numeric fallback")
        lam = rep.dilation
        return FunctionSpec(d, ClosedForm(_PAIRS[rep.kind], rep.amplitude * lam ** (-d), 1.0 / lam))
    node = rep.expr
    if isinstance(node, Combination):
        return combine([(c, fourier_transform(g)) for c, g in node.terms])
    if isinstance(node, Dilation):
        return scale(dilate(fourier_transform(node.spec), 1.0 / node.factor), node.factor ** (-d))
    if isinstance(node, Product):
        return custom(d, Convolution(fourier_transform(node.left), fourier_transform(node.right)))
    if isinstance(node, Convolution):
        return custom(d, Product(fourier_transform(node.left), fourier_transform(node.right)))
    if isinstance(node, DiracSym):
        return custom(d, DiracWeight(fourier_transform(node.spec), node.x0))
    if isinstance(node, DiracWeight):
        return custom(d, DiracSym(fourier_transform(node.spec), node.x0))
    raise TransformError(f"unsupported node {type(node).__name__}")


# ---------------------------------------------------------------------------
# analytic tails


def tail_cosine_integral(omega, b: float, R: float) -> np.ndarray:
    """int_R^inf cos(omega x) / (x^2 - b^2) dx for omega >= 0 and R > b >= 0."""
    om = np.abs(np.atleast_1d(np.asarray(omega, dtype=float)))
    if not R > b:
        raise ValueError("tail start must exceed the pole")
    out = np.empty_like(om)
    if b == 0.0:
        zero = om == 0.0
        out[zero] = 1.0 / R
        w = om[~zero]
        si, _ = sici(w * R)
        out[~zero] = np.cos(w * R) / R - w * (0.5 * math.pi - si)
        return out
    tiny = om < 1e-9
    out[tiny] = math.log((R + b) / (R - b)) / (2.0 * b)
    w = om[~tiny]
    si_m, ci_m = sici(w * (R - b))
    si_p, ci_p = sici(w * (R + b))
    cb, sb = np.cos(w * b), np.sin(w * b)
    i_minus = -cb * ci_m - sb * (0.5 * math.pi - si_m)
    i_plus = -cb * ci_p + sb * (0.5 * math.pi - si_p)
    out[~tiny] = (i_minus - i_plus) / (2.0 * b)
    return out


def _model_sign(model: TailModel) -> int:
    """+1 / -1 if the tail model has a fixed sign past its start, else 0."""
    if not model.terms:
        return 1
    bs = {b for _, _, b in model.terms}
    if len(bs) != 1:
        return 0
    steady = sum(c for c, w, _ in model.terms if w == 0.0)
    wobble = sum(abs(c) for c, w, _ in model.terms if w != 0.0)
    if steady >= wobble:
        return 1
    if -steady >= wobble:
        return -1
    return 0


# ---------------------------------------------------------------------------
# radial integrals

_WEIGHTS = {"1": lambda d: 0, "r^(d-1)": lambda d: d - 1, "r^(d+1)": lambda d: d + 1}


def integrate(
    f,
    weight: str = "r^(d-1)",
    interval=(0.0, math.inf),
    *,
    absolute: bool = False,
    positive_part: bool = False,
    breakpoints=(),
    abs_tol: float = 1e-13,
    rel_tol: float = 1e-12,
    max_intervals: int = 6000,
) -> QuadratureResult:
    """int_a^b w(r) g(r) dr with g = f, |f| or f_+ and w in {1, r^(d-1), r^(d+1)}.

    ``f`` is a FunctionSpec or a plain callable (then treated with d = 1 and a
    finite interval).  Infinite intervals are truncated at the support, at the
    decay radius, or closed with the analytic rational-trigonometric tail.
    The surface constant omega_{d-1} is not applied.
    """
    a, b = float(interval[0]), float(interval[1])
    if isinstance(f, FunctionSpec):
        d = f.dim
        ev = lambda r: evaluate(f, r)  # noqa: E731
        bps = list(kinks(f)) + list(breakpoints)
    else:
        d, ev, bps = 1, f, list(breakpoints)
    if weight not in _WEIGHTS:
        raise ValueError(f"weight must be one of {sorted(_WEIGHTS)}")
    pw = _WEIGHTS[weight](d)

    def g(r):
        v = np.asarray(ev(r), dtype=float)
        if absolute:
            v = np.abs(v)
        elif positive_part:
            v = np.maximum(v, 0.0)
        return v * r ** pw if pw else v

    tail_value, tail_err = 0.0, 0.0
    if math.isinf(b):
        if not isinstance(f, FunctionSpec):
            raise ValueError("infinite interval needs a FunctionSpec with a tail description")
        sup = support_radius(f)
        dr = decay_radius(f)
        model = tail_model(f) if not math.isfinite(dr) else None
        rep = f.rep
        if math.isfinite(sup) or math.isfinite(dr):
            b = min(sup, dr)
        elif model is not None:
            b = max(model.start, a)
            if pw != 0:
                raise TransformError("not integrable: weighted integral of an r^-2 tail diverges")
            sgn = _model_sign(model)
            if absolute or positive_part:
                if sgn == 0:
                    raise TransformError("tail sign not certified for |f| integral")
                factor = 1.0 if sgn > 0 else (-1.0 if absolute else 0.0)
            else:
                factor = 1.0
            tail_value = factor * sum(c * tail_cosine_integral(w, bb, b)[0] for c, w, bb in model.terms)
            tail_err = 1e-15 * sum(abs(c) for c, _, _ in model.terms) / b
        elif isinstance(rep, SampledProfile) and rep.tail.kind == "decay":
            p = rep.tail.p
            R = rep.radii[-1]
            if p <= pw + 1:
                raise TransformError("not integrable: declared decay too slow")
            fr = rep.values[-1]
            base = fr * R ** (pw + 1) / (p - pw - 1)
            if absolute:
                base = abs(base)
            elif positive_part:
                base = max(base, 0.0)
            tail_value = base
            b = R
        else:
            raise TransformError("not integrable: no certified tail for this representation")
        b = max(b, a)
    if b <= a:
        return QuadratureResult(tail_value, tail_err, 0)
    res = gauss_kronrod(g, a, b, abs_tol=abs_tol, rel_tol=rel_tol, breakpoints=bps, max_intervals=max_intervals)
    return QuadratureResult(res.value + tail_value, res.error_estimate + tail_err, res.evaluations)


# ---------------------------------------------------------------------------
# numeric transforms


def numeric_fourier(f: FunctionSpec, xi, *, abs_tol: float = 1e-12, max_intervals: int = 20000) -> QuadratureResult:
    """Fourier transform of f at the radii ``xi`` by quadrature of the radial
    integral; independent of the structural catalog."""
    d = f.dim
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    cst = sphere_area(d)
    sup = support_radius(f)
    dr = decay_radius(f)
    model = None
    if math.isfinite(sup) or math.isfinite(dr):
        R = min(sup, dr)
    else:
        model = tail_model(f)
        if model is None or d != 1:
            rep = f.rep
            if isinstance(rep, SampledProfile):
                return hankel_values(f, d, xi)
            raise TransformError("numeric transform needs a compact, fast-decaying or modelled tail")
        R = max(model.start, 4.0)

    def integrand(r):
        v = evaluate(f, r) * r ** (d - 1)
        return cst * v[:, None] * radial_kernel(d, 2.0 * math.pi * np.outer(r, xi))

    bps = [k for k in kinks(f) if k < R]
    segs = len(bps) + 1
    initial = int(max(1, min(400, math.ceil(2.0 * float(np.max(xi, initial=0.0)) * R / segs) + 1)))
    res = gauss_kronrod(integrand, 0.0, R, abs_tol=abs_tol, rel_tol=0.0, breakpoints=bps,
                        initial=initial, max_intervals=max_intervals)
    value = np.atleast_1d(res.value).astype(float)
    err = res.error_estimate
    if model is not None:
        w2 = 2.0 * math.pi * xi
        for c, w, b in model.terms:
            value = value + c * (tail_cosine_integral(np.abs(w - w2), b, R) + tail_cosine_integral(w + w2, b, R))
    return QuadratureResult(value, err, res.evaluations)


def hankel_values(f: FunctionSpec, d: int, rho, order: int = 24) -> QuadratureResult:
    """Radial transform of a sampled profile at ``rho`` by Gauss-Legendre on
    every knot interval (subdivided to resolve the oscillation)."""
    rep = f.rep
    if not isinstance(rep, SampledProfile):
        raise TransformError("hankel_values expects a sampled profile")
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    r = np.array(rep.radii)
    R = r[-1]
    tail_err = 0.0
    if rep.tail.kind == "decay":
        p = rep.tail.p
        if p <= d:
            raise TransformError("divergent tail: decay exponent must exceed the dimension")
        tail_err = sphere_area(d) * abs(rep.values[-1]) * R ** d / (p - d)
    rmax = float(np.max(rho, initial=0.0))
    edges = [r[:1]]
    for lo, hi in zip(r[:-1], r[1:]):
        n = int(math.ceil(2.0 * rmax * (hi - lo))) + 1
        edges.append(np.linspace(lo, hi, n + 1)[1:])
    edges = np.concatenate(edges)
    cst = sphere_area(d)

    def integrand(x):
        return cst * (rep(x) * x ** (d - 1))[:, None] * radial_kernel(d, 2.0 * math.pi * np.outer(x, rho))

    val, err = integrate_piecewise(integrand, edges, order=order)
    return QuadratureResult(np.asarray(val), err + tail_err, 0)


def hankel_radial_ft(f: FunctionSpec, d: int | None = None, rho=None) -> FunctionSpec:
    """Radial Fourier transform of a sampled profile onto the grid ``rho``
    (default: 513 points on [0, 1/(2 h_min)] capped at 16)."""
    d = f.dim if d is None else d
    rep = f.rep
    if not isinstance(rep, SampledProfile):
        sup = min(support_radius(f), decay_radius(f))
        if not math.isfinite(sup):
            raise TransformError("divergent tail: cannot sample this function for a Hankel transform")
        grid = np.linspace(0.0, sup, 4097)
        f = FunctionSpec(d, SampledProfile(tuple(grid), tuple(evaluate(f, grid))))
        rep = f.rep
    if rho is None:
        h = float(np.min(np.diff(rep.radii)))
        rho = np.linspace(0.0, min(0.5 / h, 16.0), 513)
    res = hankel_values(f, d, rho)
    meta = f"hankel transform; error estimate {res.error_estimate:.3e}"
    return FunctionSpec(d, SampledProfile(tuple(rho), tuple(res.value)), meta)


# ---------------------------------------------------------------------------
# convolution


def _direct_convolution(F: FunctionSpec, G: FunctionSpec, x: np.ndarray, abs_tol: float) -> tuple[np.ndarray, float]:
    # G compactly supported on [0, S]; integrate over its support
    d = F.dim
    S = support_radius(G)
    out = np.empty_like(x)
    worst = 0.0
    kf = [0.0] + kinks(F)
    kg = kinks(G)
    if d >= 2:
        t, w = gauss_legendre(96)
        th = 0.5 * math.pi * (t + 1.0)
        wth = 0.5 * math.pi * w * np.sin(th) ** (d - 2)
        cst = sphere_area(d - 1)
    for i, xv in enumerate(x):
        bps = set(kg)
        for k in kf:
            bps.update((abs(xv - k), xv + k))
        bps = [p for p in bps if 0.0 < p < S]
        if d == 1:
            def integrand(rho, xv=xv):
                return evaluate(G, rho) * (evaluate(F, np.abs(xv - rho)) + evaluate(F, xv + rho))
        else:
            def integrand(rho, xv=xv):
                dist = np.sqrt(np.maximum(xv * xv + rho[:, None] ** 2 - 2.0 * xv * rho[:, None] * np.cos(th), 0.0))
                inner = evaluate(F, dist.ravel()).reshape(dist.shape) @ wth
                return cst * rho ** (d - 1) * evaluate(G, rho) * inner
        res = gauss_kronrod(integrand, 0.0, S, abs_tol=abs_tol, rel_tol=1e-12, breakpoints=bps, max_intervals=2000)
        out[i] = res.value
        worst = max(worst, res.error_estimate)
    return out, worst


def _transform_convolution(F: FunctionSpec, G: FunctionSpec, x: np.ndarray, abs_tol: float) -> tuple[np.ndarray, float]:
    Fh, Gh = fourier_transform(F), fourier_transform(G)
    prod = custom(F.dim, Product(Fh, Gh))
    res = numeric_fourier(prod, x, abs_tol=abs_tol)
    return np.atleast_1d(res.value), res.error_estimate


def _route(F: FunctionSpec, G: FunctionSpec) -> str:
    if math.isfinite(support_radius(G)) or math.isfinite(support_radius(F)):
        return "direct"
    return "transform"


def convolution_values(F: FunctionSpec, G: FunctionSpec, x, route: str = "auto", abs_tol: float = 1e-13, with_error: bool = False):
    """(F * G)(|x|) for radial F, G.

    ``direct`` integrates over the support of the compact factor; ``transform``
    inverts the product of the transforms, which must be compactly supported or
    fast decaying.  ``auto`` picks direct when a factor is compact.
    """
    if F.dim != G.dim:
        raise ValueError(f"dimension mismatch: {F.dim} vs {G.dim}")
    x = np.abs(np.atleast_1d(np.asarray(x, dtype=float)))
    if route == "auto":
        route = _route(F, G)
    if route == "direct":
        if not math.isfinite(support_radius(G)):
            F, G = G, F
        if not math.isfinite(support_radius(G)):
            raise TransformError("direct convolution needs a compactly supported factor")
        vals, err = _direct_convolution(F, G, x, abs_tol)
    elif route == "transform":
        vals, err = _transform_convolution(F, G, x, abs_tol)
    else:
        raise ValueError(f"unknown route {route!r}")
    return (vals, err) if with_error else vals


def convolve_radial(f: FunctionSpec, g: FunctionSpec, x=None, route: str = "auto") -> FunctionSpec:
    """Sampled profile of f * g on the grid ``x`` (default 257 points up to the
    combined support or decay radius, capped at 8)."""
    if f.dim != g.dim:
        raise ValueError(f"dimension mismatch: {f.dim} vs {g.dim}")
    if x is None:
        R = min(support_radius(f) + support_radius(g), decay_radius(f) + decay_radius(g), 8.0)
        x = np.linspace(0.0, R, 257)
    x = np.asarray(x, dtype=float)
    vals, err = convolution_values(f, g, x, route=route, with_error=True)
    # beyond the grid the profile is truncated to zero
    return FunctionSpec(f.dim, SampledProfile(tuple(x), tuple(vals), "cubic", Tail()),
                        f"convolution ({route}); error estimate {err:.3e}")
