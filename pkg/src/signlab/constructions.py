"""Constructive transformations on radial functions: three-atom Dirac
symmetrisation, Gaussian correction, the self-dual eta function with power
decay, bandlimiting mollification, Schwartz smoothing and eigenfunction
symmetrisation, plus a small pipeline runner that chains them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .funcrep import (
    Convolution,
    DiracSym,
    FunctionSpec,
    Kind,
    Product,
    bump0,
    bump_l2_norm_sq,
    closed,
    combine,
    custom,
    dilate,
    evaluate,
    parse_spec,
    scale,
    spec_to_dict,
    support_radius,
)
from .quadrature import gauss_legendre
from .signtools import TailCertificate, last_sign_change
from .special import radial_kernel, sphere_area
from .transforms import fourier_transform

__all__ = [
    "ConstructionError",
    "MollifyError",
    "DiracComb",
    "EtaResult",
    "dirac_symmetrize",
    "gaussian_correct",
    "build_eta",
    "mollifier",
    "mollify_bandlimit",
    "approximate_identity",
    "schwartz_smooth",
    "eigen_symmetrize",
    "add_eta",
    "scan_radius",
    "PipelineStep",
    "run_pipeline",
    "OPS",
]


class ConstructionError(ValueError):
    pass


class MollifyError(ConstructionError):
    def __init__(self, msg: str, admissible_delta: float | None):
        super().__init__(msg)
        self.admissible_delta = admissible_delta


# ---------------------------------------------------------------------------
# Dirac combs


@dataclass(frozen=True)
class DiracComb:
    """Finite sum of weighted point masses, symmetric under x -> -x."""

    atoms: tuple  # of (location tuple, weight)

    def __post_init__(self):
        atoms = tuple((tuple(float(v) for v in np.atleast_1d(loc)), float(w)) for loc, w in self.atoms)
        if not atoms:
            raise ValueError("empty comb")
        dims = {len(loc) for loc, _ in atoms}
        if len(dims) != 1:
            raise ValueError("atoms live in different dimensions")
        table: dict = {}
        for loc, w in atoms:
            table[loc] = table.get(loc, 0.0) + w
        for loc, w in table.items():
            neg = tuple(-v + 0.0 for v in loc)
            if abs(table.get(neg, 0.0) - w) > 1e-15 * max(1.0, abs(w)):
                raise ValueError(f"comb is not symmetric: atom at {loc} has no mirror of equal weight")
        object.__setattr__(self, "atoms", atoms)

    @property
    def dim(self) -> int:
        return len(self.atoms[0][0])

    @classmethod
    def canonical(cls, x0: float, dim: int = 1) -> "DiracComb":
        """delta_{x0 e1} + delta_{-x0 e1} + 2 delta_0."""
        e = np.zeros(dim)
        e[0] = x0
        return cls(((tuple(e), 1.0), (tuple(-e + 0.0), 1.0), (tuple(np.zeros(dim)), 2.0)))

    def transform(self, xi) -> np.ndarray:
        """sum_j w_j cos(2 pi <x_j, xi>) at points xi of shape (..., dim)."""
        xi = np.asarray(xi, dtype=float)
        if self.dim == 1 and (xi.ndim == 0 or xi.shape[-1] != 1):
            xi = xi[..., None]
        out = np.zeros(xi.shape[:-1])
        for loc, w in self.atoms:
            out += w * np.cos(2.0 * math.pi * (xi @ np.array(loc)))
        return out

    def radial_transform(self, rho) -> np.ndarray:
        """Sphere average of ``transform`` over |xi| = rho."""
        rho = np.asarray(rho, dtype=float)
        out = np.zeros_like(rho)
        for loc, w in self.atoms:
            out += w * radial_kernel(self.dim, 2.0 * math.pi * np.linalg.norm(loc) * rho)
        return out

    def apply(self, f: FunctionSpec) -> FunctionSpec:
        """f convolved with the comb; only the canonical three-atom shape is
        representable radially."""
        locs = sorted(self.atoms, key=lambda a: a[1])
        norms = [np.linalg.norm(loc) for loc, _ in locs]
        if len(locs) != 3 or norms[2] != 0.0 or locs[2][1] != 2.0 or locs[0][1] != 1.0 or norms[0] != norms[1]:
            raise ConstructionError("only delta_x0 + delta_-x0 + 2 delta_0 has a radial representation")
        return dirac_symmetrize(f, float(norms[0]))


# ---------------------------------------------------------------------------
# elementary constructions


def dirac_symmetrize(f: FunctionSpec, x0: float) -> FunctionSpec:
    """g = f(. - x0) + f(. + x0) + 2 f, sphere averaged for d >= 2.

    g(0) = 2 f(x0) + 2 f(0), ghat = (2 + 2 cos(2 pi x0 xi)) fhat, and
    r(g) <= r(f) + x0.
    """
    if not x0 > 0:
        raise ValueError("x0 must be positive")
    return custom(f.dim, DiracSym(f, float(x0)), f"dirac_symmetrize(x0={x0:g})")


def gaussian_correct(g: FunctionSpec) -> FunctionSpec:
    """h = g + ghat - (g(0) + ghat(0))/2 exp(-pi |x|^2), a +1 eigenfunction
    with h(0) = (g(0) + ghat(0))/2."""
    gh = fourier_transform(g)
    total = float(evaluate(g, 0.0)) + float(evaluate(gh, 0.0))
    if not total < 0:
        raise ConstructionError(f"correction not applicable: g(0) + ghat(0) = {total:.6g} >= 0")
    return combine([(1.0, g), (1.0, gh), (-0.5 * total, closed(Kind.GAUSSIAN, g.dim))]).with_metadata(
        "gaussian_correct")


def eigen_symmetrize(f: FunctionSpec, s: int) -> FunctionSpec:
    """f + s fhat, whose transform is s times itself."""
    if s not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return combine([(1.0, f), (float(s), fourier_transform(f))])


# ---------------------------------------------------------------------------
# the eta function


@dataclass
class EtaResult:
    eta: FunctionSpec
    A: float
    r0: float
    psi0: float
    grid: np.ndarray
    weighted: np.ndarray  # |x|^(d+1) eta(x) on the grid
    rigorous: bool = False
    notes: str = ""


def build_eta(d: int, grid: np.ndarray | None = None, x_max: float = 1e3, n: int = 160,
              safety: float = 0.9) -> EtaResult:
    """eta = (psi - 2 psi(0) G) / A with psi = phi + phihat, phi = chi * chihat,
    chi the autocorrelation of the unit-ball indicator and G the Gaussian.

    A is ``safety`` times the smallest value of |x|^(d+1)(psi - 2 psi(0) G)
    on a log grid past the support of phihat (radius 2), and r0 is the
    smallest grid point beyond which |x|^(d+1) eta >= 1 on the grid.  The
    behaviour past ``x_max`` rests on the asymptotics of phi and is not
    verified, hence ``rigorous=False``.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    chi = closed(Kind.BALL_AUTOCORR, d)
    chih = closed(Kind.BALL_AUTOCORR_HAT, d)
    phi = custom(d, Convolution(chi, chih))
    psi = combine([(1.0, phi), (1.0, fourier_transform(phi))])
    psi0 = float(evaluate(psi, 0.0))
    if not psi0 > 0:
        raise ConstructionError(f"psi(0) = {psi0:.3e} is not positive")
    if grid is None:
        grid = np.geomspace(0.05, x_max, n)
    grid = np.asarray(grid, dtype=float)
    gauss = np.exp(-math.pi * grid ** 2)
    raw = grid ** (d + 1) * (evaluate(psi, grid) - 2.0 * psi0 * gauss)
    far = grid >= 2.0
    if not np.any(far):
        raise ValueError("grid must reach past radius 2")
    low = float(np.min(raw[far]))
    if not low > 0:
        raise ConstructionError(f"|x|^(d+1) psi is not positive past radius 2 (min {low:.3e})")
    A = safety * low
    eta = combine([(1.0 / A, psi), (-2.0 * psi0 / A, closed(Kind.GAUSSIAN, d))]).with_metadata(
        f"eta d={d} A={A:.6g} (non-rigorous constant)")
    weighted = raw / A
    bad = np.nonzero(weighted < 1.0)[0]
    r0 = float(grid[0]) if bad.size == 0 else float(grid[bad[-1] + 1])
    return EtaResult(eta, A, r0, psi0, grid, weighted, False,
                     f"verified on [{r0:.4g}, {grid[-1]:.4g}] only; decay beyond is asymptotic")


# ---------------------------------------------------------------------------
# mollifiers


def _bump_l1(d: int) -> float:
    x, w = gauss_legendre(200)
    r = 0.5 * (x + 1.0)
    return float(sphere_area(d) * np.sum(0.5 * w * r ** (d - 1) * bump0(r)))


def mollifier(d: int, delta: float) -> FunctionSpec:
    """phi_delta(x) = phi(delta x) with phi = psi * psi and psi the bump
    exp(-1/(1-|x|^2)) normalised in L^2, so phi(0) = 1 and the support
    radius is 2/delta."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    return closed(Kind.BUMP_AUTOCORR, d, 1.0 / bump_l2_norm_sq(d), delta)


def approximate_identity(d: int, delta: float) -> FunctionSpec:
    """psi_delta * psi_delta with psi_delta the L^1-normalised bump supported
    in the ball of radius delta; unit mass, support radius 2 delta."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    m1 = _bump_l1(d)
    return closed(Kind.BUMP_AUTOCORR, d, delta ** (-d) / m1 ** 2, 1.0 / delta)


def scan_radius(f: FunctionSpec, R: float, grid: int = 4096, tol: float = 1e-9) -> float:
    """Last sign change of f seen on [0, R]; heuristic when f has no tail
    certificate, since nothing past R is examined."""
    cert = TailCertificate(float(R), "heuristic-scan", {"scan_radius": float(R)})
    try:
        return last_sign_change(f, tol=tol, grid=grid, certificate=cert).radius
    except ValueError:
        return math.inf


def mollify_bandlimit(f: FunctionSpec, delta: float, eps: float | None = None, r_f: float | None = None,
                      scan: float | None = None, max_halvings: int = 12) -> FunctionSpec:
    """g = f * (phi_delta)^, so ghat = fhat phi_delta is supported in the ball
    of radius 2/delta and has the sign of fhat wherever phi_delta > 0.

    With ``eps`` the radius r(g) is compared with r(f) + eps on a scan of
    [0, scan]; if it is too large, delta is halved until it is not and a
    MollifyError carrying the admissible delta is raised.
    """
    d = f.dim
    phi = mollifier(d, delta)
    g = custom(d, Convolution(f, fourier_transform(phi)))
    R = min(support_radius(fourier_transform(f)), 2.0 / delta)
    g = g.with_metadata(f"mollify_bandlimit(delta={delta:g}); bandlimited, transform support radius {R:.6g}")
    if eps is None:
        return g
    if r_f is None:
        r_f = last_sign_change(f).radius
    scan = scan if scan is not None else 3.0 * (r_f + eps) + 1.0
    if scan_radius(g, scan) <= r_f + eps:
        return g
    dd = delta
    for _ in range(max_halvings):
        dd *= 0.5
        gg = custom(d, Convolution(f, fourier_transform(mollifier(d, dd))))
        if scan_radius(gg, scan) <= r_f + eps:
            raise MollifyError(f"delta={delta:g} gives r(g) > r(f) + eps; largest admissible found {dd:g}", dd)
    raise MollifyError(f"no admissible delta down to {dd:g}", None)


def schwartz_smooth(f: FunctionSpec, delta: float, eps: float | None = None) -> FunctionSpec:
    """h = ghat * phi_delta + g phihat_delta with g = f * phi_delta and
    phi_delta the unit-mass approximate identity supported in B_{2 delta}.

    For f with fhat = f the result satisfies hhat = h.  Raises when h(0) is
    not negative, reporting both summands.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if eps is not None and delta > 0.5 * eps:
        raise ValueError(f"delta must be at most eps/2 = {0.5 * eps:g}")
    d = f.dim
    phi = approximate_identity(d, delta)
    phih = fourier_transform(phi)
    g = custom(d, Convolution(f, phi))
    gh = custom(d, Product(fourier_transform(f), phih))
    first = custom(d, Convolution(gh, phi))
    second = custom(d, Product(g, phih))
    a, b = float(evaluate(first, 0.0)), float(evaluate(second, 0.0))
    if not a + b < 0:
        raise ConstructionError(
            f"h(0) = {a + b:.3e} is not negative (ghat*phi: {a:.3e}, g phihat: {b:.3e}); decrease delta")
    return combine([(1.0, first), (1.0, second)]).with_metadata(f"schwartz_smooth(delta={delta:g})")


def add_eta(h: FunctionSpec, eta: EtaResult, delta: float, r_h: float | None = None,
            safety: float = 1.1) -> tuple[FunctionSpec, float]:
    """h + beta eta with beta chosen so the sum stays positive on
    [r(h) + delta, r0]; beta = 1 when r(h) >= r0."""
    if r_h is None:
        r_h = scan_radius(h, 3.0 * eta.r0 + 1.0)
    if r_h >= eta.r0:
        beta = 1.0
    else:
        a = r_h + delta
        if a >= eta.r0:
            raise ValueError("delta too large: r(h) + delta >= r0")
        x = np.linspace(a, eta.r0, 2001)
        hm = float(np.min(evaluate(h, x)))
        em = float(np.min(evaluate(eta.eta, x)))
        if hm <= 0:
            raise ConstructionError(f"h is not positive on [{a:.6g}, {eta.r0:.6g}] (min {hm:.3e})")
        beta = 1.0 if em >= 0 else hm / (safety * -em)
    return combine([(1.0, h), (beta, eta.eta)]), beta


# ---------------------------------------------------------------------------
# pipelines


@dataclass
class PipelineStep:
    op: str
    params: dict = field(default_factory=dict)


def _op_scale(f, factor):
    return scale(f, factor)


def _op_dilate(f, factor):
    return dilate(f, factor)


def _op_add_eta(f, delta, x_max=1e3):
    res = build_eta(f.dim, x_max=x_max)
    return add_eta(f, res, delta)[0]


OPS = {
    "dirac_symmetrize": dirac_symmetrize,
    "gaussian_correct": gaussian_correct,
    "eigen_symmetrize": eigen_symmetrize,
    "mollify_bandlimit": mollify_bandlimit,
    "schwartz_smooth": schwartz_smooth,
    "fourier_transform": fourier_transform,
    "scale": _op_scale,
    "dilate": _op_dilate,
    "add_eta": _op_add_eta,
}


def run_pipeline(base: FunctionSpec | dict | str, steps) -> tuple[FunctionSpec, list[dict]]:
    """Apply ``steps`` (PipelineStep or {"op": ..., "params": {...}}) in order;
    returns the result and a log with one entry per step."""
    f = base if isinstance(base, FunctionSpec) else parse_spec(base)
    log = []
    for i, st in enumerate(steps):
        if isinstance(st, dict):
            extra = set(st) - {"op", "params"}
            if extra:
                raise ValueError(f"step {i}: unknown keys {sorted(extra)}")
            st = PipelineStep(st["op"], dict(st.get("params") or {}))
        if st.op not in OPS:
            raise ValueError(f"step {i}: unknown op {st.op!r} (known: {', '.join(sorted(OPS))})")
        f = OPS[st.op](f, **st.params)
        log.append({"step": i, "op": st.op, "params": st.params, "value_at_0": float(evaluate(f, 0.0))})
    return f, log


def pipeline_to_dict(base: FunctionSpec, steps) -> dict:
    return {"base": spec_to_dict(base),
            "steps": [s if isinstance(s, dict) else {"op": s.op, "params": s.params} for s in steps]}
