"""Ornstein-Uhlenbeck semigroup: kernel, T_t action, generator, residuals.

T_t h(x) = E h(e^{-t} x + sqrt(1 - e^{-2t}) Z) interpolates between the
identity (t = 0) and the Gaussian mean (t -> infinity); its generator is
L = Laplacian - x . grad.  For indicator test functions of half-spaces, balls
and boxes the smoothing has a closed form (one-dimensional Gaussian CDFs and
noncentral chi-square CDFs), which the Stein solver leans on heavily; the
generic fallbacks are tensor Gauss-Hermite (k <= 3) and seeded Monte Carlo.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import stats

from .convex import Ball, Box, ConvexSet, HalfSpace, gaussian_measure, shifted_measure_batch
from .errors import ConfigurationError, DomainError
from .gaussian import hermite_he, norm_cdf, norm_pdf
from .quadrature import DEFAULT_QUAD, GH_TENSOR_MAX_DIM, QuadratureSpec, gauss_hermite_tensor
from .rng import RngStream


def ou_decay(t: float) -> float:
    """Mean-reversion factor e^{-t}."""
    return math.exp(-t)


def ou_noise(t: float) -> float:
    """Noise scale sqrt(1 - e^{-2t}), computed stably for small t."""
    return math.sqrt(-math.expm1(-2.0 * t))


class TestFunction:
    """Callable on points (k,) or batches (M,k); `bound` is a sup-norm cap."""

    is_indicator = False
    bound: float | None = None

    def __call__(self, x):
        raise NotImplementedError


class IndicatorFunction(TestFunction):
    """h = 1_C for a convex set C."""

    is_indicator = True
    bound = 1.0

    def __init__(self, C: ConvexSet):
        self.set = C
        self.dim = C.dim

    def __call__(self, x):
        out = self.set.contains(x)
        if isinstance(out, bool):
            return 1.0 if out else 0.0
        return out.astype(float)

    def gaussian_mean(self) -> float:
        return gaussian_measure(self.set)


class SmoothFunction(TestFunction):
    """Smooth test function with optional exact gradient and Hessian."""

    def __init__(self, fn, grad=None, hess=None, bound=None, name=""):
        self.fn = fn
        self.grad = grad
        self.hess = hess
        self.bound = bound
        self.name = name

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))


def hermite_product_function(orders, name: str = "") -> SmoothFunction:
    """Product of 1D Hermite polynomials; eigenfunction of L with value -sum(orders)."""
    orders = tuple(int(m) for m in orders)

    def fn(x):
        arr = np.asarray(x, dtype=float)
        single = arr.ndim == 1
        X = np.atleast_2d(arr)
        val = np.ones(len(X))
        for j, m in enumerate(orders):
            if m:
                val = val * hermite_he(m, X[:, j])
        return float(val[0]) if single else val

    def he_d(m, z):  # He_m' = m He_{m-1}
        return m * hermite_he(m - 1, z) if m else np.zeros_like(z)

    def he_dd(m, z):
        return m * (m - 1) * hermite_he(m - 2, z) if m >= 2 else np.zeros_like(z)

    def grad(x):
        x = np.asarray(x, dtype=float)
        g = np.empty_like(x)
        for i, mi in enumerate(orders):
            v = he_d(mi, x[i : i + 1])[0] if mi else 0.0
            for j, mj in enumerate(orders):
                if j != i and mj:
                    v *= float(hermite_he(mj, x[j]))
            g[i] = v
        return g

    def hess(x):
        x = np.asarray(x, dtype=float)
        k = x.size
        H = np.empty((k, k))
        for i in range(k):
            for j in range(k):
                v = 1.0
                for a, ma in enumerate(orders):
                    za = x[a : a + 1]
                    if a == i and a == j:
                        fac = he_dd(ma, za)[0]
                    elif a == i or a == j:
                        fac = he_d(ma, za)[0] if ma else 0.0
                    else:
                        fac = float(hermite_he(ma, za)[0]) if ma else 1.0
                    v *= float(fac)
                H[i, j] = v
        return H

    return SmoothFunction(fn, grad=grad, hess=hess, name=name or f"He{orders}")


# ---------------------------------------------------------------------------
# Transition kernel


def transition_density(t: float, x, y):
    """OU transition density p(t; x, y): Gaussian, mean e^{-t}x, var (1-e^{-2t})I."""
    if t <= 0.0:
        raise DomainError("transition_density needs t > 0")
    x = np.asarray(x, dtype=float)
    ys = np.atleast_2d(np.asarray(y, dtype=float))
    if ys.shape[1] != x.size:
        raise DomainError("x and y must share a dimension")
    var = -math.expm1(-2.0 * t)
    diff = ys - math.exp(-t) * x
    k = x.size
    norm = (2.0 * math.pi * var) ** (-0.5 * k)
    out = norm * np.exp(-0.5 * np.sum(diff * diff, axis=1) / var)
    return out if np.asarray(y).ndim > 1 else float(out[0])


# ---------------------------------------------------------------------------
# Smoothed values and their spatial derivatives (closed forms + fallbacks)


_ANALYTIC_VARIANTS = (HalfSpace, Ball, Box)


def has_analytic_smoothing(h: TestFunction) -> bool:
    """Whether E h(a x + w Z) has a closed form for this test function."""
    return isinstance(h, IndicatorFunction) and (
        h.set.is_empty or isinstance(h.set, _ANALYTIC_VARIANTS)
    )


def smoothed_value_batch(h: TestFunction, alpha: float, w: float, X) -> np.ndarray | None:
    """E h(alpha*x + w*Z) rows of X; closed form or None."""
    if isinstance(h, IndicatorFunction):
        shifts = alpha * np.atleast_2d(np.asarray(X, dtype=float))
        return shifted_measure_batch(h.set, shifts, w)
    return None


def _halfspace_derivative(C: HalfSpace, alpha, w, X, idx):
    u = (C.offset - alpha * (X @ C.normal)) / w
    m = len(idx)
    val = -((alpha / w) ** m) * hermite_he(m - 1, u) * norm_pdf(u)
    for i in idx:
        val = val * C.normal[i]
    return val

def _ncx2_lambda_derivatives(q, k, lam, order):
    """d^j/d lambda^j of the noncentral chi-square CDF, j = 1..order."""
    F = [stats.ncx2.cdf(q, k + 2 * j, lam) for j in range(order + 1)]
    out = []
    for j in range(1, order + 1):
        coef = [(-1.0) ** (j - i) * math.comb(j, i) for i in range(j + 1)]
        out.append(sum(c * Fi for c, Fi in zip(coef, F[: j + 1])) / 2.0**j)
    return out


def _ball_derivative(C: Ball, alpha, w, X, idx):
    mu = alpha * X - C.center
    w2 = w * w
    q = C.radius**2 / w2
    lam = np.sum(mu * mu, axis=1) / w2
    m = len(idx)
    dF = _ncx2_lambda_derivatives(q, C.dim, lam, m)
    dl = 2.0 * alpha * mu / w2          # d lambda / d x_i = dl[:, i]
    d2l = 2.0 * alpha * alpha / w2      # d2 lambda / d x_i d x_j = d2l * delta_ij
    if m == 1:
        (i,) = idx
        return dF[0] * dl[:, i]
    if m == 2:
        i, j = idx
        val = dF[1] * dl[:, i] * dl[:, j]
        if i == j:
            val = val + dF[0] * d2l
        return val
    i, j, l = idx
    val = dF[2] * dl[:, i] * dl[:, j] * dl[:, l]
    val = val + dF[1] * d2l * (
        (i == j) * dl[:, l] + (i == l) * dl[:, j] + (j == l) * dl[:, i]
    )
    return val


def _box_derivative(C: Box, alpha, w, X, idx):
    mult: dict[int, int] = {}
    for i in idx:
        mult[i] = mult.get(i, 0) + 1
    hi = (C.upper - alpha * X) / w
    lo = (C.lower - alpha * X) / w
    plain = norm_cdf(hi) - norm_cdf(lo)
    val = np.ones(len(X))
    for j in range(C.dim):
        m = mult.get(j, 0)
        if m == 0:
            val = val * plain[:, j]
        else:
            fac = hermite_he(m - 1, hi[:, j]) * norm_pdf(hi[:, j]) - hermite_he(
                m - 1, lo[:, j]
            ) * norm_pdf(lo[:, j])
            val = val * (-((alpha / w) ** m)) * fac
    return val


def smoothed_derivative_batch(
    h: TestFunction, alpha: float, w: float, X, idx
) -> np.ndarray | None:
    """D_idx [x -> E h(alpha*x + w*Z)] for rows of X; closed form or None."""
    if not isinstance(h, IndicatorFunction):
        return None
    X = np.atleast_2d(np.asarray(X, dtype=float))
    C = h.set
    if C.is_empty:
        return np.zeros(len(X))
    if isinstance(C, HalfSpace):
        return _halfspace_derivative(C, alpha, w, X, idx)
    if isinstance(C, Ball):
        return _ball_derivative(C, alpha, w, X, idx)
    if isinstance(C, Box):
        return _box_derivative(C, alpha, w, X, idx)
    return None


def _inner_points(k: int, quad: QuadratureSpec, method: str):
    if method == "gauss-hermite":
        if k > GH_TENSOR_MAX_DIM:
            raise ConfigurationError(
                f"gauss-hermite inner quadrature infeasible for k={k}"
            )
        return gauss_hermite_tensor(k, quad.gh_nodes)
    draws = RngStream(quad.mc_seed, stream_id=909).generator().standard_normal(
        (quad.mc_samples, k)
    )
    return draws, np.full(quad.mc_samples, 1.0 / quad.mc_samples)


def _resolve_inner(h: TestFunction, k: int, quad: QuadratureSpec) -> str:
    method = quad.inner_method
    if method in ("auto", "analytic"):
        if has_analytic_smoothing(h):
            return "analytic"
        if method == "analytic":
            raise ConfigurationError(
                "analytic smoothing unavailable for this test function"
            )
        return "gauss-hermite" if k <= GH_TENSOR_MAX_DIM else "monte-carlo"
    return method


def gaussian_mean(h: TestFunction, k: int, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Integral of h against the standard Gaussian."""
    if isinstance(h, IndicatorFunction):
        return h.gaussian_mean()
    method = quad.inner_method
    if method in ("auto", "analytic"):
        method = "gauss-hermite" if k <= GH_TENSOR_MAX_DIM else "monte-carlo"
    nodes, wts = _inner_points(k, quad, method)
    return float(np.asarray(h(nodes), dtype=float) @ wts)


def semigroup_apply(h: TestFunction, t: float, x, quad: QuadratureSpec = DEFAULT_QUAD):
    """T_t h(x); accepts a point (k,) or a batch (M,k)."""
    if t < 0.0:
        raise DomainError("semigroup time t must be >= 0")
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    k = X.shape[1]
    quad.validate(t)
    if t == 0.0:
        vals = np.asarray(h(X), dtype=float)
        return float(vals[0]) if single else vals
    alpha, w = ou_decay(t), ou_noise(t)
    method = _resolve_inner(h, k, quad)
    if method == "analytic":
        vals = smoothed_value_batch(h, alpha, w, X)
    else:
        nodes, wts = _inner_points(k, quad, method)
        vals = np.empty(len(X))
        for m, row in enumerate(X):
            vals[m] = float(np.asarray(h(alpha * row + w * nodes), dtype=float) @ wts)
    return float(vals[0]) if single else vals


def semigroup_derivative(
    h: TestFunction, s: float, x, idx, quad: QuadratureSpec = DEFAULT_QUAD
):
    """Spatial derivative D_idx T_s h(x) of the smoothed test function.

    Uses the derivative-on-the-kernel representation: order-m derivatives pick
    up the weight (e^{-s}/w)^m against Hermite-polynomial factors inside the
    expectation, i.e. the integrand stays bounded by h itself.
    """
    if s <= 0.0:
        raise DomainError("semigroup derivatives need s > 0")
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    k = X.shape[1]
    idx = tuple(int(i) for i in idx)
    if not idx or len(idx) > 3:
        raise DomainError("derivative order must be 1, 2 or 3")
    if any(not 0 <= i < k for i in idx):
        raise DomainError("derivative index out of range")
    alpha, w = ou_decay(s), ou_noise(s)
    method = _resolve_inner(h, k, quad)
    if method == "analytic":
        vals = smoothed_derivative_batch(h, alpha, w, X, idx)
    else:
        nodes, wts = _inner_points(k, quad, method)
        mult: dict[int, int] = {}
        for i in idx:
            mult[i] = mult.get(i, 0) + 1
        kernel = wts.copy()
        for j in sorted(mult):
            kernel = kernel * hermite_he(mult[j], nodes[:, j])
        scale = (alpha / w) ** len(idx)
        vals = np.empty(len(X))
        for m_i, row in enumerate(X):
            vals[m_i] = scale * float(np.asarray(h(alpha * row + w * nodes), dtype=float) @ kernel)
    return float(vals[0]) if single else vals


# ---------------------------------------------------------------------------
# Generator and backward-equation residual


def generator_apply(g, x, dx: float = 1e-3) -> float:
    """L g(x) = Laplacian g(x) - x . grad g(x).

    Exact when g carries grad/hess callables, otherwise central differences
    with step dx.
    """
    x = np.asarray(x, dtype=float)
    if isinstance(g, SmoothFunction) and g.grad is not None and g.hess is not None:
        grad = np.asarray(g.grad(x), dtype=float)
        lap = float(np.trace(np.asarray(g.hess(x), dtype=float)))
        return lap - float(x @ grad)
    k = x.size
    f0 = float(np.asarray(g(x[None, :]), dtype=float)[0])
    lap = 0.0
    drift = 0.0
    for i in range(k):
        e = np.zeros(k)
        e[i] = dx
        fp = float(np.asarray(g((x + e)[None, :]), dtype=float)[0])
        fm = float(np.asarray(g((x - e)[None, :]), dtype=float)[0])
        lap += (fp - 2.0 * f0 + fm) / dx**2
        drift += x[i] * (fp - fm) / (2.0 * dx)
    return lap - drift


def backward_residual(
    h: TestFunction,
    t: float,
    x,
    quad: QuadratureSpec = DEFAULT_QUAD,
    dt: float = 1e-3,
    dx: float = 1e-3,
) -> float:
    """Residual of the backward equation d/dt T_t h = L T_t h at (t, x).

    Both sides are finite differences over semigroup_apply, so the residual
    is O(dt^2 + dx^2) in smooth regimes.
    """
    if t <= 0.0:
        raise DomainError("backward residual needs t > 0")
    x = np.asarray(x, dtype=float)
    k = x.size

    def T(tt, pt):
        return semigroup_apply(h, tt, pt, quad)

    dfdt = (T(t + dt, x) - T(t - dt, x)) / (2.0 * dt)
    f0 = T(t, x)
    lap = 0.0
    drift = 0.0
    for i in range(k):
        e = np.zeros(k)
        e[i] = dx
        fp = T(t, x + e)
        fm = T(t, x - e)
        lap += (fp - 2.0 * f0 + fm) / dx**2
        drift += x[i] * (fp - fm) / (2.0 * dx)
    return dfdt - (lap - drift)
