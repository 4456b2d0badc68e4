"""Benchmark problem instances and feasible domains.

A ProblemInstance bundles a convex objective with the constants the solvers
need: a Lipschitz constant L valid on the domain, a smoothness constant beta,
the circumscribing radius R of the domain, and ground-truth optimum data used
only for verification and reporting (never by the solvers themselves).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize as _sciopt

from .errors import ConfigurationError
from .geometry import Ellipsoid


@dataclass(frozen=True)
class Domain:
    """A ball or axis-aligned box, with membership and separation."""

    kind: str
    center: np.ndarray
    radius: float = 0.0          # ball only
    half_widths: np.ndarray = None  # box only

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        object.__setattr__(self, "center", c)
        if self.kind == "ball":
            if self.radius <= 0.0:
                raise ValueError("ball radius must be positive")
        elif self.kind == "box":
            hw = np.asarray(self.half_widths, dtype=float)
            if hw.shape != c.shape or np.any(hw <= 0.0):
                raise ValueError("box half-widths must be positive, one per axis")
            object.__setattr__(self, "half_widths", hw)
        else:
            raise ValueError(f"unknown domain kind: {self.kind!r}")

    @property
    def dim(self):
        return self.center.shape[0]

    def circumradius(self):
        """Radius of the smallest enclosing ball anchored at the domain
        center."""
        if self.kind == "ball":
            return float(self.radius)
        return float(np.linalg.norm(self.half_widths))

    def contains(self, x, margin=0.0, tol=1e-12):
        x = np.asarray(x, dtype=float)
        if self.kind == "ball":
            return np.linalg.norm(x - self.center) <= self.radius - margin + tol
        d = np.abs(x - self.center)
        return bool(np.all(d <= self.half_widths - margin + tol))

    def separation(self, x):
        """Halfspace (a, b) with C subset of {y : <a, y> <= b}, oriented at
        the boundary facet nearest to (or most violated by) x."""
        x = np.asarray(x, dtype=float)
        if self.kind == "ball":
            d = x - self.center
            nrm = np.linalg.norm(d)
            if nrm == 0.0:
                a = np.zeros(self.dim)
                a[0] = 1.0
            else:
                a = d / nrm
            return a, float(a @ self.center) + self.radius
        # box: pick the side with the smallest slack (most violated first)
        lo_slack = (x - self.center) + self.half_widths   # distance to lower face
        hi_slack = self.half_widths - (x - self.center)   # distance to upper face
        j_lo = int(np.argmin(lo_slack))
        j_hi = int(np.argmin(hi_slack))
        a = np.zeros(self.dim)
        if lo_slack[j_lo] < hi_slack[j_hi]:
            a[j_lo] = -1.0
            return a, float(-(self.center[j_lo] - self.half_widths[j_lo]))
        a[j_hi] = 1.0
        return a, float(self.center[j_hi] + self.half_widths[j_hi])

    def sample(self, rng, count=1):
        """Uniform samples, used by validation tests."""
        if self.kind == "ball":
            g = rng.standard_normal((count, self.dim))
            g /= np.linalg.norm(g, axis=1, keepdims=True)
            r = self.radius * rng.random(count) ** (1.0 / self.dim)
            pts = self.center + g * r[:, None]
        else:
            u = rng.uniform(-1.0, 1.0, (count, self.dim))
            pts = self.center + u * self.half_widths
        return pts


def ball(center, radius):
    return Domain("ball", np.asarray(center, dtype=float), radius=float(radius))


def box(center, half_widths):
    return Domain("box", np.asarray(center, dtype=float),
                  half_widths=np.asarray(half_widths, dtype=float))


def initial_ellipsoid(domain):
    """Minimum-volume ellipsoid enclosing the domain.

    ball(c, r) -> E(r^2 I, c); a box with half-widths a -> E(n diag(a^2), c).
    """
    n = domain.dim
    if domain.kind == "ball":
        return Ellipsoid(domain.radius ** 2 * np.eye(n), domain.center)
    return Ellipsoid(n * np.diag(domain.half_widths ** 2), domain.center)


@dataclass(frozen=True)
class ProblemInstance:
    name: str
    dimension: int
    objective: object          # callable x -> float
    gradient: object           # callable x -> ndarray
    domain: Domain
    lipschitz: float
    smoothness: float
    optimum_value: float
    optimum_point: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def radius(self):
        return self.domain.circumradius()

    def suboptimality(self, x):
        return float(self.objective(np.asarray(x, dtype=float))) - self.optimum_value

    def interior_margin(self):
        """Distance from the optimum to the domain boundary."""
        d = self.domain
        if d.kind == "ball":
            return d.radius - float(np.linalg.norm(self.optimum_point - d.center))
        return float(np.min(d.half_widths - np.abs(self.optimum_point - d.center)))

    def check_interior(self, eps):
        """True when the ball of radius sqrt(eps / L) around the optimum lies
        inside the domain (required for the accuracy guarantees)."""
        return self.interior_margin() >= math.sqrt(eps / self.lipschitz)


def _max_distance(domain, point):
    """max_{x in domain} ||x - point||."""
    if domain.kind == "ball":
        return float(np.linalg.norm(domain.center - point)) + domain.radius
    # farthest box corner
    d = np.maximum(np.abs(domain.center - domain.half_widths - point),
                   np.abs(domain.center + domain.half_widths - point))
    return float(np.linalg.norm(d))


def make_quadratic(n, q_matrix, x_star, domain, name="quadratic"):
    """f(x) = 0.5 (x - x*)^T Q (x - x*) with Q symmetric positive definite."""
    Q = np.asarray(q_matrix, dtype=float)
    x_star = np.asarray(x_star, dtype=float)
    if Q.shape != (n, n) or x_star.shape != (n,):
        raise ValueError("quadratic parameter shapes do not match dimension")
    Q = (Q + Q.T) / 2.0
    eig = np.linalg.eigvalsh(Q)
    if eig[0] <= 0.0:
        raise ValueError("quadratic matrix must be positive definite")
    if not domain.contains(x_star):
        raise ValueError("quadratic minimizer must lie in the domain")
    beta = float(eig[-1])
    lipschitz = beta * _max_distance(domain, x_star)

    def objective(x):
        d = np.asarray(x, dtype=float) - x_star
        return 0.5 * float(d @ (Q @ d))

    def gradient(x):
        return Q @ (np.asarray(x, dtype=float) - x_star)

    return ProblemInstance(
        name=name, dimension=n, objective=objective, gradient=gradient,
        domain=domain, lipschitz=lipschitz, smoothness=beta,
        optimum_value=0.0, optimum_point=x_star,
        metadata={"kind": "quadratic", "eig_min": float(eig[0]),
                  "eig_max": beta},
    )


def make_logsumexp(n, directions, temperature, domain, name="logsumexp"):
    """f(x) = t * log sum_i exp(<a_i, x> / t), evaluated max-shifted.

    The optimum value is located by a high-accuracy smooth reference
    minimization performed at construction time and recorded in the metadata.
    """
    A = np.asarray(directions, dtype=float)
    t = float(temperature)
    if A.ndim != 2 or A.shape[1] != n:
        raise ValueError("directions must be a (k, n) array")
    if t <= 0.0:
        raise ValueError("temperature must be positive")
    norms = np.linalg.norm(A, axis=1)
    lipschitz = float(np.max(norms))
    beta = lipschitz ** 2 / t

    def objective(x):
        z = A @ np.asarray(x, dtype=float) / t
        m = z.max()
        return t * (m + math.log(float(np.exp(z - m).sum())))

    def gradient(x):
        z = A @ np.asarray(x, dtype=float) / t
        w = np.exp(z - z.max())
        return A.T @ (w / w.sum())

    res = _sciopt.minimize(objective, np.zeros(n), jac=gradient,
                           method="L-BFGS-B",
                           options={"gtol": 1e-14, "ftol": 1e-16,
                                    "maxiter": 10_000})
    x_star = np.asarray(res.x, dtype=float)
    if not domain.contains(x_star, margin=1e-9):
        raise ValueError("log-sum-exp minimizer must lie inside the domain")
    return ProblemInstance(
        name=name, dimension=n, objective=objective, gradient=gradient,
        domain=domain, lipschitz=lipschitz, smoothness=beta,
        optimum_value=float(res.fun), optimum_point=x_star,
        metadata={"kind": "logsumexp", "temperature": t,
                  "optimum_provenance":
                      "L-BFGS-B reference run, gtol=1e-14 (construction time)",
                  "reference_grad_norm": float(np.linalg.norm(gradient(x_star)))},
    )


def make_smoothed_norm(n, x_star, mu, domain, name="smoothed_norm"):
    """f(x) = sqrt(||x - x*||^2 + mu^2): a smoothed distance with curvature
    at most 1/mu and gradients of norm < 1."""
    x_star = np.asarray(x_star, dtype=float)
    mu = float(mu)
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    if not domain.contains(x_star):
        raise ValueError("minimizer must lie in the domain")

    def objective(x):
        d = np.asarray(x, dtype=float) - x_star
        return math.sqrt(float(d @ d) + mu * mu)

    def gradient(x):
        d = np.asarray(x, dtype=float) - x_star
        return d / math.sqrt(float(d @ d) + mu * mu)

    return ProblemInstance(
        name=name, dimension=n, objective=objective, gradient=gradient,
        domain=domain, lipschitz=1.0, smoothness=1.0 / mu,
        optimum_value=mu, optimum_point=x_star,
        metadata={"kind": "smoothed_norm", "mu": mu},
    )


def _random_spd(n, rng, eig_low=0.5, eig_high=3.0):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    eigs = rng.uniform(eig_low, eig_high, n)
    return q @ np.diag(eigs) @ q.T


def default_suite(n, seed=0):
    """Three seeded instances: a random quadratic, a log-sum-exp over simplex
    directions, and a smoothed norm.  Minimizers sit well inside the unit
    ball domain so accuracy guarantees apply down to eps = 1e-2."""
    rng = np.random.default_rng(seed)
    dom = ball(np.zeros(n), 1.0)

    Q = _random_spd(n, rng)
    u = rng.standard_normal(n)
    x_star_q = 0.4 * u / np.linalg.norm(u) * rng.random() ** (1.0 / n)
    quad = make_quadratic(n, Q, x_star_q, dom, name=f"quadratic-n{n}-s{seed}")

    # simplex directions: e_1..e_n and -(e_1+...+e_n); unique minimizer at 0.
    A = np.vstack([np.eye(n), -np.ones((1, n))])
    off = rng.standard_normal(n)
    off = 0.3 * off / np.linalg.norm(off)
    lse_dom = ball(off, 1.0)
    lse = make_logsumexp(n, A, 0.5, lse_dom, name=f"logsumexp-n{n}-s{seed}")

    u2 = rng.standard_normal(n)
    x_star_s = 0.35 * u2 / np.linalg.norm(u2)
    smooth = make_smoothed_norm(n, x_star_s, 0.25, dom,
                                name=f"smoothed_norm-n{n}-s{seed}")
    return [quad, lse, smooth]


def _domain_from_config(cfg, n):
    kind = cfg.get("kind", "ball")
    center = np.asarray(cfg.get("center", np.zeros(n)), dtype=float)
    if center.shape != (n,):
        raise ConfigurationError("domain.center has wrong dimension")
    if kind == "ball":
        return ball(center, float(cfg.get("radius", 1.0)))
    if kind == "box":
        hw = cfg.get("half_widths")
        if hw is None:
            raise ConfigurationError("domain.half_widths is required for boxes")
        return box(center, np.asarray(hw, dtype=float))
    raise ConfigurationError(f"unknown domain kind: {kind!r}")


def from_config(cfg):
    """Build a ProblemInstance from a plain dict (see the CLI docs)."""
    try:
        kind = cfg["kind"]
        n = int(cfg["n"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"problem config needs 'kind' and 'n': {exc}")
    if n < 2:
        raise ConfigurationError("problem dimension must be at least 2")
    seed = int(cfg.get("seed", 0))
    rng = np.random.default_rng(seed)
    params = cfg.get("parameters", {})
    domain = _domain_from_config(cfg.get("domain", {}), n)
    try:
        if kind == "quadratic":
            Q = params.get("q_matrix")
            Q = np.asarray(Q, dtype=float) if Q is not None else _random_spd(n, rng)
            xs = params.get("x_star")
            if xs is None:
                u = rng.standard_normal(n)
                xs = domain.center + 0.4 * domain.circumradius() * u / np.linalg.norm(u)
            return make_quadratic(n, Q, np.asarray(xs, dtype=float), domain)
        if kind == "logsumexp":
            A = params.get("directions")
            A = (np.asarray(A, dtype=float) if A is not None
                 else np.vstack([np.eye(n), -np.ones((1, n))]))
            return make_logsumexp(n, A, float(params.get("temperature", 0.5)),
                                  domain)
        if kind == "smoothed_norm":
            xs = params.get("x_star")
            if xs is None:
                u = rng.standard_normal(n)
                xs = domain.center + 0.35 * domain.circumradius() * u / np.linalg.norm(u)
            return make_smoothed_norm(n, np.asarray(xs, dtype=float),
                                      float(params.get("mu", 0.25)), domain)
    except ValueError as exc:
        raise ConfigurationError(str(exc))
    raise ConfigurationError(f"unknown problem kind: {kind!r}")


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"invalid JSON in {path}: {exc}")
