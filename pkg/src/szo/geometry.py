"""Ellipsoid geometry: isotropic transforms, shallow cuts, and cone pruning.

An ellipsoid is stored as E(A, x0) = {x : (x - x0)^T A^{-1} (x - x0) <= 1}
with A symmetric positive definite.  All angle-shrinking computations for
search cones live here as pure geometry, independent of any oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEllipsoidError

# Relative symmetry tolerance for shape matrices.
_SYM_RTOL = 1e-12
# Abort threshold for the eigenvalue ratio lambda_min / lambda_max.
CONDITION_FLOOR = 1e-13


def _symmetrize(a):
    return (a + a.T) / 2.0


@dataclass(frozen=True)
class Ellipsoid:
    """E(A, x0) with cached eigendecomposition of the shape matrix A."""

    shape: np.ndarray
    center: np.ndarray

    def __post_init__(self):
        shape = np.asarray(self.shape, dtype=float)
        center = np.asarray(self.center, dtype=float)
        if shape.ndim != 2 or shape.shape[0] != shape.shape[1]:
            raise ValueError("shape matrix must be square")
        if center.shape != (shape.shape[0],):
            raise ValueError("center dimension does not match shape matrix")
        if not (np.all(np.isfinite(shape)) and np.all(np.isfinite(center))):
            raise ValueError("ellipsoid entries must be finite")
        scale = max(np.abs(shape).max(), 1.0)
        if np.abs(shape - shape.T).max() > _SYM_RTOL * scale:
            raise ValueError("shape matrix must be symmetric")
        shape = _symmetrize(shape)
        eigvals, eigvecs = np.linalg.eigh(shape)
        if eigvals[0] <= 0.0:
            raise DegenerateEllipsoidError(
                "shape matrix is not positive definite (min eigenvalue "
                f"{eigvals[0]:.3e})"
            )
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "_eigvals", eigvals)
        object.__setattr__(self, "_eigvecs", eigvecs)

    @property
    def dim(self):
        return self.center.shape[0]

    @property
    def lambda_max(self):
        return float(self._eigvals[-1])

    @property
    def lambda_min(self):
        return float(self._eigvals[0])

    @property
    def eigvals(self):
        return self._eigvals

    def sqrt_shape(self):
        v = self._eigvecs
        return v @ (np.sqrt(self._eigvals)[:, None] * v.T)

    def inv_sqrt_shape(self):
        v = self._eigvecs
        return v @ (np.sqrt(1.0 / self._eigvals)[:, None] * v.T)

    def log_det(self):
        return float(np.sum(np.log(self._eigvals)))

    def membership(self, x):
        """(x - x0)^T A^{-1} (x - x0); <= 1 means x is inside."""
        d = np.asarray(x, dtype=float) - self.center
        v = self._eigvecs.T @ d
        return float(np.sum(v * v / self._eigvals))

    def contains(self, x, tol=1e-9):
        return self.membership(x) <= 1.0 + tol


@dataclass(frozen=True)
class IsotropicTransform:
    """T(x) = A^{-1/2} (x - x0) * sqrt(lambda_max(A)).

    Maps E(A, x0) onto the origin-centered ball of radius sqrt(lambda_max),
    so an offset of (Euclidean) length t in transformed coordinates maps back
    to an offset of length at most t in the original coordinates.
    """

    ellipsoid: Ellipsoid
    forward_matrix: np.ndarray
    inverse_matrix: np.ndarray

    @property
    def center(self):
        return self.ellipsoid.center

    def forward(self, x):
        return self.forward_matrix @ (np.asarray(x, dtype=float) - self.center)

    def inverse(self, y):
        return self.inverse_matrix @ np.asarray(y, dtype=float) + self.center

    def pullback_gradient(self, grad):
        """Gradient of f(T^{-1}(y)) at y=0 given grad = grad f(x0)."""
        return self.inverse_matrix.T @ np.asarray(grad, dtype=float)


def isotropic(ellipsoid):
    """Build the isotropic rounding transform for an ellipsoid."""
    lam_max = ellipsoid.lambda_max
    if ellipsoid.lambda_min < 1e-14 * lam_max:
        raise DegenerateEllipsoidError(
            "ellipsoid too ill-conditioned for isotropic transform "
            f"(ratio {ellipsoid.lambda_min / lam_max:.3e})"
        )
    scale = math.sqrt(lam_max)
    forward = ellipsoid.inv_sqrt_shape() * scale
    inverse = ellipsoid.sqrt_shape() / scale
    return IsotropicTransform(ellipsoid, forward, inverse)


def shallow_cut_volume_ratio(n, theta):
    """Volume ratio of the minimum ellipsoid containing the unit ball cut at
    depth sin(theta) past the center, over the unit ball volume.

    Valid for theta in [0, arcsin(1/n)]; at theta = arcsin(1/(2n)) the ratio
    is at most exp(-1/(8(n+1))).
    """
    if n < 2:
        raise ValueError("dimension must be at least 2")
    s = math.sin(theta)
    if not -1e-12 <= s <= 1.0 / n + 1e-12:
        raise ValueError("theta must lie in [0, arcsin(1/n)]")
    s = min(max(s, 0.0), 1.0 / n)
    lead = (n * n * (1.0 - s * s) / (n * n - 1.0)) ** ((n - 1) / 2.0)
    return lead * n * (1.0 + s) / (n + 1.0)


def _rank_one_cut(ellipsoid, direction_original, alpha):
    """Minimum-volume ellipsoid containing E cut by a halfspace at relative
    depth alpha along `direction_original` (a unit-free normal in original
    coordinates).  alpha in (-1/n, 1): negative = shallow, 0 = central,
    positive = deep.
    """
    n = ellipsoid.dim
    a = np.asarray(direction_original, dtype=float)
    A = ellipsoid.shape
    Aa = A @ a
    norm2 = float(a @ Aa)
    if norm2 <= 0.0:
        raise ValueError("cut direction must be nonzero")
    norm = math.sqrt(norm2)
    if alpha >= 1.0 - 1e-12:
        raise ValueError("cut would exclude the entire ellipsoid")
    if alpha <= -1.0 / n:
        raise ValueError("cut too shallow to reduce volume")
    u = Aa / norm
    tau = (1.0 + n * alpha) / (n + 1.0)
    delta = n * n * (1.0 - alpha * alpha) / (n * n - 1.0)
    sigma = 2.0 * (1.0 + n * alpha) / ((n + 1.0) * (1.0 + alpha))
    new_center = ellipsoid.center - tau * u
    new_shape = _symmetrize(delta * (A - sigma * np.outer(u, u)))
    out = Ellipsoid(new_shape, new_center)
    if out.lambda_min < CONDITION_FLOOR * out.lambda_max:
        raise DegenerateEllipsoidError(
            "post-cut ellipsoid condition fell below the abort threshold"
        )
    return out


def shallow_cut(ellipsoid, g, sin_theta):
    """Apply a shallow cut keeping {y : <g/|g|, y> <= sin_theta} in the
    isotropic (unit-ball-normalized) coordinates of `ellipsoid`.

    `g` is the cut normal expressed in isotropic coordinates.  Returns the
    minimum-volume enclosing ellipsoid of the kept cap, mapped back to the
    original coordinates.
    """
    n = ellipsoid.dim
    if not 0.0 <= sin_theta <= 1.0 / n:
        raise ValueError("sin_theta must lie in [0, 1/n]")
    g = np.asarray(g, dtype=float)
    gnorm = np.linalg.norm(g)
    if gnorm == 0.0 or not np.isfinite(gnorm):
        raise ValueError("cut direction must be a finite nonzero vector")
    ghat = g / gnorm
    # Normal in original coordinates: the halfspace <ghat, T(x)> <= c becomes
    # <A^{-1/2} ghat, x - x0> <= c'.
    a = ellipsoid.inv_sqrt_shape() @ ghat
    return _rank_one_cut(ellipsoid, a, -sin_theta)


def halfspace_cut(ellipsoid, a, b):
    """Cut E(A, x0) with the halfspace {x : <a, x> <= b} (original
    coordinates), returning the enclosing ellipsoid of the intersection.

    Raises ValueError when the halfspace cannot reduce the ellipsoid
    (boundary further than 1/n past the center in the ellipsoid norm).
    """
    a = np.asarray(a, dtype=float)
    norm = math.sqrt(float(a @ (ellipsoid.shape @ a)))
    if norm <= 0.0:
        raise ValueError("halfspace normal must be nonzero")
    alpha = (float(a @ ellipsoid.center) - float(b)) / norm
    return _rank_one_cut(ellipsoid, a, alpha)


@dataclass(frozen=True)
class Cone:
    """Circular cone F(p, gamma) = {w : angle(w, p) <= gamma}."""

    direction: np.ndarray
    angle: float

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        nrm = np.linalg.norm(d)
        if nrm == 0.0 or not np.isfinite(nrm):
            raise ValueError("cone direction must be nonzero")
        object.__setattr__(self, "direction", d / nrm)
        if not 0.0 <= self.angle <= math.pi / 2 + 1e-12:
            raise ValueError("cone angle must lie in [0, pi/2]")

    def contains(self, w, tol=1e-9):
        w = np.asarray(w, dtype=float)
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return True
        c = float(np.clip(self.direction @ w / nrm, -1.0, 1.0))
        return math.acos(c) <= self.angle + tol


def orthonormal_completion(fixed, lead):
    """Complete `fixed + [lead]` to an orthonormal basis of R^n.

    Returns an array whose rows are the n - len(fixed) orthonormal vectors
    [lead, d_2, ..., d_{n-k}] spanning the orthogonal complement of
    span(fixed), with `lead` first.  Deterministic: with no fixed vectors the
    basis is the Householder frame of the lead; otherwise new vectors are
    residuals of standard basis vectors, chosen greedily by largest residual
    norm (lowest index on ties).
    """
    lead = np.asarray(lead, dtype=float)
    n = lead.shape[0]
    fixed = [np.asarray(v, dtype=float) for v in fixed]
    if not fixed:
        # Householder fast path: the reflection mapping e_1 to lead has
        # orthonormal rows with the first row equal to lead.
        nrm = np.linalg.norm(lead)
        if nrm < 1e-9:
            raise ValueError("lead direction must be nonzero")
        lead = lead / nrm
        v = lead.copy()
        v[0] -= 1.0
        vn2 = float(v @ v)
        if vn2 < 1e-24:
            basis = np.eye(n)
        else:
            basis = np.eye(n) - 2.0 / vn2 * np.outer(v, v)
        basis[0] = lead
        return basis
    anchors = list(fixed)
    # validate + orthogonalize lead against fixed
    resid = lead.copy()
    for v in anchors:
        resid -= (v @ resid) * v
    nrm = np.linalg.norm(resid)
    if nrm < 1e-9:
        raise ValueError("lead direction lies in the span of the fixed set")
    lead = resid / nrm
    anchors.append(lead)
    out = [lead]
    while len(anchors) < n:
        basis_resid = np.eye(n)
        for v in anchors:
            basis_resid -= np.outer(basis_resid @ v, v)
        norms = np.linalg.norm(basis_resid, axis=1)
        j = int(np.argmax(norms))
        if norms[j] < 1e-9:
            raise ValueError("failed to complete basis: degenerate residuals")
        cand = basis_resid[j]
        # second orthogonalization pass for numerical hygiene
        for v in anchors:
            cand = cand - (v @ cand) * v
        cand = cand / np.linalg.norm(cand)
        anchors.append(cand)
        out.append(cand)
    return np.asarray(out)


def cone_shrink_ratio(m, gamma):
    """Closed-form sin(gamma')/sin(gamma) for one pruning step with m active
    orthonormal directions.  Bounded by sqrt((m-1)/m), with equality at
    gamma = pi/2.
    """
    if m < 2:
        raise ValueError("need at least two active directions")
    c = math.cos(gamma)
    num = (m - 2.0) ** 2 * c * c + 2.0 * (m - 2.0) * c + (m - 1.0)
    den = (m - 1.0) * (m - 2.0) * c * c + 2.0 * (m - 1.0) * c + m
    return math.sqrt(num / den)


def prune_cone(gamma, signs, basis):
    """One cone-pruning step.

    Given an orthonormal `basis` (lead direction first), an opening angle
    gamma, and per-direction signs in {-1, +1}, build the reflected frame

        w_0 = s_0 * d_0
        w_i = s_0 * d_0 * cos(gamma) + s_i * d_i * sin(gamma),   i >= 1

    and return the smaller cone Cone(p, gamma') with p the normalized mean of
    the w_i and gamma' = arccos(<p, w_1>).  The new cone contains every
    vector of the orthant cone it replaces.
    """
    m = len(basis)
    if m < 2:
        raise ValueError("cone pruning needs at least two directions")
    if len(signs) != m:
        raise ValueError("signs and basis lengths differ")
    if not 0.0 < gamma <= math.pi / 2 + 1e-12:
        raise ValueError("gamma must lie in (0, pi/2]")
    frame = np.asarray(basis, dtype=float)
    s = np.asarray(signs, dtype=float)
    lead = s[0] * frame[0]
    cg, sg = math.cos(gamma), math.sin(gamma)
    w = cg * lead + sg * (s[1:, None] * frame[1:])
    p = (lead + w.sum(axis=0)) / m
    pn = math.sqrt(float(p @ p))
    if pn < 1e-15:
        raise ValueError("degenerate pruning step: zero mean direction")
    p = p / pn
    cosang = float(np.clip(p @ w[0], -1.0, 1.0))
    return Cone(p, math.acos(cosang))
