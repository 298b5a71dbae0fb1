"""Spherical-trigonometry kernel for a single edge quadrilateral.

Every edge of the embedded graph carries a spherical quadrilateral spanned
by the two circle centers v, w and the two adjacent face centers.  The
functions here compute the center angles of that quadrilateral, the total
geodesic curvature contributed by each circular arc, and the analytic
partial derivatives with respect to the log-cotangent coordinates
K = ln cot r.

All functions accept scalars or numpy arrays (broadcasting elementwise)
and work in radians.  Radii live in (0, pi/2), intersection angles in
(0, pi/2].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

HALF_PI = 0.5 * np.pi


def _check_radius(r, name: str) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    # NaN and infinities fail the comparisons, so one reduction covers all.
    if not bool(np.all((r > 0.0) & (r < HALF_PI))):
        raise DomainError(f"{name} must lie in the open interval (0, pi/2)")
    return r


def _check_phi(phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    if not bool(np.all((phi > 0.0) & (phi <= HALF_PI))):
        raise DomainError("intersection angle must lie in (0, pi/2]")
    return phi


def r_to_k(r):
    """Log-cotangent coordinate K = ln cot r, strictly decreasing on (0, pi/2)."""
    r = _check_radius(r, "r")
    out = np.log(np.cos(r)) - np.log(np.sin(r))
    return float(out) if out.ndim == 0 else out


def k_to_r(k):
    """Inverse coordinate change r = arccot(exp K).

    Evaluated as arctan(exp(-|K|)) on the matching side so that no
    intermediate exp overflows; accurate for |K| up to ~700.
    """
    k = np.asarray(k, dtype=float)
    if np.any(~np.isfinite(k)):
        raise DomainError("K must be finite")
    small = np.arctan(np.exp(-np.abs(k)))
    out = np.where(k >= 0.0, small, HALF_PI - small)
    return float(out) if out.ndim == 0 else out


def quad_angle(r_v, r_w, phi):
    """Center angle theta at the circle of radius ``r_v`` across one edge.

    Spherical cotangent four-part relation for the edge quadrilateral:

        cot(theta/2) = (cot r_w sin r_v + cos r_v cos phi) / sin phi

    computed branch-free as 2 atan2(sin phi, .) so the result stays
    accurate when the right-hand side crosses small values (theta near pi).
    Swapping ``r_v`` and ``r_w`` gives the angle at the other endpoint.
    """
    r_v = _check_radius(r_v, "r_v")
    r_w = _check_radius(r_w, "r_w")
    phi = _check_phi(phi)
    ct = np.cos(r_w) / np.sin(r_w) * np.sin(r_v) + np.cos(r_v) * np.cos(phi)
    out = 2.0 * np.arctan2(np.sin(phi), ct)
    return float(out) if out.ndim == 0 else out


def side_curvature(theta, r):
    """Total geodesic curvature theta * cos r of one circular arc."""
    theta = np.asarray(theta, dtype=float)
    if np.any(theta <= 0.0) or np.any(theta >= 2.0 * np.pi):
        raise DomainError("theta must lie in (0, 2*pi)")
    r = _check_radius(r, "r")
    out = theta * np.cos(r)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class EdgeSideGeometry:
    """Angles, arc curvatures, and K-derivatives for one edge quadrilateral.

    ``d_cross`` is the mixed partial dL_v/dK_w (equal to dL_w/dK_v and
    always negative); ``d_pair_v`` is d(L_v + L_w)/dK_v (always positive),
    likewise ``d_pair_w``.  The own-coordinate derivatives follow as
    ``d_pair - d_cross``, which is what makes the per-edge 2x2 derivative
    block strictly diagonally dominant.
    """

    theta_v: float | np.ndarray
    theta_w: float | np.ndarray
    L_v_side: float | np.ndarray
    L_w_side: float | np.ndarray
    d_cross: float | np.ndarray
    d_pair_v: float | np.ndarray
    d_pair_w: float | np.ndarray

    @property
    def d_own_v(self):
        """dL_v/dK_v."""
        return self.d_pair_v - self.d_cross

    @property
    def d_own_w(self):
        """dL_w/dK_w."""
        return self.d_pair_w - self.d_cross


def _edge_kernel(r_v, r_w, phi) -> EdgeSideGeometry:
    """Check-free kernel; callers must guarantee the domains."""
    sin_rv, cos_rv = np.sin(r_v), np.cos(r_v)
    sin_rw, cos_rw = np.sin(r_w), np.cos(r_w)
    sin_phi, cos_phi = np.sin(phi), np.cos(phi)

    half_v = np.arctan2(sin_phi, cos_rw / sin_rw * sin_rv + cos_rv * cos_phi)
    half_w = np.arctan2(sin_phi, cos_rv / sin_rv * sin_rw + cos_rw * cos_phi)
    theta_v = 2.0 * half_v
    theta_w = 2.0 * half_w

    d_cross = -2.0 * cos_rv * cos_rw * np.sin(half_v) * np.sin(half_w) / sin_phi
    d_pair_v = sin_rv * sin_rv * cos_rv * (theta_v - np.sin(theta_v))
    d_pair_w = sin_rw * sin_rw * cos_rw * (theta_w - np.sin(theta_w))

    return EdgeSideGeometry(
        theta_v, theta_w, theta_v * cos_rv, theta_w * cos_rw,
        d_cross, d_pair_v, d_pair_w,
    )


def edge_side_geometry(r_v, r_w, phi) -> EdgeSideGeometry:
    """Evaluate both side angles and all analytic partials for one edge.

    The derivative formulas:

        dL_v/dK_w          = -2 cos r_v cos r_w sin(theta_v/2) sin(theta_w/2) / sin phi
        d(L_v + L_w)/dK_v  = sin^2 r_v cos r_v (theta_v - sin theta_v)
    """
    r_v = _check_radius(r_v, "r_v")
    r_w = _check_radius(r_w, "r_w")
    phi = _check_phi(phi)
    g = _edge_kernel(r_v, r_w, phi)
    if np.asarray(g.theta_v).ndim == 0:
        return EdgeSideGeometry(*(float(np.asarray(x)) for x in (
            g.theta_v, g.theta_w, g.L_v_side, g.L_w_side,
            g.d_cross, g.d_pair_v, g.d_pair_w)))
    return g
