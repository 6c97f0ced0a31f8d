"""Parametric surfaces, region predicates and uniform sampling on regions.

A surface is an analytic map ``Psi: D -> R^3`` on an open parameter rectangle
together with its area element ``|d_u Psi x d_v Psi|``. Uniform points with
respect to surface measure are obtained by QMC rejection sampling of the
area element; a region is any boolean predicate on surface points.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .lowdisc import HaltonStream, ParamDomain, halton, rejection_sample


@dataclass(frozen=True)
class ParamSurface:
    name: str
    psi: Callable  # (u, v) arrays -> (n, 3)
    area_element: Callable  # (u, v) arrays -> (n,)
    domain: ParamDomain
    total_area: float
    element_bound: float
    area_is_exact: bool = True
    implicit: Optional[Callable] = None  # (n, 3) -> residual, zero on the surface
    params: dict = field(default_factory=dict)

    def __call__(self, u, v):
        return self.psi(np.asarray(u, dtype=float), np.asarray(v, dtype=float))


def sphere_cap(r, c, frame=None):
    """Polar cap ``z >= c r`` of the sphere of radius ``r``.

    ``Psi(u, v) = r (sqrt(1-u^2) cos v, sqrt(1-u^2) sin v, u)`` on
    ``(c, 1) x (0, 2 pi)``. The map is area preserving with constant element
    ``r**2``. ``frame`` is an optional orthogonal matrix applied to the image,
    used to place the cap around an arbitrary axis.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    if not -1.0 <= c < 1.0:
        raise ValueError("cap height c must lie in [-1, 1)")
    frame = None if frame is None else np.asarray(frame, dtype=float)
    if frame is not None and not np.allclose(frame @ frame.T, np.eye(3), atol=1e-12):
        raise ValueError("frame must be orthogonal")

    def psi(u, v):
        s = np.sqrt(np.clip(1.0 - u * u, 0.0, None))
        P = r * np.column_stack([s * np.cos(v), s * np.sin(v), u * np.ones_like(v)])
        return P if frame is None else P @ frame.T

    def element(u, v):
        return np.full(np.broadcast(u, v).shape, r * r)

    return ParamSurface(
        name="sphere_cap",
        psi=psi,
        area_element=element,
        domain=ParamDomain(c, 1.0, 0.0, 2 * np.pi),
        total_area=2 * np.pi * r * r * (1.0 - c),
        element_bound=r * r,
        implicit=lambda P: np.einsum("ij,ij->i", P, P) - r * r,
        params={"r": r, "c": c},
    )


def torus(R, r):
    """Torus with major radius ``R`` and minor radius ``r``; ``u`` is the minor angle."""
    if not 0 < r < R:
        raise ValueError("need 0 < r < R")

    def psi(u, v):
        rho = R + r * np.cos(u)
        return np.column_stack([rho * np.cos(v), rho * np.sin(v), r * np.sin(u)])

    def element(u, v):
        return r * (R + r * np.cos(u)) * np.ones_like(v)

    def implicit(P):
        return (np.hypot(P[:, 0], P[:, 1]) - R) ** 2 + P[:, 2] ** 2 - r * r

    return ParamSurface(
        name="torus",
        psi=psi,
        area_element=element,
        domain=ParamDomain(0.0, 2 * np.pi, 0.0, 2 * np.pi),
        total_area=4 * np.pi**2 * R * r,
        element_bound=r * (R + r),
        implicit=implicit,
        params={"R": R, "r": r},
    )


def franke():
    """Franke's function and its exact gradient, both vectorized."""

    def terms(u, v):
        e1 = 0.75 * np.exp(-((9 * u - 2) ** 2 + (9 * v - 2) ** 2) / 4)
        e2 = 0.75 * np.exp(-((9 * u + 1) ** 2) / 49 - ((9 * v + 1) ** 2) / 49)
        e3 = 0.5 * np.exp(-((9 * u - 7) ** 2 + (9 * v - 3) ** 2) / 4)
        e4 = -0.2 * np.exp(-((9 * u - 4) ** 2) - (9 * v - 7) ** 2)
        return e1, e2, e3, e4

    def F(u, v):
        return sum(terms(u, v))

    def grad_F(u, v):
        e1, e2, e3, e4 = terms(u, v)
        du = (
            e1 * (-9 * (9 * u - 2) / 2)
            + e2 * (-18 * (9 * u + 1) / 49)
            + e3 * (-9 * (9 * u - 7) / 2)
            + e4 * (-18 * (9 * u - 4))
        )
        dv = (
            e1 * (-9 * (9 * v - 2) / 2)
            + e2 * (-18 * (9 * v + 1) / 49)
            + e3 * (-9 * (9 * v - 3) / 2)
            + e4 * (-18 * (9 * v - 7))
        )
        return du, dv

    return F, grad_F


def cartesian_graph(F, grad_F, domain=None, area_samples=10**6, name="graph"):
    """Graph ``(u, v, F(u, v))`` over a parameter rectangle.

    The gradient is checked against central differences at 100 Halton probes.
    The surface area is a Halton-mean estimate over ``area_samples`` points
    and the element bound is a 256x256 grid maximum inflated by 5%.
    """
    domain = domain or ParamDomain(0.0, 1.0, 0.0, 1.0)

    probes = domain.map_unit(halton(100, 1, (2, 3)))
    pu, pv = probes[:, 0], probes[:, 1]
    h = 1e-6
    gu, gv = grad_F(pu, pv)
    fdu = (F(pu + h, pv) - F(pu - h, pv)) / (2 * h)
    fdv = (F(pu, pv + h) - F(pu, pv - h)) / (2 * h)
    err = max(np.max(np.abs(gu - fdu)), np.max(np.abs(gv - fdv)))
    if err > 1e-6:
        raise ValueError(f"grad_F inconsistent with F (max deviation {err:.2e})")

    def psi(u, v):
        return np.column_stack([u, v, F(u, v)])

    def element(u, v):
        du, dv = grad_F(u, v)
        return np.sqrt(1.0 + du * du + dv * dv)

    g = (np.arange(256) + 0.5) / 256
    G = domain.map_unit(np.column_stack([np.repeat(g, 256), np.tile(g, 256)]))
    bound = 1.05 * float(np.max(element(G[:, 0], G[:, 1])))

    uv = domain.map_unit(halton(area_samples, 1, (2, 3)))
    area = domain.area * float(np.mean(element(uv[:, 0], uv[:, 1])))

    return ParamSurface(
        name=name,
        psi=psi,
        area_element=element,
        domain=domain,
        total_area=area,
        element_bound=bound,
        area_is_exact=False,
        implicit=lambda P: P[:, 2] - F(P[:, 0], P[:, 1]),
    )


# --------------------------------------------------------------------------
# Regions


class Region:
    """Boolean predicate on points of R^3; ``contains`` is vectorized."""

    def contains(self, P):
        raise NotImplementedError

    def __call__(self, P):
        P = np.atleast_2d(np.asarray(P, dtype=float))
        return self.contains(P)

    def __and__(self, other):
        return Intersection((self, other))

    def __or__(self, other):
        return Union((self, other))

    def __invert__(self):
        return Complement(self)


@dataclass(frozen=True, eq=False)
class FullRegion(Region):
    def contains(self, P):
        return np.ones(len(P), dtype=bool)

    def to_dict(self):
        return {"kind": "full"}


@dataclass(frozen=True, eq=False)
class HalfSpace(Region):
    """Closed half-space ``a x + b y + c z + d >= 0``."""

    a: float
    b: float
    c: float
    d: float = 0.0

    def __post_init__(self):
        if self.a == 0 and self.b == 0 and self.c == 0:
            raise ValueError("half-space normal must be nonzero")

    def contains(self, P):
        return P @ np.array([self.a, self.b, self.c]) + self.d >= 0

    def to_dict(self):
        return {"kind": "halfspace", "a": self.a, "b": self.b, "c": self.c, "d": self.d}


@dataclass(frozen=True, eq=False)
class Ball(Region):
    """Closed ball (``inside=True``) or closed exterior of the open ball."""

    center: tuple
    radius: float
    inside: bool = True

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")

    def contains(self, P):
        d2 = np.sum((P - np.asarray(self.center, dtype=float)) ** 2, axis=1)
        r2 = self.radius**2
        return d2 <= r2 if self.inside else d2 >= r2

    def to_dict(self):
        kind = "ball" if self.inside else "ball_exterior"
        return {"kind": kind, "center": list(self.center), "radius": self.radius}


def halfspace_region(a, b, c, d=0.0):
    return HalfSpace(a, b, c, d)


def ball_exterior_region(center, radius):
    return Ball(tuple(float(x) for x in center), float(radius), inside=False)


def ball_region(center, radius):
    return Ball(tuple(float(x) for x in center), float(radius), inside=True)


@dataclass(frozen=True, eq=False)
class Intersection(Region):
    parts: tuple

    def __post_init__(self):
        if len(self.parts) == 0:
            raise ValueError("intersection of no regions")

    def contains(self, P):
        out = self.parts[0].contains(P)
        for part in self.parts[1:]:
            out &= part.contains(P)
        return out

    def to_dict(self):
        return {"kind": "intersection", "parts": [p.to_dict() for p in self.parts]}


@dataclass(frozen=True, eq=False)
class Union(Region):
    parts: tuple

    def __post_init__(self):
        if len(self.parts) == 0:
            raise ValueError("union of no regions")

    def contains(self, P):
        out = self.parts[0].contains(P)
        for part in self.parts[1:]:
            out |= part.contains(P)
        return out

    def to_dict(self):
        return {"kind": "union", "parts": [p.to_dict() for p in self.parts]}


@dataclass(frozen=True, eq=False)
class Complement(Region):
    part: Region

    def contains(self, P):
        return ~self.part.contains(P)

    def to_dict(self):
        return {"kind": "complement", "part": self.part.to_dict()}


def region_intersection(regions):
    return Intersection(tuple(regions))


def region_union(regions):
    return Union(tuple(regions))


def rotation_to_north(direction):
    """Orthogonal matrix taking ``direction`` to the positive z axis."""
    a = np.asarray(direction, dtype=float)
    a = a / np.linalg.norm(a)
    z = np.array([0.0, 0.0, 1.0])
    c = float(a @ z)
    if c > 1 - 1e-15:
        return np.eye(3)
    if c < -1 + 1e-15:
        return np.diag([1.0, -1.0, -1.0])
    k = np.cross(a, z)
    s = np.linalg.norm(k)
    k /= s
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + s * K + (1 - c) * (K @ K)


def stereographic(P, r):
    """Projection from the south pole onto the tangent plane at the north pole."""
    den = r + P[:, 2]
    return np.column_stack([2 * r * P[:, 0] / den, 2 * r * P[:, 1] / den])


def _in_polygon(xy, poly):
    """Even-odd test of planar points against a closed polygon; edges count as inside."""
    x, y = xy[:, 0][:, None], xy[:, 1][:, None]
    x0, y0 = poly[:, 0][None, :], poly[:, 1][None, :]
    x1, y1 = np.roll(poly[:, 0], -1)[None, :], np.roll(poly[:, 1], -1)[None, :]

    straddle = (y0 > y) != (y1 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xcross = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
    inside = np.count_nonzero(straddle & (x < xcross), axis=1) % 2 == 1

    ex, ey = x1 - x0, y1 - y0
    cross = ex * (y - y0) - ey * (x - x0)
    dot = ex * (x - x0) + ey * (y - y0)
    length2 = ex * ex + ey * ey
    scale = np.sqrt(length2)
    on_edge = (np.abs(cross) <= 1e-14 * scale * (1 + np.abs(x) + np.abs(y))) & (dot >= 0) & (dot <= length2)
    return inside | on_edge.any(axis=1)


class SphericalPolygon(Region):
    """Region of the sphere bounded by a polygon drawn in stereographic coordinates.

    The vertex centroid is rotated to the north pole and the rotated
    vertices are projected from the south pole; membership tests the
    projected point against the planar polygon with straight edges.
    """

    def __init__(self, vertices):
        V = np.asarray(vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] != 3 or len(V) < 3:
            raise ValueError("need at least 3 vertices in R^3")
        norms = np.linalg.norm(V, axis=1)
        r = float(norms[0])
        if r <= 0 or np.any(np.abs(norms - r) > 1e-10 * r):
            raise ValueError("vertices must lie on a common sphere")
        centroid = V.mean(axis=0)
        if np.linalg.norm(centroid) <= 1e-12 * r:
            raise ValueError("degenerate vertex centroid")
        self.vertices = V
        self.radius = r
        self.center_direction = centroid / np.linalg.norm(centroid)
        self.rotation = rotation_to_north(self.center_direction)
        W = V @ self.rotation.T
        if np.any(W[:, 2] <= -r * (1 - 1e-12)):
            raise ValueError("a vertex sits at the south pole after rotation")
        self.plane_vertices = stereographic(W, r)

    def contains(self, P):
        W = P @ self.rotation.T
        ok = W[:, 2] + self.radius > 1e-12 * self.radius
        out = np.zeros(len(P), dtype=bool)
        if ok.any():
            out[ok] = _in_polygon(stereographic(W[ok], self.radius), self.plane_vertices)
        return out

    def bounding_cap_height(self):
        """Normalized height ``c`` of a north-polar cap (rotated frame) containing the region."""
        rho = float(np.max(np.linalg.norm(self.plane_vertices, axis=1)))
        phi = 2 * np.arctan(rho / (2 * self.radius))
        return max(-1.0, float(np.cos(phi)) - 1e-9)

    @property
    def centroid_point(self):
        return self.radius * self.center_direction

    def to_dict(self):
        return {"kind": "spherical_polygon", "vertices": self.vertices.tolist()}


def spherical_polygon_region(vertices):
    """Return ``(region, rotation)``; ``rotation`` takes the centroid to the north pole."""
    reg = SphericalPolygon(vertices)
    return reg, reg.rotation


def lonlat_to_xyz(lonlat_deg, r=1.0):
    lon, lat = np.radians(np.asarray(lonlat_deg, dtype=float)).T
    return r * np.column_stack([np.cos(lat) * np.cos(lon), np.cos(lat) * np.sin(lon), np.sin(lat)])


# --------------------------------------------------------------------------
# Sampling


class EmptySampleError(RuntimeError):
    pass


@dataclass
class SampleSet:
    points: np.ndarray  # (M, 3)
    params: np.ndarray  # (M, 2)
    sigma_J: float
    M0: int  # raw attempts
    M_S: int  # attempts accepted onto the bounding surface
    sigma_S: float = 0.0

    @property
    def M(self):
        return len(self.points)

    def head(self, M):
        """First ``M`` points, keeping ``sigma_J`` (a prefix of a QMC sequence)."""
        return SampleSet(self.points[:M], self.params[:M], self.sigma_J, self.M0, self.M_S, self.sigma_S)


def sample_region(surface, region, M0, stream=None, sigma_J=None):
    """Uniform QMC points on ``region`` of ``surface`` (surface measure).

    Rejection samples ``M0`` stream triples against the area element; the
    ``M_S`` accepted points lie on the surface and the ``M`` of those inside
    the region form the sample. ``sigma_J`` defaults to the ratio estimate
    ``sigma(S) * M / M_S``.
    """
    stream = stream or HaltonStream()
    uv, _, _ = rejection_sample(stream, surface.domain, surface.area_element, surface.element_bound, M0)
    P = surface(uv[:, 0], uv[:, 1])
    keep = region.contains(P) if len(P) else np.zeros(0, dtype=bool)
    M = int(np.count_nonzero(keep))
    if M == 0:
        raise EmptySampleError("region contains none of the sampled points")
    if sigma_J is None:
        sigma_J = surface.total_area * M / len(uv)
    return SampleSet(P[keep], uv[keep], float(sigma_J), int(M0), len(uv), surface.total_area)
