"""Scene files: a surface, a region on it, a sample budget and test-function centre.

Example::

    {"name": "torus",
     "surface": {"kind": "torus", "R": 3, "r": 2},
     "region": {"kind": "intersection", "parts": [
         {"kind": "halfspace", "a": -0.25, "b": 1, "c": 4, "d": 0},
         {"kind": "ball_exterior", "center": [0, 4, 0], "radius": 2.449}]},
     "M0": 100000,
     "P0": [0, -3, 2]}

``sigma_J`` may be given when the region area is known exactly.
"""

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from . import surface as sf
from .lowdisc import HaltonStream, ParamDomain


@dataclass
class Scene:
    name: str
    surface: sf.ParamSurface
    region: sf.Region
    M0: int
    P0: np.ndarray
    sigma_J: Optional[float] = None
    source: Optional[dict] = None

    def sample(self, M0=None, start_index=1):
        stream = HaltonStream(next_index=start_index)
        return sf.sample_region(self.surface, self.region, M0 or self.M0, stream, self.sigma_J)


def region_from_dict(d):
    kind = d["kind"]
    if kind == "full":
        return sf.FullRegion()
    if kind == "halfspace":
        return sf.halfspace_region(d["a"], d["b"], d["c"], d.get("d", 0.0))
    if kind == "ball":
        return sf.ball_region(d["center"], d["radius"])
    if kind == "ball_exterior":
        return sf.ball_exterior_region(d["center"], d["radius"])
    if kind == "spherical_polygon":
        if "vertices" in d:
            V = np.asarray(d["vertices"], dtype=float)
        else:
            V = sf.lonlat_to_xyz(d["lonlat"], d.get("r", 1.0))
        return sf.SphericalPolygon(V)
    if kind == "intersection":
        return sf.region_intersection([region_from_dict(p) for p in d["parts"]])
    if kind == "union":
        return sf.region_union([region_from_dict(p) for p in d["parts"]])
    if kind == "complement":
        return sf.Complement(region_from_dict(d["part"]))
    raise ValueError(f"unknown region kind {kind!r}")


def _find_polygon(region):
    if isinstance(region, sf.SphericalPolygon):
        return region
    for part in getattr(region, "parts", ()):
        found = _find_polygon(part)
        if found is not None:
            return found
    return None


def surface_from_dict(d, region=None):
    kind = d["kind"]
    if kind == "sphere_cap":
        r = float(d.get("r", 1.0))
        poly = _find_polygon(region) if region is not None else None
        if poly is not None:
            c = d.get("c", "auto")
            c = poly.bounding_cap_height() if c == "auto" else float(c)
            return sf.sphere_cap(r, c, frame=poly.rotation.T)
        return sf.sphere_cap(r, float(d.get("c", -1.0)))
    if kind == "torus":
        return sf.torus(float(d["R"]), float(d["r"]))
    if kind == "franke_graph":
        F, grad = sf.franke()
        dom = d.get("domain", [0.0, 1.0, 0.0, 1.0])
        return sf.cartesian_graph(F, grad, ParamDomain(*dom), int(d.get("area_samples", 10**6)), name="franke_graph")
    raise ValueError(f"unknown surface kind {kind!r}")


def scene_from_dict(d):
    region = region_from_dict(d.get("region", {"kind": "full"}))
    surf = surface_from_dict(d["surface"], region)
    if "P0" in d:
        P0 = np.asarray(d["P0"], dtype=float)
    else:
        poly = _find_polygon(region)
        P0 = poly.centroid_point if poly is not None else np.zeros(3)
    return Scene(
        name=d.get("name", surf.name),
        surface=surf,
        region=region,
        M0=int(d.get("M0", 100000)),
        P0=P0,
        sigma_J=d.get("sigma_J"),
        source=d,
    )


def builtin_scenes():
    return sorted(p.name[:-5] for p in resources.files("qsurf").joinpath("scenes").iterdir() if p.name.endswith(".json"))


def load_scene(path):
    """Load a scene from a JSON file, or by builtin name (e.g. ``"torus"``)."""
    p = Path(path)
    if p.is_file():
        text = p.read_text()
    else:
        res = resources.files("qsurf").joinpath("scenes").joinpath(f"{path}.json")
        if not res.is_file():
            raise FileNotFoundError(f"no scene file or builtin scene named {path!r}")
        text = res.read_text()
    return scene_from_dict(json.loads(text))
