"""Print the numerical dimension of the polynomial space on each builtin scene.

Compare with (n+1)^2 on the sphere and C(n+3,3) - C(n-1,3) on the torus.
"""
import sys
from math import comb

from qsurf.polyspace import select_basis
from qsurf.scene import builtin_scenes, load_scene

max_degree = int(sys.argv[1]) if len(sys.argv) > 1 else 12
for name in builtin_scenes():
    S = load_scene(name).sample()
    dims = [select_basis(S.points, n)[0].N for n in range(max_degree + 1)]
    print(f"{name:>18}: {dims}")
print(f"{'sphere (n+1)^2':>18}: {[(n + 1) ** 2 for n in range(max_degree + 1)]}")
print(f"{'torus formula':>18}: {[comb(n + 3, 3) - (comb(n - 1, 3) if n >= 4 else 0) for n in range(max_degree + 1)]}")
print(f"{'full space':>18}: {[comb(n + 3, 3) for n in range(max_degree + 1)]}")
