"""
Defining maps in the map language
=================================

Maps are written as `map name(var) = expr`, with `abs(...)` and guarded
`piecewise { ... }` blocks. Derivatives are taken symbolically and the
kinks are collected as breakpoints.
"""

from pathlib import Path

from lipdyn.dsl import parse_map, pretty_print
from lipdyn.maps import from_dsl
from lipdyn.orbit import iterate

maps_dir = Path(__file__).resolve().parent.parent / "maps"

for path in sorted(maps_dir.glob("*.map")):
    m = parse_map(path.read_text(encoding="utf-8"))
    print(f"{path.name}:")
    print("  body       ", pretty_print(m.body))
    print("  derivative ", pretty_print(m.derivative))
    print("  breakpoints", m.breakpoints)

# the orbit of 0.5 under the piecewise map squares its way to 0
pw = from_dsl(parse_map((maps_dir / "piecewise.map").read_text(encoding="utf-8")))
print(iterate(pw, 0.5, 4).samples)
