"""
Writing principal maps as SVG
=============================

Maps are plain SVG files. For the scaled rodent table the first three axes
only separate the blocks, so the informative map uses axes 4 and 5.
"""
import sys
from pathlib import Path

from sica import ca_decompose, load_fixture, mfca, principal_map, to_correspondence
from sica.ca import first_non_unit_dims
from sica.report import map_to_svg

out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
t = load_fixture("rodent")

ca_map = principal_map(ca_decompose(to_correspondence(t)), (1, 2))
(out / "rodent_ca.svg").write_text(map_to_svg(ca_map, "CA of rodent counts"), encoding="utf-8")

res = mfca(t)
dims = first_non_unit_dims(res.decomposition)
mf_map = principal_map(res.decomposition, dims)
(out / "rodent_mfca.svg").write_text(map_to_svg(mf_map, "mfCA of rodent counts"), encoding="utf-8")
print("wrote maps on dims (1, 2) and", dims)
