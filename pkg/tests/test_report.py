import json

import numpy as np
import pytest

from sica import ca_decompose, load_fixture, mfca, principal_map, to_correspondence
from sica.ca import first_non_unit_dims
from sica.report import coordinates_to_csv, dumps, map_to_svg, sigmas_to_csv


@pytest.fixture(scope="module")
def rodent_map():
    d = ca_decompose(to_correspondence(load_fixture("rodent")))
    return principal_map(d, (1, 2))


def test_svg_is_deterministic(rodent_map):
    a = map_to_svg(rodent_map, "rodent")
    d = ca_decompose(to_correspondence(load_fixture("rodent")))
    b = map_to_svg(principal_map(d, (1, 2)), "rodent")
    assert a == b


def test_svg_content(rodent_map):
    svg = map_to_svg(rodent_map, "t")
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert 'width="800" height="800"' in svg
    assert svg.count('<circle class="row"') == 28
    assert svg.count('<rect class="col"') == 9
    assert ">site1<" in svg and ">rod9<" in svg
    assert "Dim 1 (" in svg and "Dim 2 (" in svg


def test_svg_points_inside_canvas(rodent_map):
    import re
    svg = map_to_svg(rodent_map)
    xs = [float(x) for x in re.findall(r'cx="([-\d.]+)"', svg)]
    ys = [float(y) for y in re.findall(r'cy="([-\d.]+)"', svg)]
    assert min(xs) >= 69.9 and max(xs) <= 730.1
    assert min(ys) >= 69.9 and max(ys) <= 730.1


def test_svg_escapes_labels():
    from sica import CountTable
    t = CountTable(np.array([[1.0, 2, 3], [4, 5, 1], [2, 1, 7]]), ("a<b", "c&d", "e"), ("x", "y", "z"))
    svg = map_to_svg(principal_map(ca_decompose(to_correspondence(t))))
    assert "a&lt;b" in svg and "c&amp;d" in svg


def test_mfca_map_skips_unit_axes():
    res = mfca(load_fixture("rodent"))
    m = principal_map(res.decomposition, first_non_unit_dims(res.decomposition))
    assert m.dims == (4, 5)
    assert "Dim 4 (" in map_to_svg(m)


def test_sigmas_csv():
    d = ca_decompose(to_correspondence(load_fixture("rodent")))
    lines = sigmas_to_csv(d, ["h"]).splitlines()
    assert lines[0] == "# h" and lines[1] == "dim,sigma,inertia,share"
    assert lines[2].startswith("1,0.8639")


def test_coordinates_csv_rows():
    d = ca_decompose(to_correspondence(load_fixture("example1")))
    lines = coordinates_to_csv(d).splitlines()
    assert len(lines) == 1 + 6 + 5
    assert lines[1].startswith("row,r1,")


def test_dumps_sorted():
    assert json.loads(dumps({"b": 1, "a": 0.1})) == {"a": 0.1, "b": 1}
    assert dumps({"b": 1, "a": 2}).index('"a"') < dumps({"b": 1, "a": 2}).index('"b"')
