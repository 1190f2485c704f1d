import numpy as np
import pytest

from caplab.figures import FIGURE_RADII, Panel, figure_panels, render_panel, write_figure1
from caplab.io import read_json

import oracles


@pytest.fixture(scope="module")
def panels():
    return figure_panels()


def test_panel_radii(panels):
    top = [p for p in panels if p.row == "top"]
    assert len(panels) == 10 and len(top) == 5
    for p, want in zip(top, oracles.FIGURE_RADII):
        assert abs(p.R - want) <= oracles.FIGURE_RADIUS_TOL


def test_bottom_row_is_dual(panels):
    for top, bottom in zip(panels[::2], panels[1::2]):
        assert bottom.R == pytest.approx(np.pi / 2, abs=1e-12)
        assert bottom.gamma == pytest.approx(min(top.R, np.pi - top.R), abs=1e-10)


def test_necks_decrease_left_to_right(panels):
    necks = [p.r0 for p in panels[::2]]
    assert all(a > b for a, b in zip(necks, necks[1:]))


def test_render_is_deterministic_svg():
    curve = np.array([[0.0, 0.0], [0.5, 0.5]])
    p = Panel("demo", "top", 1.0, 1.0, np.pi / 2, 0.8, "pre", curve, "R = 1.0000")
    a, b = render_panel(p), render_panel(p)
    assert a == b and a.startswith("<?xml") and a.rstrip().endswith("</svg>")
    assert 'version="1.1"' in a and "stroke-dasharray" in a


def test_write_figure1(tmp_path):
    index = write_figure1(tmp_path)
    files = sorted(f.name for f in tmp_path.glob("*.svg"))
    assert len(files) == 10 and len(index["panels"]) == 10
    assert "x0 rightward" in read_json(tmp_path / "index.json")["convention"]
    assert len(FIGURE_RADII) == 5
