import math

import numpy as np
import pytest

from conftest import SQUARE, random_guards
from thetaguard.oracle import rasterize
from thetaguard.pipeline import theta_region
from thetaguard.report import (
    figure_bytes,
    loglog_slope,
    pgm_text,
    read_pgm,
    region_figure,
    write_csv,
    write_region_svg,
)


def test_pgm_roundtrip_and_orientation():
    r = rasterize(SQUARE, math.pi / 3, bbox=((-1, -1), (2, 3)), resolution=(6, 8))
    img = read_pgm(pgm_text(r, "f"))
    assert img.shape == (8, 6)
    expected = np.rint(np.clip(r.f, 0, 2 * math.pi) / (2 * math.pi) * 255).astype(int)
    assert np.array_equal(img, expected[::-1])
    mask = read_pgm(pgm_text(r, "mask"))
    assert set(np.unique(mask)) <= {0, 255}
    assert np.array_equal(mask[::-1] == 255, r.guarded)


def test_read_pgm_rejects_binary():
    with pytest.raises(ValueError):
        read_pgm("P5\n1 1\n255\n0\n")


def test_svg_is_deterministic(tmp_path):
    G = random_guards(5, 20)
    R = theta_region(G, 2.0)
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    write_region_svg(str(a), R, G, title="t")
    write_region_svg(str(b), R, G, title="t")
    assert a.read_bytes() == b.read_bytes()
    assert b"<svg" in a.read_bytes()
    assert figure_bytes(region_figure(R, G)) == figure_bytes(region_figure(R, G))


def test_loglog_slope():
    xs = [10, 20, 40, 80]
    assert loglog_slope(xs, [3 * x**1.5 for x in xs]) == pytest.approx(1.5)


def test_csv_writes_floats_exactly(tmp_path):
    p = tmp_path / "t.csv"
    write_csv(str(p), ["a", "b"], [(1, 0.1), (2, float("inf"))])
    assert p.read_text() == "a,b\n1,0.1\n2,inf\n"
