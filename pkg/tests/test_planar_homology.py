import numpy as np
import pytest

from evasion_kit.planar_homology import (
    HomologyError,
    alexander_image,
    dump_cycles_svg,
    holes,
    winding,
)
from evasion_kit.rasterize import (
    components,
    count_holes,
    grid_for_scenario,
    label_components,
    rasterize_fiber,
)
from evasion_kit.scenario import builtin_scenario


def _mask(rows):
    return np.array([[ch == "#" for ch in row] for row in rows])


# ---------------------------------------------------------------------------
# holes
# ---------------------------------------------------------------------------


def test_holes_simple_ring():
    region = _mask([
        "#####",
        "#...#",
        "#.#.#",
        "#...#",
        "#####",
    ])
    basis = holes(region)
    assert basis.count == 1
    hole = basis.holes[0]
    assert hole.representative == (1, 1)
    # the hole's fill includes the island at (2, 2)
    assert winding(hole.cycle, (2.5, 2.5)) == 1
    assert winding(hole.cycle, (0.5, 0.5)) == 0
    assert len(hole.cells) == 8


def test_holes_ordering_and_counts():
    region = _mask([
        "#######",
        "#.###.#",
        "#######",
    ])
    basis = holes(region)
    assert basis.count == 2
    assert [h.representative for h in basis.holes] == [(1, 1), (1, 5)]


def test_holes_nested():
    region = np.ones((9, 9), dtype=bool)
    region[2:7, 2:7] = False
    region[3:6, 3:6] = True
    region[4, 4] = False
    basis = holes(region)
    assert basis.count == 2
    outer, inner = basis.holes
    assert outer.representative == (2, 2)
    assert inner.representative == (4, 4)
    # the outer cycle encloses the island and the inner hole as well
    assert winding(outer.cycle, (4.5, 4.5)) == 1
    assert winding(outer.cycle, (3.5, 3.5)) == 1
    assert winding(inner.cycle, (4.5, 4.5)) == 1
    assert winding(inner.cycle, (3.5, 3.5)) == 0


def test_holes_none():
    assert holes(np.ones((4, 4), dtype=bool)).count == 0
    assert holes(np.zeros((4, 4), dtype=bool)).count == 0
    notch = _mask([
        "##.##",
        "##.##",
        "#####",
    ])
    assert holes(notch).count == 0


def test_holes_requires_2d():
    with pytest.raises(HomologyError):
        holes(np.ones(5, dtype=bool))


def test_holes_random_masks_wind_correctly():
    rng = np.random.default_rng(17)
    for _ in range(60):
        mask = rng.random((14, 14)) < 0.5
        basis = holes(mask)
        assert basis.count == count_holes(mask)
        border = [(iy, ix) for iy in range(14) for ix in range(14)
                  if (iy in (0, 13) or ix in (0, 13)) and not mask[iy, ix]]
        for hole in basis.holes:
            assert hole.cycle[0] == hole.cycle[-1]
            for flat in hole.cells:
                iy, ix = divmod(int(flat), 14)
                assert winding(hole.cycle, (ix + 0.5, iy + 0.5)) == 1
            for iy, ix in border:
                assert winding(hole.cycle, (ix + 0.5, iy + 0.5)) == 0


# ---------------------------------------------------------------------------
# winding
# ---------------------------------------------------------------------------

_SQUARE = ((0, 0), (2, 0), (2, 2), (0, 2), (0, 0))


def test_winding_square():
    assert winding(_SQUARE, (1.0, 1.0)) == 1
    assert winding(_SQUARE, (3.0, 1.0)) == 0
    assert winding(_SQUARE, (-1.0, 1.0)) == 0
    assert winding(_SQUARE, (1.0, 3.0)) == 0


def test_winding_orientation_and_multiplicity():
    reverse = tuple(reversed(_SQUARE))
    assert winding(reverse, (1.0, 1.0)) == -1
    doubled = _SQUARE[:-1] + _SQUARE
    assert winding(doubled, (1.0, 1.0)) == 2


def test_winding_rejects_degenerate_queries():
    with pytest.raises(HomologyError):
        winding(_SQUARE, (2.0, 1.0))
    with pytest.raises(HomologyError):
        winding(_SQUARE, (1.0, 0.0))
    with pytest.raises(HomologyError):
        winding(((0, 0), (1, 0)), (5.0, 5.0))


# ---------------------------------------------------------------------------
# duality partition
# ---------------------------------------------------------------------------


def _fiber(name, t, cells=128):
    s = builtin_scenario(name)
    return rasterize_fiber(s, t, grid_for_scenario(s, cells=cells))


def test_alexander_image_single_pocket():
    f = _fiber("split", 0.0)
    b = components(f, "covered_boundary")
    assert b.count == 1
    p = alexander_image(f.covered_with_collar, b)
    assert p.blocks == ((1,),)


def test_alexander_image_split_pockets():
    f = _fiber("split", 1.0)
    b = components(f, "covered_boundary")
    assert b.count == 2
    p = alexander_image(f.covered_with_collar, b)
    assert p.blocks == ((1,), (2,))


def test_alexander_image_empty_boundary():
    f = _fiber("empty", 0.5, cells=64)
    b = components(f, "covered_boundary")
    p = alexander_image(f.covered_with_collar, b)
    assert p.ground == ()
    assert p.blocks == ()


def test_alexander_image_rejects_stray_boundary():
    f = _fiber("split", 0.0)
    b = components(f, "covered_boundary")
    with pytest.raises(HomologyError):
        alexander_image(np.zeros_like(f.covered_with_collar), b)


def test_alexander_blocks_match_pockets():
    # labels sharing an uncovered component share a block, one block per pocket
    for name, t in [("split", 0.0), ("split", 1.0), ("annuli", 0.0),
                    ("annuli", 1.0), ("close", 0.0)]:
        f = _fiber(name, t)
        b = components(f, "covered_boundary")
        p = alexander_image(f.covered_with_collar, b)
        by_pocket = {}
        for label, (pocket, _) in zip(range(1, b.count + 1), b.pairs):
            by_pocket.setdefault(pocket, set()).add(label)
        assert {frozenset(blk) for blk in p.blocks} == \
            {frozenset(v) for v in by_pocket.values()}
        assert len(p.blocks) == components(f, "uncovered").count


def test_uncovered_holes_count_covered_islands():
    f = _fiber("annuli", 0.0)
    assert count_holes(f.uncovered) == 2
    _, n = label_components(f.uncovered)
    assert n == 1


def test_dump_cycles_svg(tmp_path):
    region = _mask([
        "#####",
        "#...#",
        "#####",
    ])
    path = tmp_path / "cycles.svg"
    dump_cycles_svg(region, holes(region), str(path))
    text = path.read_text()
    assert text.startswith("<svg")
    assert "polyline" in text or "polygon" in text or "path" in text
