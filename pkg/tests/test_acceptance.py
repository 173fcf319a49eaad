"""End-to-end checks, each with its own wall-clock budget."""

import os
import time

import pytest

from diagram_tools import brute_force_limit, random_diagram
from evasion_kit.analysis import (
    analyze,
    analyze_direct,
    analyze_boundary,
    boundary_limit,
    d1_count,
    extract_boundary_data,
    oracle_reachability,
    verify_witness,
)
from evasion_kit.limit import (
    ZigzagAlgebraDiagram,
    ZigzagSetDiagram,
    diagrams_isomorphic,
    inverse_limit,
    limit_of_algebras,
    partition_algebra,
)
from evasion_kit.rasterize import (
    components,
    grid_for_scenario,
    rasterize_fiber,
)
from evasion_kit.scenario import (
    BUILTIN_NAMES,
    builtin_scenario,
    canonical_json,
    random_interval_scenario,
)
from evasion_kit.zigzag import build_zigzag

import random


class _Budget:
    def __init__(self, seconds):
        self.seconds = seconds
        self.start = time.perf_counter()

    def check(self):
        elapsed = time.perf_counter() - self.start
        assert elapsed < self.seconds, f"took {elapsed:.1f}s, budget {self.seconds}s"


def _end_pocket(s, grid, witness):
    final = components(rasterize_fiber(s, 1.0, grid), "uncovered")
    _, p_last = witness.samples[-1]
    cell = tuple(
        int(round((c - grid.origin[k]) / grid.cell_size - 0.5))
        for k, c in enumerate(reversed(p_last))
    )
    return final.label_at(cell)


def test_split_counts_two_path_classes():
    budget = _Budget(10.0)
    s = builtin_scenario("split")
    grid = grid_for_scenario(s, cells=128, fine_time_samples=256)
    report = analyze_direct(s, grid)
    assert report.exists is True
    assert report.limit_cardinality == 2
    assert not report.truncated["elements"]
    assert len(report.witnesses) == 2
    pockets = {_end_pocket(s, grid, w) for w in report.witnesses}
    assert len(pockets) == 2
    for w in report.witnesses:
        assert verify_witness(s, w)
    budget.check()


def test_close_has_no_evasion_path():
    budget = _Budget(10.0)
    s = builtin_scenario("close")
    report = analyze_direct(s)
    assert report.exists is False
    assert report.limit_cardinality == 0
    assert oracle_reachability(s).exists is False
    budget.check()


def test_annuli_transfer_count_and_witnesses():
    budget = _Budget(30.0)
    s = builtin_scenario("annuli")
    grid = grid_for_scenario(s)
    bundle = build_zigzag(s, grid)
    report = analyze_direct(s, grid)
    assert report.limit_cardinality == len(brute_force_limit(bundle.diagram))
    # every limit element yields a verified witness
    assert len(report.witnesses) == report.limit_cardinality
    assert "witness_failures" not in report.diagnostics
    for fiber in report.diagnostics["fibers"]:
        assert fiber["b1"] >= 1
    assert "lower bound only" in report.diagnostics["note"]
    budget.check()


def test_two_singleton_block_diagram_counts_two():
    budget = _Budget(1.0)
    one = partition_algebra((0,), [(0,)])
    two = partition_algebra((0, 1), [(0,), (1,)])
    za = ZigzagAlgebraDiagram(
        shape="interval",
        fiber_algebras=(one, two),
        cobordism_algebras=(one,),
        left_maps=({0: 0},),
        right_maps=({0: 0, 1: 0},),
    )
    out = limit_of_algebras(za)
    assert out.result.cardinality == 2
    assert not out.result.truncated
    budget.check()


def test_boundary_reconstruction_matches_direct():
    budget = _Budget(300.0)
    scenarios = [builtin_scenario(name) for name in ("split", "close", "annuli")]
    scenarios += [builtin_scenario("random", seed=k) for k in range(50)]
    for s in scenarios:
        direct = build_zigzag(s)
        direct_count = inverse_limit(direct.diagram).cardinality
        dual = boundary_limit(extract_boundary_data(s))
        assert dual.result.cardinality == direct_count
        assert diagrams_isomorphic(dual.dual_diagram, direct.diagram)
    budget.check()


def _collapse_singletons(z: ZigzagSetDiagram) -> ZigzagSetDiagram:
    """Rename each singleton block back to its member label."""

    def member(block):
        assert isinstance(block, tuple) and len(block) == 1
        return block[0]

    return ZigzagSetDiagram(
        shape=z.shape,
        fiber_sets=tuple(tuple(member(b) for b in fs) for fs in z.fiber_sets),
        cobordism_sets=tuple(tuple(member(b) for b in cs) for cs in z.cobordism_sets),
        left_maps=tuple({member(k): member(v) for k, v in m.items()}
                        for m in z.left_maps),
        right_maps=tuple({member(k): member(v) for k, v in m.items()}
                         for m in z.right_maps),
    )


def test_boundary_partitions_dualize_to_components():
    budget = _Budget(60.0)
    for name in ("split", "close", "annuli", "full"):
        s = builtin_scenario(name)
        grid = grid_for_scenario(s)
        data = extract_boundary_data(s, grid)
        for t, partition in zip(data.sample_times, data.fiber_partitions):
            f = rasterize_fiber(s, t, grid)
            boundary = components(f, "covered_boundary")
            by_pocket = {}
            for label, (pocket, _) in enumerate(boundary.pairs, start=1):
                by_pocket.setdefault(pocket, set()).add(label)
            assert {frozenset(b) for b in partition.blocks} == \
                {frozenset(v) for v in by_pocket.values()}
        # with the covered region connected at every sample, reconstruction
        # returns the boundary component diagram itself, label for label
        if name != "annuli":
            dual = boundary_limit(data).dual_diagram
            zb = build_zigzag(s, grid, region="covered_boundary").diagram
            assert _collapse_singletons(dual) == zb
    budget.check()


def test_direct_existence_agrees_with_oracle():
    budget = _Budget(600.0)
    for seed in range(100):
        s = builtin_scenario("random", seed=seed)
        direct = analyze_direct(s, witnesses=False)
        oracle = oracle_reachability(s)
        assert direct.exists == oracle.exists, f"seed {seed}"
    budget.check()


def test_transfer_counts_match_brute_force():
    budget = _Budget(10.0)
    rng = random.Random(2024)
    shapes = set()
    for _ in range(1000):
        z = random_diagram(rng, max_cobordisms=2, max_labels=5)
        shapes.add(z.shape)
        res = inverse_limit(z)
        want = brute_force_limit(z)
        assert res.cardinality == len(want)
        assert list(res.elements) == want
    assert shapes == {"interval", "circle"}
    budget.check()


def test_d1_closed_form_matches_oracle():
    budget = _Budget(30.0)
    for seed in range(20):
        s = random_interval_scenario(seed)
        assert d1_count(s) == oracle_reachability(s).class_count, f"seed {seed}"
    budget.check()


def test_reports_are_deterministic_across_threads(monkeypatch):
    for name in BUILTIN_NAMES:
        s = builtin_scenario(name)
        outs = []
        for threads in ("1", "4", "1"):
            monkeypatch.setenv("EVASION_KIT_THREADS", threads)
            outs.append(canonical_json(analyze(s).to_document()))
        assert outs[0] == outs[1] == outs[2], name
