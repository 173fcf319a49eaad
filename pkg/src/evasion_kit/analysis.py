"""End-to-end analyses: direct, boundary-only, and brute-force oracle.

Direct mode tracks uncovered components through the interleaved zigzag and
takes the exact inverse limit; its cardinality is a lower bound for the
number of evasion path classes, and a nonempty limit is necessary but not
sufficient evidence that a path exists. Witness extraction upgrades that
evidence: a witness is a time-monotone cell path staying uncovered, found by
directed reachability through the fine sub-samples of each cobordism.

Boundary mode never looks at uncovered cells directly. It reads the boundary
components at each sample, pairs them with the holes of the covered region
through winding functionals, and rebuilds the uncovered zigzag as the dual
of the resulting partition diagram.

Oracle mode ignores the event structure and answers reachability on one
uniformly fine time grid; it is the independent cross-check for both.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from .errors import WitnessError
from .limit import (AlgebraLimit, PartitionAlgebra, ZigzagAlgebraDiagram,
                    ZigzagSetDiagram, inverse_limit, join_partitions,
                    limit_of_algebras, partition_algebra, pullback_partition)
from .planar_homology import alexander_image
from .rasterize import (BoundaryComponents, GridSpec, cell_center,
                        coverage_masks, domain_masks, grid_for_scenario,
                        label_components, rasterize_cobordism, rasterize_fiber)
from .scenario import TIME_SPAN, Scenario, positions_at
from .zigzag import (DEFAULT_SCAN_SAMPLES, DEFAULT_TOL, Event, ZigzagBundle,
                     build_zigzag, detect_events, fiber_signature)

__all__ = [
    "Witness",
    "point_uncovered",
    "verify_witness",
    "extract_witness",
    "analyze_direct",
    "BoundaryData",
    "boundary_data_from_document",
    "extract_boundary_data",
    "boundary_limit",
    "analyze_boundary",
    "OracleResult",
    "oracle_reachability",
    "analyze_oracle",
    "d1_count",
    "AnalysisReport",
    "analyze",
]

DEFAULT_MAX_ELEMENTS = 10000
DEFAULT_MAX_WITNESSES = 64
DEFAULT_ORACLE_SAMPLES = 512


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    """A time-monotone evasion path through cell centers.

    Samples may repeat a time: the model puts no bound on evader speed, so
    repositioning within one uncovered component is recorded as consecutive
    samples at the same instant.
    """

    element: Tuple[int, ...]
    samples: Tuple[Tuple[float, Tuple[float, ...]], ...]


def point_uncovered(s: Scenario, t: float, point: Sequence[float], eta: float = 0.0) -> bool:
    """Exact continuous-time check that a point is strictly uncovered.

    eta shrinks the sensing radius, giving marginal samples the benefit of
    the doubt; zero keeps the check strict.
    """
    p = np.asarray(point, dtype=float)
    center = np.asarray(s.center, dtype=float)
    dist_center = float(np.sqrt(np.sum((p - center) ** 2)))
    if not dist_center < s.radius - s.fence_width:
        return False
    if not s.tracks:
        return True
    pos = positions_at(s, [t])[:, 0, :]
    d2 = np.sum((pos - p[None, :]) ** 2, axis=1)
    r = max(s.sensing_radius - eta, 0.0)
    return bool(np.all(d2 > r * r))


def verify_witness(s: Scenario, w: Witness, eta: float = 0.0) -> bool:
    """Check every sample, and the midpoint of every standing span."""
    prev = None
    for t, p in w.samples:
        if prev is not None:
            pt, pp = prev
            if t < pt:
                return False
            if pp == p and t > pt:
                if not point_uncovered(s, 0.5 * (pt + t), p, eta):
                    return False
        if not point_uncovered(s, t, p, eta):
            return False
        prev = (t, p)
    return True


def _slice_path(labels: np.ndarray, comp: int, start: Tuple[int, ...],
                goal: Tuple[int, ...]) -> List[Tuple[int, ...]]:
    """Cells of a shortest 4-adjacent path inside one component, start excluded."""
    if start == goal:
        return []
    shape = labels.shape
    ndim = labels.ndim
    parents: Dict[Tuple[int, ...], Tuple[int, ...]] = {start: start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if cur == goal:
            break
        for axis in range(ndim):
            for step in (-1, 1):
                nxt = list(cur)
                nxt[axis] += step
                if not 0 <= nxt[axis] < shape[axis]:
                    continue
                cell = tuple(nxt)
                if cell in parents or labels[cell] != comp:
                    continue
                parents[cell] = cur
                queue.append(cell)
    if goal not in parents:
        raise WitnessError("cells reported in one component are not connected")
    path = [goal]
    while path[-1] != start:
        path.append(parents[path[-1]])
    path.reverse()
    return path[1:]


@dataclass
class _CobData:
    times: np.ndarray
    uncovered: np.ndarray
    labels: List[np.ndarray]


def _segment(data: _CobData, start: Tuple[int, ...], target_label: int,
             target_cell: Optional[Tuple[int, ...]]
             ) -> Optional[List[Tuple[float, Tuple[int, ...]]]]:
    """Monotone cell path from `start` to the target component, or None."""
    labels = data.labels
    unc = data.uncovered
    times = data.times
    m = len(labels)

    reach: List[Set[int]] = [set() for _ in range(m)]
    reach[0] = {int(labels[0][start])}
    for j in range(m - 1):
        if not reach[j]:
            break
        mask = np.isin(labels[j], sorted(reach[j])) & unc[j + 1]
        reach[j + 1] = {int(v) for v in np.unique(labels[j + 1][mask]) if v}
    if target_label not in reach[m - 1]:
        return None

    back: List[Set[int]] = [set() for _ in range(m)]
    back[m - 1] = {target_label}
    for j in range(m - 2, -1, -1):
        mask = np.isin(labels[j + 1], sorted(back[j + 1])) & unc[j]
        back[j] = {int(v) for v in np.unique(labels[j][mask]) if v} & reach[j]
    if int(labels[0][start]) not in back[0]:
        return None

    path: List[Tuple[float, Tuple[int, ...]]] = [(float(times[0]), start)]
    cur = start
    for j in range(m - 1):
        comp = int(labels[j][cur])
        cand = (labels[j] == comp) & unc[j + 1] & np.isin(labels[j + 1], sorted(back[j + 1]))
        if not cand.any():
            return None
        if cand[cur]:
            nxt = cur
        else:
            flat = int(np.flatnonzero(cand.ravel())[0])
            nxt = tuple(int(v) for v in np.unravel_index(flat, cand.shape))
            for cell in _slice_path(labels[j], comp, cur, nxt):
                path.append((float(times[j]), cell))
        path.append((float(times[j + 1]), nxt))
        cur = nxt
    if target_cell is not None and cur != target_cell:
        comp = int(labels[m - 1][cur])
        for cell in _slice_path(labels[m - 1], comp, cur, target_cell):
            path.append((float(times[m - 1]), cell))
        cur = target_cell
    return path


class _WitnessBuilder:
    """Shared per-cobordism rasterization cache across witness extractions."""

    def __init__(self, bundle: ZigzagBundle, max_refine: int = 2) -> None:
        if bundle.region != "uncovered":
            raise WitnessError("witnesses require an uncovered-region bundle")
        self.bundle = bundle
        self.max_refine = max_refine
        self._cache: Dict[Tuple[int, int], _CobData] = {}

    def _data(self, i: int, level: int) -> _CobData:
        key = (i, level)
        if key not in self._cache:
            if level == 0:
                cob = self.bundle.cobordisms[i]
            else:
                base = self.bundle.grid.fine_time_samples
                cob = rasterize_cobordism(
                    self.bundle.scenario, self.bundle.cobordisms[i].interval,
                    self.bundle.grid, fine_time_samples=base * (2 ** level))
            labels = [label_components(u)[0] for u in cob.uncovered]
            self._cache[key] = _CobData(times=cob.times, uncovered=cob.uncovered,
                                        labels=labels)
        return self._cache[key]

    def extract(self, element: Sequence[int]) -> Witness:
        bundle = self.bundle
        if len(element) != len(bundle.diagram.fiber_sets):
            raise WitnessError("element length does not match the diagram")
        first = bundle.fiber_parts[0]
        cells = np.flatnonzero(first.labels.ravel() == element[0])
        if cells.size == 0:
            raise WitnessError("element names a missing component")
        start = tuple(int(v) for v in np.unravel_index(int(cells[0]), first.labels.shape))

        closed = bundle.time_base == "circle"
        n = len(bundle.cobordisms)
        samples: List[Tuple[float, Tuple[int, ...]]] = []
        cur = start
        for i in range(n):
            target_label = int(element[i + 1])
            target_cell = start if (closed and i == n - 1) else None
            seg = None
            for level in range(self.max_refine + 1):
                seg = _segment(self._data(i, level), cur, target_label, target_cell)
                if seg is not None:
                    break
            if seg is None:
                a, b = bundle.cobordisms[i].interval
                raise WitnessError(
                    f"no monotone lift across ({a:.6f}, {b:.6f}) at this resolution")
            if samples:
                seg = seg[1:]
            samples.extend(seg)
            cur = seg[-1][1] if seg else cur

        grid = bundle.grid
        world = tuple((t, cell_center(grid, cell)) for t, cell in samples)
        return Witness(element=tuple(int(v) for v in element), samples=world)


def extract_witness(bundle: ZigzagBundle, element: Sequence[int],
                    max_refine: int = 2) -> Witness:
    """Monotone uncovered path through the named component at every sample."""
    return _WitnessBuilder(bundle, max_refine=max_refine).extract(element)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

LOWER_BOUND_NOTE = (
    "lower bound only: the limit cardinality bounds the number of evasion "
    "path classes from below, and a nonempty limit does not by itself "
    "certify an evasion path; verified witnesses do")


@dataclass(frozen=True)
class AnalysisReport:
    mode: str
    exists: bool
    limit_cardinality: Optional[int]
    limit_elements: Tuple[Tuple[object, ...], ...]
    witnesses: Tuple[Witness, ...]
    diagnostics: Dict[str, object]
    truncated: Dict[str, bool]

    def to_document(self) -> dict:
        elements = [[_label_doc(x) for x in el] for el in self.limit_elements]
        witnesses = [
            {"element": [_label_doc(x) for x in w.element],
             "samples": [[float(t), [float(c) for c in p]] for t, p in w.samples]}
            for w in self.witnesses
        ]
        return {
            "mode": self.mode,
            "exists": bool(self.exists),
            "limit_cardinality": self.limit_cardinality,
            "limit_elements": elements,
            "witnesses": witnesses,
            "diagnostics": self.diagnostics,
            "truncated": {k: bool(v) for k, v in self.truncated.items()},
        }


def _label_doc(x: object) -> object:
    if isinstance(x, tuple):
        return [_label_doc(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def _event_doc(e: Event) -> dict:
    return {
        "window": [float(e.window[0]), float(e.window[1])],
        "time": float(e.time),
        "locus": [int(v) for v in reversed(e.locus)],
        "type_uncovered": e.type_x,
        "type_covered": e.type_c,
    }


def _bundle_diagnostics(bundle: ZigzagBundle) -> Dict[str, object]:
    grid = bundle.grid
    fibers = []
    for f in bundle.fibers:
        pi0, b1, pb = fiber_signature(f)
        fibers.append({
            "t": float(f.time),
            "pi0": pi0,
            "b1": b1,
            "boundary_pairs": pb,
        })
    return {
        "time_base": bundle.time_base,
        "grid": {
            "shape": [int(v) for v in grid.shape],
            "cell_size": float(grid.cell_size),
            "origin": [float(v) for v in grid.origin],
            "fine_time_samples": int(grid.fine_time_samples),
        },
        "sample_times": [float(t) for t in bundle.samples],
        "fibers": fibers,
        "events": [_event_doc(e) for e in bundle.events],
        "note": LOWER_BOUND_NOTE,
    }


def analyze_direct(s: Scenario, grid: Optional[GridSpec] = None, *,
                   scan_samples: int = DEFAULT_SCAN_SAMPLES,
                   tol: float = DEFAULT_TOL,
                   max_elements: int = DEFAULT_MAX_ELEMENTS,
                   max_witnesses: int = DEFAULT_MAX_WITNESSES,
                   witnesses: bool = True) -> AnalysisReport:
    """Track uncovered components and take the exact inverse limit."""
    if grid is None:
        grid = grid_for_scenario(s)
    bundle = build_zigzag(s, grid, region="uncovered",
                          scan_samples=scan_samples, tol=tol)
    limres = inverse_limit(bundle.diagram, max_elements=max_elements)
    diagnostics = _bundle_diagnostics(bundle)

    found: List[Witness] = []
    failures: List[dict] = []
    attempted = 0
    if witnesses and limres.elements:
        builder = _WitnessBuilder(bundle)
        for element in limres.elements[:max_witnesses]:
            attempted += 1
            try:
                w = builder.extract(element)
            except WitnessError as exc:
                failures.append({"element": [int(v) for v in element],
                                 "detail": str(exc)})
                continue
            if not verify_witness(s, w):
                failures.append({"element": [int(v) for v in element],
                                 "detail": "witness failed exact re-verification"})
                continue
            found.append(w)
    if failures:
        diagnostics["witness_failures"] = failures

    return AnalysisReport(
        mode="direct",
        exists=limres.cardinality > 0,
        limit_cardinality=int(limres.cardinality),
        limit_elements=limres.elements,
        witnesses=tuple(found),
        diagnostics=diagnostics,
        truncated={
            "elements": limres.truncated,
            "witnesses": bool(witnesses) and limres.cardinality > attempted,
        },
    )


# ---------------------------------------------------------------------------
# boundary-only analysis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryData:
    """Everything the boundary measurements provide, and nothing else.

    Fiber partitions group each sample's boundary components by the winding
    functionals of the covered region's holes; the maps track boundary
    components into the spacetime boundary components of each span.
    """

    time_base: str
    sample_times: Tuple[float, ...]
    fiber_partitions: Tuple[PartitionAlgebra, ...]
    cobordism_counts: Tuple[int, ...]
    left_maps: Tuple[Dict[int, int], ...]
    right_maps: Tuple[Dict[int, int], ...]
    events: Tuple[dict, ...]

    def to_document(self) -> dict:
        return {
            "time_base": self.time_base,
            "sample_times": [float(t) for t in self.sample_times],
            "fibers": [
                {"labels": len(p.ground),
                 "blocks": [[int(x) for x in b] for b in p.blocks]}
                for p in self.fiber_partitions
            ],
            "cobordisms": [
                {"labels": int(c),
                 "left": [[int(k), int(v)] for k, v in sorted(l.items())],
                 "right": [[int(k), int(v)] for k, v in sorted(r.items())]}
                for c, l, r in zip(self.cobordism_counts, self.left_maps,
                                   self.right_maps)
            ],
            "events": list(self.events),
        }


def boundary_data_from_document(doc: dict) -> BoundaryData:
    fibers = []
    for f in doc["fibers"]:
        ground = range(1, int(f["labels"]) + 1)
        fibers.append(partition_algebra(ground, [tuple(b) for b in f["blocks"]]))
    counts = []
    lefts = []
    rights = []
    for c in doc["cobordisms"]:
        counts.append(int(c["labels"]))
        lefts.append({int(k): int(v) for k, v in c["left"]})
        rights.append({int(k): int(v) for k, v in c["right"]})
    return BoundaryData(
        time_base=str(doc["time_base"]),
        sample_times=tuple(float(t) for t in doc["sample_times"]),
        fiber_partitions=tuple(fibers),
        cobordism_counts=tuple(counts),
        left_maps=tuple(lefts),
        right_maps=tuple(rights),
        events=tuple(doc.get("events", ())),
    )


def extract_boundary_data(s: Scenario, grid: Optional[GridSpec] = None, *,
                          scan_samples: int = DEFAULT_SCAN_SAMPLES,
                          tol: float = DEFAULT_TOL) -> BoundaryData:
    """Measure boundary components and their winding partitions per sample."""
    if s.dimension != 2:
        raise ValueError("boundary analysis is defined for dimension 2 only")
    if grid is None:
        grid = grid_for_scenario(s)
    bundle = build_zigzag(s, grid, region="covered_boundary",
                          scan_samples=scan_samples, tol=tol)
    algebras = []
    for fiber, parts in zip(bundle.fibers, bundle.fiber_parts):
        assert isinstance(parts, BoundaryComponents)
        algebras.append(alexander_image(fiber.covered_with_collar, parts))
    events = tuple(_event_doc(e) for e in bundle.events)
    return BoundaryData(
        time_base=bundle.time_base,
        sample_times=bundle.samples,
        fiber_partitions=tuple(algebras),
        cobordism_counts=tuple(p.count for p in bundle.cobordism_parts),
        left_maps=bundle.diagram.left_maps,
        right_maps=bundle.diagram.right_maps,
        events=events,
    )


def boundary_limit(data: BoundaryData, max_elements: int = DEFAULT_MAX_ELEMENTS) -> AlgebraLimit:
    """Dual reconstruction of the uncovered zigzag from boundary data alone.

    Each span's algebra is the intersection of the two sample algebras pushed
    into it, so its dual is the span's set of uncovered spacetime components
    whenever the sampling separated all events.
    """
    algebras = list(data.fiber_partitions)
    if data.time_base == "circle":
        algebras.append(algebras[0])
    cob_algebras = []
    for i, count in enumerate(data.cobordism_counts):
        ground = tuple(range(1, count + 1))
        pl = pullback_partition(data.left_maps[i], algebras[i], ground)
        pr = pullback_partition(data.right_maps[i], algebras[i + 1], ground)
        cob_algebras.append(join_partitions(pl, pr))
    za = ZigzagAlgebraDiagram(
        shape=data.time_base,
        fiber_algebras=tuple(algebras),
        cobordism_algebras=tuple(cob_algebras),
        left_maps=data.left_maps,
        right_maps=data.right_maps,
    )
    return limit_of_algebras(za, max_elements=max_elements)


def analyze_boundary(source: Union[Scenario, BoundaryData],
                     grid: Optional[GridSpec] = None, *,
                     scan_samples: int = DEFAULT_SCAN_SAMPLES,
                     tol: float = DEFAULT_TOL,
                     max_elements: int = DEFAULT_MAX_ELEMENTS) -> AnalysisReport:
    """Existence bound computed from boundary measurements only."""
    if isinstance(source, BoundaryData):
        data = source
    else:
        data = extract_boundary_data(source, grid, scan_samples=scan_samples, tol=tol)
    alg = boundary_limit(data, max_elements=max_elements)
    res = alg.result
    diagnostics: Dict[str, object] = {
        "time_base": data.time_base,
        "sample_times": [float(t) for t in data.sample_times],
        "fibers": [
            {"boundary_components": len(p.ground),
             "reconstructed_components": len(p.blocks)}
            for p in data.fiber_partitions
        ],
        "events": list(data.events),
        "note": LOWER_BOUND_NOTE,
    }
    return AnalysisReport(
        mode="boundary",
        exists=res.cardinality > 0,
        limit_cardinality=int(res.cardinality),
        limit_elements=res.elements,
        witnesses=(),
        diagnostics=diagnostics,
        truncated={"elements": res.truncated, "witnesses": False},
    )


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    exists: bool
    start_components: int
    final_components: int
    reachable_pairs: Tuple[Tuple[int, int], ...]
    class_count: Optional[int]


def oracle_reachability(s: Scenario, grid: Optional[GridSpec] = None,
                        time_samples: int = DEFAULT_ORACLE_SAMPLES) -> OracleResult:
    """Directed reachability on one uniformly fine time grid.

    Ignores events entirely: a path may stand on any cell uncovered across
    consecutive slices and move freely within a slice's component. On a
    circle base existence requires returning to the starting component.
    The class count (dimension 1 only) is the exact number of consistent
    component chains, counted by transfer matrices over all fine slices.
    """
    if grid is None:
        grid = grid_for_scenario(s)
    t0, t1 = TIME_SPAN
    times = np.linspace(t0, t1, time_samples + 1)
    _, inside = domain_masks(s, grid)
    ball = coverage_masks(s, times, grid)
    unc = inside[None] & ~ball
    labeled = [label_components(u) for u in unc]
    labels = [lab for lab, _ in labeled]
    counts = [n for _, n in labeled]

    pairs: List[Tuple[int, int]] = []
    for a in range(1, counts[0] + 1):
        current: Set[int] = {a}
        for j in range(1, len(labels)):
            if not current:
                break
            mask = np.isin(labels[j - 1], sorted(current)) & unc[j]
            current = {int(v) for v in np.unique(labels[j][mask]) if v}
        pairs.extend((a, b) for b in sorted(current))
    if s.time_base == "circle":
        exists = any(a == b for a, b in pairs)
    else:
        exists = bool(pairs)

    class_count: Optional[int] = None
    if s.dimension == 1:
        fiber_sets = [tuple(range(1, n + 1)) for n in counts]
        cob_sets = []
        lefts = []
        rights = []
        for j in range(len(labels) - 1):
            band = unc[j:j + 2]
            band_labels, band_n = label_components(band)
            cob_sets.append(tuple(range(1, band_n + 1)))
            lefts.append(_band_map(labels[j], counts[j], band_labels, 0))
            rights.append(_band_map(labels[j + 1], counts[j + 1], band_labels, 1))
        diagram = ZigzagSetDiagram(
            shape=s.time_base,
            fiber_sets=tuple(fiber_sets),
            cobordism_sets=tuple(cob_sets),
            left_maps=tuple(lefts),
            right_maps=tuple(rights),
        )
        class_count = int(inverse_limit(diagram, max_elements=0).cardinality)

    return OracleResult(
        exists=exists,
        start_components=counts[0],
        final_components=counts[-1],
        reachable_pairs=tuple(pairs),
        class_count=class_count,
    )


def _band_map(slice_labels: np.ndarray, count: int, band_labels: np.ndarray,
              row: int) -> Dict[int, int]:
    out: Dict[int, int] = {}
    flat = slice_labels.ravel()
    for label in range(1, count + 1):
        rep = int(np.flatnonzero(flat == label)[0])
        cell = np.unravel_index(rep, slice_labels.shape)
        out[label] = int(band_labels[(row,) + tuple(cell)])
    return out


def analyze_oracle(s: Scenario, grid: Optional[GridSpec] = None, *,
                   time_samples: int = DEFAULT_ORACLE_SAMPLES) -> AnalysisReport:
    if grid is None:
        grid = grid_for_scenario(s)
    res = oracle_reachability(s, grid, time_samples=time_samples)
    diagnostics: Dict[str, object] = {
        "time_base": s.time_base,
        "time_samples": int(time_samples),
        "grid": {
            "shape": [int(v) for v in grid.shape],
            "cell_size": float(grid.cell_size),
            "origin": [float(v) for v in grid.origin],
        },
        "reachable_pairs": [[int(a), int(b)] for a, b in res.reachable_pairs],
        "start_components": int(res.start_components),
        "final_components": int(res.final_components),
        "note": "direct fine-grained reachability, independent of event tracking",
    }
    return AnalysisReport(
        mode="oracle",
        exists=res.exists,
        limit_cardinality=res.class_count,
        limit_elements=(),
        witnesses=(),
        diagnostics=diagnostics,
        truncated={"elements": False, "witnesses": False},
    )


# ---------------------------------------------------------------------------
# closed-form count in dimension 1
# ---------------------------------------------------------------------------


def d1_count(s: Scenario, grid: Optional[GridSpec] = None, *,
             fence_ends: str = "included",
             scan_samples: int = DEFAULT_SCAN_SAMPLES,
             tol: float = DEFAULT_TOL) -> int:
    """Evasion path classes over a 1d interval domain, by event bookkeeping.

    Count = (covered components at the start) - 1 - (events whose locus turns
    covered). Exact whenever no uncovered component is created after the
    start (no gap splits or births), since then every starting gap keeps its
    own class until it possibly dies. fence_ends selects whether the fence
    collar counts as covered ("included", default) or is dropped ("excluded").
    """
    if s.dimension != 1:
        raise ValueError("the closed-form count applies to dimension 1 only")
    if s.time_base != "interval":
        raise ValueError("the closed-form count applies to an interval time base")
    if fence_ends not in ("included", "excluded"):
        raise ValueError("fence_ends must be 'included' or 'excluded'")
    if grid is None:
        grid = grid_for_scenario(s)
    events = detect_events(s, grid, scan_samples=scan_samples, tol=tol)
    f0 = rasterize_fiber(s, TIME_SPAN[0], grid)
    region = f0.covered_with_collar if fence_ends == "included" else f0.covered
    _, c0 = label_components(region)
    deaths = sum(1 for e in events if e.type_x == "D")
    return c0 - 1 - deaths


# ---------------------------------------------------------------------------
# dispatcher
# ---------------------------------------------------------------------------


def analyze(s: Scenario, mode: str = "direct", *,
            grid: Optional[GridSpec] = None,
            cells: int = 128,
            fine_time_samples: int = 64,
            scan_samples: int = DEFAULT_SCAN_SAMPLES,
            tol: float = DEFAULT_TOL,
            max_elements: int = DEFAULT_MAX_ELEMENTS,
            max_witnesses: int = DEFAULT_MAX_WITNESSES,
            witnesses: bool = True,
            time_samples: int = DEFAULT_ORACLE_SAMPLES) -> AnalysisReport:
    if grid is None:
        grid = grid_for_scenario(s, cells=cells, fine_time_samples=fine_time_samples)
    if mode == "direct":
        return analyze_direct(s, grid, scan_samples=scan_samples, tol=tol,
                              max_elements=max_elements,
                              max_witnesses=max_witnesses, witnesses=witnesses)
    if mode == "boundary":
        return analyze_boundary(s, grid, scan_samples=scan_samples, tol=tol,
                                max_elements=max_elements)
    if mode == "oracle":
        return analyze_oracle(s, grid, time_samples=time_samples)
    raise ValueError(f"unknown mode {mode!r}")
