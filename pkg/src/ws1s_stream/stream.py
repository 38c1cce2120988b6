"""Incremental satisfiability over a growing conjunction of formulas.

Each pushed conjunct is compiled to its own minimal automaton; the
conjunction's product automaton is never materialized.  Instead the
session keeps every product state it has ever explored, together with
that state's outgoing edge cubes, and decides each step by a
shortest-first search that stops at the first state in which every
component accepts.

Product tuples are append-only: a component once pushed keeps its slot,
and a state explored at an earlier step is extended rather than
rebuilt.  Extension is demand-driven: when the search needs the
successors of a tuple, it replays the edge cubes stored for the longest
previously-explored prefix of that tuple through the automata added
since, splitting a cube only where a newer component distinguishes its
expansions and dropping successors whose new coordinate can no longer
reach acceptance.  States the search never touches keep their archived
form at the old arity and cost nothing, which is what keeps the
per-step price tied to the witness search rather than to the size of
everything seen so far.

Verdicts are monotone (a conjunction can only lose models), so after
the first unsat step the session short-circuits exploration and keeps
answering unsat while still recording compile times.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Sequence

from .automata import (
    Dfa,
    TrackSet,
    Witness,
    coreachable,
    cube_min_symbol,
    merge_tracks,
)
from .compiler import MemoCache, TrackRegistry, compile_formula
from .errors import StateBudgetExceeded
from .syntax import Formula, free_vars

DEFAULT_SESSION_BUDGET = 5_000_000

INCREMENTAL = "Incremental"
FROM_SCRATCH = "FromScratch"


@dataclass(frozen=True)
class StepVerdict:
    step: int
    status: str  # "sat" | "unsat"
    witness: Optional[Witness]  # over the union tracks, shortest, lex-least

    @property
    def is_sat(self) -> bool:
        return self.status == "sat"


@dataclass(frozen=True)
class StepReport:
    step: int
    mode: str
    compile_ns: int
    process_ns: int
    states_explored_step: int
    states_explored_total: int
    max_expanded_depth: int  # -1 when nothing was expanded
    verdict: StepVerdict


class _Node:
    """One explored product state at the arity it was explored with.

    ``out`` is only meaningful when ``complete`` is set; it then lists
    every live successor edge at this node's arity, cubes over the union
    tracks of that arity.
    """

    __slots__ = ("depth", "path", "complete", "out", "accepting")

    def __init__(self, depth: int, path: tuple, accepting: bool):
        self.depth = depth
        self.path = path
        self.accepting = accepting
        self.complete = False
        self.out: tuple = ()


class _Component:
    __slots__ = ("dfa", "cols", "coreachable")

    def __init__(self, dfa: Dfa, cols: tuple[int, ...]):
        self.dfa = dfa
        self.cols = cols
        self.coreachable = coreachable(dfa)


def _overlay(cube: str, comp_cube: str, cols: tuple[int, ...]) -> Optional[str]:
    out = list(cube)
    for ch, col in zip(comp_cube, cols):
        if ch == "X":
            continue
        cur = out[col]
        if cur == "X":
            out[col] = ch
        elif cur != ch:
            return None
    return "".join(out)


def _edge_order(edge: tuple[str, tuple]) -> tuple:
    return (cube_min_symbol(edge[0]), edge[0])


class ProductExplorer:
    """Demand-driven product search over a growing component list."""

    def __init__(self):
        self.components: list[_Component] = []
        self.union_tracks: TrackSet = ()
        self.widths: list[int] = [0]  # union width after the first i components
        self.root: tuple = ()
        # the empty product accepts the empty word: a conjunction of
        # nothing is true
        self.nodes: dict[tuple, _Node] = {(): _Node(0, (), accepting=True)}

    def add_component(self, dfa: Dfa) -> None:
        union = merge_tracks(self.union_tracks, dfa.tracks)
        # registration order makes new tracks highest, so positions of
        # tracks already in the union never move; stored cubes extend by
        # right-padding with don't-cares
        if union[: len(self.union_tracks)] != self.union_tracks:
            raise AssertionError("union tracks must grow append-only")
        pos_of = {t.index: i for i, t in enumerate(union)}
        self.components.append(
            _Component(dfa, tuple(pos_of[t.index] for t in dfa.tracks))
        )
        self.union_tracks = union
        self.widths.append(len(union))
        self.root = self.root + (dfa.initial,)

    # -- successor derivation ---------------------------------------------

    def _edges_for(self, t: tuple) -> tuple[tuple[str, tuple], ...]:
        """Live successor edges of ``t`` at its own arity.

        Reuses the archived edge list of the longest fully-explored
        prefix of ``t``, splitting those cubes through the components
        added since; only if no prefix was ever fully explored is the
        whole product enumerated fresh.
        """
        start = 0
        edges: list[tuple[str, tuple]] | None = None
        for j in range(len(t) - 1, 0, -1):
            ancestor = self.nodes.get(t[:j])
            if ancestor is not None and ancestor.complete:
                start = j
                edges = list(ancestor.out)
                break
        if edges is None:
            edges = [("X" * self.widths[0], ())]
        for i in range(start, len(t)):
            comp = self.components[i]
            width = self.widths[i + 1]
            grown: list[tuple[str, tuple]] = []
            for cube, target in edges:
                cube = cube + "X" * (width - len(cube))
                for comp_cube, dst in comp.dfa.delta[t[i]]:
                    if dst not in comp.coreachable:
                        continue
                    merged = _overlay(cube, comp_cube, comp.cols)
                    if merged is not None:
                        grown.append((merged, target + (dst,)))
            edges = grown
            if not edges:
                break
        return tuple(sorted(edges, key=_edge_order))

    def _tuple_accepting(self, t: tuple) -> bool:
        return all(s in comp.dfa.accepting for s, comp in zip(t, self.components))

    # -- search ------------------------------------------------------------

    def search(self, state_budget: int) -> tuple[StepVerdict, int, int]:
        """Shortest-first search at the current arity.

        Returns (partial verdict, states created, deepest level whose
        successors were derived).  The verdict's step index is filled in
        by the caller.  Deterministic: layers are processed in
        lexicographic path order and acceptance ties break toward the
        lexicographically least concrete witness, so explored-state
        counts are reproducible run to run.
        """
        created = 0
        max_expanded = -1
        extended_free: set[tuple] = set()

        root_node = self.nodes.get(self.root)
        if root_node is None:
            root_node = _Node(0, (), self._tuple_accepting(self.root))
            self.nodes[self.root] = root_node  # the initial state is free
            if self.root:
                extended_free.add(self.root[:-1])
        accepting: list[tuple] = [self.root] if root_node.accepting else []

        layer = [self.root]
        while True:
            if accepting:
                best = min(accepting, key=lambda u: self.nodes[u].path)
                return (
                    StepVerdict(0, "sat", list(self.nodes[best].path)),
                    created,
                    max_expanded,
                )
            discovered: dict[tuple, tuple] = {}
            for t in sorted(layer, key=lambda u: self.nodes[u].path):
                node = self.nodes[t]
                if not node.complete:
                    node.out = self._edges_for(t)
                    node.complete = True
                max_expanded = max(max_expanded, node.depth)
                for cube, target in node.out:
                    if target in self.nodes:
                        continue  # current-arity tuple from this layer or an earlier one
                    candidate = node.path + (cube_min_symbol(cube),)
                    if target not in discovered or candidate < discovered[target]:
                        discovered[target] = candidate
            if not discovered:
                return StepVerdict(0, "unsat", None), created, max_expanded
            depth = self.nodes[layer[0]].depth + 1
            layer = []
            for target, path in discovered.items():
                base = target[:-1]
                if base in self.nodes and base not in extended_free:
                    extended_free.add(base)  # extending a known state is free
                else:
                    created += 1
                if len(self.nodes) >= state_budget:
                    raise StateBudgetExceeded(state_budget, "product exploration")
                node = _Node(depth, path, self._tuple_accepting(target))
                self.nodes[target] = node
                if node.accepting:
                    accepting.append(target)
                layer.append(target)


class StreamSession:
    """State of one incremental conjunction run.

    A session owns a track registry and a compile cache shared by all
    its steps, so free variables keep their track across conjuncts.
    Sessions are single-threaded; run separate sessions for concurrency
    (they share nothing unless given a common cache, which would then
    need external locking).
    """

    def __init__(
        self,
        registry: TrackRegistry | None = None,
        cache: MemoCache | None = None,
        *,
        state_budget: int = DEFAULT_SESSION_BUDGET,
        determinize_budget: int | None = None,
    ):
        if state_budget <= 0:
            raise ValueError("state budget must be positive")
        self.registry = registry if registry is not None else TrackRegistry()
        self.cache = cache if cache is not None else MemoCache()
        self.explorer = ProductExplorer()
        self.components: list[Dfa] = []
        self.verdicts: list[StepVerdict] = []
        self.reports: list[StepReport] = []
        self.state_budget = state_budget
        self.determinize_budget = determinize_budget
        self._explored_total = 0
        self._unsat = False

    @property
    def step(self) -> int:
        return len(self.components)

    def current_verdict(self) -> StepVerdict:
        if self.verdicts:
            return self.verdicts[-1]
        return StepVerdict(0, "sat", [])  # empty conjunction

    def push(self, f: Formula) -> StepReport:
        """Add one conjunct and decide satisfiability of the conjunction so far."""
        for v in free_vars(f):
            self.registry.register(v)
        kwargs = {}
        if self.determinize_budget is not None:
            kwargs["determinize_budget"] = self.determinize_budget
        t0 = time.perf_counter_ns()
        dfa = compile_formula(f, self.registry, self.cache, **kwargs)
        compile_ns = time.perf_counter_ns() - t0

        step = len(self.components) + 1
        if self._unsat:
            self.components.append(dfa)
            verdict = StepVerdict(step, "unsat", None)
            report = StepReport(step, INCREMENTAL, compile_ns, 0, 0,
                                self._explored_total, -1, verdict)
        else:
            t1 = time.perf_counter_ns()
            self.explorer.add_component(dfa)
            partial, explored, max_depth = self.explorer.search(self.state_budget)
            process_ns = time.perf_counter_ns() - t1
            self.components.append(dfa)
            verdict = StepVerdict(step, partial.status, partial.witness)
            if verdict.status == "unsat":
                self._unsat = True
            self._explored_total += explored
            report = StepReport(step, INCREMENTAL, compile_ns, process_ns, explored,
                                self._explored_total, max_depth, verdict)
        self.verdicts.append(verdict)
        self.reports.append(report)
        return report

    def witness_maps(self, verdict: StepVerdict) -> Optional[list[dict[str, int]]]:
        """Witness symbols as {variable name: bit} maps, for humans and logs."""
        if verdict.witness is None:
            return None
        names = [self.registry.name_of(t.index) for t in self.explorer.union_tracks]
        return [dict(zip(names, symbol)) for symbol in verdict.witness]


def from_scratch_check(
    formulas: Sequence[Formula],
    *,
    state_budget: int = DEFAULT_SESSION_BUDGET,
    determinize_budget: int | None = None,
) -> tuple[StepVerdict, list[StepReport]]:
    """The naive baseline: for every prefix, recompile everything and search
    the product from its initial state, reusing nothing across prefixes."""
    reports: list[StepReport] = []
    explored_total = 0
    kwargs = {}
    if determinize_budget is not None:
        kwargs["determinize_budget"] = determinize_budget
    for i in range(1, len(formulas) + 1):
        prefix = formulas[:i]
        registry = TrackRegistry()
        cache = MemoCache()
        for f in prefix:
            for v in free_vars(f):
                registry.register(v)
        t0 = time.perf_counter_ns()
        dfas = [compile_formula(f, registry, cache, **kwargs) for f in prefix]
        compile_ns = time.perf_counter_ns() - t0

        t1 = time.perf_counter_ns()
        explorer = ProductExplorer()
        for dfa in dfas:
            explorer.add_component(dfa)
        partial, explored, max_depth = explorer.search(state_budget)
        process_ns = time.perf_counter_ns() - t1

        verdict = StepVerdict(i, partial.status, partial.witness)
        explored_total += explored
        reports.append(StepReport(i, FROM_SCRATCH, compile_ns, process_ns, explored,
                                  explored_total, max_depth, verdict))
    final = reports[-1].verdict if reports else StepVerdict(0, "sat", [])
    return final, reports


@dataclass(frozen=True)
class SessionStats:
    """Cost breakdown of a run, on the exact recorded nanosecond values.

    ``combined_total_ns`` is the measured sum of every step's compile and
    process component; ``first_compile_plus_process_ns`` prices the run as
    if translation were paid only once, with each step then costing just
    its processing share - the idealized reuse account.
    """

    per_step: tuple[StepReport, ...]
    compile_total_ns: int
    process_total_ns: int
    combined_total_ns: int
    first_compile_plus_process_ns: int
    explored_total: int

    @property
    def verdicts(self) -> tuple[StepVerdict, ...]:
        return tuple(r.verdict for r in self.per_step)


def session_stats(source: StreamSession | Sequence[StepReport]) -> SessionStats:
    reports = tuple(source.reports if isinstance(source, StreamSession) else source)
    compile_total = sum(r.compile_ns for r in reports)
    process_total = sum(r.process_ns for r in reports)
    first_compile = reports[0].compile_ns if reports else 0
    return SessionStats(
        per_step=reports,
        compile_total_ns=compile_total,
        process_total_ns=process_total,
        combined_total_ns=compile_total + process_total,
        first_compile_plus_process_ns=first_compile + process_total,
        explored_total=reports[-1].states_explored_total if reports else 0,
    )
