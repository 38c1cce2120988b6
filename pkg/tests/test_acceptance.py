"""Release acceptance suite.

One test per criterion, each printing a PASS/FAIL line with its measured
numbers, so ``pytest tests/test_acceptance.py -s`` doubles as the
acceptance report.
"""

import random
import time

from formula_gen import compiled, random_formula
from ws1s_stream.automata import (
    accepts,
    complement,
    cylindrify,
    determinize,
    find_witness,
    intersect,
    language_equiv,
    make_tracks,
    minimize,
    project,
)
from ws1s_stream.bench import BenchConfig, family1, family2, run_bench
from ws1s_stream.compiler import TrackRegistry, compile_formula
from ws1s_stream.oracle import (
    _configuration_count,
    evaluate,
    interpretation_from_word,
    sat_bounded,
)
from ws1s_stream.stream import FROM_SCRATCH, INCREMENTAL, StreamSession, from_scratch_check, session_stats
from ws1s_stream.syntax import And, Kind, VarId, free_vars, quantifier_count


def _verdict(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def _conjunction(formulas):
    out = formulas[0]
    for f in formulas[1:]:
        out = And(out, f)
    return out


def _corpus(rng: random.Random, count: int):
    """Random formulas, depth <= 3, at most 2 first- plus 2 second-order
    variables; redraws formulas whose brute-force check would exceed the
    oracle's enumeration budget at the pumping bound."""
    kept = 0
    while kept < count:
        f = random_formula(rng, max_depth=3)
        dfa, registry = compiled(f)
        fvs = free_vars(f)
        n_fo = sum(1 for v in fvs if v.kind is Kind.FIRST_ORDER)
        n_so = len(fvs) - n_fo
        so_quants = quantifier_count(f, Kind.SECOND_ORDER)
        configs = _configuration_count(dfa.num_states, n_fo, n_so)
        inner = (2 ** min(dfa.num_states + 6, 18)) ** so_quants
        if dfa.num_states > 14 or configs * inner > 2_000_000:
            continue
        kept += 1
        yield f, dfa, registry


def test_criterion_1_oracle_equivalence():
    started = time.perf_counter()
    agreements = 0
    total = 200
    for f, dfa, _ in _corpus(random.Random(2024), total):
        model = sat_bounded(f, dfa.num_states)
        if (model is not None) == (find_witness(dfa) is not None):
            agreements += 1
    elapsed = time.perf_counter() - started
    _verdict(
        "criterion 1  oracle equivalence",
        agreements == total and elapsed < 60.0,
        f"{agreements}/{total} agree, {elapsed:.1f}s (limit 60s)",
    )


def test_criterion_2_cross_mode_agreement():
    started = time.perf_counter()
    problems = []
    for family_id, family in ((1, family1), (2, family2)):
        formulas = family(12)
        session = StreamSession()
        inc_reports = [session.push(f) for f in formulas]
        _, scratch_reports = from_scratch_check(formulas)
        for n, (inc, scr) in enumerate(zip(inc_reports, scratch_reports), start=1):
            if inc.verdict.status != scr.verdict.status:
                problems.append(f"family {family_id} step {n}: mode disagreement")
            if inc.verdict.status != "sat":
                problems.append(f"family {family_id} step {n}: not sat")
                continue
            witness = inc.verdict.witness
            prefix = formulas[:n]
            union = ()
            for dfa in session.components[:n]:
                from ws1s_stream.automata import merge_tracks
                union = merge_tracks(union, dfa.tracks)
            for dfa in session.components[:n]:
                if not accepts(cylindrify(dfa, union), witness):
                    problems.append(f"family {family_id} step {n}: component rejects witness")
            variables = [VarId(session.registry.name_of(t.index), t.kind) for t in union]
            interp = interpretation_from_word(witness, variables)
            if not evaluate(_conjunction(prefix), interp):
                problems.append(f"family {family_id} step {n}: witness is not a model")
            if n <= 6:
                registry = TrackRegistry()
                for g in prefix:
                    for v in free_vars(g):
                        registry.register(v)
                full = compile_formula(_conjunction(prefix), registry)
                if not accepts(full, witness):
                    problems.append(f"family {family_id} step {n}: full compilation rejects witness")
    elapsed = time.perf_counter() - started
    _verdict(
        "criterion 2  cross-mode agreement (families 1 and 2, n=12)",
        not problems and elapsed < 120.0,
        f"{problems or 'all 24 steps sat, agreed, witnesses validated'}, {elapsed:.1f}s (limit 120s)",
    )


def test_criterion_3_cost_model_ordering():
    cfg = BenchConfig(family=1, n_max=12, repetitions=5)
    rows = run_bench(cfg)
    median = {(r["mode"], r["step"]): r for r in rows if r["rep"] == "median"}

    inc_total = median[(INCREMENTAL, 12)]["cum_total_ms"]
    scratch_total = median[(FROM_SCRATCH, 12)]["cum_total_ms"]
    time_ordered = inc_total <= scratch_total

    ratios = {
        step: median[(FROM_SCRATCH, step)]["explored_step"]
        / median[(INCREMENTAL, step)]["explored_step"]
        for step in range(3, 13)
    }
    nondecreasing = sum(1 for step in range(4, 13) if ratios[step] >= ratios[step - 1])

    _verdict(
        "criterion 3  qualitative cost ordering (family 1, n=12)",
        time_ordered and nondecreasing >= 7,
        f"incremental {inc_total}ms <= from-scratch {scratch_total}ms: {time_ordered}; "
        f"explored-ratio non-decreasing in {nondecreasing}/9 steps (need >=7)",
    )


def test_criterion_4_cost_accounting_identity():
    formulas = family1(8)
    session = StreamSession()
    for f in formulas:
        session.push(f)
    inc = session_stats(session)
    inc_ok = (
        inc.combined_total_ns
        == sum(r.compile_ns for r in session.reports) + sum(r.process_ns for r in session.reports)
        and inc.first_compile_plus_process_ns
        == session.reports[0].compile_ns + sum(r.process_ns for r in session.reports)
    )

    _, scratch_reports = from_scratch_check(formulas)
    scratch = session_stats(scratch_reports)
    scratch_ok = scratch.combined_total_ns == sum(
        r.compile_ns + r.process_ns for r in scratch_reports
    )

    _verdict(
        "criterion 4  cost accounting identity",
        inc_ok and scratch_ok,
        "sum of recorded step components equals reported totals exactly "
        f"(incremental reuse estimate {inc.first_compile_plus_process_ns}ns)",
    )


def test_criterion_5_automata_laws():
    started = time.perf_counter()
    rng = random.Random(31337)
    passed = 0
    total = 100
    fresh = make_tracks([(99, Kind.SECOND_ORDER)])
    produced = 0
    while produced < total:
        dfa, _ = compiled(random_formula(rng))
        if dfa.num_states > 60:
            continue
        produced += 1
        small = minimize(dfa)
        laws = [
            minimize(small).num_states == small.num_states,
            language_equiv(complement(complement(dfa)), dfa),
            find_witness(intersect(dfa, complement(dfa))) is None,
            language_equiv(minimize(determinize(project(cylindrify(dfa, fresh), 99))), dfa),
        ]
        witness = find_witness(dfa)
        laws.append(witness is None or len(witness) <= dfa.num_states)
        passed += all(laws)
    elapsed = time.perf_counter() - started
    _verdict(
        "criterion 5  automata-law suite",
        passed == total and elapsed < 60.0,
        f"{passed}/{total} automata satisfy all laws, {elapsed:.1f}s (limit 60s)",
    )


def test_criterion_6_lazy_exploration_bound():
    formulas = family1(12)
    session = StreamSession()
    inc_reports = [session.push(f) for f in formulas]
    _, scratch_reports = from_scratch_check(formulas)

    totals_ok = all(
        inc.states_explored_total <= scr.states_explored_total
        for inc, scr in zip(inc_reports, scratch_reports)
    )
    depth_ok = all(
        r.max_expanded_depth <= len(r.verdict.witness)
        for r in inc_reports
        if r.verdict.status == "sat"
    )
    final_inc = inc_reports[-1].states_explored_total
    final_scr = scratch_reports[-1].states_explored_total
    _verdict(
        "criterion 6  lazy exploration bound (family 1, n<=12)",
        totals_ok and depth_ok,
        f"incremental total {final_inc} <= from-scratch total {final_scr} at every step; "
        "no expansion beyond witness depth",
    )
