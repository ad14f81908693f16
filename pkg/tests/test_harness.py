"""Workload constructions, the fuzzer, file formats, and the CLI."""

import contextlib
import io
import math
import random

import pytest

from mergetree.core import NaiveForest, UnsupportedOperationError
from mergetree.dynmerge import DynMergeForest
from mergetree.implicitmerge import ImplicitForest
from mergetree import harness
from mergetree.harness import (
    format_pairing,
    format_reeb,
    format_trace,
    fuzz,
    generate_trace,
    read_reeb,
    read_trace,
    replay_trace,
    run_trace,
    run_workload,
    sort_via_merge,
    workload_fig6,
    workload_fig7,
    workload_interleave,
    write_reeb,
)
from mergetree.cli import main
from mergetree.reeb import generate, reference_pairing


BACKEND_NAMES = ("naive", "dyn", "rank", "implicit")


def test_fig6_smallest_instance():
    w = workload_fig6(1)
    r = run_workload(w, "dyn")
    assert r.n == 3 and r.m_payload == 1 and r.m == 3
    assert r.counters["structural_merges"] == 1
    assert r.ok


def test_fig6_all_merges_structural():
    for k in (3, 10):
        for backend in BACKEND_NAMES:
            r = run_workload(workload_fig6(k), backend)
            assert r.ok, [c.as_dict() for c in r.checks if c.verdict == "fail"]
            assert r.m_payload == k * k
            assert r.counters["structural_merges"] == k * k
        # The payload snapshot hides the setup merges: exactly one
        # re-homing per payload merge, nothing from tree building.
        r = run_workload(workload_fig6(k), "naive")
        assert r.counters["parent_changes"] == k * k


def test_fig6_rejects_bad_k():
    with pytest.raises(ValueError):
        workload_fig6(0)


def test_fig7_closed_form():
    for k, want in ((4, 4), (16, 36)):
        for backend in ("naive", "dyn"):
            r = run_workload(workload_fig7(k), backend)
            assert r.counters["shorter_path_nodes"] == want
            assert r.ok
    for bad in (5, 12, 1):
        with pytest.raises(ValueError):
            workload_fig7(bad)


def test_fig7_counts_merge_paths_not_args():
    # k=9 crosses the first batch boundary: shorter paths go 2,2,2,3,3,3.
    r = run_workload(workload_fig7(9), "dyn")
    assert r.counters["shorter_path_nodes"] == 15
    assert r.m_payload == 6 and r.m == 6 + 2 * 9


def test_interleave_round_sums():
    assert run_workload(workload_interleave(2), "dyn") \
        .counters["parent_changes"] == 1
    r8 = run_workload(workload_interleave(8), "dyn")
    assert r8.counters["parent_changes"] == 17
    # The generator's per-round sum telescopes to n lg n - n + 1.
    for n in (2, 8, 64, 256):
        w = workload_interleave(n)
        exact = next(e.value for e in w.expected
                     if e.counter == "parent_changes" and e.op == "==")
        assert exact == n * int(math.log2(n)) - n + 1
        assert run_workload(w, "naive").counters["parent_changes"] == exact
    with pytest.raises(ValueError):
        workload_interleave(12)


def test_interleave_holds_on_every_backend():
    for backend in BACKEND_NAMES:
        r = run_workload(workload_interleave(64), backend)
        assert r.ok, [c.as_dict() for c in r.checks if c.verdict == "fail"]
        assert r.m == 63 and r.m_payload == 63 and r.n == 64


def test_census_ignores_untouched_singletons():
    ops = [("insert", i) for i in range(6)]
    ops += [("merge", 0, 1), ("merge", 2, 0), ("root", 5)]
    counters, census, cut_free = run_trace(ops, NaiveForest())
    assert census.m == 2 and census.n == 3
    assert cut_free
    assert counters["merges"] == 2


def test_sort_via_merge_matches_sorted():
    rng = random.Random(20)
    vals = [rng.uniform(-1e3, 1e3) for _ in range(1000)]
    assert sort_via_merge(vals) == sorted(vals)
    assert sort_via_merge([]) == []
    assert sort_via_merge([1.0, 2.0, 3.0]) == [1.0, 2.0, 3.0]
    # Duplicates survive: ties break by insertion order inside the keys.
    dup = [5.0, 1.0, 5.0, 1.0]
    assert sort_via_merge(dup, DynMergeForest()) == sorted(dup)
    with pytest.raises(UnsupportedOperationError):
        sort_via_merge([1.0], ImplicitForest())
    used = DynMergeForest()
    used.insert(0.0)
    with pytest.raises(ValueError):
        sort_via_merge([1.0], used)


def test_generate_trace_is_deterministic_and_valid():
    a = generate_trace(seed=42, n_ops=400, cuts=True)
    b = generate_trace(seed=42, n_ops=400, cuts=True)
    assert a == b
    assert any(op[0] == "cut" for op in a)
    # Replaying on a fresh oracle must never raise.
    run_trace(a, NaiveForest())
    c = generate_trace(seed=7, n_ops=500, cuts=False, max_live=30,
                       max_merges=40)
    assert not any(op[0] in ("cut", "link") for op in c)
    assert sum(op[0] == "merge" for op in c) <= 40
    live = 0
    peak = 0
    for op in c:
        live += op[0] == "insert"
        live -= op[0] == "delete"
        peak = max(peak, live)
    assert peak <= 30


def test_fuzz_clean_run_reports_bounds():
    rep = fuzz(seed=1, n_ops=800, cuts=False)
    assert rep.ok and not rep.mismatch
    assert set(rep.checks) <= {"dyn", "rank"}
    assert any(c.bound.startswith("rank_increases")
               for c in rep.checks["rank"])
    assert "agree with the oracle" in rep.to_text()
    rep2 = fuzz(seed=2, n_ops=800, cuts=True)
    assert rep2.ok and rep2.backends == ("dyn",)


def test_fuzz_rejects_cut_incapable_backend():
    with pytest.raises(ValueError):
        fuzz(seed=0, n_ops=10, cuts=True, backends=("rank",))
    with pytest.raises(ValueError):
        fuzz(seed=0, n_ops=10, backends=("nosuch",))


class _WrongNca(DynMergeForest):
    """Gives a wrong nca answer once enough nodes exist."""

    def nca(self, v, w):
        u = super().nca(v, w)
        if u is not None and len(self.keys) > 6:
            return v
        return u


def test_fuzz_shrinks_mismatch_to_minimal_repro():
    harness.BACKENDS["wrongnca"] = _WrongNca
    try:
        rep = fuzz(seed=5, n_ops=400, cuts=False, backends=("wrongnca",))
        assert not rep.ok
        assert "wrongnca" in rep.mismatch
        assert rep.repro
        # The reproducer replays to the same kind of failure and no
        # single op can be dropped from it.
        fails, *_ = harness._run_differential(rep.repro, ("wrongnca",))
        assert fails is not None
        for i in range(len(rep.repro)):
            sub = harness._sanitize(rep.repro[:i] + rep.repro[i + 1:])
            ok, *_ = harness._run_differential(sub, ("wrongnca",))
            assert ok is None or len(sub) < len(rep.repro)
    finally:
        del harness.BACKENDS["wrongnca"]


def test_empty_trace_is_trivially_equal():
    rep = fuzz(seed=0, n_ops=0, cuts=False)
    assert rep.ok and rep.ops_run == 0 and rep.n == 0 and rep.m == 0


def test_reeb_file_round_trip(tmp_path):
    g = generate(seed=9, n_target=30)
    path = tmp_path / "g.reeb"
    write_reeb(g, path)
    back = read_reeb(path)
    assert back.labels == g.labels and back.arcs == g.arcs
    # File objects work too, and comments plus blank lines are skipped.
    text = "# a torus\nreeb 4 # header\nv 0 1.0\nv 1 2.0\n\nv 2 3.0\n" \
           "v 3 4.0\na 0 1\na 1 2\na 1 2\na 2 3\n"
    t = read_reeb(io.StringIO(text))
    assert t.n == 4 and t.arcs.count((1, 2)) == 2


def test_reeb_parse_failures_name_the_line():
    from mergetree.reeb import InvalidReebGraph

    cases = [
        ("", "header"),
        ("reeb x\n", "integer"),
        ("reeb 2\nv 0 1.0\n", "promises 2"),
        ("reeb 1\nv 1 1.0\n", "expected 0"),
        ("reeb 1\nv 0 1.0\nb 0 1\n", "a <from> <to>"),
        ("reeb 1\nw 0 1.0\n", "v <index> <label>"),
    ]
    for text, needle in cases:
        with pytest.raises(InvalidReebGraph, match=needle):
            read_reeb(io.StringIO(text))


def test_pairing_output_is_sorted_by_late_vertex():
    out = format_pairing([(5, 2, "a"), (3, 0, "d"), (4, 1, "b")])
    assert out == "p 3 0 d\np 4 1 b\np 5 2 a\n"


def _cli(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


def test_cli_pair_matches_reference(tmp_path):
    g = generate(seed=31, n_target=40)
    path = str(tmp_path / "g.reeb")
    write_reeb(g, path)
    want = format_pairing(reference_pairing(g))
    for extra in ([], ["--algo", "twopass"], ["--backend", "dyn"],
                  ["--require-connected"]):
        code, out, err = _cli(["pair", "--input", path] + extra)
        assert (code, out) == (0, want), (extra, err)


def test_cli_pair_error_paths(tmp_path):
    bad = tmp_path / "bad.reeb"
    bad.write_text("reeb 2\nv 0 1.0\nv 1 0.5\na 0 1\n")
    code, _, err = _cli(["pair", "--input", str(bad)])
    assert code == 2 and "invalid graph" in err
    code, _, err = _cli(["pair", "--input", str(tmp_path / "none.reeb")])
    assert code == 2
    ok = tmp_path / "ok.reeb"
    write_reeb(generate(1, 10), ok)
    code, _, err = _cli(["pair", "--input", str(ok),
                         "--algo", "single", "--backend", "implicit"])
    assert code == 2 and "cannot answer" in err


def test_cli_bench_json_fields():
    import json

    code, out, _ = _cli(["bench", "--workload", "fig7", "--param", "4",
                         "--backend", "dyn", "--report", "json"])
    assert code == 0
    rep = json.loads(out)
    assert sorted(rep) == ["backend", "checks", "counters", "cut_free",
                           "m", "m_payload", "n", "ok", "params",
                           "total_counters", "workload"]
    assert rep["counters"]["shorter_path_nodes"] == 4
    assert all(c["verdict"] in ("pass", "flag") for c in rep["checks"])
    code, _, err = _cli(["bench", "--workload", "fig7", "--param", "7"])
    assert code == 2 and "perfect square" in err


def test_cli_fuzz_and_sort(tmp_path):
    code, out, _ = _cli(["fuzz", "--ops", "200", "--seed", "3",
                         "--cuts", "off", "--backends", "dyn,implicit"])
    assert code == 0 and out.startswith("ok:")
    code, _, err = _cli(["fuzz", "--ops", "5", "--seed", "0",
                         "--cuts", "on", "--backends", "implicit"])
    assert code == 2 and "cannot cut" in err

    vals = tmp_path / "vals.txt"
    vals.write_text("3.25\n-7\n\n1e3\n0\n")
    code, out, _ = _cli(["sort", "--input", str(vals)])
    assert code == 0
    assert [float(x) for x in out.split()] == [-7.0, 0.0, 3.25, 1000.0]
    vals.write_text("1.5\npotato\n")
    code, _, err = _cli(["sort", "--input", str(vals)])
    assert code == 2 and "line 2" in err


def test_trace_text_round_trip():
    ops = [("insert", 5), ("insert", 3.25), ("merge", 0, 1), ("cut", 0),
           ("delete", 0), ("link", 1, 2), ("root", 1), ("nca", 1, 2),
           ("parent", 2)]
    text = format_trace(ops)
    assert text == ("i 5\ni 3.25\nm 0 1\nc 0\nd 0\nl 1 2\n"
                    "q root 1\nq nca 1 2\nq parent 2\n")
    assert read_trace(io.StringIO(text)) == ops
    generated = generate_trace(seed=7, n_ops=150, cuts=True)
    assert read_trace(io.StringIO(format_trace(generated))) == generated


def test_read_trace_comments_and_errors():
    text = "# preamble\n\ni 4  # a node\nm 0 0\n"
    assert read_trace(io.StringIO(text)) == [("insert", 4.0), ("merge", 0, 0)]
    for bad in ("i\n", "m 1 x\n", "q zap 3\n", "hello\n"):
        with pytest.raises(ValueError, match="line 1"):
            read_trace(io.StringIO(bad))
    with pytest.raises(ValueError, match="line 3"):
        read_trace(io.StringIO("i 1\ni 2\nq nca 0\n"))


def test_replay_trace_query_lines():
    ops = read_trace(io.StringIO(
        "i 5\ni 3\ni 9\nm 0 1\n"
        "q parent 0\nq parent 1\nq root 0\nq nca 0 2\nq nca 0 1\n"))
    assert replay_trace(ops, NaiveForest()) == [
        "= 1", "= null", "= 1", "= null", "= 1"]


def test_cli_run(tmp_path):
    trace = tmp_path / "t.trace"
    trace.write_text("i 5\ni 3\ni 9\nm 0 1\nq parent 0\nq root 2\nq nca 0 2\n")
    for backend in ("naive", "dyn", "rank"):
        code, out, _ = _cli(["run", "--input", str(trace),
                             "--backend", backend])
        assert (code, out) == (0, "= 1\n= 2\n= null\n"), backend

    trace.write_text("i 1\nzap 2\n")
    code, _, err = _cli(["run", "--input", str(trace)])
    assert code == 2 and "line 2" in err

    trace.write_text("i 5\ni 3\nm 0 1\nc 0\n")
    code, _, err = _cli(["run", "--input", str(trace), "--backend", "rank"])
    assert code == 2 and err

    trace.write_text("i 1\nq parent 0\n")
    code, _, err = _cli(["run", "--input", str(trace),
                         "--backend", "implicit"])
    assert code == 2 and err

    code, _, err = _cli(["run", "--input", str(tmp_path / "missing.trace")])
    assert code == 2 and err
