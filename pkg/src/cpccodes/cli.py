"""Command-line front end for the three-stage CPC design process.

Stage 1 finds codes (``search``, ``verify``, ``canon``), stage 2 routes them
onto a linear register (``route``), stage 3 lowers and simplifies them to SP
native gates (``lower``, ``simplify``); ``stats`` and ``report`` summarise.
``simulate`` and ``faultscan`` study single codes.  ``pipeline`` runs every
stage in one go.

Records travel between stages as JSON lines.  Data goes to files or standard
output, progress to standard error.  Exit status is 0 on success, 2 for a bad
configuration and 3 for bad or missing input data.
"""

from __future__ import annotations

import argparse
import gzip
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from cpccodes import model, native, noisesim, route, search
from cpccodes.core import PauliString
from cpccodes.search import CodeRecord, SearchSpec

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3

log = logging.getLogger("cpccodes")


class ConfigError(Exception):
    """Inconsistent or invalid command-line configuration."""


class DataError(Exception):
    """Missing or unusable input data."""


# ----------------------------------------------------------------------------
# record I/O


def _jsonable(v):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else float(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def record_line(r: CodeRecord) -> str:
    return json.dumps({k: _jsonable(v) for k, v in r.to_json().items()}, separators=(",", ":"))


def _open(path: str, mode: str):
    """Open a text file, transparently gzipped when the name ends in ``.gz``."""
    if path.endswith(".gz"):
        return gzip.open(path, mode + "t", encoding="utf-8")
    return open(path, mode, encoding="utf-8")


def write_records(records: Iterable[CodeRecord], out: str | None) -> int:
    n = 0
    fh = sys.stdout if out in (None, "-") else _open(out, "w")
    try:
        for r in records:
            fh.write(record_line(r) + "\n")
            n += 1
    finally:
        if fh is not sys.stdout:
            fh.close()
    return n


class RecordReader:
    """Iterate records from a JSONL file, skipping malformed lines with a warning."""

    def __init__(self, path: str):
        self.path = path
        self.bad_lines = 0
        if path != "-" and not Path(path).is_file():
            raise DataError(f"input file not found: {path}")

    def __iter__(self) -> Iterator[CodeRecord]:
        fh = sys.stdin if self.path == "-" else _open(self.path, "r")
        try:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    yield CodeRecord.from_json(json.loads(line))
                except (ValueError, KeyError, TypeError) as exc:
                    self.bad_lines += 1
                    log.warning("%s:%d: skipping malformed record (%s)", self.path, lineno, exc)
        finally:
            if fh is not sys.stdin:
                fh.close()


def _write_json(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, default=_jsonable)
    if out in (None, "-"):
        print(text)
    else:
        Path(out).write_text(text + "\n", encoding="utf-8")


# ----------------------------------------------------------------------------
# per-record stage work (module level so worker processes can pickle it)


def _route_chunk(args) -> list[int]:
    items, layout, policy = args
    lay = route.Layout(tuple(layout)) if layout is not None else None
    out = []
    for obj in items:
        t = model.from_json(obj)
        out.append(route.count_swaps(model.build_circuit(t), lay, policy))
    return out


def _lower_chunk(args) -> list[int]:
    items, _ = args
    out = []
    for obj in items:
        t = model.from_json(obj)
        out.append(native.unsimplified_local_count(int(t.m_b.sum()), int(t.m_p.sum()) + int(t.m_c.sum())))
    return out


def _simplify_chunk(args) -> list[int]:
    items, errset = args
    return [native.simplified_local_count(model.from_json(obj), errset) for obj in items]


def _map_records(fn, records: list[CodeRecord], extra, threads: int, chunk: int = 2048) -> list:
    """Apply ``fn`` to record chunks, in order, optionally across processes."""
    items = [model.to_json(r.triple) for r in records]
    chunks = [(items[i:i + chunk],) + tuple(extra) for i in range(0, len(items), chunk)]
    out: list = []
    if threads > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for i, part in enumerate(pool.map(fn, chunks)):
                out.extend(part)
                log.info("processed %d/%d records", min((i + 1) * chunk, len(items)), len(items))
    else:
        for i, c in enumerate(chunks):
            out.extend(fn(c))
            if (i + 1) % 16 == 0:
                log.info("processed %d/%d records", min((i + 1) * chunk, len(items)), len(items))
    return out


# ----------------------------------------------------------------------------
# configuration helpers


def _shape(args) -> tuple[int, int]:
    k, n = args.k, args.n
    if n is None or k is None:
        raise ConfigError("--n and --k are required")
    if not 0 <= k < n:
        raise ConfigError(f"need 0 <= k < n, got n={n}, k={k}")
    return k, n - k


def _range(text: str | None, size: int) -> tuple[int, int]:
    if text is None:
        return 0, size
    try:
        a, b = text.split(":")
        lo = int(a) if a else 0
        hi = int(b) if b else size
    except ValueError as exc:
        raise ConfigError(f"--range must look like a:b, got {text!r}") from exc
    if not 0 <= lo <= hi <= size:
        raise ConfigError(f"--range {lo}:{hi} outside 0:{size}")
    return lo, hi


def _layout(text: str | None, n: int | None = None):
    if text is None:
        return None
    try:
        lay = route.Layout.parse(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if n is not None and len(lay) != n:
        raise ConfigError(f"layout has {len(lay)} positions, codes have {n} qubits")
    return lay.positions


def _weights(text: str | None) -> native.CostWeights:
    if text is None:
        return native.CostWeights()
    try:
        return native.CostWeights.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad --weights {text!r}: {exc}") from exc


def _load(path: str | None) -> tuple[list[CodeRecord], RecordReader]:
    if path is None:
        raise ConfigError("--input is required")
    reader = RecordReader(path)
    records = list(reader)
    if reader.bad_lines:
        log.warning("%d malformed line(s) skipped in %s", reader.bad_lines, path)
    return records, reader


# ----------------------------------------------------------------------------
# commands


def stage_search(k: int, m: int, errset: str, mode: str, lo: int, hi: int, threads: int) -> list[CodeRecord]:
    spec = SearchSpec(k, m, errset, mode, lo, hi)
    log.info("searching %d candidate codes for (k=%d, m=%d)", hi - lo, k, m)
    valid = search.valid_indices(spec, threads)
    keys = search.canonical_keys(valid, k, m) if len(valid) else np.zeros(0, np.uint64)
    out = []
    for v, key in zip(valid.tolist(), keys.tolist()):
        t = model.from_index(int(v), k, m)
        out.append(CodeRecord(t, int(v), model.cpc_gate_count(t), canonical_key=int(key)))
    log.info("found %d valid codes", len(out))
    return out


def search_summary(records: Sequence[CodeRecord], total_checked: int, extra: dict | None = None) -> dict:
    h = search.histogram_of("cpc_count", [r.cpc_count for r in records])
    keys = {r.canonical_key for r in records}
    at_min = {r.canonical_key for r in records if r.cpc_count == h.minimum}
    summary = {
        "total_checked": total_checked,
        "valid_count": len(records),
        "min": h.minimum,
        "median": h.median,
        "count_at_min": h.count_at_minimum,
        "class_count": len(keys),
        "classes_at_min": len(at_min),
    }
    summary.update(extra or {})
    return summary


def cmd_search(args) -> int:
    k, m = _shape(args)
    model.alphabet(args.errset)
    if args.random:
        valid, meta = search.random_search(k, m, args.random, args.seed, args.errset, args.mode)
        keys = search.canonical_keys(valid, k, m) if len(valid) else []
        records = [
            CodeRecord(model.from_index(int(v), k, m), int(v), 0, canonical_key=int(kk))
            for v, kk in zip(valid.tolist(), list(keys))
        ]
        for r in records:
            r.cpc_count = model.cpc_gate_count(r.triple)
        checked, extra = args.random, {"random": meta}
    else:
        lo, hi = _range(args.range, 1 << model.index_bits(k, m))
        records = stage_search(k, m, args.errset, args.mode, lo, hi, args.threads)
        checked, extra = hi - lo, {"range": [lo, hi]}
    write_records(records, args.out)
    summary = search_summary(records, checked, dict(extra, k=k, m=m, errset=args.errset, mode=args.mode))
    if args.summary:
        _write_json(summary, args.summary)
    if args.hist:
        Path(args.hist).write_text(search.histogram_of("cpc_count", [r.cpc_count for r in records]).to_csv())
    log.info("summary: %s", json.dumps(summary))
    return EXIT_OK


def cmd_verify(args) -> int:
    records, reader = _load(args.input)
    bad = [r.index for r in records if not model.is_valid_code(r.triple, args.errset, args.mode)]
    _write_json({"records": len(records), "invalid": len(bad), "invalid_indices": bad[:100],
                 "malformed_lines": reader.bad_lines}, args.out)
    return EXIT_DATA if bad else EXIT_OK


def cmd_canon(args) -> int:
    records, _ = _load(args.input)
    by_shape: dict[tuple[int, int], list[CodeRecord]] = {}
    for r in records:
        by_shape.setdefault((r.triple.k, r.triple.m), []).append(r)
    for (k, m), group in by_shape.items():
        idx = np.array([model.to_index(r.triple) for r in group], np.uint64)
        for r, key in zip(group, search.canonical_keys(idx, k, m).tolist()):
            r.canonical_key = int(key)
    write_records(records, args.out)
    if args.summary:
        _write_json(search_summary(records, len(records)), args.summary)
    return EXIT_OK


def stage_route(records: list[CodeRecord], layout, policy: str, threads: int) -> None:
    swaps = _map_records(_route_chunk, records, (layout, policy), threads)
    for r, s in zip(records, swaps):
        r.swap_count = int(s)
        r.finish()


def stage_lower(records: list[CodeRecord], threads: int) -> None:
    counts = _map_records(_lower_chunk, records, (None,), threads)
    for r, c in zip(records, counts):
        r.local_unsimplified = int(c)


def stage_simplify(records: list[CodeRecord], errset: str, threads: int) -> None:
    counts = _map_records(_simplify_chunk, records, (errset,), threads)
    for r, c in zip(records, counts):
        r.local_count = int(c)
        r.finish()
    apply_weights(records, native.CostWeights())


def cmd_route(args) -> int:
    records, _ = _load(args.input)
    n = records[0].triple.n if records else None
    stage_route(records, _layout(args.layout, n), args.policy, args.threads)
    write_records(records, args.out)
    return EXIT_OK


def cmd_lower(args) -> int:
    if args.native != "sp":
        raise ConfigError("only the SP native gate is supported")
    records, _ = _load(args.input)
    stage_lower(records, args.threads)
    write_records(records, args.out)
    if args.circuits:
        with open(args.circuits, "w", encoding="utf-8") as fh:
            for r in records:
                seq = native.lower_to_native(model.build_circuit(r.triple))
                fh.write(json.dumps({"index": r.index, "seq": seq.to_json()}, separators=(",", ":")) + "\n")
    return EXIT_OK


def cmd_simplify(args) -> int:
    records, _ = _load(args.input)
    stage_simplify(records, args.errset, args.threads)
    write_records(records, args.out)
    return EXIT_OK


def apply_weights(records: Iterable[CodeRecord], w: native.CostWeights) -> None:
    for r in records:
        if r.swap_count is not None and r.local_count is not None:
            r.r_weighted = native.weighted_cost((r.cpc_count, r.swap_count, r.local_count), w)


def cmd_stats(args) -> int:
    records, _ = _load(args.input)
    apply_weights(records, _weights(args.weights))
    try:
        h = search.histogram(records, args.metric)
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    if args.out:
        Path(args.out).write_text(h.to_csv())
    else:
        sys.stdout.write(h.to_csv())
    log.info("%s: min %s (%d codes), median %s", h.metric, h.minimum, h.count_at_minimum, h.median)
    return EXIT_OK


def optimum(records: Sequence[CodeRecord], w: native.CostWeights) -> CodeRecord:
    apply_weights(records, w)
    ready = [r for r in records if r.r_weighted is not None]
    if not ready:
        raise DataError("no record carries swap and local counts; run route and simplify first")
    return min(ready, key=lambda r: (r.r_weighted, r.l_total, r.index if r.index is not None else 0))


def build_report(records: Sequence[CodeRecord], w: native.CostWeights) -> tuple[dict, dict[str, str]]:
    best = optimum(records, w)
    hists = {}
    summary = {
        "records": len(records),
        "weights": [_jsonable(w.cpc), _jsonable(w.swap), _jsonable(w.local)],
        "optimum": {k: _jsonable(v) for k, v in best.to_json().items()},
        "metrics": {},
    }
    for metric in ("cpc_count", "two_qubit_count", "local_unsimplified", "local_count", "l_total"):
        values = [getattr(r, metric) for r in records]
        if any(v is None for v in values):
            continue
        h = search.histogram_of(metric, values)
        hists[metric] = h.to_csv()
        summary["metrics"][metric] = {"min": h.minimum, "count_at_min": h.count_at_minimum, "median": h.median}
    return summary, hists


def _write_report(summary: dict, hists: dict[str, str], out: str | None) -> None:
    if out in (None, "-"):
        _write_json(summary, None)
        return
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    _write_json(summary, str(d / "report.json"))
    for metric, csv in hists.items():
        (d / f"hist_{metric}.csv").write_text(csv)


def cmd_report(args) -> int:
    records, _ = _load(args.input)
    summary, hists = build_report(records, _weights(args.weights))
    _write_report(summary, hists, args.out)
    o = summary["optimum"]
    log.info("optimum: index %s cpc=%s swap=%s local=%s L=%s R=%s", o["index"], o["cpc_count"],
             o["swap_count"], o["local_count"], o["l_total"], o["r_weighted"])
    return EXIT_OK


def cmd_pipeline(args) -> int:
    k, m = _shape(args)
    lo, hi = _range(args.range, 1 << model.index_bits(k, m))
    layout = _layout(args.layout, k + m)
    w = _weights(args.weights)
    out = Path(args.out or "cpc-run")
    out.mkdir(parents=True, exist_ok=True)
    records = stage_search(k, m, args.errset, args.mode, lo, hi, args.threads)
    write_records(records, str(out / "codes.jsonl"))
    _write_json(search_summary(records, hi - lo), str(out / "search_summary.json"))
    stage_route(records, layout, args.policy, args.threads)
    stage_lower(records, args.threads)
    stage_simplify(records, args.errset, args.threads)
    apply_weights(records, w)
    write_records(records, str(out / "compiled.jsonl"))
    if records:
        summary, hists = build_report(records, w)
        _write_report(summary, hists, str(out))
    return EXIT_OK


def _code_from_arg(spec: str | None) -> model.AdjacencyTriple:
    if spec in (None, "422"):
        return model.code_422()
    p = Path(spec)
    if not p.is_file():
        raise DataError(f"code file not found: {spec}")
    text = p.read_text().strip().splitlines()[0]
    try:
        obj = json.loads(text)
        return model.from_json(obj["code"] if "code" in obj else obj)
    except (ValueError, KeyError, TypeError) as exc:
        raise DataError(f"cannot read a code from {spec}: {exc}") from exc


def _stabilizers(text: str | None, k: int) -> list[PauliString]:
    if text is None:
        if k == 2:
            return noisesim.plus_zero_stabilizers()
        return [PauliString.single(k, q, "Z") for q in range(k)]
    try:
        stabs = [PauliString.from_letters(s.strip()) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --stabilizers: {exc}") from exc
    if any(s.n != k for s in stabs):
        raise ConfigError(f"stabilizers must have {k} letters")
    return stabs


def cmd_simulate(args) -> int:
    t = _code_from_arg(args.code)
    c = model.build_circuit(t)
    stabs = _stabilizers(args.stabilizers, t.k)
    if (args.shots is None) == (args.exact_weight is None):
        raise ConfigError("give exactly one of --shots or --exact-weight")
    if args.p:
        points = [(float(p), float(p)) for p in args.p.split(",")]
    else:
        if args.px is None or args.pz is None:
            raise ConfigError("give --p or both --px and --pz")
        points = [(args.px, args.pz)]
    rows = ["p,raw,postselected,yield"]
    for px, pz in points:
        try:
            nm = noisesim.NoiseModel(px, pz)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        est = noisesim.estimate_rates(c, stabs, nm, shots=args.shots, exact_weight=args.exact_weight,
                                      seed=args.seed, correction=args.correction)
        rows.append(f"{px:.6g},{est.raw_failure_rate:.10g},{est.postselected_failure_rate:.10g},{est.yield_:.10g}")
    text = "\n".join(rows) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


FAULTSCAN_CIRCUITS = {
    "hardened422": noisesim.hardened_422_circuit,
    "crosscheckless422": noisesim.cross_checkless_422_circuit,
    "canonical422": lambda: model.build_circuit(model.code_422()),
}


def cmd_faultscan(args) -> int:
    if args.code:
        c = model.build_circuit(_code_from_arg(args.code))
    else:
        if args.circuit not in FAULTSCAN_CIRCUITS:
            raise ConfigError(f"--circuit must be one of {sorted(FAULTSCAN_CIRCUITS)}")
        c = FAULTSCAN_CIRCUITS[args.circuit]()
    stabs = _stabilizers(args.stabilizers, len(c.data_qubits))
    found = noisesim.fault_scan(c, stabs)
    _write_json({"violations": len(found), "locations": [str(f) for f in found]}, args.out)
    return EXIT_OK


# ----------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cpccodes", description=__doc__.splitlines()[0])
    p.add_argument("-q", "--quiet", action="store_true", help="only warnings on stderr")
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("-q", "--quiet", action="store_true", default=argparse.SUPPRESS,
                        help="only warnings on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, shape=False, io=True):
        if shape:
            sp.add_argument("--n", type=int, default=7, help="total qubits (default 7)")
            sp.add_argument("--k", type=int, default=3, help="data qubits (default 3)")
        sp.add_argument("--errset", choices=("xz", "xyz"), default="xz")
        sp.add_argument("--mode", choices=model.MODES, default="correct")
        sp.add_argument("--threads", type=int, default=1)
        if io:
            sp.add_argument("--input", help="JSONL code records ('-' for stdin)")
        sp.add_argument("--out", help="output path ('-' or omitted: stdout)")

    sp = sub.add_parser("search", parents=[shared], help="enumerate valid codes in an index range")
    common(sp, shape=True, io=False)
    sp.add_argument("--range", help="index range a:b (default: whole space)")
    sp.add_argument("--random", type=int, help="sample this many random indices instead")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--summary", help="write the summary JSON here")
    sp.add_argument("--hist", help="write the CPC-count histogram CSV here")
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("verify", parents=[shared], help="re-check validity of code records")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("canon", parents=[shared], help="attach canonical keys under qubit relabelling")
    common(sp)
    sp.add_argument("--summary")
    sp.set_defaults(func=cmd_canon)

    sp = sub.add_parser("route", parents=[shared], help="count SWAPs on a linear nearest-neighbour register")
    common(sp)
    sp.add_argument("--layout", help="comma list: logical qubit at each position")
    sp.add_argument("--policy", choices=route.POLICIES, default="persistent")
    sp.set_defaults(func=cmd_route)

    sp = sub.add_parser("lower", parents=[shared], help="lower CPC gates to SP plus locals")
    common(sp)
    sp.add_argument("--native", default="sp")
    sp.add_argument("--circuits", help="also write lowered gate sequences (JSONL)")
    sp.set_defaults(func=cmd_lower)

    sp = sub.add_parser("simplify", parents=[shared], help="peephole-simplify lowered circuits")
    common(sp)
    sp.set_defaults(func=cmd_simplify)

    sp = sub.add_parser("stats", parents=[shared], help="histogram of a record metric")
    common(sp)
    sp.add_argument("--metric", choices=search.HISTOGRAM_METRICS, default="cpc_count")
    sp.add_argument("--weights", help="gamma1,gamma2,gamma3")
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("report", parents=[shared], help="optimum by weighted cost plus histograms")
    common(sp)
    sp.add_argument("--weights", help="gamma1,gamma2,gamma3 (default 1,1,1)")
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("pipeline", parents=[shared], help="search, route, lower, simplify and report")
    common(sp, shape=True, io=False)
    sp.add_argument("--range")
    sp.add_argument("--layout")
    sp.add_argument("--policy", choices=route.POLICIES, default="persistent")
    sp.add_argument("--weights")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_pipeline)

    sp = sub.add_parser("simulate", parents=[shared], help="failure rates under biased Pauli noise")
    sp.add_argument("--code", help="code file (JSON) or '422' (default)")
    sp.add_argument("--px", type=float)
    sp.add_argument("--pz", type=float)
    sp.add_argument("--p", help="comma list of p with p_x = p_z = p")
    sp.add_argument("--shots", type=int)
    sp.add_argument("--exact-weight", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--correction", choices=("lookup",))
    sp.add_argument("--stabilizers", help="comma list of data-qubit Pauli strings, e.g. XI,IZ")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("faultscan", parents=[shared], help="single faults that spread unseen")
    sp.add_argument("--circuit", default="hardened422", help=f"one of {sorted(FAULTSCAN_CIRCUITS)}")
    sp.add_argument("--code", help="scan the canonical circuit of this code file instead")
    sp.add_argument("--stabilizers")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_faultscan)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    if getattr(args, "threads", 1) < 1:
        log.error("--threads must be at least 1")
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except DataError as exc:
        log.error("data error: %s", exc)
        return EXIT_DATA
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
