"""Command-line front end.

Every command writes its artifact plus ``<out>.manifest.json`` holding the
resolved configuration, library version and experiment id. All randomness
comes from ``--seed`` (default 0). Exit codes: 0 ok, 2 validation error,
3 capability or budget limit (partial results are flagged in the artifact).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import FORMAT_VERSION, __version__
from . import diophantine as dio
from . import harmonic as harm
from . import statistics as st
from .errors import CapabilityError, CapacityError, ValidationError, VersionMismatchError
from .permutations import IDENTITY, Permutation, interleave_family, read_table, window_selector
from .sampling import SamplePlan
from .sequences import (GapSequence, OmegaSchedule, gen_erdos_gap, gen_geometric, gen_hlp,
                        gen_random_aomega, read_sequence, write_sequence)

EXIT_OK, EXIT_VALIDATION, EXIT_CAPABILITY = 0, 2, 3


class BudgetExhausted(Exception):
    """Raised after a partial artifact has been written."""


@dataclass
class ExperimentConfig:
    command: str
    resolved: dict = field(default_factory=dict)

    @property
    def experiment_id(self) -> str:
        blob = json.dumps({"command": self.command, **self.resolved}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def to_json(self) -> dict:
        return {"command": self.command, **self.resolved}


def _parse_ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def parse_ladder(text: str) -> list[int]:
    """``"10,100,1000"`` or ``"geom:START:STOP:POINTS"``."""
    if text.startswith("geom:"):
        _, lo, hi, pts = text.split(":")
        vals = np.round(np.geomspace(float(lo), float(hi), int(pts))).astype(int)
        ladder = sorted(set(int(v) for v in vals))
    else:
        ladder = _parse_ints(text)
    if not ladder or any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ValidationError("N ladder must be nonempty and strictly increasing")
    return ladder


def _capacity(args) -> int | None:
    bits = getattr(args, "capacity_bits", 64)
    return None if bits == 0 else bits


def resolve_sequence(spec: str, count: int, seed: int, capacity_bits: int | None) -> GapSequence:
    """A file path, or ``geometric:A``, ``hlp:Q1,Q2``, ``erdos:ALPHA``, ``aomega:LEVEL``."""
    kind, _, arg = spec.partition(":")
    if kind == "geometric":
        return gen_geometric(int(arg), count, capacity_bits=capacity_bits)
    if kind == "hlp":
        return gen_hlp(_parse_ints(arg), count, capacity_bits=capacity_bits)
    if kind == "erdos":
        return gen_erdos_gap(float(arg), count, capacity_bits=capacity_bits)
    if kind == "aomega":
        return gen_random_aomega(OmegaSchedule.constant(int(arg)), count, seed,
                                 capacity_bits=capacity_bits)
    path = Path(spec)
    if not path.exists():
        raise ValidationError(f"sequence file {spec!r} does not exist")
    return read_sequence(path)


def resolve_permutation(spec: str) -> Permutation:
    """``identity``, ``interleave:L``, ``window:S``, ``table:FILE`` or a JSON descriptor file."""
    kind, _, arg = spec.partition(":")
    if kind == "identity":
        return IDENTITY
    if kind == "interleave":
        return interleave_family(int(arg))
    if kind == "window":
        return window_selector(int(arg))
    if kind == "table":
        if not Path(arg).exists():
            raise ValidationError(f"table file {arg!r} does not exist")
        return read_table(arg)
    if Path(spec).exists():
        return Permutation.from_json(json.loads(Path(spec).read_text()))
    raise ValidationError(f"unknown permutation {spec!r}")


def _dump(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _write_artifact(out: Path, cfg: ExperimentConfig, kind: str, result: dict,
                    partial: bool = False, extra_files: tuple[Path, ...] = ()) -> None:
    doc = {"version": FORMAT_VERSION, "library_version": __version__, "artifact": kind,
           "experiment_id": cfg.experiment_id, "config": cfg.to_json(),
           "partial": partial, "result": result}
    out.write_text(_dump(doc))
    _write_manifest(out, cfg, (out, *extra_files))


def _write_manifest(out: Path, cfg: ExperimentConfig, files) -> None:
    manifest = {"version": FORMAT_VERSION, "library_version": __version__,
                "experiment_id": cfg.experiment_id, "config": cfg.to_json(),
                "files": [p.name for p in files]}
    Path(str(out) + ".manifest.json").write_text(_dump(manifest))


def _seq_from_args(args, needed: int) -> GapSequence:
    count = args.count if args.count else needed
    return resolve_sequence(args.seq, count, args.seed, _capacity(args))


def cmd_gen(args) -> int:
    chosen = [g for g in ("geometric", "hlp", "erdos", "random_aomega") if getattr(args, g) is not None]
    if len(chosen) != 1:
        raise ValidationError("choose exactly one generator")
    cap = _capacity(args)
    if args.geometric is not None:
        seq = gen_geometric(args.geometric, args.count, capacity_bits=cap)
    elif args.hlp is not None:
        seq = gen_hlp(_parse_ints(args.hlp), args.count, capacity_bits=cap)
    elif args.erdos is not None:
        seq = gen_erdos_gap(args.erdos, args.count, capacity_bits=cap)
    else:
        seq = gen_random_aomega(OmegaSchedule.constant(args.random_aomega), args.count,
                                args.seed, capacity_bits=cap)
    cfg = ExperimentConfig("gen", {"generator": chosen[0], "param": getattr(args, chosen[0]),
                                   "count": args.count, "seed": args.seed,
                                   "capacity_bits": args.capacity_bits})
    out = Path(args.out)
    write_sequence(seq, out)
    _write_manifest(out, cfg, (out,))
    return EXIT_OK


def cmd_dioph(args) -> int:
    seq = _seq_from_args(args, args.N or 0)
    n = args.N or len(seq)
    common = {"seq": args.seq, "N": n, "seed": args.seed, "budget": args.budget}
    if args.b2:
        cert = dio.certify_B2(seq, args.b2, n, args.coeff_bound, args.c_scan_bound, args.budget)
        cfg = ExperimentConfig("dioph", {**common, "condition": "B2", "variant": args.b2,
                                         "coeff_bound": args.coeff_bound,
                                         "c_scan_bound": args.c_scan_bound})
    elif args.ap:
        cert = dio.certify_Ap(seq, args.ap, args.coeff_bound, args.rhs_bound, n, args.budget)
        cfg = ExperimentConfig("dioph", {**common, "condition": "Ap", "p": args.ap,
                                         "coeff_bound": args.coeff_bound,
                                         "rhs_bound": args.rhs_bound})
    elif args.aomega is not None:
        omega = OmegaSchedule.constant(args.aomega)
        cert = dio.certify_Aomega(seq.prefix(n), omega, args.n_check, args.p_cap,
                                  args.coeff_cap, args.budget)
        cfg = ExperimentConfig("dioph", {**common, "condition": "Aomega", "omega_level": args.aomega,
                                         "n_check": args.n_check, "p_cap": args.p_cap,
                                         "coeff_cap": args.coeff_cap})
    else:
        raise ValidationError("choose one of --b2, --ap, --aomega")
    partial = bool(cert.notes.get("partial_scan"))
    _write_artifact(Path(args.out), cfg, "certificate", cert.to_json(), partial)
    if partial:
        raise BudgetExhausted("search budget exhausted; certificate is partial")
    return EXIT_OK


def cmd_gamma(args) -> int:
    f = harm.TrigPolynomial.parse(args.cos, args.sin)
    base = {"cos": args.cos, "sin": args.sin}
    if args.kac:
        rep = harm.gamma_kac(f, args.base)
        cfg = ExperimentConfig("gamma", {**base, "mode": "kac", "base": args.base})
    else:
        if not args.seq:
            raise ValidationError("--seq is required unless --kac is given")
        ladder = parse_ladder(args.ladder)
        perm = resolve_permutation(args.perm)
        needed = max(perm(k) for k in range(1, ladder[-1] + 1))
        seq = _seq_from_args(args, needed)
        cfg = ExperimentConfig("gamma", {**base, "mode": "star" if args.star else "empirical",
                                         "seq": args.seq, "perm": perm.to_json(),
                                         "ladder": ladder, "seed": args.seed,
                                         "normalized": args.normalized})
        if args.star:
            rungs = [(n, harm.gamma_star_truncated(f, seq, n, args.normalized).value) for n in ladder]
            rep = harm.GammaReport(rungs[-1][1], "star_truncated",
                                   {"N": ladder[-1], "normalized": args.normalized}, ladder=rungs)
        else:
            rep = harm.gamma_ladder(f, seq, perm, ladder)
    _write_artifact(Path(args.out), cfg, "gamma", rep.to_json())
    return EXIT_OK


def cmd_clt(args) -> int:
    f = harm.TrigPolynomial.parse(args.cos, args.sin)
    perm = resolve_permutation(args.perm)
    needed = max(perm(k) for k in range(1, args.N + 1))
    seq = _seq_from_args(args, needed)
    plan = SamplePlan.uniform(args.samples, args.seed)
    samples = st.partial_sum_samples(f, seq, perm, args.N, plan)
    if args.variance == "exact":
        var = float(harm.d_squared(f, seq, perm, args.N))
    else:
        var = args.N * float(harm.l2_norm_sq(f))
    ks = st.ks_to_gaussian(samples, var)
    cfg = ExperimentConfig("clt", {"cos": args.cos, "sin": args.sin, "seq": args.seq,
                                   "perm": perm.to_json(), "N": args.N, "plan": plan.to_json(),
                                   "variance": args.variance})
    _write_artifact(Path(args.out), cfg, "clt", {"N": args.N, "samples": args.samples,
                                                 "variance": var, "ks_distance": ks,
                                                 "noise_floor": 1.36 / math.sqrt(args.samples)})
    return EXIT_OK


def _write_trace(args, cfg: ExperimentConfig, trace: st.LilTrace) -> None:
    out = Path(args.out)
    csv_path = out.with_suffix(".csv")
    csv_path.write_text(trace.to_csv())
    _write_artifact(out, cfg, "lil", trace.to_json(), extra_files=(csv_path,))


def cmd_lil(args) -> int:
    ladder = parse_ladder(args.ladder)
    perm = resolve_permutation(args.perm)
    needed = max(perm(k) for k in range(1, ladder[-1] + 1))
    seq = _seq_from_args(args, needed)
    f = harm.TrigPolynomial.parse(args.cos, args.sin) if args.statistic == "sum_lil" else None
    plan = SamplePlan.uniform(args.samples, args.seed)
    trace = st.lil_trace(args.statistic, seq, perm, plan, ladder, f)
    cfg = ExperimentConfig("lil", {"statistic": args.statistic, "seq": args.seq,
                                   "perm": perm.to_json(), "ladder": ladder,
                                   "plan": plan.to_json(), "cos": args.cos, "sin": args.sin})
    _write_trace(args, cfg, trace)
    return EXIT_OK


def cmd_baseline(args) -> int:
    ladder = parse_ladder(args.ladder)
    count = args.count or ladder[-1]
    trace = st.iid_baseline(args.seed, count, ladder)
    cfg = ExperimentConfig("baseline", {"seed": args.seed, "count": count, "ladder": ladder})
    _write_trace(args, cfg, trace)
    return EXIT_OK


def cmd_disc(args) -> int:
    perm = resolve_permutation(args.perm)
    needed = max(perm(k) for k in range(1, args.N + 1))
    seq = _seq_from_args(args, needed)
    plan = SamplePlan.uniform(args.samples, args.seed)
    terms = [seq.terms[perm(k) - 1] for k in range(1, args.N + 1)]
    cells = []
    for i, row in enumerate(plan.frac_matrix(terms)):
        d = st.discrepancy(row)
        cells.append({"source_id": i, "N": args.N, "extreme": d.extreme, "star": d.star})
    cfg = ExperimentConfig("disc", {"seq": args.seq, "perm": perm.to_json(), "N": args.N,
                                    "plan": plan.to_json()})
    _write_artifact(Path(args.out), cfg, "discrepancy", {"cells": cells})
    return EXIT_OK


def build_report(paths) -> dict:
    if not paths:
        raise ValidationError("report needs at least one artifact")
    docs = []
    for p in paths:
        try:
            docs.append(json.loads(Path(p).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read artifact {p}: {exc}") from None
    versions = {d.get("version") for d in docs}
    if len(versions) != 1 or versions != {FORMAT_VERSION}:
        raise VersionMismatchError(f"artifact versions {sorted(map(str, versions))} "
                                   f"do not all match format version {FORMAT_VERSION}")
    summary = {}
    for p, d in zip(paths, docs):
        if "artifact" not in d or "experiment_id" not in d:
            raise ValidationError(f"{p} is not an artifact of this tool")
        res = d["result"]
        entry = {"artifact": d["artifact"], "source": str(p), "config": d["config"],
                 "partial": d.get("partial", False)}
        if d["artifact"] == "gamma":
            entry.update(value=res["value"], ladder=res.get("ladder", []))
        elif d["artifact"] == "certificate":
            entry.update(kind=res["kind"], verdict=res["verdict"],
                         observed_max_count=res["observed_max_count"])
        elif d["artifact"] == "clt":
            entry.update(ks_distance=res["ks_distance"], N=res["N"])
        elif d["artifact"] == "lil":
            entry.update(running_max=res["running_max"], statistic=res["statistic"])
        summary[d["experiment_id"]] = entry
    return {"version": FORMAT_VERSION, "library_version": __version__, "experiments": summary}


def _report_markdown(rep: dict) -> str:
    lines = ["| experiment | artifact | headline |", "|---|---|---|"]
    for eid, e in rep["experiments"].items():
        head = {"gamma": lambda: f"value {e['value']:.12g}",
                "certificate": lambda: f"{e['kind']} {e['verdict']} (max {e['observed_max_count']})",
                "clt": lambda: f"KS {e['ks_distance']:.4f} at N={e['N']}",
                "lil": lambda: f"{e['statistic']} running max {e['running_max']:.4f}"}.get(
            e["artifact"], lambda: "")()
        lines.append(f"| {eid} | {e['artifact']} | {head} |")
    return "\n".join(lines) + "\n"


def cmd_report(args) -> int:
    rep = build_report(args.inputs)
    Path(args.out).write_text(_dump(rep))
    if args.markdown:
        Path(args.markdown).write_text(_report_markdown(rep))
    return EXIT_OK


def _add_seq_args(p, required=True):
    p.add_argument("--seq", required=required,
                   help="sequence file, or geometric:A | hlp:Q1,Q2 | erdos:ALPHA | aomega:LEVEL")
    p.add_argument("--count", type=int, default=0, help="terms to generate (default: as needed)")
    p.add_argument("--capacity-bits", type=int, default=64, help="integer capacity; 0 = unbounded")


def _add_f_args(p):
    p.add_argument("--cos", default=None, help="cosine coefficients a1,a2,...")
    p.add_argument("--sin", default=None, help="sine coefficients b1,b2,...")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lacunary", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, **kw):
        p = sub.add_parser(name, **kw)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True)
        p.set_defaults(func=func)
        return p

    p = command("gen", cmd_gen, help="generate a sequence file")
    p.add_argument("--geometric", type=int)
    p.add_argument("--hlp")
    p.add_argument("--erdos", type=float)
    p.add_argument("--random-aomega", type=int, metavar="LEVEL")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--capacity-bits", type=int, default=64)

    p = command("dioph", cmd_dioph, help="Diophantine condition certificates")
    _add_seq_args(p)
    p.add_argument("--N", type=int, default=0)
    p.add_argument("--b2", choices=[v.value for v in dio.B2Variant])
    p.add_argument("--ap", type=int)
    p.add_argument("--aomega", type=int, metavar="LEVEL", help="constant omega level")
    p.add_argument("--coeff-bound", type=int, default=1)
    p.add_argument("--c-scan-bound", type=int, default=dio.DEFAULT_C_SCAN_BOUND)
    p.add_argument("--rhs-bound", type=int, default=100)
    p.add_argument("--n-check", type=int, default=None)
    p.add_argument("--p-cap", type=int, default=dio.DEFAULT_P_CAP)
    p.add_argument("--coeff-cap", type=int, default=dio.DEFAULT_COEFF_CAP)
    p.add_argument("--budget", type=int, default=dio.DEFAULT_BUDGET)

    p = command("gamma", cmd_gamma, help="exact variance functionals")
    _add_f_args(p)
    _add_seq_args(p, required=False)
    p.add_argument("--kac", action="store_true")
    p.add_argument("--base", type=int, default=2)
    p.add_argument("--star", action="store_true")
    p.add_argument("--normalized", action="store_true")
    p.add_argument("--perm", default="identity")
    p.add_argument("--ladder", default="10,100,1000")

    p = command("clt", cmd_clt, help="KS distance of normalized sums to N(0,1)")
    _add_f_args(p)
    _add_seq_args(p)
    p.add_argument("--perm", default="identity")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--variance", choices=["exact", "norm"], default="exact")

    p = command("lil", cmd_lil, help="LIL traces over an N ladder")
    _add_f_args(p)
    _add_seq_args(p)
    p.add_argument("--statistic", choices=[s.value for s in st.LilStatistic],
                   default="discrepancy_lil")
    p.add_argument("--perm", default="identity")
    p.add_argument("--ladder", default="geom:16:100000:60")
    p.add_argument("--samples", type=int, default=20)

    p = command("disc", cmd_disc, help="exact discrepancy of {n_k x}")
    _add_seq_args(p)
    p.add_argument("--perm", default="identity")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--samples", type=int, default=10)

    p = command("baseline", cmd_baseline, help="i.i.d. uniform discrepancy LIL baseline")
    p.add_argument("--count", type=int, default=0)
    p.add_argument("--ladder", default="geom:16:100000:60")

    p = command("report", cmd_report, help="collate artifacts")
    p.add_argument("inputs", nargs="*")
    p.add_argument("--markdown", default=None)
    return parser


def _fail(code: int, exc: BaseException) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc),
                                 "exit_code": code}, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, VersionMismatchError) as exc:
        return _fail(EXIT_VALIDATION, exc)
    except (CapacityError, CapabilityError, BudgetExhausted) as exc:
        return _fail(EXIT_CAPABILITY, exc)


if __name__ == "__main__":
    sys.exit(main())
