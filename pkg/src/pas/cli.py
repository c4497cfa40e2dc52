"""Command line front end: ``pas <command> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import ccdm, infotheory, shaping, tables
from .constellation import build_constellation
from .errors import PasError
from .ldpc import decode as bp_decode
from .ldpc import load_alist
from .modes import BUILTIN_MODES, RateCurveBuilder, build_mode, design_summary, resolve_mode_config
from .pipeline import gamma_of
from .sim import StopRule, adapt, find_operating_point, gap_db, reference_input, run_fer

log = logging.getLogger("pas")


def _read_input(path, binary: bool):
    if path in (None, "-"):
        return sys.stdin.buffer.read() if binary else sys.stdin.read()
    p = Path(path)
    return p.read_bytes() if binary else p.read_text()


def _write_output(path, payload):
    if path in (None, "-"):
        if isinstance(payload, bytes):
            sys.stdout.buffer.write(payload)
            sys.stdout.buffer.flush()
        else:
            sys.stdout.write(payload)
        return
    p = Path(path)
    if isinstance(payload, bytes):
        p.write_bytes(payload)
    else:
        p.write_text(payload)


def _ints(text: str) -> np.ndarray:
    return np.array([int(tok) for tok in text.split()], dtype=np.int64)


def _csv(rows: list[dict], columns: dict[str, str], fmt: dict[str, str] | None = None) -> str:
    fmt = fmt or {}
    out = []
    writer = csv.writer(_Lines(out), lineterminator="\n")
    writer.writerow(columns.values())
    for row in rows:
        writer.writerow([format(row[key], fmt.get(key, "")) if row[key] is not None else "" for key in columns])
    return "".join(out)


class _Lines:
    def __init__(self, sink):
        self.sink = sink

    def write(self, s):
        self.sink.append(s)


def _load_matcher(args) -> ccdm.MatcherSpec:
    data = json.loads(Path(args.spec).read_text())
    if "composition" in data:
        comp = ccdm.Composition.from_json(data["composition"])
        k = data.get("k")
    else:
        comp = ccdm.Composition.from_json(data)
        k = None
    if args.k is not None:
        k = args.k
    return ccdm.MatcherSpec.for_composition(comp, k)


# --- commands ------------------------------------------------------------------


def cmd_optimize_input(args):
    const = build_constellation(args.m, args.labeling)
    s = shaping.optimize_input(const, 10 ** (args.snr_db / 10))
    result = {
        "m": args.m,
        "snr_db": args.snr_db,
        "nu": s.nu,
        "delta": s.delta,
        "points": const.points.tolist(),
        "probs": s.probs.tolist(),
        "mi": infotheory.mutual_information(s),
        "amp_entropy": s.amplitude_entropy(),
    }
    if args.format == "json":
        return json.dumps(result, indent=2) + "\n"
    rows = [{"point": int(x), "prob": p} for x, p in zip(const.points, s.probs)]
    header = f"# nu={s.nu:.10g} delta={s.delta:.10g} mi={result['mi']:.10g} amp_entropy={result['amp_entropy']:.10g}\n"
    return header + _csv(rows, {"point": "point", "prob": "P_X"}, {"prob": ".12g"})


SHAPING_COLUMNS = {
    "constellation": "constellation",
    "rate": "rate [bits/channel use]",
    "shaped_snr_db": "X SNR [dB]",
    "uniform_snr_db": "uniform ASK SNR [dB]",
    "uniform_gap_db": "uniform ASK gap [dB]",
    "capacity_snr_db": "capacity SNR [dB]",
    "capacity_gap_db": "capacity gap [dB]",
}
BMD_COLUMNS = {
    "constellation": "constellation",
    "rate": "rate",
    "smd_snr_db": "SNR(R_SMD) [dB]",
    "bmd_snr_db": "SNR(R_BMD) [dB]",
    "gap_db": "Gap [dB]",
}


def cmd_tables(args):
    if args.table == "shaping-gains":
        rows, cols = tables.shaping_gain_rows(labeling=args.labeling), SHAPING_COLUMNS
    else:
        rows, cols = tables.bmd_gap_rows(labeling=args.labeling), BMD_COLUMNS
    return _csv(rows, cols, {k: ".4f" for k in cols if k.endswith("_db")})


def cmd_match(args):
    spec = _load_matcher(args)
    raw = _read_input(args.input, args.binary)
    if args.binary:
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8))[: spec.k]
    else:
        bits = _ints(raw)
    amps = ccdm.match(spec, bits)
    if args.binary:
        return amps.astype(np.uint8).tobytes()
    return " ".join(map(str, amps.tolist())) + "\n"


def cmd_dematch(args):
    spec = _load_matcher(args)
    raw = _read_input(args.input, args.binary)
    amps = np.frombuffer(raw, dtype=np.uint8).astype(np.int64) if args.binary else _ints(raw)
    bits = ccdm.dematch(spec, amps)
    if args.binary:
        return np.packbits(bits).tobytes()
    return " ".join(map(str, bits.tolist())) + "\n"


def cmd_decode(args):
    code = load_alist(args.alist)
    text = _read_input(args.input, False)
    frames = [np.array(line.split(), dtype=float) for line in text.splitlines() if line.strip()]
    if not frames:
        raise PasError("no LLR frames on input")
    llrs = np.vstack(frames)
    bits, converged, iters = bp_decode(code, llrs, args.max_iter)
    for c, it in zip(converged, iters):
        log.info("converged=%s iterations=%d", bool(c), int(it))
    failed = int(np.sum(~np.asarray(converged)))
    if failed:
        print(f"{failed} of {len(frames)} frames did not converge", file=sys.stderr)
    return "".join(" ".join(map(str, row.tolist())) + "\n" for row in bits)


def _stop(args) -> StopRule:
    return StopRule(min_errors=int(args.min_errors), max_frames=int(float(args.max_frames)))


def cmd_simulate(args):
    config = resolve_mode_config(args.mode)
    mode = build_mode(config)
    op = run_fer(mode, args.snr_db, _stop(args), args.seed, args.max_iter)
    return json.dumps(op.to_dict(), indent=2) + "\n"


def cmd_search(args):
    builder = RateCurveBuilder(resolve_mode_config(args.mode))
    op = find_operating_point(builder, args.target_fer, args.seed, args.start_db, args.step_db, stop=_stop(args), max_iter=args.max_iter)
    return json.dumps(op.to_dict(), indent=2) + "\n"


def _reference(path):
    """Reference point JSON: ``m``, ``rate``, ``snr_db`` and ``gamma`` or ``code_rate``."""
    data = json.loads(Path(path).read_text())
    const = build_constellation(int(data["m"]), data.get("labeling", "brgc"))
    if "gamma" in data:
        gamma = float(Fraction(str(data["gamma"])))
    else:
        gamma = float(gamma_of(Fraction(str(data["code_rate"])), const.m))
    return const, gamma, float(data["rate"]), float(data["snr_db"])


def cmd_plan_rate(args):
    const, gamma, rate, snr_db = _reference(args.reference)
    point = adapt(reference_input(const, snr_db), rate, gamma, args.rate)
    out = point.to_dict()
    out["gap_db"] = gap_db(args.rate, point.snr_db)
    return json.dumps(out, indent=2) + "\n"


SWEEP_COLUMNS = {"rate": "Rate", "snr_db": "SNR [dB]", "gap_db": "Gap [dB]", "fer": "FER", "ci95": "95% CI"}
SWEEP_FORMAT = {"rate": ".4f", "snr_db": ".4f", "gap_db": ".4f", "fer": ".2e", "ci95": ".2e"}


def cmd_sweep(args):
    rows = []
    if args.reference:
        const, gamma, rate, snr_db = _reference(args.reference)
        ref = reference_input(const, snr_db)
        for r in args.rates:
            point = adapt(ref, rate, gamma, r)
            rows.append({"rate": r, "snr_db": point.snr_db, "gap_db": gap_db(r, point.snr_db), "fer": None, "ci95": None})
    else:
        mode = build_mode(resolve_mode_config(args.mode))
        for snr in args.snr_db:
            op = run_fer(mode, snr, _stop(args), args.seed, args.max_iter)
            rows.append(op.to_dict())
    return _csv(rows, SWEEP_COLUMNS, SWEEP_FORMAT)


def cmd_show_mode(args):
    mode = build_mode(resolve_mode_config(args.mode))
    return json.dumps(design_summary(mode), indent=2, default=str) + "\n"


# --- parser --------------------------------------------------------------------


def _add_sim_options(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-errors", type=int, default=50)
    p.add_argument("--max-frames", default="1e5", help="accepts 1e5 style values")
    p.add_argument("--max-iter", type=int, default=100)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pas", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("-o", "--output", default=None, help="write result here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize-input", help="Maxwell-Boltzmann input maximizing MI at an SNR")
    p.add_argument("--m", type=int, required=True, help="bits per ASK symbol")
    p.add_argument("--snr-db", type=float, required=True)
    p.add_argument("--labeling", default="brgc", choices=["brgc", "natural"])
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.set_defaults(func=cmd_optimize_input)

    p = sub.add_parser("tables", help="shaping-gain or BMD-gap table as CSV")
    p.add_argument("--table", required=True, choices=["shaping-gains", "bmd-gap"])
    p.add_argument("--labeling", default="brgc", choices=["brgc", "natural"])
    p.set_defaults(func=cmd_tables)

    for name, func, what in (("match", cmd_match, "bits to amplitudes"), ("dematch", cmd_dematch, "amplitudes to bits")):
        p = sub.add_parser(name, help=f"CCDM: {what}")
        p.add_argument("--spec", required=True, help="JSON composition, or {composition, k}")
        p.add_argument("--k", type=int, default=None, help="override input length (downward)")
        p.add_argument("--input", "-i", default=None)
        p.add_argument("--binary", action="store_true", help="raw bytes: packed bits, one byte per amplitude")
        p.set_defaults(func=func)

    p = sub.add_parser("decode", help="belief-propagation decoding of LLR frames (one per line)")
    p.add_argument("--alist", required=True)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--input", "-i", default=None)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="Monte Carlo FER at one SNR")
    p.add_argument("--mode", required=True, help=f"mode file or one of {', '.join(BUILTIN_MODES)}")
    p.add_argument("--snr-db", type=float, required=True)
    _add_sim_options(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("search", help="back off along the rate curve to a target FER")
    p.add_argument("--mode", required=True)
    p.add_argument("--target-fer", type=float, required=True)
    p.add_argument("--start-db", type=float, default=None)
    p.add_argument("--step-db", type=float, default=0.25)
    _add_sim_options(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("plan-rate", help="adapt a reference operating point to a new rate")
    p.add_argument("--reference", required=True, help="JSON with m, rate, snr_db, gamma or code_rate")
    p.add_argument("--rate", type=float, required=True)
    p.set_defaults(func=cmd_plan_rate)

    p = sub.add_parser("sweep", help="results table as CSV (Rate, SNR, Gap, FER, 95%% CI)")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--mode")
    src.add_argument("--reference")
    p.add_argument("--snr-db", type=float, nargs="+", default=[])
    p.add_argument("--rates", type=float, nargs="+", default=[])
    _add_sim_options(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("show-mode", help="print the resolved design of a mode")
    p.add_argument("--mode", required=True)
    p.set_defaults(func=cmd_show_mode)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "sweep":
        if args.mode and not args.snr_db:
            parser.error("sweep --mode needs --snr-db")
        if args.reference and not args.rates:
            parser.error("sweep --reference needs --rates")
    try:
        payload = args.func(args)
    except (PasError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _write_output(args.output, payload)
    return 0


if __name__ == "__main__":
    sys.exit(main())
