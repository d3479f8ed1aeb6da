"""Command-line front end.

Exit status is 0 on success, 2 for invalid input and 1 when a computation
fails. Diagnostics go to stderr; results go to ``--out`` or stdout.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from .asymptotic import group_capacity
from .channels import ClassicalChannel, CQChannel, channel_from_json
from .ensemble import simulate_classical, simulate_cq_srm
from .groups import InputGroup, ValidationError, input_group_from_json
from .htest import dh_classical, dh_quantum
from .linalg import density_from_json
from .rates import oneshot_group_capacity, oneshot_report
from .reproduce import reproduce


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _num(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return "inf" if math.isinf(v) and v > 0 else "-inf" if math.isinf(v) else v
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.ndarray):
        return [_num(x) for x in v.tolist()]
    if isinstance(v, dict):
        return {str(k): _num(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_num(x) for x in v]
    return v


def dumps(obj) -> str:
    return json.dumps(_num(obj), indent=2, sort_keys=False, allow_nan=False, default=str) + "\n"


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def to_csv(rows) -> str:
    if isinstance(rows, dict):
        rows = [rows]
    buf = io.StringIO()
    cols = list(rows[0]) if rows else []
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for r in rows:
        writer.writerow([_cell(r.get(c, "")) for c in cols])
    return buf.getvalue()


def load_json(text_or_path: str, what: str):
    """Parse a JSON file, or inline JSON when the argument starts with '{' or '['."""
    if text_or_path.lstrip()[:1] in ("{", "["):
        text, source = text_or_path, f"inline {what}"
    else:
        try:
            text, source = Path(text_or_path).read_text(), text_or_path
        except OSError as exc:
            raise ValidationError(f"cannot read {what} file {text_or_path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{source}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _load_channel(path: str):
    return channel_from_json(load_json(path, "channel"))


def _load_J(arg: str | None, channel) -> InputGroup:
    if arg is None:
        return InputGroup.from_counts(channel.group, Counter(channel.group.factors))
    return input_group_from_json(channel.group, load_json(arg, "J"))


def _eps_range(spec: str) -> list[float]:
    try:
        a, b, step = (float(v) for v in spec.split(":"))
    except ValueError as exc:
        raise UsageError(f"--sweep-eps needs a:b:step, got {spec!r}") from exc
    if step <= 0 or b < a:
        raise UsageError("--sweep-eps needs step > 0 and a <= b")
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    out = [round(a + i * step, 12) for i in range(count)]
    if not out or out[0] <= 0 or out[-1] >= 1:
        raise UsageError("--sweep-eps values must lie in (0, 1)")
    return out


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load_operand(path: str, name: str):
    """A probability vector (JSON array) or a density matrix ({"dim", "re", "im"})."""
    obj = load_json(path, name)
    if isinstance(obj, dict):
        return "quantum", density_from_json(obj, name)
    try:
        return "classical", np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} must be a numeric array or a density matrix object ({exc})") from exc


def cmd_dh(args) -> None:
    kind_p, P = _load_operand(args.null, "null")
    kind_q, Q = _load_operand(args.alt, "alternative")
    if kind_p != kind_q:
        raise ValidationError("both operands must be distributions or both density matrices")
    if kind_p == "classical":
        test = dh_classical(P, Q, args.eps, args.mode)
    else:
        test = dh_quantum(P, Q, args.eps)
    _emit(dumps({"eps": args.eps, **test.to_json()}), args.out)


def cmd_oneshot(args) -> None:
    channel = _load_channel(args.channel)
    J = _load_J(args.J, channel)
    if args.sweep_eps is None:
        if args.eps is None:
            raise UsageError("oneshot needs --eps or --sweep-eps")
        report = oneshot_report(channel, J, args.eps, args.eps_prime, policy=args.policy, mode=args.mode)
        body = report.to_json()
        body["oneshot_capacity"] = oneshot_group_capacity(channel, J, args.eps, args.policy, args.mode)[0]
        _emit(dumps(body), args.out)
        return
    rows = []
    for e in _eps_range(args.sweep_eps):
        rep = oneshot_report(channel, J, e, policy=args.policy, mode=args.mode)
        row = {
            "eps": e,
            "rate": rep.rate,
            "error_bound": rep.thm1_error_bound.value,
            "vacuous": rep.thm1_error_bound.vacuous,
            "converse_rate": rep.converse_rate,
            "oneshot_capacity": oneshot_group_capacity(channel, J, e, args.policy, args.mode)[0],
        }
        for r in rep.rows:
            row[f"I_H[{r['theta']}]"] = r["I_H"]
        rows.append(row)
    _emit(to_csv(rows) if args.format == "csv" else dumps(rows), args.out)


def cmd_capacity(args) -> None:
    channel = _load_channel(args.channel)
    if args.kind == "classical" and not isinstance(channel, ClassicalChannel):
        raise ValidationError("capacity classical needs a channel with a W matrix")
    if args.kind == "cq" and isinstance(channel, ClassicalChannel):
        channel = channel.as_cq()
    cert = group_capacity(channel, grid=args.grid, refine=args.refine)
    _emit(dumps(cert.to_json()), args.out)


def cmd_simulate(args) -> None:
    channel = _load_channel(args.channel)
    J = _load_J(args.J, channel)
    if isinstance(channel, CQChannel):
        if args.decoder not in ("srm", None):
            raise ValidationError("CQ channels use the square-root decoder (--decoder srm)")
        report = simulate_cq_srm(channel, J, args.eps, args.trials, args.seed)
    else:
        decoder = args.decoder or "region"
        if decoder == "srm":
            raise ValidationError("the square-root decoder needs a CQ channel")
        report = simulate_classical(channel, J, args.eps, decoder, args.trials, args.seed)
    _emit(dumps(report.to_json()), args.out)


def cmd_reproduce(args) -> None:
    key = args.example.removeprefix("example")
    if key not in {"1", "2", "3", "4", "5", "6"}:
        raise UsageError(f"unknown example {args.example!r}; choose example1..example6 or 1..6")
    if not 0 < args.p < 0.5:
        raise UsageError("--p must lie in (0, 1/2)")
    artifacts = reproduce(int(key), args.p)
    if args.out is None:
        if args.format == "json":
            sys.stdout.write(dumps(artifacts))
        else:
            for name, rows in artifacts.items():
                sys.stdout.write(f"# example{key}_{name}\n{to_csv(rows)}")
        return
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, rows in artifacts.items():
        stem = outdir / f"example{key}_{name}"
        if args.format == "csv":
            stem.with_suffix(".csv").write_text(to_csv(rows))
        else:
            stem.with_suffix(".json").write_text(dumps(rows))
        print(f"wrote {stem}.{args.format}", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gcap", description="Group-code rates and capacities.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dh", help="hypothesis testing relative entropy of a pair of distributions or states")
    p.add_argument("null", help="first hypothesis: JSON array or density matrix object (file or inline)")
    p.add_argument("alt", help="second hypothesis, same format")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--mode", choices=["deterministic", "randomized"], default="deterministic")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dh)

    p = sub.add_parser("oneshot", help="one-shot bounds for a channel and message group")
    p.add_argument("--channel", required=True)
    p.add_argument("--J", help="message group JSON (file or inline); defaults to the whole input group")
    p.add_argument("--eps", type=float)
    p.add_argument("--eps-prime", type=float)
    p.add_argument("--sweep-eps", help="a:b:step")
    p.add_argument("--policy", choices=["uniform", "grid"], default="uniform")
    p.add_argument("--mode", choices=["deterministic", "randomized"], default="deterministic")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_oneshot)

    p = sub.add_parser("capacity", help="single-letter group capacity")
    p.add_argument("kind", choices=["classical", "cq"])
    p.add_argument("--channel", required=True)
    p.add_argument("--grid", type=float, default=0.02)
    p.add_argument("--refine", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("simulate", help="Monte-Carlo decoding error of random group codes")
    p.add_argument("--channel", required=True)
    p.add_argument("--J")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--decoder", choices=["region", "ml", "srm"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reproduce", help="regenerate the tables behind a worked example")
    p.add_argument("example", help="example1..example6 or 1..6")
    p.add_argument("--p", type=float, default=0.1)
    p.add_argument("--out", help="output directory; stdout when omitted")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_reproduce)
    return parser


def parse_and_dispatch(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except ValidationError as exc:
        print(f"gcap: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - any failure past validation is a computation error
        print(f"gcap: computation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(parse_and_dispatch())
