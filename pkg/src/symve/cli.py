"""Command-line interface.

Exit codes: 0 success, 2 usage or config error, 3 domain or numeric error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from importlib import resources
from pathlib import Path

from .config import load_config, parse_config
from .datasets import load_dataset
from .errors import ConfigError, SVEError
from .estimands import iso_effect_curve
from .results import FIELDS, ResultRow, est_sve, reanalyze, round_half_away, sve_from_model
from .simulation import ROW_FIELDS, run_grid

EXIT_USAGE = 2
EXIT_DOMAIN = 3
FORMATS = ("text", "csv", "json")
FIG1_EFFECTS = tuple(round(-0.95 + 0.1 * k, 2) for k in range(20))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _level(text: str) -> float:
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"level must lie in (0, 1), got {text}")
    return v


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _csv_value(v):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return repr(v) if isinstance(v, float) else v


def _write_records(records: list[dict], fields, fmt: str, out) -> None:
    if fmt == "json":
        payload = [{k: _json_value(r[k]) for k in fields} for r in records]
        json.dump(payload if len(payload) != 1 else payload[0], out, indent=2, allow_nan=False)
        out.write("\n")
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(fields)
        for r in records:
            w.writerow([_csv_value(r[k]) for k in fields])


def _text_table(header: list[str], rows: list[list[str]]) -> str:
    """Right-aligned columns except the first, which is left-aligned."""
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(header)]

    def line(cells):
        first = cells[0].ljust(widths[0])
        rest = (c.rjust(w) for c, w in zip(cells[1:], widths[1:]))
        return "  ".join([first, *rest]).rstrip()

    return "\n".join([line(header), *(line(r) for r in rows)]) + "\n"


def _emit_rows(rows: list[ResultRow], fmt: str, out) -> None:
    if fmt == "text":
        out.write("  ".join(FIELDS) + "\n")
        for r in rows:
            out.write("  ".join(r.formatted()) + "\n")
    else:
        _write_records([r.as_dict() for r in rows], FIELDS, fmt, out)


# ---------------------------------------------------------------------------


def cmd_estimate(args, out) -> None:
    row = est_sve(args.x0, args.n0, args.x1, args.n1, method=args.method, level=args.level)
    _emit_rows([row], args.format, out)


def cmd_from_model(args, out) -> None:
    row = sve_from_model(args.theta, args.se_log_theta, method=args.method, level=args.level,
                         theta_lower=args.theta_lower, theta_upper=args.theta_upper)
    _emit_rows([row], args.format, out)


def cmd_reanalyze(args, out) -> None:
    rows = reanalyze(load_dataset(args.dataset), level=args.level)
    if args.format == "text":
        header = ["category", "vaccine", "placebo", "VE", "VE lower", "VE upper",
                  "SVE", "SVE lower", "SVE upper"]
        body = []
        for r in rows:
            body.append([r.category, f"{r.x1}/{r.n1}", f"{r.x0}/{r.n0}",
                         *(round_half_away(v) for v in (r.ve.estimate, r.ve.lower, r.ve.upper)),
                         *(round_half_away(v) for v in (r.sve.estimate, r.sve.lower, r.sve.upper))])
        out.write(_text_table(header, body))
        out.write(f"VE: {rows[0].ve.method} interval; SVE: {rows[0].sve.method} interval; "
                  f"level {round_half_away(args.level)}\n")
        return
    fields = ("category", "x1", "n1", "x0", "n0", "measure") + FIELDS
    records = []
    for r in rows:
        for measure, res in (("VE", r.ve), ("SVE", r.sve)):
            rec = {"category": r.category, "x1": r.x1, "n1": r.n1, "x0": r.x0, "n0": r.n0,
                   "measure": measure}
            rec.update(res.as_dict())
            records.append(rec)
    if args.format == "json":
        out.write(json.dumps(records, indent=2) + "\n")
    else:
        _write_records(records, fields, "csv", out)


def cmd_simulate(args, out) -> None:
    if args.config is None and args.preset is None:
        raise ConfigError("give a config file or --preset")
    if args.config is not None:
        scenarios = load_config(args.config, master_seed=args.seed)
    else:
        text = resources.files("symve.data").joinpath(f"{args.preset}.toml").read_text("utf-8")
        scenarios = parse_config(text, source=f"preset:{args.preset}", master_seed=args.seed)
    fmt = args.format
    if fmt is None:
        fmt = "json" if args.output and str(args.output).endswith(".json") else "csv"
    if fmt == "text":
        raise ConfigError("simulate writes csv or json")
    reports = run_grid(scenarios, workers=args.workers)
    records = [row for rep in reports for row in rep.rows()]
    buf = io.StringIO()
    if fmt == "json":
        payload = [{k: _json_value(r[k]) for k in ROW_FIELDS} for r in records]
        json.dump(payload, buf, indent=2, allow_nan=False)
        buf.write("\n")
    else:
        _write_records(records, ROW_FIELDS, "csv", buf)
    if args.output:
        Path(args.output).write_text(buf.getvalue(), encoding="utf-8")
    else:
        out.write(buf.getvalue())


def cmd_labbe(args, out) -> None:
    effects = args.effects if args.effects else FIG1_EFFECTS
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("s", "p0", "p1"))
    for s in effects:
        for p0, p1 in iso_effect_curve(s, args.points):
            w.writerow((repr(float(s)), repr(p0), repr(p1)))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="symve", description="Symmetric vaccine efficacy estimation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, methods=("profile", "wald", "tanh-wald"), default="profile"):
        p.add_argument("--method", choices=methods, default=default)
        p.add_argument("--level", type=_level, default=0.95)
        p.add_argument("--format", choices=FORMATS, default="text")

    p = sub.add_parser("estimate", help="SVE and CI from two-arm counts")
    p.add_argument("--x0", type=int, required=True, help="events, unvaccinated arm")
    p.add_argument("--n0", type=int, required=True, help="size, unvaccinated arm")
    p.add_argument("--x1", type=int, required=True, help="events, vaccinated arm")
    p.add_argument("--n1", type=int, required=True, help="size, vaccinated arm")
    common(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("from-model", help="SVE from a hazard/rate ratio")
    p.add_argument("--theta", type=float, required=True, help="estimated relative effect")
    p.add_argument("--se-log-theta", type=float, default=0.0, help="standard error of log theta")
    p.add_argument("--theta-lower", type=float, help="lower CI limit for theta from the model")
    p.add_argument("--theta-upper", type=float, help="upper CI limit for theta from the model")
    common(p, default=None)
    p.set_defaults(func=cmd_from_model)

    p = sub.add_parser("reanalyze", help="reanalyze a bundled trial dataset")
    p.add_argument("dataset", nargs="?", default="vax004")
    p.add_argument("--level", type=_level, default=0.95)
    p.add_argument("--format", choices=FORMATS, default="text")
    p.set_defaults(func=cmd_reanalyze)

    p = sub.add_parser("simulate", help="Monte Carlo operating characteristics")
    p.add_argument("config", nargs="?", help="TOML config file")
    p.add_argument("--preset", choices=("desk", "full"), help="bundled design instead of a file")
    p.add_argument("-o", "--output", help="output file (default: stdout)")
    p.add_argument("--seed", type=int, help="override master_seed")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("labbe", help="iso-effect curves (s, p0, p1) as CSV")
    p.add_argument("--effects", type=float, nargs="+", help="SVE values (default: 20 from -0.95 to 0.95)")
    p.add_argument("--points", type=int, default=50, help="points per curve")
    p.set_defaults(func=cmd_labbe)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args, out)
    except ConfigError as exc:
        print(f"symve: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SVEError as exc:
        print(f"symve: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
