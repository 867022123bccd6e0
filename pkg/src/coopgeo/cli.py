"""Command line front end: ``coopgeo run|sweep|trace``.

Config files are flat ``key = value`` text with ``#`` comments. Keys are the
SimConfig field names plus the sweep keys below. Missing keys take the
SimConfig defaults.

    sweep_neighbor_count = 1..20        # or 1, 2, 4, 8
    sweep_constellation = 4, 16, 64
    sweep_cooperative = both            # or true / false
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from coopgeo import __version__
from coopgeo.simcore.config import SimConfig
from coopgeo.simcore.experiment import MetricsReport, rng_for, run_replications
from coopgeo.simcore.topology import gen_area_topology, gen_per_hop_topology

log = logging.getLogger("coopgeo")

FORMATS = ("csv", "json")
SWEEP_AXES = ("neighbor_count", "constellation")
METRICS = ("per", "tx_error_prob", "saturated_throughput", "collision_rate")
SWEEP_COLUMNS = ("axis", "value", "cooperative", "seed") + METRICS + tuple(
    f"ci95_{k}" for k in METRICS) + ("replications_used", "hops")
TRACE_COLUMNS = ("time_us", "hop", "kind", "sender", "target", "flags")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentSpec:
    base: SimConfig
    sweep_axis: Optional[str] = None
    sweep_values: list = field(default_factory=list)
    cooperative_values: list = field(default_factory=list)
    output_path: Optional[Path] = None
    format: str = "csv"

    def cooperative_flags(self) -> list:
        return self.cooperative_values or [self.base.cooperative]


# ---------------------------------------------------------------- parsing

_FIELDS = {f.name: f for f in dataclasses.fields(SimConfig)}
_DEFAULTS = SimConfig()
# Optional fields whose default is None; everything else takes the type of
# its default value.
_OPTIONAL_TYPES = {"collision_window_us": float, "a_squared": float, "b": float,
                   "metric_p": float, "hop_limit": int}


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "on", "1"):
        return True
    if t in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_int(text: str) -> int:
    return int(text.strip(), 0)


def _parse_scalar(key: str, text: str):
    if key in _OPTIONAL_TYPES:
        if text.strip().lower() in ("none", ""):
            return None
        kind = _OPTIONAL_TYPES[key]
    else:
        kind = type(getattr(_DEFAULTS, key))
    if kind is bool:
        return _parse_bool(text)
    if kind is int:
        return _parse_int(text)
    if kind is float:
        return float(text)
    return text.strip()


def _parse_int_list(text: str) -> list:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            lo, hi = _parse_int(lo), _parse_int(hi)
            if hi < lo:
                raise ValueError(f"empty range {part!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(_parse_int(part))
    if not out:
        raise ValueError("empty list")
    return out


def parse_config_text(text: str) -> ExperimentSpec:
    values = {}
    sweep = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key.startswith("sweep_"):
                axis = key[len("sweep_"):]
                if axis == "cooperative":
                    v = value.lower()
                    sweep[axis] = [False, True] if v == "both" else [_parse_bool(v)]
                elif axis in SWEEP_AXES:
                    sweep[axis] = _parse_int_list(value)
                else:
                    raise ConfigError(f"line {lineno}: unknown key {key!r}")
            elif key in _FIELDS:
                values[key] = _parse_scalar(key, value)
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ConfigError:
            raise
        except ValueError as e:
            raise ConfigError(f"line {lineno}: {key}: {e}") from None
    return _build_spec(values, sweep)


def _build_spec(values: dict, sweep: dict) -> ExperimentSpec:
    axes = [a for a in SWEEP_AXES if a in sweep]
    if len(axes) > 1:
        raise ConfigError("only one of sweep_neighbor_count / sweep_constellation "
                          "may be given")
    try:
        base = SimConfig(**values)
        axis = axes[0] if axes else None
        vals = sweep.get(axis, []) if axis else []
        # Validate every sweep cell up front.
        for v in vals:
            base.replace(**{axis: v})
    except ValueError as e:
        raise ConfigError(str(e)) from None
    return ExperimentSpec(base, axis, vals, sweep.get("cooperative", []))


def load_config(path) -> ExperimentSpec:
    if path is None:
        return _build_spec({}, {})
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    return parse_config_text(p.read_text(encoding="utf-8"))


# ---------------------------------------------------------------- output

def fmt_value(v):
    """Round floats to 6 significant digits; both formats use this.
    Non-finite floats pass through for the writers to encode."""
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    x = float(v)
    if math.isnan(x) or math.isinf(x):
        return x
    return float(format(x, ".6g"))


def _json_safe(v):
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_json_safe(x) for x in v]
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _csv_cell(v) -> str:
    if v is None:
        return "none"
    v = fmt_value(v)
    if isinstance(v, float) and not math.isfinite(v):
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".6g")
    return str(v)


def config_record(cfg: SimConfig) -> dict:
    out = {k: fmt_value(v) for k, v in cfg.as_dict().items()}
    k = cfg.ser_constants()
    out["a_squared_used"] = fmt_value(k.a_squared)
    out["b_used"] = fmt_value(k.b)
    out["collision_window_used_us"] = fmt_value(cfg.effective_collision_window())
    return out


def metrics_record(r: MetricsReport) -> dict:
    out = {k: fmt_value(getattr(r, k)) for k in METRICS}
    out.update({f"ci95_{k}": fmt_value(r.ci95[k]) for k in METRICS})
    out["replications_used"] = r.replications_used
    out["hops"] = r.hops
    out["delivery_ratio"] = fmt_value(r.delivery_ratio)
    return out


def render_csv(rows: list, columns, preamble: Optional[dict] = None) -> str:
    buf = io.StringIO()
    if preamble:
        for k, v in preamble.items():
            buf.write(f"# {k} = {_csv_cell(v)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_csv_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def render_json(doc: dict) -> str:
    return json.dumps(_json_safe(doc), indent=2, allow_nan=False) + "\n"


def _write(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    # newline="" keeps "\n" on every platform so outputs stay byte-identical.
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------- commands

def cmd_run(spec: ExperimentSpec) -> int:
    cfg = spec.base
    report = run_replications(cfg)
    rec = config_record(cfg)
    rec.update(metrics_record(report))
    if spec.format == "json":
        text = render_json({"version": __version__, "record": rec})
    else:
        text = render_csv([rec], list(rec))
    _write(text, spec.output_path)
    return 0


def _sweep_cell(cfg: SimConfig) -> MetricsReport:
    return run_replications(cfg)


def sweep_cells(spec: ExperimentSpec) -> list:
    """(axis value, cooperative, config) triples in output order."""
    axis = spec.sweep_axis
    values = spec.sweep_values or [None]
    cells = []
    for v in sorted(values):
        for coop in sorted(set(spec.cooperative_flags())):
            kw = {"cooperative": coop}
            if axis is not None:
                kw[axis] = v
            cells.append((v, coop, spec.base.replace(**kw)))
    return cells


def cmd_sweep(spec: ExperimentSpec, workers: int = 1) -> int:
    cells = sweep_cells(spec)
    cfgs = [c for _, _, c in cells]
    if workers > 1 and len(cfgs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            reports = list(ex.map(_sweep_cell, cfgs))
    else:
        reports = [_sweep_cell(c) for c in cfgs]
    rows = []
    for (v, coop, cfg), rep in zip(cells, reports):
        row = {"axis": spec.sweep_axis or "none", "value": v, "cooperative": coop,
               "seed": cfg.seed}
        row.update(metrics_record(rep))
        rows.append(row)
    conf = config_record(spec.base)
    if spec.format == "json":
        text = render_json({"version": __version__, "config": conf,
                            "sweep_axis": spec.sweep_axis,
                            "sweep_values": sorted(spec.sweep_values),
                            "rows": rows})
    else:
        text = render_csv(rows, SWEEP_COLUMNS, conf)
    _write(text, spec.output_path)
    return 0


def trace_topology(cfg: SimConfig):
    rng = rng_for(cfg.seed, 0)
    if cfg.topology_mode == "per-hop-disk":
        return gen_per_hop_topology(cfg.neighbor_count, cfg.range_m, rng,
                                    cfg.dst_factor), rng
    return gen_area_topology(cfg.node_count, cfg.area_side_m, cfg.range_m, rng,
                             require_connected=cfg.require_connected), rng


def trace_rows(report) -> list:
    rows = []
    t = 0.0
    for i, hop in enumerate(report.hops):
        for f in sorted(hop.events, key=lambda f: f.sent_at):
            rows.append({"time_us": t + f.sent_at, "hop": i, "kind": f.kind.value,
                         "sender": f.sender,
                         "target": "" if f.target is None else f.target,
                         "flags": f.flags()})
        t += hop.elapsed
    return rows


def cmd_trace(spec: ExperimentSpec, topology=None, link=None) -> int:
    """Run one route and write its frame log. ``topology`` and ``link`` may
    be injected (tests); by default both come from the config and seed."""
    from coopgeo.protocol import run_route

    cfg = spec.base
    if topology is None:
        topology, rng = trace_topology(cfg)
    else:
        rng = rng_for(cfg.seed, 0)
    pcfg = cfg.protocol()
    report = run_route(topology, topology.src, topology.dst, pcfg,
                       link or cfg.link(), pcfg.metric, rng, cfg.hop_limit)
    rows = trace_rows(report)
    conf = config_record(cfg)
    conf["delivered"] = report.delivered
    if spec.format == "json":
        text = render_json({"version": __version__, "config": conf,
                            "frames": [{k: fmt_value(v) for k, v in r.items()}
                                       for r in rows]})
    else:
        text = render_csv(rows, TRACE_COLUMNS, conf)
    _write(text, spec.output_path)
    return 0


# ---------------------------------------------------------------- entry

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coopgeo", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"coopgeo {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    helps = {"run": "one experiment, one output record",
             "sweep": "one row per (axis value, cooperative flag)",
             "trace": "frame log of a single route"}
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", type=Path, default=None,
                       help="flat key = value file; defaults apply when omitted")
        p.add_argument("--seed", type=int, default=None,
                       help="unsigned 64-bit seed, overrides the config file")
        p.add_argument("--out", type=Path, default=None, help="output file (stdout if omitted)")
        p.add_argument("--format", choices=FORMATS, default="csv")
        if name == "sweep":
            p.add_argument("--workers", type=int, default=1,
                           help="processes for sweep cells (output order is fixed)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = load_config(args.config)
        if args.seed is not None:
            spec.base = spec.base.replace(seed=args.seed)
    except ConfigError as e:
        print(f"coopgeo: config error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"coopgeo: {e}", file=sys.stderr)
        return 2
    if args.command == "run" and spec.sweep_axis is not None:
        print("coopgeo: run does not accept sweep_* keys; use sweep", file=sys.stderr)
        return 2
    spec.output_path = args.out
    spec.format = args.format
    try:
        if args.command == "run":
            return cmd_run(spec)
        if args.command == "sweep":
            return cmd_sweep(spec, max(1, args.workers))
        return cmd_trace(spec)
    except OSError as e:
        print(f"coopgeo: I/O error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
