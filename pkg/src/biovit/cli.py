"""Command-line entry point: ``biovit decode|analyze|synth|trend``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import report as report_mod
from .pipeline import PipelineConfig, PipelineError, run_pipeline
from .protocol import decode_stream
from .session import SessionError, export_csv, from_packets, ingest_csv
from .synth import SynthError, SynthSpec, generate_cohort, reference_like_specs
from .trend import TrendError, TrendModelKind, classify_shape, equation, fit

log = logging.getLogger("biovit")


def _color() -> bool:
    return sys.stderr.isatty() and not os.environ.get("BIOVIT_NO_COLOR")


def warn(msg: str) -> None:
    if _color():
        msg = f"\033[33m{msg}\033[0m"
    print(msg, file=sys.stderr)


def read_config_file(path: Path) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for n, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{n}: expected key = value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _models(text: str) -> tuple[TrendModelKind, ...]:
    return tuple(TrendModelKind.parse(p) for p in text.split(",") if p.strip())


CONFIG_KEYS = {
    "input_format": str,
    "models": _models,
    "efga_threshold": float,
    "efga_x100": _bool,
    "efga_display": str,
    "output_format": str,
    "confidence": float,
    "item_pair": lambda s: tuple(p.strip() for p in s.split(",")),
}


def build_config(args: argparse.Namespace) -> PipelineConfig:
    """Merge flags over the config file over defaults."""
    values: dict = {}
    if args.config:
        for key, raw in read_config_file(Path(args.config)).items():
            if key not in CONFIG_KEYS:
                raise ValueError(f"unknown config key {key!r}")
            values[key] = CONFIG_KEYS[key](raw)
    flags = {
        "input_format": args.input_format,
        "models": _models(args.models) if args.models else None,
        "efga_threshold": args.efga_threshold,
        "efga_x100": args.efga_x100,
        "efga_display": args.efga_display,
        "output_format": args.format,
        "confidence": args.confidence,
        "item_pair": tuple(args.item_pair.split(",")) if args.item_pair else None,
    }
    values.update({k: v for k, v in flags.items() if v is not None})
    return PipelineConfig(input_paths=[Path(p) for p in args.inputs], **values)


def cmd_decode(args) -> int:
    data = Path(args.capture).read_bytes()
    packets, errors = decode_stream(data)
    if errors:
        warn(f"{len(errors)} frame error{'s' if len(errors) != 1 else ''} while decoding {args.capture}")
        for e in errors[: args.max_errors]:
            warn(f"  {e.kind.value} at byte {e.byte_offset}")
    session = from_packets(packets, participant_id=Path(args.capture).stem)
    text = export_csv(session)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    print(f"decoded {len(packets)} packets, {len(session)} attention samples", file=sys.stderr)
    return 0


def cmd_analyze(args) -> int:
    config = build_config(args)
    report = run_pipeline(config)
    report_mod.render_to(report, config.output_format, args.output)
    for w in report.warnings:
        warn(f"warning: {w}")
    return 0


def _spec_from_dict(d: dict, default_seed: int) -> SynthSpec:
    return SynthSpec(
        n_samples=int(d["n_samples"]),
        trend=TrendModelKind.parse(d.get("trend", "quadratic")),
        coefficients=tuple(float(c) for c in d["coefficients"]),
        noise_sd=float(d.get("noise_sd", 0.0)),
        clamp=bool(d.get("clamp", False)),
        seed=int(d.get("seed", default_seed)),
        quantize=bool(d.get("quantize", False)),
        participant_id=d.get("participant_id"),
    )


def load_synth_specs(path: Path, seed: Optional[int]) -> list[SynthSpec]:
    """JSON spec: either a list of participant specs or
    ``{"seed": ..., "participants": [...]}``, or ``{"preset": "reference", "n_samples": N}``."""
    doc = json.loads(path.read_text(encoding="utf-8"))
    if isinstance(doc, list):
        doc = {"participants": doc}
    base_seed = seed if seed is not None else int(doc.get("seed", 0))
    if doc.get("preset") == "reference":
        return reference_like_specs(int(doc["n_samples"]), base_seed)
    return [_spec_from_dict(p, base_seed) for p in doc.get("participants", [])]


def cmd_synth(args) -> int:
    if args.spec:
        specs = load_synth_specs(Path(args.spec), args.seed)
    else:
        specs = reference_like_specs(args.n_samples, args.seed or 0)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    for s in generate_cohort(specs):
        (out / f"{s.participant_id}.csv").write_text(export_csv(s), encoding="utf-8")
    print(f"wrote {len(specs)} sessions to {out}", file=sys.stderr)
    return 0


def cmd_trend(args) -> int:
    session = ingest_csv(Path(args.csv).read_text(encoding="utf-8"), Path(args.csv).stem)
    f = fit(session, TrendModelKind.parse(args.model))
    print(equation(f))
    print(f"full precision: {equation(f, compact=False)}")
    a = f.accuracy
    print(f"MAPE {a.mape:.2f}  MAD {a.mad:.1f}  MSD {a.msd:.1f}")
    if f.kind is TrendModelKind.QUADRATIC:
        print(f"shape: {classify_shape(f).value}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="biovit", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decode", help="decode a binary capture into session CSV")
    d.add_argument("capture")
    d.add_argument("-o", "--output")
    d.add_argument("--max-errors", type=int, default=20, help="errors listed on stderr")
    d.set_defaults(func=cmd_decode)

    a = sub.add_parser("analyze", help="run the cohort pipeline")
    a.add_argument("inputs", nargs="+", metavar="FILE")
    a.add_argument("--config")
    a.add_argument("--input-format", choices=("csv", "capture", "summary"))
    a.add_argument("--models", help="comma list, e.g. linear,quadratic")
    a.add_argument("--efga-threshold", type=float)
    a.add_argument("--efga-x100", action="store_true", default=None)
    a.add_argument("--efga-display", choices=("truncate", "round"))
    a.add_argument("--confidence", type=float)
    a.add_argument("--item-pair", help="two of Mo,MAPE,EFGA, e.g. Mo,EFGA")
    a.add_argument("--format", choices=("markdown", "csv", "json"))
    a.add_argument("-o", "--output", help="file (markdown/json) or directory (csv)")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("synth", help="generate synthetic sessions")
    s.add_argument("--spec", help="JSON cohort spec; default is the reference-like cohort")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--n-samples", type=int, default=300)
    s.set_defaults(func=cmd_synth)

    t = sub.add_parser("trend", help="fit one trend model and print its equation")
    t.add_argument("csv")
    t.add_argument("--model", default="quadratic")
    t.set_defaults(func=cmd_trend)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError, PipelineError, SessionError, SynthError, TrendError) as exc:
        print(f"biovit: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
