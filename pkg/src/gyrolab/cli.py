"""gyrolab command line.

Exit status: 0 when every check passes (sampled passes included), 1 when any
check fails or exhausts its budget, 2 on usage, file or parse errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

from gyrolab import suites
from gyrolab.core import GyroError
from gyrolab.models import CayleyFormatError, MobiusDisk
from gyrolab.neighborhoods import CONDITIONS, FamilyError, default_family
from gyrolab.registry import parse_model_spec

COMMANDS = ("axioms", "identities", "conditions", "lifted", "hm-demo", "path", "metric", "search", "replay")
SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    model: str = "zn:4"
    samples: int = 10_000
    seed: int = 0
    tolerance: float = 1e-9
    output: str = "text"
    out: str | None = None
    order: int | None = None
    budget: int | None = None
    values: list[str] = field(default_factory=list)
    steps: int = 8
    family: str | None = None
    conditions: list[int] = field(default_factory=lambda: list(CONDITIONS))
    replay: str | None = None

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.samples < 1:
            raise UsageError("--samples must be >= 1")
        if not self.tolerance > 0:
            raise UsageError("--tolerance must be > 0")
        if self.command == "search" and self.order is None:
            raise UsageError("search needs --order")
        if self.command == "replay" and self.replay is None:
            raise UsageError("replay needs --replay FILE")
        if self.steps < 1:
            raise UsageError("--steps must be >= 1")
        bad = [c for c in self.conditions if c not in CONDITIONS]
        if bad:
            raise UsageError(f"--condition must be in 1..9, got {bad[0]}")

    def to_json(self) -> dict:
        out = {"model": self.model, "samples": self.samples, "seed": self.seed, "tolerance": self.tolerance}
        if self.command == "search":
            out = {"order": self.order, "budget": self.budget}
        elif self.command in ("conditions", "lifted"):
            out.update(family=self.family, conditions=self.conditions)
        elif self.command == "path":
            out.update(values=self.values, steps=self.steps)
        elif self.command == "replay":
            out = {"replay": self.replay}
        return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gyrolab", description="Gyrogroup verification toolkit.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--model", default="zn:4", help="zn:<n>, klein, mobius, or a Cayley table file")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0, help="overridden by $GYROLAB_SEED")
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--output", choices=("json", "csv", "text"), default="text")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--order", type=int, help="table order for search")
    p.add_argument("--budget", type=int, help="max tables scanned by search")
    p.add_argument("--value", action="append", default=[], dest="values",
                   help="step-function value (repeat for equal-width pieces)")
    p.add_argument("--steps", type=int, default=8, help="path grid size")
    p.add_argument("--family", choices=("singleton", "lattice", "dyadic"),
                   help="base family (default: singleton on finite models, dyadic on mobius)")
    p.add_argument("--condition", type=int, action="append", dest="conditions",
                   help="condition id 1..9 (repeatable, default all)")
    p.add_argument("--replay", help="JSON report to re-verify")
    return p


def config_from_args(argv: list[str] | None = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    seed = ns.seed
    env = os.environ.get("GYROLAB_SEED")
    if env is not None and env.strip():
        try:
            seed = int(env)
        except ValueError:
            raise UsageError(f"GYROLAB_SEED must be an integer, got {env!r}") from None
    cfg = RunConfig(
        command=ns.command, model=ns.model, samples=ns.samples, seed=seed, tolerance=ns.tolerance,
        output=ns.output, out=ns.out, order=ns.order, budget=ns.budget, values=ns.values,
        steps=ns.steps, family=ns.family,
        conditions=sorted(set(ns.conditions)) if ns.conditions else list(CONDITIONS),
        replay=ns.replay,
    )
    cfg.validate()
    return cfg


def _parse_value(model, text: str):
    try:
        x = complex(text.replace("i", "j")) if isinstance(model, MobiusDisk) else int(text)
    except ValueError:
        raise UsageError(f"--value {text!r} is not an element of {model.name}") from None
    if not model.contains(x):
        raise UsageError(f"--value {text!r} is not an element of {model.name}")
    return x


def execute(cfg: RunConfig) -> dict:
    """Run one command and return the JSON document."""
    extra = {}
    if cfg.command == "search":
        rows, extra["search"] = suites.search(cfg.order, cfg.budget)
    elif cfg.command == "replay":
        try:
            document = json.loads(Path(cfg.replay).read_text())
        except json.JSONDecodeError as exc:
            raise UsageError(f"{cfg.replay}: line {exc.lineno}: {exc.msg}") from None
        rows = suites.replay_rows(document)
    else:
        model = parse_model_spec(cfg.model, cfg.tolerance)
        if cfg.command == "axioms":
            rows = suites.axioms(model, cfg.samples, cfg.seed, cfg.tolerance)
        elif cfg.command == "identities":
            rows = suites.identities(model, cfg.samples, cfg.seed, cfg.tolerance)
        elif cfg.command in ("conditions", "lifted"):
            family = default_family(model, cfg.family)
            run = suites.conditions if cfg.command == "conditions" else suites.lifted
            rows = run(model, family, cfg.samples, cfg.seed, cfg.conditions)
        elif cfg.command == "hm-demo":
            rows = suites.hm_demo(model, cfg.samples, cfg.seed, cfg.tolerance)
        elif cfg.command == "path":
            values = [_parse_value(model, v) for v in cfg.values] or [model.sample(random.Random(cfg.seed))]
            rows = suites.path(model, suites.uniform_step(model, values), cfg.steps)
        else:
            rows = suites.metric(model, cfg.samples, cfg.seed, cfg.tolerance)
    rows.sort(key=lambda r: (r.suite, r.check))
    return {
        "schema": SCHEMA_VERSION,
        "command": cfg.command,
        "config": cfg.to_json(),
        "status": "pass" if all(r.passed for r in rows) else "fail",
        "results": [r.to_json() for r in rows],
        **extra,
    }


def render(document: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(document, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "check", "status", "residual", "witness"])
        for r in document["results"]:
            witness = "" if r["witness"] is None else json.dumps(r["witness"], sort_keys=True, separators=(",", ":"))
            w.writerow([r["suite"], r["check"], r["status"], "" if r["residual"] is None else repr(r["residual"]), witness])
        return buf.getvalue()
    lines = []
    for r in document["results"]:
        res = "" if r["residual"] is None else f"  residual={r['residual']:.3g}"
        tag = " (sampled)" if r["sampled"] else ""
        lines.append(f"{r['status'].upper():<16} {r['suite']}/{r['check']}{tag}{res}")
    lines.append(f"overall: {document['status']}")
    return "\n".join(lines) + "\n"


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = config_from_args(argv)
    except SystemExit as exc:  # argparse usage errors
        return 2 if exc.code else 0
    except UsageError as exc:
        print(f"gyrolab: {exc}", file=sys.stderr)
        return 2
    try:
        document = execute(cfg)
    except CayleyFormatError as exc:
        print(f"gyrolab: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"gyrolab: {exc.filename}: file not found", file=sys.stderr)
        return 2
    except (UsageError, FamilyError, GyroError, ValueError) as exc:
        print(f"gyrolab: {exc}", file=sys.stderr)
        return 2
    text = render(document, cfg.output)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if document["status"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
