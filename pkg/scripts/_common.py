"""Shared helpers for the experiment scripts: config parsing and result writing."""

import argparse
import csv
import dataclasses
import json
from pathlib import Path


def parse_config(cls, description: str):
    """Build an argparse parser from a dataclass and return an instance."""
    p = argparse.ArgumentParser(description=description)
    for f in dataclasses.fields(cls):
        default = f.default if f.default is not dataclasses.MISSING else f.default_factory()
        flag = "--" + f.name.replace("_", "-")
        if isinstance(default, (list, tuple)):
            kind = type(default[0]) if default else str
            p.add_argument(flag, type=kind, nargs="+", default=list(default))
        else:
            p.add_argument(flag, type=type(default), default=default)
    return cls(**vars(p.parse_args()))


def write_rows(cfg, name: str, rows: list[dict]) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{name}.csv"
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    (out / f"{name}.config.json").write_text(json.dumps(dataclasses.asdict(cfg), indent=2, sort_keys=True))
    return path


def show(rows: list[dict]) -> None:
    keys = list(rows[0])
    print("  ".join(f"{k:>12}" for k in keys))
    for r in rows:
        print("  ".join(f"{v:>12.4g}" if isinstance(v, float) else f"{str(v):>12}" for v in r.values()))
