"""Structural constants and Young conjugate samples for registered weights."""

from dataclasses import dataclass, field

import numpy as np

from _common import parse_config, show, write_rows
from wigcohen.weights import biconjugate_gap, check_conditions, get_weight, young_conjugate


@dataclass
class Config:
    weights: list[str] = field(default_factory=lambda: ["classical", "gevrey:2", "gevrey:3", "powerlog:1.5"])
    s_values: list[float] = field(default_factory=lambda: [0.5, 1.0, 2.0, 5.0])
    out_dir: str = "results"


def main():
    cfg = parse_config(Config, __doc__)
    rows = []
    for wid in cfg.weights:
        wf = get_weight(wid)
        rep = check_conditions(wf)
        row = {"weight": wid, "all_pass": rep.all_pass, "L": rep.L, "D": rep.D, "b": rep.b,
               "bicon_gap": biconjugate_gap(wf, np.linspace(0, 20, 81))}
        for s, v in zip(cfg.s_values, young_conjugate(wf, np.array(cfg.s_values))):
            row[f"phi*({s:g})"] = float(v)
        rows.append(row)
    show(rows)
    print("wrote", write_rows(cfg, "weights", rows))


if __name__ == "__main__":
    main()
