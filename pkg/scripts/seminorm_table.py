"""Verdict table for all six seminorm systems over weights, test functions and lambda."""

import warnings
from dataclasses import dataclass, field

from _common import parse_config, show, write_rows
from wigcohen.poly import Poly
from wigcohen.polygauss import PolyGauss
from wigcohen.seminorms import Rational, seminorm
from wigcohen.weights import get_weight


@dataclass
class Config:
    weights: list[str] = field(default_factory=lambda: ["classical", "gevrey:2"])
    lams: list[float] = field(default_factory=lambda: [0.5, 1.0, 2.0, 5.0])
    K: int = 12
    out_dir: str = "results"


def main():
    cfg = parse_config(Config, __doc__)
    funcs = {"gaussian": PolyGauss.gaussian(), "x*gaussian": PolyGauss.gaussian(Poly.var(0, 2)),
             "decoy": Rational.decoy()}
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for wid in cfg.weights:
            wf = get_weight(wid)
            for name, u in funcs.items():
                for lam in cfg.lams:
                    row = {"weight": wid, "u": name, "lam": lam}
                    for system in range(1, 7):
                        row[f"s{system}"] = seminorm(u, wf, system, lam, K=cfg.K).verdict
                    rows.append(row)
    show(rows)
    print("wrote", write_rows(cfg, "seminorms", rows))


if __name__ == "__main__":
    main()
