"""Fitted constant C in g(r) <= C r^-s e^{-c r^2} across decay rates c."""

from dataclasses import dataclass, field

from _common import parse_config, show, write_rows
from wigcohen.gallery import green_bound


@dataclass
class Config:
    rates: list[float] = field(default_factory=lambda: [0.0, 0.05, 0.1, 0.2, 0.24, 0.3])
    s: float = 2.0
    r_max: float = 6.0
    out_dir: str = "results"


def main():
    cfg = parse_config(Config, __doc__)
    rows = []
    for c in cfg.rates:
        gb = green_bound(c=c, s=cfg.s, r_max=cfg.r_max)
        rows.append({"c": c, "C": gb.C, "violations": gb.violations, "checked": gb.checked})
    show(rows)
    print("wrote", write_rows(cfg, "green_bound", rows))


if __name__ == "__main__":
    main()
