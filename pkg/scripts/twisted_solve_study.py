"""Residual of the Green-function solver for the twisted Laplacian versus grid size."""

import time
from dataclasses import dataclass, field

import numpy as np

from _common import parse_config, show, write_rows
from wigcohen.gallery import twisted_residual, twisted_solve
from wigcohen.grid import Grid2


@dataclass
class Config:
    sizes: list[int] = field(default_factory=lambda: [16, 32, 64, 128])
    L: float = 8.0
    width: float = 1.0
    out_dir: str = "results"


def main():
    cfg = parse_config(Config, __doc__)
    rows = []
    for N in cfg.sizes:
        f = Grid2.sample(lambda x, y: np.exp(-(x * x + y * y) / (2 * cfg.width**2)), N, cfg.L)
        t0 = time.perf_counter()
        u = twisted_solve(f)
        dt = time.perf_counter() - t0
        rows.append({"N": N, "h": 2 * cfg.L / N, "residual": twisted_residual(f, u),
                     "sup_u": float(np.max(np.abs(u.values))), "seconds": dt})
    show(rows)
    print("wrote", write_rows(cfg, "twisted_solve", rows))


if __name__ == "__main__":
    main()
