"""Grid Cohen transform against the closed form as the grid is refined.

For each quadratic phase and each N, reports the sup error on |x|,|y| <= box.
L <= 0 takes the half-width that grid_for picks for the phase.
"""

from dataclasses import dataclass, field

import numpy as np

from _common import parse_config, show, write_rows
from wigcohen.algebra import KernelSpec
from wigcohen.cohen import cohen_q
from wigcohen.polygauss import PolyGauss, cohen_q_exact
from wigcohen.verify import STANDARD_FUNCTIONS, STANDARD_PHASES, grid_for


@dataclass
class Config:
    sizes: list[int] = field(default_factory=lambda: [32, 64, 128, 256])
    L: float = 0.0
    box: float = 6.0
    out_dir: str = "results"


def main():
    cfg = parse_config(Config, __doc__)
    rows = []
    for pl, P in STANDARD_PHASES.items():
        if P.degree != 2:
            continue
        ker = KernelSpec(P)
        L = cfg.L if cfg.L > 0 else grid_for(ker)[1]
        for wl, w in STANDARD_FUNCTIONS.items():
            for N in cfg.sizes:
                G = cohen_q(w.on_grid(N, L), ker)
                X, Y = G.mesh()
                m = (np.abs(X) <= cfg.box) & (np.abs(Y) <= cfg.box)
                err = float(np.max(np.abs(G.values[m] - cohen_q_exact(w, ker)(X[m], Y[m]))))
                rows.append({"P": pl, "w": wl, "N": N, "L": L, "sup_err": err})
    show(rows)
    print("wrote", write_rows(cfg, "convergence", rows))


if __name__ == "__main__":
    main()
