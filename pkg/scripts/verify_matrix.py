"""Run the intertwining suites and summarise worst residuals per identity."""

from dataclasses import dataclass

from _common import parse_config, show, write_rows
from wigcohen.verify import SUITES, MatrixConfig, run_suite


@dataclass
class Config:
    suite: str = "all"
    backend: str = "grid"
    tol: float = 1e-6
    out_dir: str = "results"


def main():
    cfg = parse_config(Config, __doc__)
    reps = run_suite(cfg.suite, MatrixConfig(backend=cfg.backend, tol=cfg.tol))
    rows = []
    for name in SUITES[cfg.suite]:
        mine = [r for r in reps if r.name == name]
        if not mine:
            continue
        worst = max(mine, key=lambda r: r.rel_residual)
        rows.append({"identity": name, "cases": len(mine), "worst_rel": worst.rel_residual,
                     "failed": sum(r.rel_residual > cfg.tol for r in mine),
                     "worst_case": f"{worst.operator} P={worst.P} q={worst.q} w={worst.w}"})
    show(rows)
    print("wrote", write_rows(cfg, f"verify_{cfg.suite}_{cfg.backend}", rows))


if __name__ == "__main__":
    main()
