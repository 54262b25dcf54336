"""Independent reference implementations used only by the tests."""

from __future__ import annotations

import numpy as np

from wigcohen.algebra import WeylOp

# letters of the free word: 0 = M1, 1 = M2, 2 = D1, 3 = D2 (also their normal-order rank)
_PAIR = {(2, 0), (3, 1)}  # D1 M1 and D2 M2 pick up the -i commutator


def words_of(B: WeylOp) -> dict[tuple[int, ...], complex]:
    out = {}
    for (m, n, h, k), c in B.terms.items():
        out[(0,) * m + (1,) * n + (2,) * h + (3,) * k] = c
    return out


def rewrite_product(a: WeylOp, b: WeylOp) -> WeylOp:
    """Multiply by concatenating words and applying one adjacent swap at a time.

    Each step takes the leftmost out-of-order pair (p, q) and replaces ..pq.. by
    ..qp.. plus, for D M pairs, -i times the word with both letters removed.
    """
    todo: dict[tuple[int, ...], complex] = {}
    for wa, ca in words_of(a).items():
        for wb, cb in words_of(b).items():
            todo[wa + wb] = todo.get(wa + wb, 0) + ca * cb
    done: dict[tuple[int, int, int, int], complex] = {}
    while todo:
        w, c = todo.popitem()
        pos = next((i for i in range(len(w) - 1) if w[i] > w[i + 1]), None)
        if pos is None:
            key = tuple(w.count(g) for g in range(4))
            done[key] = done.get(key, 0) + c
            continue
        swapped = w[:pos] + (w[pos + 1], w[pos]) + w[pos + 2:]
        todo[swapped] = todo.get(swapped, 0) + c
        if (w[pos], w[pos + 1]) in _PAIR:
            short = w[:pos] + w[pos + 2:]
            todo[short] = todo.get(short, 0) - 1j * c
    return WeylOp(done)


def wigner_quadrature(f, x: float, y: float, T: float = 16.0, n: int = 4001) -> complex:
    """Wig[f](x, y) = int e^{-ity} f(x + t/2, x - t/2) dt by the trapezoid rule."""
    t = np.linspace(-T, T, n)
    vals = np.exp(-1j * t * y) * f(x + t / 2, x - t / 2)
    return complex(np.trapezoid(vals, t))
