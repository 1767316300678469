"""Operation tallies threaded explicitly through every kernel."""
from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field, fields
from typing import List, Optional, Tuple


@dataclass
class OpCounter:
    """Counts ring operations, matrix products and workspace.

    mults       ring multiplications outside of skew-unitary applications
    ymults      ring multiplications spent applying Y or phi(Y)
    base_mults  base-field multiplications (ring mults times the ring's cost)
    adds        ring additions and subtractions
    halvings    divisions by 2
    products    matrix-product calls at the outermost level
    workspace   scalars currently held in explicit temporaries
    peak_workspace  high-water mark of ``workspace``

    When ``steps`` is a list, schedules append ``(level, label, dest)``.
    """

    mults: int = 0
    ymults: int = 0
    base_mults: int = 0
    adds: int = 0
    halvings: int = 0
    products: int = 0
    workspace: int = 0
    peak_workspace: int = 0
    steps: Optional[List[Tuple[int, str, str]]] = None
    _depth: int = field(default=0, repr=False)

    def reset(self):
        for f in fields(self):
            if f.name not in ("steps", "_depth"):
                setattr(self, f.name, 0)
        if self.steps is not None:
            self.steps = []

    def mul(self, k: int, cost: int = 1):
        self.mults += k
        self.base_mults += k * cost

    def ymul(self, k: int, cost: int = 1):
        self.ymults += k
        self.base_mults += k * cost

    def add(self, k: int):
        self.adds += k

    def product(self):
        if self._depth == 0:
            self.products += 1

    @contextmanager
    def opaque(self):
        """Products issued inside are folded into the enclosing one."""
        self._depth += 1
        try:
            yield self
        finally:
            self._depth -= 1

    def alloc(self, k: int):
        self.workspace += k
        if self.workspace > self.peak_workspace:
            self.peak_workspace = self.workspace

    def free(self, k: int):
        self.workspace -= k

    def step(self, level: int, label: str, dest: str):
        if self.steps is not None:
            self.steps.append((level, label, dest))

    def snapshot(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)
                if f.name not in ("steps", "_depth")}
