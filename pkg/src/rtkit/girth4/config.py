from __future__ import annotations

import math
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class GirthConfig:
    """Tunable constants of the approximate girth pipeline.

    ``c1``/``c2`` scale the two sample sizes (ceil(c1 n^(1/3)), ceil(c2 n^(2/3)));
    ``elim_factor`` gives elim_factor * ceil(log2 n) eliminator rounds.
    ``cap_scale`` multiplies the ball-size caps that trigger a restart, and
    ``retry_limit`` bounds the number of restarts.
    """

    c1: float = 100.0
    c2: float = 100.0
    elim_factor: int = 10
    cap_scale: float = 1.0
    retry_limit: int = 5
    regularize: bool = True

    def __post_init__(self):
        if self.c1 <= 0 or self.c2 <= 0:
            raise ValueError("sample constants must be positive")
        if self.elim_factor < 1:
            raise ValueError("elim_factor must be at least 1")
        if self.retry_limit < 0:
            raise ValueError("retry_limit must be non-negative")

    def rounds(self, n: int) -> int:
        return self.elim_factor * max(1, math.ceil(math.log2(n)))

    def cap_ball2(self, n: int) -> int:
        lg = max(1.0, math.log2(n))
        return math.ceil(self.cap_scale * 4 * n ** (2 / 3) * lg * (100 / self.c1))

    def cap_ball3(self, n: int) -> int:
        lg = max(1.0, math.log2(n))
        return math.ceil(self.cap_scale * 4 * n ** (1 / 3) * lg * (100 / self.c2))

    def as_dict(self) -> dict:
        return asdict(self)
