"""Per-path random streams.

Every simulated path owns a generator derived purely from
``(master_seed, path_index)``, so results never depend on how paths are
scheduled across workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

_U64 = 2**64


@dataclass(frozen=True)
class SeedStream:
    master_seed: int
    path_index: int

    def __post_init__(self):
        for name in ("master_seed", "path_index"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not (0 <= v < _U64):
                raise ConfigError(f"{name} must be a 64-bit unsigned integer, got {v!r}")

    def generator(self) -> np.random.Generator:
        # spawn_key=(i,) is exactly the i-th child of SeedSequence(master).spawn()
        seq = np.random.SeedSequence(int(self.master_seed), spawn_key=(int(self.path_index),))
        return np.random.Generator(np.random.PCG64(seq))
