"""Engine configuration.

Every optimization the engines apply can be switched off individually;
results must not depend on any of these flags, only runtime does.  The
suite checks that equivalence, so keep new shortcuts behind a flag here.
"""

import os
from dataclasses import dataclass, replace

_THREADS_ENV = "BETTI_THREADS"
_DEFAULT_THREADS = 5


@dataclass(frozen=True)
class EngineConfig:
    """Optimization toggles and thread budget for all computations.

    emergent_pairs      skip reduction of columns whose youngest facet is
                        an unclaimed pivot with the column's own value
    clearing            within one volume, hand survivor lists down the
                        dimension ladder (dim 2 creators skip the dim-1
                        reduction, dim-1 creators skip the dim-0 sweep)
    comparison_clearing reuse the comparison volume's survivor lists for
                        the image computations in a matching run
    joint_unionfind     fuse union-find sweeps that walk the same edge
                        order (input+image dual sweeps, the three vertex
                        sweeps over the comparison's edges)
    cache_as_list       replay cached reduced columns by direct iteration
                        instead of through a scratch queue
    partition_sort      two-bucket stable partition instead of a full
                        argsort when a dimension has at most two distinct
                        filtration values
    parallel            run the matching pipeline on a thread pool
    threads             pool size; None reads BETTI_THREADS, default 5
    """

    emergent_pairs: bool = True
    clearing: bool = True
    comparison_clearing: bool = True
    joint_unionfind: bool = True
    cache_as_list: bool = True
    partition_sort: bool = True
    parallel: bool = True
    threads: int | None = None

    @classmethod
    def all_off(cls) -> "EngineConfig":
        """Baseline configuration with every optimization disabled."""
        return cls(
            emergent_pairs=False,
            clearing=False,
            comparison_clearing=False,
            joint_unionfind=False,
            cache_as_list=False,
            partition_sort=False,
            parallel=False,
        )

    def with_flags(self, **kwargs) -> "EngineConfig":
        return replace(self, **kwargs)

    def resolved_threads(self) -> int:
        if self.threads is not None:
            return max(1, int(self.threads))
        env = os.environ.get(_THREADS_ENV, "").strip()
        if env:
            try:
                return max(1, int(env))
            except ValueError:
                pass
        return _DEFAULT_THREADS
