"""Reproducible random streams.

A stream is identified by ``(master_seed, stream)``, two unsigned 64-bit
integers.  They are mixed by numpy's ``SeedSequence`` hash with the stream
index used as the spawn key, i.e. the generator is

    PCG64(SeedSequence(entropy=master_seed, spawn_key=(stream,)))

so distinct stream indices give statistically independent generators and the
result never depends on how many other streams exist or in which order they
are consumed.
"""
import numpy as np

from .errors import ParameterError

_MASK64 = (1 << 64) - 1


def make_rng(master_seed: int, stream: int = 0) -> np.random.Generator:
    if not (0 <= master_seed <= _MASK64) or not (0 <= stream <= _MASK64):
        raise ParameterError("master_seed and stream must be unsigned 64-bit integers")
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(seq))


def stream_index(n: int, replica: int) -> int:
    """Stream index of replica ``replica`` at grid point ``n``: ``n << 32 | replica``."""
    if not (0 <= n < 1 << 32) or not (0 <= replica < 1 << 32):
        raise ParameterError("n and replica must fit in 32 bits")
    return (int(n) << 32) | int(replica)
