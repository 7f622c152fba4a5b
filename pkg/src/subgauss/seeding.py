"""Deterministic seed derivation for independent Monte Carlo trials."""

__all__ = ["mix_seed"]

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix_seed(master: int, index: int) -> int:
    """Derive the seed of trial `index` from a 64-bit master seed.

    Applies the splitmix64 finalizer to ``master + (index + 1) * golden``
    (golden = 2^64/phi rounded to odd).  For each fixed index the map is a
    bijection on 64-bit integers, so distinct trials get distinct,
    well-scrambled streams, and the value depends only on (master, index),
    never on execution order or thread count.
    """
    z = (master + (index + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)
