"""Counter-based uniforms keyed by (seed, session, period, agent, stream).

Each draw is a pure function of its key, so sessions and agents can be
evaluated in any order (or in parallel) and still see the same numbers.
The mixer is the SplitMix64 finalizer applied once per key component.
"""

import numpy as np

from ._backend import njit

MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

GAMMA = np.uint64(_GAMMA)
M1 = np.uint64(_M1)
M2 = np.uint64(_M2)
S30 = np.uint64(30)
S27 = np.uint64(27)
S31 = np.uint64(31)
S11 = np.uint64(11)
S32 = np.uint64(32)
ONE = np.uint64(1)
INV53 = 1.0 / 9007199254740992.0


def mix64_int(z: int) -> int:
    """SplitMix64 finalizer on a Python int."""
    z &= MASK
    z = ((z ^ (z >> 30)) * _M1) & MASK
    z = ((z ^ (z >> 27)) * _M2) & MASK
    return z ^ (z >> 31)


def stream_key(seed: int, stream: int) -> int:
    return mix64_int((seed + _GAMMA * (stream + 1)) & MASK)


@njit(cache=True)
def mix64(z):
    z = (z ^ (z >> S30)) * M1
    z = (z ^ (z >> S27)) * M2
    return z ^ (z >> S31)


@njit(cache=True)
def uniform(key, session, period, agent):
    """U[0, 1) for one key; all arguments are uint64."""
    h = mix64(key ^ session)
    h = mix64(h ^ ((period << S32) | agent))
    return float(h >> S11) * INV53


def uniform_np(key: int, sessions: np.ndarray, period: int, agent: int) -> np.ndarray:
    """Vectorised over a uint64 array of session indices; bit-identical to ``uniform``."""
    z = np.uint64(key) ^ sessions
    z = _mix_np(z)
    z = _mix_np(z ^ np.uint64((period << 32) | agent))
    return (z >> S11).astype(np.float64) * INV53


def _mix_np(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> S30)) * M1
    z = (z ^ (z >> S27)) * M2
    return z ^ (z >> S31)
