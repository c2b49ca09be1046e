"""Haar sampling on U(d)/SU(d) and random walks on synthetic generators.

The walk generators are Haar-random matrices standing in for the images of
mapping-class generators. Equidistribution of the walk only needs the
generated subgroup to be dense, which holds for Haar-generic generators
almost surely; the true quantum representation is never constructed.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict, field
from typing import Optional

import numpy as np

from .errors import DegenerateSample, DimensionMismatch, InvalidConfig
from .tqft import Level, verlinde_dimension

UNITARITY_TOL = 1e-10
DET_TOL = 1e-9
REORTHO_EVERY = 64
CHUNK = 4096
# letters are pre-multiplied into blocks; the block alphabet stays below this size
MAX_BLOCKS = 256
# spawn_key prefixes for the independent streams derived from one seed
_GENERATOR_STREAM = 0
_TRIAL_STREAM = 1


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Philox stream for ``(seed, *key)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def _check_group(group: str) -> str:
    g = group.upper()
    if g not in ("U", "SU"):
        raise InvalidConfig(f"group must be 'U' or 'SU', got {group!r}")
    return g


def _ginibre(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _to_su(u: np.ndarray) -> np.ndarray:
    d = u.shape[-1]
    det = np.linalg.det(u)
    root = np.exp(1j * np.angle(det) / d)
    return u / root[..., None, None]


def haar_batch(dim: int, n: int, group: str = "U", rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """n Haar-random d x d matrices, shape (n, d, d).

    QR of a complex Ginibre matrix, with each column of Q multiplied by the
    phase of the matching diagonal entry of R so that R has a positive real
    diagonal. Without this correction the law of Q is not Haar.
    """
    if dim < 2:
        raise InvalidConfig(f"dim must be >= 2, got {dim}")
    group = _check_group(group)
    rng = np.random.default_rng() if rng is None else rng
    for attempt in range(2):
        z = _ginibre(rng, (n, dim, dim))
        q, r = np.linalg.qr(z)
        diag = np.diagonal(r, axis1=-2, axis2=-1)
        if np.min(np.abs(diag)) > 1e-12:
            break
    else:
        raise DegenerateSample("numerically zero pivot in QR after one resample")
    q = q * (diag / np.abs(diag))[:, None, :]
    if group == "SU":
        q = _to_su(q)
    return q


@dataclass(frozen=True)
class UnitarySample:
    dim: int
    group: str
    entries: np.ndarray = field(repr=False)

    def unitarity_error(self) -> float:
        u = self.entries
        return float(np.max(np.abs(u.conj().T @ u - np.eye(self.dim))))

    def det_error(self) -> float:
        return float(abs(np.linalg.det(self.entries) - 1))

    def check(self) -> None:
        if self.unitarity_error() > UNITARITY_TOL:
            raise DegenerateSample(f"unitarity error {self.unitarity_error():.3e}")
        if self.group == "SU" and self.det_error() > DET_TOL:
            raise DegenerateSample(f"det error {self.det_error():.3e}")


def sample_haar_unitary(dim: int, group: str = "U", rng: Optional[np.random.Generator] = None) -> UnitarySample:
    u = haar_batch(dim, 1, group, rng)[0]
    s = UnitarySample(dim, _check_group(group), u)
    s.check()
    return s


def haar_entries(dim: int, n: int, rng: Optional[np.random.Generator] = None, chunk: int = 1 << 22) -> np.ndarray:
    """(1,1)-entries of n Haar unitaries without forming the matrices.

    The first column of the phase-corrected QR factor is the normalized first
    Ginibre column, so the entry is z_1 / |z| for a standard complex Gaussian
    vector z. Works at any d, including d in the hundreds.
    """
    if dim < 2:
        raise InvalidConfig(f"dim must be >= 2, got {dim}")
    rng = np.random.default_rng() if rng is None else rng
    out = np.empty(n, dtype=complex)
    per = max(1, chunk // dim)
    for lo in range(0, n, per):
        hi = min(n, lo + per)
        z = _ginibre(rng, (hi - lo, dim))
        out[lo:hi] = z[:, 0] / np.linalg.norm(z, axis=1)
    return out


# --------------------------------------------------------------------------
# walks


@dataclass(frozen=True)
class WalkConfig:
    dim: int
    group: str = "SU"
    num_generators: int = 3
    include_inverses: bool = True
    walk_length: Optional[int] = None
    num_samples: int = 10_000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "group", _check_group(self.group))
        if self.dim < 2:
            raise InvalidConfig(f"dim must be >= 2, got {self.dim}")
        if self.num_generators < 2:
            raise InvalidConfig(f"need at least 2 generators, got {self.num_generators}")
        if self.walk_length is None:
            object.__setattr__(self, "walk_length", 50 * self.dim)
        if self.walk_length < 1:
            raise InvalidConfig(f"walk length must be >= 1, got {self.walk_length}")
        if self.num_samples < 1:
            raise InvalidConfig(f"num_samples must be >= 1, got {self.num_samples}")
        if not 0 <= self.seed < 2**64:
            raise InvalidConfig("seed must be a 64-bit unsigned integer")

    @property
    def alphabet_size(self) -> int:
        return self.num_generators * (2 if self.include_inverses else 1)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class EntrySampleSet:
    values: np.ndarray
    kind: str
    meta: dict

    @property
    def dim(self) -> int:
        return int(self.meta["dim"])

    def __len__(self) -> int:
        return self.values.size


def walk_alphabet(config: WalkConfig) -> np.ndarray:
    """Generator matrices, followed by their inverses when enabled."""
    rng = make_rng(config.seed, _GENERATOR_STREAM)
    gens = haar_batch(config.dim, config.num_generators, config.group, rng)
    if config.include_inverses:
        gens = np.concatenate([gens, np.conj(np.swapaxes(gens, -1, -2))])
    return gens


def walk_words(config: WalkConfig, lo: int = 0, hi: Optional[int] = None) -> np.ndarray:
    """Letter indices for trials lo..hi-1; trial t uses its own stream."""
    hi = config.num_samples if hi is None else hi
    m = config.alphabet_size
    words = np.empty((hi - lo, config.walk_length), dtype=np.intp)
    for t in range(lo, hi):
        words[t - lo] = make_rng(config.seed, _TRIAL_STREAM, t).integers(0, m, config.walk_length)
    return words


def _reorthonormalize(s: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(s)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (diag / np.abs(diag))[:, None, :]


def block_size(alphabet_size: int, max_blocks: int = MAX_BLOCKS) -> int:
    b = 1
    while alphabet_size ** (b + 1) <= max_blocks:
        b += 1
    return b


def block_alphabet(alphabet: np.ndarray, b: int) -> np.ndarray:
    """All ordered products of b letters; index is the base-m word, first letter most significant."""
    m, d = alphabet.shape[0], alphabet.shape[-1]
    mats = alphabet
    for _ in range(b - 1):
        mats = (mats[:, None] @ alphabet[None, :]).reshape(-1, d, d)
    return mats


def _steps(words: np.ndarray, m: int, b: int):
    """Yield (block_length, index column) covering each word left to right."""
    n, length = words.shape
    nb = length // b
    if nb:
        place = m ** np.arange(b - 1, -1, -1)
        blocks = words[:, : nb * b].reshape(n, nb, b) @ place
        for t in range(nb):
            yield b, blocks[:, t]
    for t in range(nb * b, length):
        yield 1, words[:, t]


def _apply(state: np.ndarray, mats: np.ndarray, idx: np.ndarray) -> None:
    # right-multiply row groups sharing a letter with one GEMM each
    d = mats.shape[-1]
    for j in np.unique(idx):
        mask = idx == j
        state[mask] = (state[mask].reshape(-1, d) @ mats[j]).reshape(state[mask].shape)


def _walk_products(state, letters, blocks, b, words, renorm):
    m = letters.shape[0]
    done = 0
    for size, idx in _steps(words, m, b):
        _apply(state, blocks if size == b else letters, idx)
        before, done = done, done + size
        if done // REORTHO_EVERY > before // REORTHO_EVERY:
            state = renorm(state)
    return state


def _entry_chunk(letters: np.ndarray, blocks: np.ndarray, b: int, words: np.ndarray) -> np.ndarray:
    # row vector e_1^T W_1 ... W_t; its first coordinate is the (1,1)-entry
    d = letters.shape[-1]
    v = np.zeros((words.shape[0], d), dtype=complex)
    v[:, 0] = 1.0
    v = _walk_products(v, letters, blocks, b, words,
                       lambda x: x / np.linalg.norm(x, axis=1, keepdims=True))
    return v[:, 0].copy()


def _trace_chunk(letters: np.ndarray, blocks: np.ndarray, b: int, words: np.ndarray) -> np.ndarray:
    d = letters.shape[-1]
    s = np.broadcast_to(np.eye(d, dtype=complex), (words.shape[0], d, d)).copy()
    s = _walk_products(s, letters, blocks, b, words, _reorthonormalize)
    err = np.max(np.abs(np.conj(np.swapaxes(s, -1, -2)) @ s - np.eye(d)))
    if err > UNITARITY_TOL:
        raise DegenerateSample(f"walk products drifted off U(d): {err:.3e}")
    return np.trace(s, axis1=-2, axis2=-1)


def _run(config: WalkConfig, kernel, kind: str, threads: int, max_blocks: int) -> EntrySampleSet:
    letters = walk_alphabet(config)
    b = min(block_size(letters.shape[0], max_blocks), config.walk_length)
    blocks = block_alphabet(letters, b)
    bounds = [(lo, min(config.num_samples, lo + CHUNK)) for lo in range(0, config.num_samples, CHUNK)]

    def work(lohi):
        return kernel(letters, blocks, b, walk_words(config, *lohi))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, bounds))
    else:
        parts = [work(lohi) for lohi in bounds]
    meta = {"source": "walk", "kind": kind, **config.to_dict()}
    return EntrySampleSet(np.concatenate(parts), kind, meta)


def run_entry_walk(config: WalkConfig, threads: int = 1) -> EntrySampleSet:
    """(1,1)-entries of products of ``walk_length`` random letters."""
    # row-vector updates are cheap enough that blocking only adds overhead
    return _run(config, _entry_chunk, "entry", threads, max_blocks=1)


def run_trace_walk(config: WalkConfig, threads: int = 1) -> EntrySampleSet:
    """Traces of products of ``walk_length`` random letters."""
    return _run(config, _trace_chunk, "trace", threads, max_blocks=MAX_BLOCKS)


def haar_entry_samples(dim: int, n: int, seed: int, group: str = "U", full: bool = False) -> EntrySampleSet:
    """Haar (1,1)-entries; ``full`` samples whole matrices instead of one column."""
    rng = make_rng(seed, 2)
    group = _check_group(group)
    if full or group == "SU":
        vals = np.concatenate(
            [haar_batch(dim, min(CHUNK, n - lo), group, rng)[:, 0, 0] for lo in range(0, n, CHUNK)]
        ) if n else np.empty(0, dtype=complex)
    else:
        vals = haar_entries(dim, n, rng)
    meta = {"source": "haar", "kind": "entry", "dim": dim, "group": group,
            "num_samples": n, "seed": seed, "full": bool(full or group == "SU")}
    return EntrySampleSet(vals, "entry", meta)


def rescale_to_Z(entries: EntrySampleSet, level: Level, genus: int) -> np.ndarray:
    """|Z| = mu^(1-g) |entry| for each sample."""
    d = verlinde_dimension(level, genus)
    if entries.dim != d:
        raise DimensionMismatch(
            f"samples have dim {entries.dim}, but r={level.r}, g={genus} needs d={d}"
        )
    return level.mu ** (1 - genus) * np.abs(entries.values)
