"""Encoder, ARQ transmission and decoders for Bob and Eve.

The pipeline for each of the L message blocks of k bits is:
scramble with S, encode with the systematic generator G, drop the punctured
positions R, then spread the surviving n bits over eta packets, alpha bits per
codeword per packet. Bob retransmits until every packet arrives; Eve listens
to every transmission and keeps the first clean copy she sees.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

import numpy as np

from .channel import JointErasureDist, sample_pairs
from .errors import (
    DimensionError,
    IncompleteReception,
    InvalidPattern,
    RetransmissionCapExceeded,
)
from .gf2 import BitMatrix, lu_invert, matmul_mod2, random_invertible
from .ldpc import (
    ERASED,
    PuncturePattern,
    TannerGraph,
    certify_pattern,
    find_puncture_pattern,
    peel_decode,
    systematic_generator,
)

DEFAULT_MAX_RETX = 10**6

__all__ = [
    "DEFAULT_MAX_RETX",
    "CodecContext",
    "PacketSet",
    "TrialResult",
    "EveDecode",
    "build_context",
    "random_message",
    "pad_message",
    "encode_message",
    "interleave",
    "deinterleave",
    "transmit_arq",
    "decode_bob",
    "decode_eve",
    "trial_rng",
]


def trial_rng(master_seed: int, *indices: int) -> np.random.Generator:
    """Independent generator for one (grid point, trial) under a master seed."""
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), *map(int, indices)]))


@dataclass(frozen=True, eq=False)
class CodecContext:
    h: BitMatrix
    graph: TannerGraph = field(repr=False)
    scrambler: BitMatrix = field(repr=False)
    scrambler_inv: BitMatrix = field(repr=False)
    generator: BitMatrix = field(repr=False)
    column_permutation: tuple[int, ...] = field(repr=False)
    pattern: PuncturePattern = field(repr=False)
    eta: int
    alpha: int
    L: int

    @property
    def N(self) -> int:
        return self.h.cols

    @property
    def k(self) -> int:
        return self.generator.rows

    @property
    def n(self) -> int:
        return self.N - len(self.pattern.punctured)

    @property
    def systematic(self) -> tuple[int, ...]:
        return self.column_permutation[: self.k]

    @property
    def transmitted(self) -> tuple[int, ...]:
        return self.pattern.transmitted


def build_context(
    h: BitMatrix,
    eta: int,
    alpha: int,
    L: int,
    rng: np.random.Generator,
    pattern: Optional[PuncturePattern] = None,
    max_restarts: int = 100,
) -> CodecContext:
    """Assemble an encoder/decoder pair for parity-check matrix ``h``.

    Without ``pattern`` a puncturing pattern is searched for with ``rng``. A
    supplied pattern must pass :func:`certify_pattern`.
    """
    if not isinstance(h, BitMatrix):
        h = BitMatrix(h)
    if min(eta, alpha, L) < 1:
        raise DimensionError("eta, alpha and L must all be at least 1")
    m, N = h.shape
    n = N - m
    if n < 1:
        raise DimensionError(f"H is {m}x{N}; it needs more columns than rows")
    if eta * alpha != n:
        raise DimensionError(f"eta * alpha = {eta * alpha} but each punctured codeword has n = {n} bits")
    graph = TannerGraph(h)
    if pattern is None:
        pattern = find_puncture_pattern(graph, rng, max_restarts=max_restarts)
    else:
        verdict = certify_pattern(graph, pattern)
        if not verdict:
            raise InvalidPattern(f"{verdict.kind}: {verdict.message}")
    g, perm = systematic_generator(h, parity_columns=pattern.punctured)
    s = random_invertible(g.rows, rng)
    return CodecContext(
        h=h,
        graph=graph,
        scrambler=s,
        scrambler_inv=lu_invert(s),
        generator=g,
        column_permutation=tuple(perm),
        pattern=pattern,
        eta=eta,
        alpha=alpha,
        L=L,
    )


@dataclass(frozen=True, eq=False)
class PacketSet:
    """``packets[i]`` holds alpha consecutive bits from each of the L codewords, codeword-major."""

    packets: np.ndarray
    alpha: int
    L: int
    received: np.ndarray = None

    def __post_init__(self):
        pk = np.asarray(self.packets, dtype=np.uint8)
        if pk.ndim != 2 or pk.shape[1] != self.alpha * self.L:
            raise DimensionError(f"packets must be eta x {self.alpha * self.L}, got {pk.shape}")
        object.__setattr__(self, "packets", pk)
        rec = np.ones(pk.shape[0], dtype=bool) if self.received is None else np.asarray(self.received, dtype=bool)
        if rec.shape != (pk.shape[0],):
            raise DimensionError("one reception flag per packet is required")
        object.__setattr__(self, "received", rec)

    @property
    def eta(self) -> int:
        return self.packets.shape[0]

    @property
    def missing(self) -> frozenset[int]:
        return frozenset(np.flatnonzero(~self.received).tolist())

    def with_missing(self, indices: Iterable[int]) -> "PacketSet":
        """Copy as seen by a receiver that never got ``indices``."""
        rec = np.ones(self.eta, dtype=bool)
        rec[list(indices)] = False
        return replace(self, received=rec)


def interleave(p: np.ndarray, eta: int, alpha: int) -> np.ndarray:
    """(L, n) punctured codewords to (eta, alpha*L) packets."""
    L = p.shape[0]
    return p.reshape(L, eta, alpha).transpose(1, 0, 2).reshape(eta, L * alpha)


def deinterleave(packets: np.ndarray, alpha: int, L: int) -> np.ndarray:
    """Inverse of :func:`interleave`."""
    eta = packets.shape[0]
    return packets.reshape(eta, L, alpha).transpose(1, 0, 2).reshape(L, eta * alpha)


def random_message(ctx: CodecContext, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, 2, size=ctx.L * ctx.k, dtype=np.uint8)


def pad_message(bits, k: int, rng: np.random.Generator) -> np.ndarray:
    """Complete the final k-bit block with random bits."""
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    short = (-bits.size) % k
    if bits.size == 0:
        short = k
    return np.concatenate([bits, rng.integers(0, 2, size=short, dtype=np.uint8)])


def encode_message(ctx: CodecContext, m) -> PacketSet:
    m = np.asarray(m, dtype=np.uint8).ravel()
    if m.size != ctx.L * ctx.k:
        raise DimensionError(f"message has {m.size} bits, expected L*k = {ctx.L * ctx.k}")
    blocks = m.reshape(ctx.L, ctx.k)
    a = matmul_mod2(blocks, ctx.scrambler.bits)
    b = matmul_mod2(a, ctx.generator.bits)
    p = b[:, list(ctx.transmitted)]
    return PacketSet(interleave(p, ctx.eta, ctx.alpha), ctx.alpha, ctx.L)


@dataclass(frozen=True)
class TrialResult:
    w_per_packet: tuple[int, ...]
    eve_missing: frozenset[int]
    d_per_codeword: tuple[int, ...]
    d: int

    @property
    def transmissions(self) -> int:
        return sum(self.w_per_packet)


def _eve_erasures_per_codeword(eve_missing: np.ndarray, alpha: int, L: int) -> np.ndarray:
    lost = np.repeat(eve_missing[:, None], alpha * L, axis=1).astype(np.uint8)
    return deinterleave(lost, alpha, L).sum(axis=1)


def transmit_arq(
    packets: PacketSet,
    dist: JointErasureDist,
    rng: np.random.Generator,
    max_retx: int = DEFAULT_MAX_RETX,
) -> TrialResult:
    """Send every packet until Bob receives it; record what Eve misses.

    Transmissions go out in rounds: each round resends every packet Bob still
    lacks, in packet order, with one correlated erasure draw per transmission.
    """
    eta = packets.eta
    w = np.zeros(eta, dtype=np.int64)
    eve_has = np.zeros(eta, dtype=bool)
    pending = np.arange(eta)
    while pending.size:
        e_m, e_w = sample_pairs(dist, rng, pending.size)
        w[pending] += 1
        eve_has[pending] |= e_w == 0
        pending = pending[e_m == 1]
        if pending.size and w[pending[0]] >= max_retx:
            partial = _result(w, eve_has, packets.alpha, packets.L)
            raise RetransmissionCapExceeded(
                f"{pending.size} packet(s) still erased for Bob after {max_retx} transmissions",
                partial=partial,
            )
    return _result(w, eve_has, packets.alpha, packets.L)


def _result(w: np.ndarray, eve_has: np.ndarray, alpha: int, L: int) -> TrialResult:
    missing = ~eve_has
    per_cw = _eve_erasures_per_codeword(missing, alpha, L)
    return TrialResult(
        w_per_packet=tuple(w.tolist()),
        eve_missing=frozenset(np.flatnonzero(missing).tolist()),
        d_per_codeword=tuple(per_cw.tolist()),
        d=alpha * int(missing.sum()),
    )


def _received_words(ctx: CodecContext, received: PacketSet) -> np.ndarray:
    """(L, N) int8 words with ERASED at punctured and lost positions."""
    if received.eta != ctx.eta or received.alpha != ctx.alpha or received.L != ctx.L:
        raise DimensionError("packet set does not match the codec dimensions")
    data = received.packets.astype(np.int8)
    data[~received.received] = ERASED
    p = deinterleave(data, ctx.alpha, ctx.L)
    words = np.full((ctx.L, ctx.N), ERASED, dtype=np.int8)
    words[:, list(ctx.transmitted)] = p
    return words


def _descramble(ctx: CodecContext, codewords: np.ndarray) -> np.ndarray:
    a = codewords[:, list(ctx.systematic)].astype(np.uint8)
    return matmul_mod2(a, ctx.scrambler_inv.bits).ravel()


def decode_bob(ctx: CodecContext, received: PacketSet) -> np.ndarray:
    """Recover the L*k message bits from a complete packet set."""
    if not received.received.all():
        raise IncompleteReception(f"packets {sorted(received.missing)} were never delivered")
    result = peel_decode(ctx.graph, _received_words(ctx, received))
    if not result.complete:
        raise InvalidPattern(
            f"peeling stalled on {len(result.residual)} punctured bits; the pattern is not certified"
        )
    return _descramble(ctx, result.bits)


@dataclass(frozen=True)
class EveDecode:
    """What Eve learns: ``message`` is only set when nothing is left to guess."""

    d: int
    d_per_codeword: tuple[int, ...]
    residual_per_codeword: tuple[frozenset, ...]
    message: Optional[np.ndarray] = field(default=None, compare=False)


def decode_eve(ctx: CodecContext, received: PacketSet) -> EveDecode:
    words = _received_words(ctx, received)
    erased_tx = (words[:, list(ctx.transmitted)] == ERASED).sum(axis=1)
    result = peel_decode(ctx.graph, words)
    message = _descramble(ctx, result.bits) if result.complete else None
    return EveDecode(
        d=ctx.alpha * len(received.missing),
        d_per_codeword=tuple(erased_tx.tolist()),
        residual_per_codeword=tuple(result.residual for _ in range(ctx.L)),
        message=message,
    )
