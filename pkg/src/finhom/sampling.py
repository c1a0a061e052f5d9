"""Seeded deterministic generators for the verification suites.

All randomness in the library flows through ``DeterministicSampler``,
a thin wrapper around ``random.Random`` (the Mersenne Twister, whose
output for a fixed seed is stable across platforms and Python
releases).  Suites pre-generate their samples from the seed and then
evaluate them, so reports are reproducible byte for byte.

Complexes are sampled with free entries: a support interval, a rank per
degree, and differentials drawn from the solution lattice of
d o d = 0 (rows of each new differential from the kernel of the
transpose of the previous one).  Chain maps are random combinations of
the generators of the chain-map module.
"""

from __future__ import annotations

import random
from typing import Optional

from .complexes import ChainComplex, ChainMap, chain_hom_module
from .matrix import Matrix
from .modules import FpModule, ModuleMap, ShortExactSeq, submodule
from .rings import Ring
from .smith import kernel_basis


class DeterministicSampler:
    def __init__(self, seed: int):
        self.seed = seed
        self.rng = random.Random(seed)

    def randint(self, a: int, b: int) -> int:
        return self.rng.randint(a, b)

    def entry(self, ring: Ring, spread: int = 3) -> int:
        if ring.modulus is None:
            return self.rng.randint(-spread, spread)
        return self.rng.randrange(ring.modulus)

    # -- free complexes -------------------------------------------------------

    def free_complex(self, ring: Ring, max_support: int = 4, max_rank: int = 3,
                     lo_range=(-1, 1)) -> ChainComplex:
        lo = self.rng.randint(*lo_range)
        length = self.rng.randint(1, max_support)
        ranks = [self.rng.randint(0, max_rank) for _ in range(length)]
        if not any(ranks):
            ranks[self.rng.randrange(length)] = 1
        objs = {lo + k: FpModule.free(ring, r) for k, r in enumerate(ranks)}
        diffs = {}
        prev_d: Optional[Matrix] = None
        for k in range(length - 1, 0, -1):
            n = lo + k
            src, tgt = objs[n], objs[n - 1]
            if src.gens == 0 or tgt.gens == 0:
                prev_d = None
                continue
            if prev_d is None:
                m = Matrix(ring, tgt.gens, src.gens,
                           [[self.entry(ring, 2) for _ in range(src.gens)]
                            for _ in range(tgt.gens)])
            else:
                K = kernel_basis(prev_d.transpose())
                rows = []
                for _ in range(tgt.gens):
                    combo = [0] * src.gens
                    for j in range(K.cols):
                        c = self.rng.randint(-1, 1)
                        if c:
                            combo = [ring.add(a, ring.mul(c, K.entries[idx][j]))
                                     for idx, a in enumerate(combo)]
                    rows.append(combo)
                m = Matrix(ring, tgt.gens, src.gens, rows)
            diffs[n] = ModuleMap(src, tgt, m, check=False)
            prev_d = m
        return ChainComplex(ring, objs, diffs)

    def chain_map(self, X: ChainComplex, Y: ChainComplex) -> ChainMap:
        """A random element of the chain-map module."""
        ring = X.ring
        H, gens = chain_hom_module(X, Y)
        if not gens:
            return ChainMap.zero_map(X, Y)
        hi = 3 if ring.modulus is None else ring.modulus - 1
        out = ChainMap.zero_map(X, Y)
        for g in gens:
            c = self.rng.randint(0, hi)
            if c:
                out = out + g.scale(c)
        return out

    # -- modules over finite rings -------------------------------------------------

    def small_module(self, ring: Ring, max_gens: int = 2,
                     max_size: Optional[int] = 36) -> FpModule:
        """A random finitely presented module, resampled until its
        element count fits the bound."""
        assert ring.is_finite
        for _ in range(64):
            g = self.rng.randint(1, max_gens)
            r = self.rng.randint(0, max_gens)
            M = FpModule.cokernel_presentation(
                Matrix(ring, g, r, [[self.entry(ring) for _ in range(r)]
                                    for _ in range(g)]))
            if max_size is None or (M.size() or 0) <= max_size:
                return M
        return FpModule.cyclic(ring, ring.modulus)

    def short_exact_seq(self, M: FpModule) -> ShortExactSeq:
        """A short exact sequence with middle M, from a random submodule."""
        ring = M.ring
        cols = []
        for _ in range(self.rng.randint(1, 2)):
            cols.append([self.entry(ring) for _ in range(M.gens)])
        gens = (Matrix(ring, M.gens, len(cols), [list(r) for r in zip(*cols)])
                if cols else Matrix.zero(ring, M.gens, 0))
        return ShortExactSeq.from_submodule(M, gens)
