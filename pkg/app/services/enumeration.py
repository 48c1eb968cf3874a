"""
Enumeration Service
===================

Exact Wick expansion of the 2-matrix integral at small vertex counts:
- Covariances of the Gaussian reference model
- Ribbon diagrams: pairings of the half-edges of quartic X/Y vertices,
  faces traced as cycles of matching∘rotation
- The enumerated log(Z/Z_0) as a t-series with Laurent polynomials in n
- Ising partition functions on small multigraphs
"""

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from app.config import settings
from app.exceptions import CapExceeded, DomainError
from app.schemas.enumeration import CovarianceTable, Diagram, IsingGraph, WickSeries
from app.services.series import LaurentPoly, TruncatedSeries
from utils.logger import init_logger

# Configure logger
logger = init_logger("EnumerationService")

HARD_CAP = 4

# Graphs behind the first two orders of the free energy
SINGLE_VERTEX_TWO_LOOPS = IsingGraph(vertex_count=1, edges=[(0, 0), (0, 0)])
TWO_VERTICES_FOUR_EDGES = IsingGraph(vertex_count=2, edges=[(0, 1)] * 4)
TWO_VERTICES_LOOPS = IsingGraph(vertex_count=2, edges=[(0, 0), (0, 1), (0, 1), (1, 1)])


def _rotation(h: int) -> int:
    return 4 * (h // 4) + (h + 1) % 4


def _matchings(free: List[int], partner: List[int]) -> Iterator[Tuple[int, ...]]:
    if not free:
        yield tuple(partner)
        return
    a = free[0]
    for i in range(1, len(free)):
        b = free[i]
        partner[a], partner[b] = b, a
        yield from _matchings(free[1:i] + free[i + 1:], partner)


def count_faces(matching: Tuple[int, ...]) -> int:
    """Cycles of h -> matching[rotation(h)]."""
    seen = [False] * len(matching)
    faces = 0
    for start in range(len(matching)):
        if seen[start]:
            continue
        faces += 1
        h = start
        while not seen[h]:
            seen[h] = True
            h = matching[_rotation(h)]
    return faces


def count_components(V: int, matching: Tuple[int, ...]) -> int:
    parent = list(range(V))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for h, g in enumerate(matching):
        a, b = find(h // 4), find(g // 4)
        if a != b:
            parent[a] = b
    return len({find(v) for v in range(V)})


class EnumerationService:
    """Service for the Wick enumeration and small-graph Ising sums."""

    def __init__(self, cap: Optional[int] = None, threads: Optional[int] = None):
        """
        Initialize service.

        Args:
            cap (Optional[int]): largest vertex count enumerated without allow_large
            threads (Optional[int]): worker threads for the pairing blocks
        """
        self.cap = cap or settings.ENUM_CAP
        self.threads = threads or settings.THREADS

    def _check_cap(self, V: int, allow_large: bool) -> None:
        if V < 1:
            raise DomainError(f"vertex count must be positive, got {V}")
        limit = HARD_CAP if allow_large else self.cap
        if V > limit:
            raise CapExceeded(f"V={V} exceeds the enumeration cap {limit}", {"V": V, "cap": limit})

    # Gaussian reference model

    @staticmethod
    def gaussian_covariance(tau: float, n: int) -> CovarianceTable:
        """
        ⟨X_ij X_kl⟩ = ⟨Y_ij Y_kl⟩ = δ_il δ_jk/(n(1-τ²)),  ⟨X_ij Y_kl⟩ = τ δ_il δ_jk/(n(1-τ²)).
        """
        if not 0.0 <= tau < 1.0:
            raise DomainError(f"tau must lie in [0, 1), got {tau}")
        if n < 1:
            raise DomainError(f"matrix size must be positive, got {n}")
        same = 1.0 / (n * (1.0 - tau * tau))
        return CovarianceTable(tau=tau, n=n, same=same, cross=tau * same)

    @staticmethod
    def sample_covariance(tau: float, n: int, samples: int, rng: np.random.Generator) -> CovarianceTable:
        """
        Empirical ⟨X_01 X_10⟩ and ⟨X_01 Y_10⟩ from sampled Hermitian pairs.

        X = L_00 A and Y = L_10 A + L_11 B with A, B independent GUE(n) and
        L the Cholesky factor of [[1, τ], [τ, 1]]/(1-τ²).
        """
        def gue() -> np.ndarray:
            g = (rng.standard_normal((samples, n, n)) + 1j * rng.standard_normal((samples, n, n))) / math.sqrt(n)
            return (g + np.conj(np.swapaxes(g, 1, 2))) / 2.0

        chol = np.linalg.cholesky(np.array([[1.0, tau], [tau, 1.0]]) / (1.0 - tau * tau))
        a, b = gue(), gue()
        x = chol[0, 0] * a
        y = chol[1, 0] * a + chol[1, 1] * b
        same = np.real(x[:, 0, 1] * x[:, 1, 0])
        cross = np.real(x[:, 0, 1] * y[:, 1, 0])
        return CovarianceTable(
            tau=tau, n=n,
            same=float(same.mean()), cross=float(cross.mean()),
            mean=float(np.real(x[:, 0, 1]).mean()),
            same_stderr=float(same.std(ddof=1) / math.sqrt(samples)),
            cross_stderr=float(cross.std(ddof=1) / math.sqrt(samples)),
        )

    # Diagrams

    def enumerate_diagrams(self, V: int, allow_large: bool = False) -> Iterator[Diagram]:
        """
        Every (coloring, pairing) term at V vertices.

        Colorings run over "X"/"Y" words in lexicographic order; pairings
        pair the lowest free half-edge first.

        Raises:
            CapExceeded: V above the cap
        """
        self._check_cap(V, allow_large)
        words = ["".join(w) for w in itertools.product("XY", repeat=V)]
        for matching in _matchings(list(range(4 * V)), [0] * (4 * V)):
            faces = count_faces(matching)
            components = count_components(V, matching)
            for colors in words:
                mixed = sum(1 for h, g in enumerate(matching) if h < g and colors[h // 4] != colors[g // 4])
                yield Diagram(
                    V=V, colors=colors, matching=matching, F=faces, E=2 * V, chi=V - 2 * V + faces,
                    D=mixed, U=2 * V - mixed, S=2 * mixed - 2 * V, components=components,
                )

    def _count_block(self, V: int, first: int, colorings: np.ndarray) -> np.ndarray:
        """Counts indexed by (χ - (1 - V), k, D) for pairings with 0 <-> first."""
        counts = np.zeros((3 * V, V + 1, 2 * V + 1), dtype=np.int64)
        k_vec = colorings.sum(axis=1)
        partner = [0] * (4 * V)
        partner[0], partner[first] = first, 0
        rest = [h for h in range(1, 4 * V) if h != first]
        for matching in _matchings(rest, partner):
            chi = count_faces(matching) - V
            pairs = np.array([(h, g) for h, g in enumerate(matching) if h < g])
            mixed = (colorings[:, pairs[:, 0] // 4] != colorings[:, pairs[:, 1] // 4]).sum(axis=1)
            np.add.at(counts[chi - (1 - V)], (k_vec, mixed), 1)
        return counts

    def diagram_counts(self, V: int, allow_large: bool = False) -> np.ndarray:
        """
        Number of (coloring, pairing) terms by (χ, number of X vertices k, mixed edges D).

        Pairing blocks (fixed partner of half-edge 0) run on a thread pool and
        are merged in block order.

        Returns:
            np.ndarray: counts[χ - (1 - V), k, D]
        """
        self._check_cap(V, allow_large)
        colorings = ((np.arange(2 ** V)[:, None] >> np.arange(V)) & 1).astype(np.int64)
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            futures = [pool.submit(self._count_block, V, first, colorings) for first in range(1, 4 * V)]
            blocks = [future.result() for future in futures]
        total = np.sum(blocks, axis=0)
        logger.info(f"Enumerated {int(total.sum())} diagrams at V={V}")
        return total

    def wick_free_energy_series(
            self,
            tau,
            h,
            vmax: int,
            exact: bool = False,
            allow_large: bool = False
        ) -> Tuple[TruncatedSeries, int]:
        """
        log(Z/Z_0) as a t-series with Laurent polynomial coefficients in n.

        Each term weighs n^χ (-t/4)^V/V! (1-τ²)^{-2V} τ^D q^{k-j}, with k X-vertices
        carrying q = e^H and j = V - k Y-vertices carrying 1/q. The series
        logarithm keeps the connected diagrams.

        Args:
            tau: coupling τ (Fraction when exact)
            h: magnetic field H (q = e^H when exact)
            vmax (int): highest vertex count
            exact (bool): rational coefficients

        Returns:
            Tuple[TruncatedSeries, int]: the series and the number of enumerated terms

        Raises:
            CapExceeded: vmax above the cap
        """
        self._check_cap(vmax, allow_large)
        if exact:
            tau, q = Fraction(tau), Fraction(h)
            one = Fraction(1)
        else:
            tau, q = float(tau), math.exp(h)
            one = 1.0
        if not 0 < tau < 1:
            raise DomainError(f"tau must lie in (0, 1), got {tau}")
        coeffs = [LaurentPoly({0: one})]
        total = 0
        for V in range(1, vmax + 1):
            counts = self.diagram_counts(V, allow_large)
            total += int(counts.sum())
            prefactor = (one * -1 / 4) ** V / math.factorial(V) / (1 - tau * tau) ** (2 * V)
            terms: Dict[int, object] = {}
            for chi_index, k, D in zip(*np.nonzero(counts)):
                chi = int(chi_index) + 1 - V
                weight = int(counts[chi_index, k, D]) * prefactor * tau ** int(D) * q ** (2 * int(k) - V)
                terms[chi] = terms.get(chi, 0) + weight
            coeffs.append(LaurentPoly(terms))
        return TruncatedSeries(coeffs, vmax).log(), total

    def wick_report(self, tau: float, h: float, vmax: int, exact: bool = False,
                    allow_large: bool = False) -> WickSeries:
        """
        n² part of the enumerated log(Z/Z_0) with the n-grading per order.

        In exact mode `tau` and `h` (read as q) are parsed as fractions.
        """
        if exact:
            tau_arg, h_arg = Fraction(str(tau)), Fraction(str(h))
            h_float = math.log(float(h_arg))
        else:
            tau_arg, h_arg, h_float = tau, h, h
        series, total = self.wick_free_energy_series(tau_arg, h_arg, vmax, exact, allow_large)
        support = []
        for c in series.coeffs:
            scale = max((abs(v) for v in c.terms.values()), default=0)
            support.append([k for k, v in sorted(c.terms.items()) if abs(v) > 1e-12 * scale])
        genus_zero = [c.coeff(2) for c in series.coeffs]
        return WickSeries(
            tau=float(tau_arg),
            h=h_float,
            vmax=vmax,
            genus_zero=[float(c) for c in genus_zero],
            n_support=support,
            diagram_count=total,
            exact=[str(Fraction(c)) for c in genus_zero] if exact else None,
        )

    # Ising model on multigraphs

    @staticmethod
    def ising_partition_graph(g: IsingGraph, beta: float, hfield: float) -> float:
        """
        Z_G(β; h) = Σ_ψ exp(β Σ_{xy ∈ E} ψ(x)ψ(y) + βh Σ_x ψ(x)).

        A loop contributes ψ(x)² = +1 for every spin state. The spin sum runs
        over blocks of at most 2^16 states.

        Raises:
            CapExceeded: more than settings.ISING_MAX_VERTICES vertices
        """
        V = g.vertex_count
        if V > settings.ISING_MAX_VERTICES:
            raise CapExceeded(f"spin sum over {V} vertices exceeds {settings.ISING_MAX_VERTICES}", {"V": V})
        edges = np.array(g.edges, dtype=np.int64).reshape(-1, 2)
        block = 1 << min(V, 16)
        total = 0.0
        for start in range(0, 1 << V, block):
            states = np.arange(start, min(start + block, 1 << V), dtype=np.int64)
            spins = ((states[:, None] >> np.arange(V)) & 1) * 2 - 1
            bonds = (spins[:, edges[:, 0]] * spins[:, edges[:, 1]]).sum(axis=1) if len(edges) else 0
            field = spins.sum(axis=1)
            total += float(np.exp(beta * (bonds + hfield * field)).sum())
        return total

    def ising_graph_aggregate(self, tau: float, h: float) -> Tuple[float, float]:
        """
        Graph sums behind orders 1 and 2 of F at τ = e^{-2β}, H = βh:
        2 Z_1^(1) and 4 Z_2^(1) + 32 Z_2^(2).
        """
        beta = -0.5 * math.log(tau)
        hfield = h / beta
        first = 2.0 * self.ising_partition_graph(SINGLE_VERTEX_TWO_LOOPS, beta, hfield)
        second = (4.0 * self.ising_partition_graph(TWO_VERTICES_FOUR_EDGES, beta, hfield)
                  + 32.0 * self.ising_partition_graph(TWO_VERTICES_LOOPS, beta, hfield))
        return first, second
