"""
Enumeration Schemas
=========================

Defines the data structures of the Wick enumeration:
1. Ribbon diagrams produced by pairing half-edges of quartic vertices
2. Multigraphs carrying an Ising model
3. Covariances of the Gaussian reference model
4. Per-order results of the enumerated free energy

Includes:
- Diagram
- IsingGraph
- CovarianceTable
- WickSeries
"""
from typing import List, Optional, Tuple
from pydantic import BaseModel, ConfigDict, model_validator

class Diagram(BaseModel):
    """
    One (coloring, pairing) term of the Wick expansion.

    Fields:
        V (int): number of quartic vertices.
        colors (str): per-vertex matrix, e.g. "XYX".
        matching (Tuple[int, ...]): fixed-point-free involution on the 4V half-edges.
        F (int): faces, cycles of matching∘rotation.
        E (int): edges, always 2V.
        chi (int): V - E + F.
        D (int): mixed (X-Y) edges.
        U (int): like (X-X or Y-Y) edges.
        S (int): D - U.
        components (int): connected components.
    """
    model_config = ConfigDict(frozen=True)

    V: int
    colors: str
    matching: Tuple[int, ...]
    F: int
    E: int
    chi: int
    D: int
    U: int
    S: int
    components: int

    @property
    def genus(self) -> Optional[int]:
        """Genus of a connected diagram, None otherwise."""
        if self.components != 1:
            return None
        return (2 - self.chi) // 2

class IsingGraph(BaseModel):
    """
    Multigraph with loops, the support of an Ising model.

    Fields:
        vertex_count (int): number of vertices, labelled 0..vertex_count-1.
        edges (List[Tuple[int, int]]): edge multiset; (x, x) is a loop.
    """
    model_config = ConfigDict(frozen=True)

    vertex_count: int
    edges: List[Tuple[int, int]]

    @model_validator(mode="after")
    def check_edges(self):
        if self.vertex_count < 1:
            raise ValueError("a graph needs at least one vertex")
        for x, y in self.edges:
            if not (0 <= x < self.vertex_count and 0 <= y < self.vertex_count):
                raise ValueError(f"edge ({x}, {y}) references a missing vertex")
        return self

    @property
    def degrees(self) -> List[int]:
        """Loops add 2 to the degree of their vertex."""
        degrees = [0] * self.vertex_count
        for x, y in self.edges:
            degrees[x] += 1
            degrees[y] += 1
        return degrees

class CovarianceTable(BaseModel):
    """
    Second moments of the Gaussian 2-matrix model.

    Fields:
        tau (float): coupling τ.
        n (int): matrix size.
        same (float): ⟨X_ij X_ji⟩ = ⟨Y_ij Y_ji⟩.
        cross (float): ⟨X_ij Y_ji⟩.
        mean (float): first moments, all zero.
        same_stderr (Optional[float]): standard error when sampled.
        cross_stderr (Optional[float]): standard error when sampled.
    """
    tau: float
    n: int
    same: float
    cross: float
    mean: float = 0.0
    same_stderr: Optional[float] = None
    cross_stderr: Optional[float] = None

class WickSeries(BaseModel):
    """
    Genus-zero coefficients of log(Z/Z_0) in t from the enumeration.

    Fields:
        tau (float): coupling τ.
        h (float): magnetic field H.
        vmax (int): highest vertex count.
        genus_zero (List[float]): [t^0] .. [t^vmax] of the n² part.
        n_support (List[List[int]]): n-exponents present at each order.
        diagram_count (int): number of (coloring, pairing) terms.
        exact (Optional[List[str]]): rational coefficients in exact mode.
    """
    tau: float
    h: float
    vmax: int
    genus_zero: List[float]
    n_support: List[List[int]]
    diagram_count: int
    exact: Optional[List[str]] = None
