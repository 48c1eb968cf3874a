import math

import pytest

from app.exceptions import CapExceeded, DomainError
from app.schemas.enumeration import IsingGraph
from app.services.enumeration import count_faces
from app.services.free_energy import kazakov_coefficients

@pytest.mark.parametrize("V, total", [(1, 6), (2, 420), (3, 83160)])
def test_diagram_counts_total(enumeration, V, total):
    # 2^V colorings times (4V - 1)!! pairings
    assert int(enumeration.diagram_counts(V).sum()) == total

def test_single_vertex_genus_split(enumeration):
    counts = enumeration.diagram_counts(1)
    assert int(counts[2].sum()) == 4
    assert int(counts[0].sum()) == 2

def test_enumerated_diagrams_carry_consistent_data(enumeration):
    diagrams = list(enumeration.enumerate_diagrams(1))
    assert len(diagrams) == 6
    for d in diagrams:
        assert d.E == 2
        assert d.chi == d.V - d.E + d.F
        assert d.D + d.U == d.E
        assert d.components == 1
    assert sorted({d.chi for d in diagrams}) == [0, 2]

def test_count_faces_of_planar_single_vertex():
    # neighbouring half-edges paired: the planar "figure eight"
    assert count_faces((1, 0, 3, 2)) == 3
    assert count_faces((2, 3, 0, 1)) == 1

def test_cap_is_enforced(enumeration):
    with pytest.raises(CapExceeded):
        enumeration.diagram_counts(4)
    with pytest.raises(DomainError):
        enumeration.diagram_counts(0)

def test_n_grading_of_connected_series(enumeration):
    report = enumeration.wick_report(0.5, 0.0, 2)
    assert report.n_support[1] == [0, 2]
    assert set(report.n_support[2]) <= {-2, 0, 2}
    assert report.diagram_count == 6 + 420

@pytest.mark.parametrize("tau, h", [(0.5, 0.0), (0.3, 0.4)])
def test_genus_zero_part_matches_graph_expansion(enumeration, tau, h):
    report = enumeration.wick_report(tau, h, 3)
    reference = kazakov_coefficients(tau, math.cosh(h))
    assert report.genus_zero[1:] == pytest.approx(reference, rel=1e-9)

def test_genus_zero_part_exact(enumeration):
    report = enumeration.wick_report("1/2", "1", 2, exact=True)
    assert report.exact[1] == "-16/9"

def test_gaussian_covariance(enumeration):
    table = enumeration.gaussian_covariance(0.3, 4)
    assert table.same == pytest.approx(1.0 / (4 * (1 - 0.09)))
    assert table.cross == pytest.approx(0.3 * table.same)
    with pytest.raises(DomainError):
        enumeration.gaussian_covariance(1.0, 4)

def test_sampled_covariance_matches_gaussian(enumeration, rng):
    exact = enumeration.gaussian_covariance(0.3, 3)
    sampled = enumeration.sample_covariance(0.3, 3, 20000, rng)
    assert abs(sampled.same - exact.same) < 5 * sampled.same_stderr
    assert abs(sampled.cross - exact.cross) < 5 * sampled.cross_stderr

@pytest.mark.parametrize("tau, h", [(0.4, 0.0), (0.4, 0.3), (0.7, -0.2)])
def test_small_graph_sums(enumeration, tau, h):
    first, second = enumeration.ising_graph_aggregate(tau, h)
    assert first == pytest.approx(4 * math.cosh(h) / tau, rel=1e-12)
    assert second == pytest.approx(8 * tau ** 2 + 64 + 72 * math.cosh(2 * h) / tau ** 2, rel=1e-12)

def test_partition_function_of_single_edge(enumeration):
    g = IsingGraph(vertex_count=2, edges=[(0, 1)])
    beta = 0.7
    assert enumeration.ising_partition_graph(g, beta, 0.0) == pytest.approx(4 * math.cosh(beta))
