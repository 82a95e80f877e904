import pytest
from hypothesis import given, strategies as st

from scarlab.cluster import (
    PRESETS,
    ClusterError,
    ClusterSpec,
    CouplingGraph,
    build_cluster,
    coupling_sum,
    load_cluster,
    parse_preset,
    read_cluster_file,
    write_cluster_file,
)


def test_open_chain_is_path():
    g = build_cluster(ClusterSpec("chain", 4, "open"))
    assert g.edges == ((0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0))


def test_periodic_chain_ring():
    g = build_cluster(ClusterSpec("chain", 12, "periodic"))
    assert g.n_edges == 12
    assert all(J == 1.0 for _, _, J in g.edges)
    assert set(g.degrees()) == {2}


def test_ladder_edge_count():
    g = build_cluster(ClusterSpec("ladder", 12, "periodic", (2, 6)))
    assert g.n_edges == 18
    rungs = [(i, j) for i, j, _ in g.edges if j - i == 6]
    assert len(rungs) == 6


def test_square_and_triangular_counts():
    sq = build_cluster(ClusterSpec("square", 12, "periodic", (3, 4)))
    tri = build_cluster(ClusterSpec("triangular", 12, "periodic", (3, 4)))
    assert sq.n_edges == 24
    assert tri.n_edges == 36
    assert set(sq.degrees()) == {4}
    assert set(tri.degrees()) == {6}


@pytest.mark.parametrize("preset", list(PRESETS.values()) + ["chain:7:open", "square:2x3:open"])
def test_presets_connected_and_canonical(preset):
    g = load_cluster(preset)
    assert g.is_connected()
    keys = [(i, j) for i, j, _ in g.edges]
    assert keys == sorted(keys)
    assert all(i < j for i, j in keys)


@given(st.integers(2, 14), st.sampled_from(["open", "periodic"]))
def test_chain_degree_and_determinism(N, boundary):
    spec = ClusterSpec("chain", N, boundary)
    g1, g2 = build_cluster(spec), build_cluster(spec)
    assert g1 == g2
    deg = g1.degrees()
    if boundary == "periodic" and N > 2:
        assert set(deg) == {2}
    else:
        assert max(deg) <= 2
    assert g1.is_connected()


def test_coupling_sum_examples():
    assert coupling_sum(load_cluster("chain:12:periodic")) == 24
    single = build_cluster(ClusterSpec("custom", 2, custom_edges=[(0, 1, 0.7)]))
    assert coupling_sum(single) == pytest.approx(1.4)
    assert coupling_sum(CouplingGraph(3, ())) == 0


def test_errors():
    with pytest.raises(ClusterError):
        build_cluster(ClusterSpec("square", 12, dimensions=(3, 5)))
    with pytest.raises(ClusterError):
        build_cluster(ClusterSpec("custom", 3, custom_edges=[(0, 1, 1), (1, 0, 2)]))
    with pytest.raises(ClusterError):
        build_cluster(ClusterSpec("custom", 3, custom_edges=[(0, 3, 1)]))
    with pytest.raises(ClusterError):
        build_cluster(ClusterSpec("custom", 3, custom_edges=[(1, 1, 1)]))
    with pytest.raises(ClusterError):
        build_cluster(ClusterSpec("chain", 1))
    with pytest.raises(ClusterError):
        parse_preset("ladder:2xq")


def test_parse_preset():
    spec = parse_preset("ladder:2x6:periodic")
    assert spec == ClusterSpec("ladder", 12, "periodic", (2, 6))
    assert parse_preset("chain:12").boundary == "periodic"


def test_cluster_file_roundtrip(tmp_path):
    path = tmp_path / "tri.txt"
    path.write_text("# a triangle\nN 3\n0 1 1.0\n1 2 0.5  # weak bond\n\n2 0 2\n")
    g = read_cluster_file(path)
    assert g.N == 3
    assert g.edges == ((0, 1, 1.0), (0, 2, 2.0), (1, 2, 0.5))
    out = tmp_path / "copy.txt"
    write_cluster_file(g, out)
    assert load_cluster(str(out)) == g


def test_cluster_file_errors(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1 1\n")
    with pytest.raises(ClusterError):
        read_cluster_file(bad)
    bad.write_text("N 2\n0 1\n")
    with pytest.raises(ClusterError):
        read_cluster_file(bad)
