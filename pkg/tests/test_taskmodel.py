import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from asymsched.errors import CycleDetected, InvalidInstance, InvalidTaskId
from asymsched.taskmodel import (
    EnergyParams,
    MachineConfig,
    chain_instance,
    decompose_chains,
    instance_from_json,
    is_two_speed,
    make_chain_set,
    parse_rational,
    render_rational,
    validate_dag,
)

from corpus import dag_corpus


def test_topological_order_respects_edges():
    g = validate_dag([(3, 1), (1, 0), (2, 0)], 4)
    pos = {t: i for i, t in enumerate(g.topo_order)}
    assert all(pos[u] < pos[v] for u, v in g.edges)
    assert g.topo_order == (2, 3, 1, 0)


def test_duplicate_edges_are_merged():
    g = validate_dag([(0, 1), (0, 1)], 2)
    assert g.edges == ((0, 1),)


def test_cycle_is_reported_with_its_vertices():
    with pytest.raises(CycleDetected) as info:
        validate_dag([(0, 1), (1, 2), (2, 0), (2, 3)], 4)
    cyc = info.value.cycle
    assert cyc[0] == cyc[-1] and set(cyc) == {0, 1, 2}


def test_self_loop_is_a_cycle():
    with pytest.raises(CycleDetected):
        validate_dag([(1, 1)], 2)


@pytest.mark.parametrize("edge", [(0, 5), (-1, 0)])
def test_bad_task_ids(edge):
    with pytest.raises(InvalidTaskId):
        validate_dag([edge], 3)


def test_decompose_peels_longest_path_first():
    #  0 -> 1 -> 2 -> 3 and a branch 4 -> 2, 5 alone
    g = validate_dag([(0, 1), (1, 2), (2, 3), (4, 2)], 6)
    cs = decompose_chains(g)
    assert cs.chains[0] == (0, 1, 2, 3)
    assert sorted(cs.lengths, reverse=True) == cs.lengths
    assert sum(cs.lengths) == 6
    assert (4, 2) in cs.cross_edges


def test_decomposition_partitions_every_dag():
    for inst in dag_corpus(60):
        cs = decompose_chains(inst.graph)
        ids = [t for c in cs.chains for t in c]
        assert sorted(ids) == list(range(inst.n))
        edges = set(inst.graph.edges)
        for c in cs.chains:
            assert all((a, b) in edges for a, b in zip(c, c[1:]))
        within = {(a, b) for c in cs.chains for a, b in zip(c, c[1:])}
        # every other edge is tracked as a cross edge or is implied inside a chain
        pos = cs.position()
        for u, v in edges - within:
            same = pos[u][0] == pos[v][0]
            assert (u, v) in cs.cross_edges or (same and pos[u][1] < pos[v][1])


def test_explicit_chains_must_follow_edges():
    g = validate_dag([(0, 1)], 3)
    with pytest.raises(InvalidInstance):
        make_chain_set(g, [[0, 2], [1]])
    with pytest.raises(InvalidInstance):
        make_chain_set(g, [[0, 1]])  # task 2 uncovered


def test_chain_instance_layout():
    inst = chain_instance([3, 1], [4, 1])
    assert inst.n == 4
    assert inst.chain_set().chains == ((0, 1, 2), (3,))
    assert inst.is_chain_instance()


def test_machine_config_sorted_descending():
    cfg = MachineConfig(["1", "4", "1"])
    assert cfg.speeds == (4, 1, 1)
    assert cfg.capability == 6
    assert is_two_speed(cfg).m_s == 1


@pytest.mark.parametrize("speeds", [[3, 2, 1], [1, 1], ["1/2", "1/2"]])
def test_not_two_speed(speeds):
    assert is_two_speed(MachineConfig(speeds)) is None


@pytest.mark.parametrize("speeds", [[], [0], ["-1"]])
def test_machine_config_rejects(speeds):
    with pytest.raises(InvalidInstance):
        MachineConfig(speeds)


@pytest.mark.parametrize("bad", [0.5, "0.5", "1e3", "x", True])
def test_parse_rational_refuses_inexact(bad):
    with pytest.raises(InvalidInstance):
        parse_rational(bad)


@given(st.fractions())
def test_rational_round_trip(q):
    assert parse_rational(render_rational(q)) == q


def test_energy_params_need_alpha_above_one():
    with pytest.raises(InvalidInstance):
        EnergyParams(Fraction(1))


def test_json_round_trip_and_digest():
    inst = chain_instance([2, 2], ["5/2", 1])
    again = instance_from_json(json.loads(json.dumps(inst.to_json())))
    assert again.canonical_json() == inst.canonical_json()
    assert again.digest() == inst.digest()
    assert inst.digest() != chain_instance([2, 2], [3, 1]).digest()


def test_instance_json_missing_field():
    with pytest.raises(InvalidInstance):
        instance_from_json({"n": 2})


def test_longest_path_with_weights():
    g = validate_dag([(0, 1), (1, 2), (3, 2)], 4)
    assert g.longest_path() == 3
    w = [Fraction(1, 4), 1, 1, 5]
    assert g.longest_path(lambda j: w[j]) == 6
