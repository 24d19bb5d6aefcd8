from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from asymsched.bounds import (
    bound_A,
    bound_B_general,
    bound_B_paper_two_speed,
    bound_report,
    bound_single_fast,
    list_bound_quantities,
)
from asymsched.errors import NoSlowMachines, NotEnoughChains, NotSingleFast, NotTwoSpeed
from asymsched.lprelax import SpeedAssignment, speed_based_list_schedule
from asymsched.schedule import makespan, validate
from asymsched.taskmodel import MachineConfig, chain_instance

from corpus import brute_force_optimum, chain_corpus, dag_corpus, random_dag_instance

F = Fraction
EXAMPLE = chain_instance([3, 3, 2, 2], [4, 1, 1])


def test_example_bounds_by_hand():
    rep = bound_report(EXAMPLE)
    assert rep.A == F(5, 3)
    assert rep.B_general == F(4, 3)  # max(3/4, 6/5, 8/6)
    assert rep.B_paper_two_speed == F(8, 5)  # max(6/4, 8/5)
    assert rep.single_fast == F(10, 7)
    assert rep.max_lower == F(5, 3)


def test_bound_A_two_speed():
    assert bound_A(12, MachineConfig([3, 3, 1])) == F(12, 7)
    with pytest.raises(NotTwoSpeed):
        bound_A(3, MachineConfig([3, 2, 1]))


def test_B_general_with_unit_speeds_is_prefix_average():
    lengths = [5, 4, 4, 1]
    cfg = MachineConfig([1, 1, 1])
    expected = max(F(sum(lengths[:j]), j) for j in range(1, 4))
    assert bound_B_general(lengths, cfg) == expected == 5


def test_B_general_any_speed_vector():
    assert bound_B_general([4, 2], MachineConfig(["5/2", "3/2", 1])) == F(8, 5)


def test_specialised_variant_needs_more_chains_than_fast_machines():
    with pytest.raises(NotEnoughChains):
        bound_B_paper_two_speed([3], MachineConfig([2, 1]))


def test_single_fast_only_for_one_fast_machine():
    with pytest.raises(NotSingleFast):
        bound_single_fast(4, 2, MachineConfig([2, 2, 1]))


def test_bounds_below_brute_force_optimum():
    for inst in dag_corpus(40, seed=21, max_n=5, max_m=3):
        rep = bound_report(inst)
        opt = brute_force_optimum(inst)
        assert max(rep.A, rep.B_general) <= opt
        if rep.single_fast is not None:
            assert rep.single_fast <= opt


def test_single_fast_below_brute_force_on_chains():
    for inst in chain_corpus(40, seed=3, max_n=5, max_m=3):
        assert bound_report(inst).single_fast <= brute_force_optimum(inst)


def test_list_quantities_by_hand():
    inst = chain_instance([3, 1], [2, 1])
    q = list_bound_quantities(inst.graph, [True, True, False, False], inst.config)
    assert (q.C, q.D_s, q.D_1, q.n_s) == (F(2), F(1), F(2), 2)
    assert q.total == 5


def test_list_quantities_all_fast_everywhere():
    inst = chain_instance([2], [3, 3])
    q = list_bound_quantities(inst.graph, [True, True], inst.config)
    assert q.D_1 == 0 and q.D_s == F(1, 3)
    with pytest.raises(NoSlowMachines):
        list_bound_quantities(inst.graph, [True, False], inst.config)


@settings(max_examples=150, deadline=None)
@given(
    n=st.integers(1, 12),
    m_s=st.integers(1, 3),
    slow=st.integers(1, 3),
    s=st.sampled_from([2, 3, F(3, 2), F(7, 3)]),
    p=st.sampled_from([0.0, 0.2, 0.5]),
    seed=st.integers(0, 10**6),
    data=st.data(),
)
def test_speed_based_list_schedule_within_C_plus_D(n, m_s, slow, s, p, seed, data):
    import random

    inst = random_dag_instance(random.Random(seed), n, p, [s] * m_s + [1] * slow)
    fast = data.draw(st.lists(st.booleans(), min_size=n, max_size=n))
    sched = speed_based_list_schedule(inst, SpeedAssignment(tuple(fast)))
    validate(sched)
    q = list_bound_quantities(inst.graph, fast, inst.config)
    assert makespan(sched) <= q.total
