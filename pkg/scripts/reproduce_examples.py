"""Print the worked examples: Remnants vs. the exact optimum, the LP values and
one Save-Energy pass. Everything is exact; the output is stable across runs."""

from fractions import Fraction

from asymsched.bounds import bound_report
from asymsched.lprelax import RoundingConfig, build_mip, rounding_pipeline, solve_lp
from asymsched.oracle import check_asym_dominance, exact_optimal_makespan
from asymsched.remnants import remnants_schedule
from asymsched.save_energy import save_energy
from asymsched.schedule import Schedule, energy, gantt, makespan, seg
from asymsched.taskmodel import EnergyParams, chain_instance, instance_from_json


def remnants_examples():
    print("== Remnants on chains (3,3,2,2), one fast and two unit machines")
    for s in (4, 3):
        inst = chain_instance([3, 3, 2, 2], [s, 1, 1])
        sched, trace = remnants_schedule(inst)
        rep = bound_report(inst)
        print(f"s={s}: makespan {makespan(sched)}, optimum {exact_optimal_makespan(inst)}, "
              f"lower bound {rep.max_lower}, rounds {len(trace)}")
        print(gantt(sched, width=48))


def lp_examples():
    print("== LP relaxation")
    for lengths in ([5], [4, 4]):
        inst = chain_instance(lengths, [2, 1])
        sol = solve_lp(build_mip(inst))
        out = rounding_pipeline(inst, RoundingConfig(seed=1, trials=200))
        print(f"chains {lengths}: D = {sol.D}, per-chain x = {[str(x) for x in sol.chain_x]}, "
              f"best of 200 = {out.makespan}, mean = {float(out.mean_makespan):.3f}")


def energy_example():
    print("== Save-Energy, two tasks on the fast machine, alpha = 2")
    inst = instance_from_json({"n": 2, "edges": [], "speeds": ["2", "1"]})
    sched = Schedule(inst, [seg(0, 0, 0, Fraction(1, 2)), seg(1, 0, Fraction(1, 2), 1)])
    p = EnergyParams(2)
    out = save_energy(sched, p)
    print(f"energy {energy(sched, p)} -> {energy(out, p)}, makespan {makespan(sched)} -> {makespan(out)}")
    for x in out.segments:
        print(f"  task {x.task} on machine {x.machine}: [{x.start}, {x.end})")


def dominance_example():
    print("== Symmetric vs asymmetric machines at equal average speed")
    res = check_asym_dominance(chain_instance([2, 1], [Fraction(3, 2), Fraction(1, 2)]))
    print(f"symmetric optimum {res.symmetric_optimum}, asymmetrized {res.asymmetric_makespan}")


if __name__ == "__main__":
    remnants_examples()
    lp_examples()
    energy_example()
    dominance_example()
