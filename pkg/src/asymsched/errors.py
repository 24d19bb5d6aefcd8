"""Exception hierarchy shared by every module of the package."""


class SchedulingError(Exception):
    """Base class for all errors raised by asymsched."""


class InvalidInstance(SchedulingError):
    pass


class InvalidTaskId(InvalidInstance):
    def __init__(self, task, n):
        super().__init__(f"task id {task} outside [0, {n})")
        self.task = task
        self.n = n


class CycleDetected(InvalidInstance):
    def __init__(self, cycle):
        super().__init__("precedence graph has a cycle: " + " -> ".join(map(str, cycle)))
        self.cycle = list(cycle)


class ScheduleError(SchedulingError):
    """A schedule breaks one of the feasibility invariants."""


class InvalidSegment(ScheduleError):
    pass


class MachineOverlap(ScheduleError):
    def __init__(self, machine, first, second):
        super().__init__(f"machine {machine}: {first} overlaps {second}")
        self.machine = machine
        self.segments = (first, second)


class TaskSelfOverlap(ScheduleError):
    def __init__(self, task, first, second):
        super().__init__(f"task {task} runs twice at once: {first} and {second}")
        self.task = task
        self.segments = (first, second)


class WorkMismatch(ScheduleError):
    def __init__(self, task, total_work):
        super().__init__(f"task {task} receives work {total_work}, expected 1")
        self.task = task
        self.total_work = total_work


class PrecedenceViolation(ScheduleError):
    def __init__(self, edge, pred_end, succ_start):
        super().__init__(
            f"edge {edge[0]}->{edge[1]}: predecessor ends at {pred_end} "
            f"but successor starts at {succ_start}"
        )
        self.edge = tuple(edge)
        self.pred_end = pred_end
        self.succ_start = succ_start


class NonRepresentablePower(SchedulingError):
    pass


class NotTwoSpeed(SchedulingError):
    pass


class NotSingleFast(NotTwoSpeed):
    pass


class NonIntegerSpeed(SchedulingError):
    pass


class NotEnoughChains(SchedulingError):
    pass


class NotChains(SchedulingError):
    pass


class CrossChainEdges(NotChains):
    pass


class NoSlowMachines(SchedulingError):
    pass


class SizeLimitExceeded(SchedulingError):
    pass


class Infeasible(SchedulingError):
    pass


class Unbounded(SchedulingError):
    pass


class AverageSpeedMismatch(SchedulingError):
    pass


class MachineCountMismatch(SchedulingError):
    pass


class GuaranteeViolated(SchedulingError):
    """Remnants exceeded ``T_opt + 1/s``; indicates an implementation bug."""

    def __init__(self, instance, makespan, optimum):
        super().__init__(f"Remnants makespan {makespan} exceeds optimum {optimum} + 1/s")
        self.instance = instance
        self.makespan = makespan
        self.optimum = optimum


class DominanceViolated(SchedulingError):
    def __init__(self, symmetric, asymmetric):
        super().__init__(f"asymmetric makespan {asymmetric} > symmetric optimum {symmetric}")
        self.symmetric = symmetric
        self.asymmetric = asymmetric
