class GridInertiaError(Exception):
    """Base class of every error raised by gridinertia."""


# ---- grid_model ----
class GridValidationError(GridInertiaError):
    pass


class InvalidGridFile(GridValidationError):
    pass


class DisconnectedGraph(GridValidationError):
    def __init__(self, components):
        self.components = components
        super(DisconnectedGraph, self).__init__("Line graph has %d connected components" % len(components))


class PowerImbalance(GridValidationError):
    def __init__(self, imbalance):
        self.imbalance = imbalance
        super(PowerImbalance, self).__init__("Power injections do not sum to zero: |sum P| = %g pu" % abs(imbalance))


class NonPositiveParameter(GridValidationError):
    def __init__(self, node, field):
        self.node = node
        self.field = field
        super(NonPositiveParameter, self).__init__("Node %s: parameter '%s' must be strictly positive" % (node, field))


class DuplicateLine(GridValidationError):
    def __init__(self, pair):
        self.pair = pair
        super(DuplicateLine, self).__init__(
            "More than one line between nodes %s and %s (merge parallel lines first)" % pair)


class NotAGenerator(GridValidationError):
    def __init__(self, node):
        self.node = node
        super(NotAGenerator, self).__init__("Node %s is not a conventional generator" % node)


# ---- equilibrium ----
class EquilibriumError(GridInertiaError):
    pass


class NoConvergence(EquilibriumError):
    def __init__(self, iterations, residual):
        self.iterations = iterations
        self.residual = residual
        super(NoConvergence, self).__init__(
            "Newton did not converge after %d iterations (residual %.3e pu)" % (iterations, residual))


class AngleOutOfRange(EquilibriumError):
    def __init__(self, line, delta):
        self.line = line
        self.delta = delta
        super(AngleOutOfRange, self).__init__(
            "Angle difference %.4f rad on line %s-%s is outside (-pi/2, pi/2)" % (delta, line[0], line[1]))


# ---- dynamics ----
class IntegrationError(GridInertiaError):
    pass


class StepSizeUnderflow(IntegrationError):
    pass


class NonFiniteState(IntegrationError):
    pass


class HorizonTooShort(IntegrationError):
    pass


class InertiaFloorViolation(IntegrationError):
    def __init__(self, node, value, floor):
        self.node = node
        super(InertiaFloorViolation, self).__init__("VSG %s inertia %.6g fell below m_min %.6g" % (node, value, floor))


# ---- metrics ----
class MetricsError(GridInertiaError):
    pass


class NonConvergedTail(MetricsError):
    def __init__(self, metric, bound, value):
        self.metric = metric
        self.bound = bound
        self.value = value
        super(NonConvergedTail, self).__init__(
            "Tail of %s not converged: bound %.3e vs accumulated %.3e" % (metric, bound, value))


class NeverSynchronized(MetricsError):
    pass


class MissingAreaLabel(MetricsError):
    def __init__(self, node):
        self.node = node
        super(MissingAreaLabel, self).__init__("Node %s has no area label" % node)


# ---- stability ----
class SpectrumMismatch(GridInertiaError):
    def __init__(self, distance):
        self.distance = distance
        super(SpectrumMismatch, self).__init__("Spectrum union check failed: max pairing distance %.3e" % distance)


# ---- harness ----
class HarnessError(GridInertiaError):
    pass


class NoQualifyingFaults(HarnessError):
    pass


class InertiaBudgetMismatch(HarnessError):
    def __init__(self, budgetA, budgetB):
        self.budgets = (budgetA, budgetB)
        super(InertiaBudgetMismatch, self).__init__(
            "Placements have different total m_min: %.12g vs %.12g" % (budgetA, budgetB))


class ScenarioFailed(HarnessError):
    def __init__(self, scenario_id, cause):
        self.scenarioId = scenario_id
        self.cause = cause
        super(ScenarioFailed, self).__init__("Scenario %s failed: %s: %s" % (scenario_id, type(cause).__name__, cause))


# ---- scenario inputs ----
class InvalidFault(GridInertiaError):
    pass


class InvalidPolicy(GridInertiaError):
    pass
