"""Exception hierarchy shared by all k3kit modules."""


class K3KitError(Exception):
    """Base class for every error raised by k3kit."""


# diophantine
class TorsionHit(K3KitError):
    def __init__(self, n):
        super().__init__(f"pair is torsion at level n={n}")
        self.n = n


# lattice
class SideMismatch(K3KitError, ValueError):
    pass


class NonIntegralProjection(K3KitError, ValueError):
    pass


# theta
class NotIntegral(K3KitError, ValueError):
    def __init__(self, values):
        super().__init__(f"Im H is not integral on the lattice generators: {values}")
        self.values = values


class CNotRemoved(K3KitError, ValueError):
    def __init__(self):
        super().__init__("c != 0; apply gauge_remove_c first")


# cohomology
class Resonance(K3KitError, ArithmeticError):
    def __init__(self, m, kappa):
        super().__init__(f"small denominator |kappa|={abs(kappa):.3e} at mode {m}")
        self.m = m
        self.kappa = kappa


class ZeroMode(K3KitError, ArithmeticError):
    def __init__(self, m):
        super().__init__(f"obstructed class: nonzero coefficient on the kernel mode {m}")
        self.m = m


class TorsionLevel(K3KitError, ArithmeticError):
    def __init__(self, n):
        super().__init__(f"character is trivial at level n={n}")
        self.n = n


# gluing
class OutOfAnnulus(K3KitError, ValueError):
    pass


class OutOfRegion(K3KitError, ValueError):
    pass


# ampleness
class OnZeroSection(K3KitError, ValueError):
    pass


# chern
class ZeroDegree(K3KitError, ValueError):
    pass


class DegreeMismatch(K3KitError, ValueError):
    def __init__(self, b_plus, b_minus):
        super().__init__(f"(L+.C+)={b_plus} != (L-.C-)={b_minus}")
        self.b_plus = b_plus
        self.b_minus = b_minus


class TorrelationViolated(K3KitError, ValueError):
    def __init__(self, side, residual):
        super().__init__(f"9p0 - sum p_j != {side}mu (residual {residual})")
        self.side = side
        self.residual = residual


class NoIndependenceDeclared(K3KitError, ValueError):
    pass


# cli / config
class ConfigError(K3KitError):
    pass


class ConfigParseError(ConfigError):
    pass


class ConfigValidationError(ConfigError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(f"{k}: {msg}" for k, msg in self.violations))

    @property
    def fields(self):
        return [k for k, _ in self.violations]
