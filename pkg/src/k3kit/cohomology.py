"""Per-mode solver for the twisted dbar-equation on the real 2-torus.

A section twisted by the flat character (theta1, theta2) is expanded as

    f(x) = sum_m c_m exp(2 pi i ((m1 + theta1) x1 + (m2 + theta2) x2)),

with z = x1 + tau x2.  dbar acts diagonally:  dbar e_m = kappa_m e_m with

    kappa_m = -(pi / Im tau) * ((m2 + theta2) - (m1 + theta1) tau).

At level n the character is (-n p, -n q) mod 1, so min_m |kappa_m| is
(pi / Im tau) times the Pic0 distance of N^n from the trivial class.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np

from .diophantine import DiophantinePair, residuals
from .errors import Resonance, TorsionLevel, ZeroMode

DEFAULT_FLOOR = 1e-14
_CHUNK = 1 << 15


def _centre(x: float) -> float:
    x = x - math.floor(x)
    return x - 1.0 if x >= 0.5 else x


@dataclass(frozen=True)
class FlatCharacter:
    """Monodromy exponents (theta1, theta2), stored centred in [-1/2, 1/2)."""

    theta1: float = 0.0
    theta2: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta1", _centre(float(self.theta1)))
        object.__setattr__(self, "theta2", _centre(float(self.theta2)))

    @classmethod
    def at_level(cls, pair: DiophantinePair, n: int) -> "FlatCharacter":
        """(-n p, -n q) mod 1."""
        if pair.is_rational:
            return cls(float(-n * pair.p % 1), float(-n * pair.q % 1))
        rp, rq = residuals(pair, n, n + 1)
        return cls(-float(rp[0]), -float(rq[0]))

    def is_trivial(self) -> bool:
        return self.theta1 == 0.0 and self.theta2 == 0.0


@dataclass
class TorusFourierSection:
    """Finitely supported Fourier data; ``character`` may be left None for the solver to fill in."""

    character: FlatCharacter | None
    coeffs: dict = field(default_factory=dict)

    def sup_estimate(self) -> float:
        """l1 norm of the coefficients, an upper bound for the sup norm."""
        return float(sum(abs(c) for c in self.coeffs.values()))

    def with_character(self, char: FlatCharacter) -> "TorusFourierSection":
        return TorusFourierSection(char, self.coeffs)


def dbar_constant(tau: complex) -> float:
    return math.pi / complex(tau).imag


def dbar_eigenvalue(tau: complex, char: FlatCharacter, m) -> complex:
    tau = complex(tau)
    xi1 = m[0] + char.theta1
    xi2 = m[1] + char.theta2
    return -dbar_constant(tau) * (xi2 - xi1 * tau)


def apply_twisted_dbar(tau: complex, g: TorusFourierSection) -> TorusFourierSection:
    """The forward operator, coefficientwise multiplication by kappa_m."""
    return TorusFourierSection(g.character, {m: dbar_eigenvalue(tau, g.character, m) * c
                                             for m, c in g.coeffs.items()})


def solve_twisted_dbar(tau: complex, f: TorusFourierSection, floor: float = DEFAULT_FLOOR) -> TorusFourierSection:
    """u with dbar u = f, i.e. u_m = f_m / kappa_m.

    Raises ZeroMode when f has content on a mode with kappa_m = 0 exactly
    (an obstructed class) and Resonance when some |kappa_m| < floor.
    """
    char = f.character or FlatCharacter()
    out = {}
    for m, c in f.coeffs.items():
        if c == 0:
            out[m] = 0j
            continue
        k = dbar_eigenvalue(tau, char, m)
        if k == 0:
            raise ZeroMode(m)
        if abs(k) < floor:
            raise Resonance(m, k)
        out[m] = c / k
    return TorusFourierSection(char, out)


def residual(tau: complex, u: TorusFourierSection, f: TorusFourierSection) -> float:
    """max_m |kappa_m u_m - f_m| / max_m |f_m| (0 when f = 0)."""
    back = apply_twisted_dbar(tau, u).coeffs
    scale = max((abs(c) for c in f.coeffs.values()), default=0.0)
    keys = set(back) | set(f.coeffs)
    err = max((abs(back.get(m, 0) - f.coeffs.get(m, 0)) for m in keys), default=0.0)
    return err / scale if scale else err


@dataclass
class SeriesSolveReport:
    ell: float
    n: np.ndarray
    denominator: np.ndarray
    g_norm: np.ndarray
    log_M: float
    K_hat: float
    alpha_hat: float
    certified_radius: float
    worst_inverse_denominator: float
    solutions: list | None = None

    @property
    def M(self) -> float:
        return math.exp(self.log_M) if self.log_M > -math.inf else 0.0

    def log_bound(self) -> np.ndarray:
        if self.K_hat == 0:
            return np.full(self.n.shape, -np.inf)
        return (math.log(self.K_hat) + self.log_M + self.alpha_hat * np.log(self.n)
                - self.n * math.log(self.ell))

    def bound(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_bound())

    def holds(self) -> bool:
        with np.errstate(divide="ignore"):
            lg = np.log(self.g_norm)
        return bool(np.all(lg <= self.log_bound()))

    def modes(self) -> list[tuple]:
        b = self.bound()
        return [(int(n), float(d), float(g), float(x))
                for n, d, g, x in zip(self.n, self.denominator, self.g_norm, b)]


def _characters(pair: DiophantinePair, start: int, stop: int):
    if pair.is_rational:
        t1 = np.array([float(-k * pair.p % 1) for k in range(start, stop)])
        t2 = np.array([float(-k * pair.q % 1) for k in range(start, stop)])
        t1 = np.where(t1 >= 0.5, t1 - 1, t1)
        t2 = np.where(t2 >= 0.5, t2 - 1, t2)
        return t1, t2
    rp, rq = residuals(pair, start, stop)
    return -rp, -rq


def _neighbourhood_min(tau: complex, t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
    best = np.full(t1.shape, np.inf)
    for m1 in (-1, 0, 1):
        for m2 in (-1, 0, 1):
            k = np.abs((m2 + t2) - (m1 + t1) * tau)
            best = np.minimum(best, k)
    return dbar_constant(tau) * best


def _as_section(item) -> TorusFourierSection:
    if isinstance(item, TorusFourierSection):
        return item
    if isinstance(item, Mapping):
        return TorusFourierSection(None, dict(item))
    raise TypeError(f"cannot interpret {type(item).__name__} as a Fourier section")


def solve_vertical_series(tau: complex, pair: DiophantinePair,
                          modes: Iterable, ell: float,
                          floor: float = DEFAULT_FLOOR, keep_solutions: bool = False,
                          char_tol: float = 1e-12) -> SeriesSolveReport:
    """Solve every mode n = 1, 2, ... and fit the growth bound.

    ``modes`` yields the mode-n data in order (a TorusFourierSection or a
    plain {m: coefficient} mapping).  It is consumed lazily, so generators
    of 10**6 modes are fine.  Sections that carry a character must carry
    (-n p, -n q) mod 1.

    With r_n = ||g_n|| ell^n / M and M = max_n ||f_n|| ell^n the fit is
    alpha_hat = max(0, max_{n>=2} log r_n / log n) and
    K_hat = max_n r_n n^-alpha_hat, padded by a few ulps so that
    ||g_n|| <= K_hat M n^alpha_hat / ell^n holds for every n.
    """
    tau = complex(tau)
    if not 0 < ell:
        raise ValueError("ell must be positive")
    log_ell = math.log(ell)
    ns, dens, log_g, log_f = [], [], [], []
    sols = [] if keep_solutions else None
    worst = 0.0
    t1 = t2 = None
    base = 1
    it: Iterator = iter(modes)
    n = 0
    for item in it:
        n += 1
        if t1 is None or n - base >= len(t1):
            base = n
            t1, t2 = _characters(pair, n, n + _CHUNK)
            near = _neighbourhood_min(tau, t1, t2)
            worst = max(worst, float(np.max(1.0 / np.maximum(near, 1e-300))))
        i = n - base
        char = FlatCharacter(t1[i], t2[i])
        f = _as_section(item)
        if f.character is not None:
            d1 = _centre(f.character.theta1 - char.theta1)
            d2 = _centre(f.character.theta2 - char.theta2)
            if abs(d1) > char_tol or abs(d2) > char_tol:
                raise ValueError(f"mode {n} carries character {f.character}, expected {char}")
        f = f.with_character(char)
        if char.is_trivial():
            if any(c != 0 and dbar_eigenvalue(tau, char, m) == 0 for m, c in f.coeffs.items()):
                raise ZeroMode(next(m for m, c in f.coeffs.items()
                                    if c != 0 and dbar_eigenvalue(tau, char, m) == 0))
            raise TorsionLevel(n)
        g = solve_twisted_dbar(tau, f, floor)
        fn = f.sup_estimate()
        gn = g.sup_estimate()
        ns.append(n)
        dens.append(min((abs(dbar_eigenvalue(tau, char, m)) for m in f.coeffs), default=math.inf))
        log_f.append(math.log(fn) + n * log_ell if fn > 0 else -math.inf)
        log_g.append(math.log(gn) if gn > 0 else -math.inf)
        if keep_solutions:
            sols.append(g)
    n_arr = np.asarray(ns, dtype=np.float64)
    log_g_arr = np.asarray(log_g)
    log_M = max(log_f, default=-math.inf)
    report = SeriesSolveReport(ell, n_arr, np.asarray(dens), np.exp(log_g_arr), log_M,
                               0.0, 0.0, ell, worst, sols)
    if log_M == -math.inf:
        return report
    log_r = log_g_arr + n_arr * log_ell - log_M
    finite = np.isfinite(log_r)
    sel = finite & (n_arr >= 2)
    alpha = float(np.max(log_r[sel] / np.log(n_arr[sel]))) if sel.any() else 0.0
    alpha = max(alpha, 0.0)
    K = float(np.exp(np.max(log_r[finite] - alpha * np.log(n_arr[finite]))))
    report.alpha_hat, report.K_hat = alpha, K
    for _ in range(64):
        if report.holds():
            break
        report.K_hat = float(np.nextafter(report.K_hat, np.inf)) * (1 + 2 ** -52)
    return report


def certify_pullback_triviality(series: Iterable, tau: complex, pair: DiophantinePair,
                                ell: float, floor: float = DEFAULT_FLOOR):
    """Split off the n = 0 datum and solve the vertical part n >= 1.

    Returns (base_class, report); the report keeps the per-mode solutions
    so callers can rebuild the trivialising series.
    """
    it = iter(series)
    try:
        f0 = _as_section(next(it))
    except StopIteration:
        raise ValueError("series needs at least the n = 0 datum") from None
    report = solve_vertical_series(tau, pair, it, ell, floor, keep_solutions=True)
    return f0, report


def resonant_series(tau: complex, pair: DiophantinePair, n_max: int, M: float = 1.0,
                    ell: float = 1.0, mode=(0, 0)) -> Iterator[TorusFourierSection]:
    """f_n = (M / ell^n) e_mode at the level-n character, lazily.

    With the centred character and tau = i the mode (0, 0) is the one with
    the smallest |kappa|, so ||g_n|| tracks the inverse Pic0 distance.
    """
    for start in range(1, n_max + 1, _CHUNK):
        stop = min(start + _CHUNK, n_max + 1)
        for n in range(start, stop):
            yield {mode: M * ell ** (-n)}


def manufactured_section(rng: np.random.Generator, char: FlatCharacter, n_modes: int = 50,
                         radius: int = 6) -> TorusFourierSection:
    """Random coefficients on ``n_modes`` distinct modes with |m_i| <= radius."""
    modes = set()
    while len(modes) < n_modes:
        modes.add((int(rng.integers(-radius, radius + 1)), int(rng.integers(-radius, radius + 1))))
    return TorusFourierSection(char, {m: complex(rng.normal(), rng.normal()) for m in sorted(modes)})


def parse_modes_json(doc: Mapping) -> tuple[complex, DiophantinePair, list[dict]]:
    """Decode {tau, p, q, modes: [{n, coeffs: [[m1, m2, re, im], ...]}]} into dense modes 1..N."""
    from .config import parse_complex, parse_pair

    tau = parse_complex(doc["tau"])
    pair = parse_pair(doc["p"], doc["q"], doc.get("exact", False))
    by_n: dict[int, dict] = {}
    for entry in doc.get("modes", []):
        n = int(entry["n"])
        if n < 1:
            raise ValueError("mode numbers start at n = 1")
        co = by_n.setdefault(n, {})
        for m1, m2, re, im in entry.get("coeffs", []):
            co[(int(m1), int(m2))] = co.get((int(m1), int(m2)), 0) + complex(float(re), float(im))
    N = max(by_n, default=0)
    return tau, pair, [by_n.get(n, {}) for n in range(1, N + 1)]
