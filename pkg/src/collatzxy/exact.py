"""Exact rational quantities attached to a parity decomposition (n, X, Y).

    Z       = (3^X (2n + 1) - 1) / 2^(Y+1)
    eps     = 1 - Z
    eps_n   = 3^-X * eps
    n'      = 2^Y (3^-X - eps_n)        (the canonical decomposition)
    {n'}    = n' - floor(n')

Every function takes (n, X, Y) explicitly so formulas can be probed on
decompositions that are not the true one.  Rationals are ``fractions.Fraction``
(always reduced, positive denominator); no float is ever produced.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .trajectory import DEFAULT_BUDGET, compute_trajectory


def floor_rational(r: Fraction) -> int:
    return r.numerator // r.denominator


def ceil_rational(r: Fraction) -> int:
    return -(-r.numerator // r.denominator)


def z_value(n: int, X: int, Y: int) -> Fraction:
    return Fraction(3**X * (2 * n + 1) - 1, 1 << (Y + 1))


def f_xy(n: int, X: int, Y: int) -> int:
    """Ceiling of Z; equals 1 on true decompositions of convergent n."""
    return ceil_rational(z_value(n, X, Y))


def epsilon(n: int, X: int, Y: int) -> Fraction:
    return 1 - z_value(n, X, Y)


def epsilon_n(n: int, X: int, Y: int) -> Fraction:
    return epsilon(n, X, Y) / 3**X


def canonical_decomposition(n: int, X: int, Y: int) -> Fraction:
    return (1 << Y) * (Fraction(1, 3**X) - epsilon_n(n, X, Y))


def recover_n(n_prime: Fraction) -> int:
    if n_prime < 0:
        raise ValueError("recover_n expects a non-negative rational")
    return floor_rational(Fraction(n_prime))


def fractional_part(r: Fraction) -> Fraction:
    r = Fraction(r)
    if r < 0:
        raise ValueError("fractional_part expects a non-negative rational")
    return r - floor_rational(r)


def half_gap(X: int) -> Fraction:
    """The closed form (1 - 3^-X) / 2 that n' exceeds n by."""
    return (1 - Fraction(1, 3**X)) / 2


def render(r: Fraction | int) -> str:
    """Render an exact rational as "p/q" (integers as "p/1")."""
    r = Fraction(r)
    return f"{r.numerator}/{r.denominator}"


@dataclass(frozen=True)
class ExactWitness:
    n: int
    x_count: int
    y_count: int
    z: Fraction
    epsilon: Fraction
    epsilon_n: Fraction
    n_prime: Fraction
    frac_n_prime: Fraction

    @property
    def f(self) -> int:
        return ceil_rational(self.z)

    def to_json(self) -> dict:
        return {
            "n": str(self.n),
            "x": self.x_count,
            "y": self.y_count,
            "z": render(self.z),
            "epsilon": render(self.epsilon),
            "epsilon_n": render(self.epsilon_n),
            "n_prime": render(self.n_prime),
            "frac_n_prime": render(self.frac_n_prime),
            "f": str(self.f),
        }


def exact_witness(n: int, X: int | None = None, Y: int | None = None, budget: int = DEFAULT_BUDGET) -> ExactWitness:
    """Build the full set of exact quantities for n.

    When X and Y are omitted they are taken from n's own trajectory.
    """
    if X is None or Y is None:
        rec = compute_trajectory(n, budget)
        X, Y = rec.x_count, rec.y_count
    z = z_value(n, X, Y)
    eps = 1 - z
    eps_n = eps / 3**X
    n_prime = (1 << Y) * (Fraction(1, 3**X) - eps_n)
    return ExactWitness(n, X, Y, z, eps, eps_n, n_prime, n_prime - floor_rational(n_prime))
