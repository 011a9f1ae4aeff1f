"""Physical constants (CODATA 2022), pinned to 12 significant digits.

Every module that needs SI constants reads them from :data:`CODATA`. Functions
that depend on constants accept an optional ``constants`` argument so tests can
inject a modified table.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Constants:
    c: float = 299792458.0  # m/s, exact
    epsilon_0: float = 8.85418781880e-12  # F/m
    hbar: float = 1.05457181765e-34  # J s
    m_e: float = 9.10938371390e-31  # kg
    alpha: float = 7.29735256430e-3  # fine-structure constant
    e: float = 1.602176634e-19  # C, exact


CODATA = Constants()
