"""Run configuration shared by the CLI verbs and the verification suites.

All defaults live here so that an acceptance run is a single command.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace

from .circlemap import DIOPHANTINE_MENU, TOL_EVAL, CircleMap, ConformalConjugacy, make_linearizable, make_rotation

FAMILIES = ("rotation", "moebius", "moebius_germ", "fourier")

DEFAULT_TOLERANCES = {
    "tol_eval": TOL_EVAL,
    "measure_gap": 1e-8,
    "conformal_identity": 1e-8,
    "fatou": 1e-6,
    "poltoratski_mass_rel": 0.05,
    "capacity": 1e-8,
    "joukowski": 1e-8,
    "generator_slope": 0.2,
    "loewner_weak": 1e-3,
    "semigroup": 1e-7,
    "euler_order": 0.2,
    "euler_gap": 1e-3,
    "backward_limit": 1e-3,
    "radius": 1e-4,
    "herglotz_infinity": 1e-6,
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Grid, example family and rotation number, plus tolerances, seed and output directory.

    ``coeffs`` are the lift coefficients ``p_1, p_2, ...`` of the ``fourier``
    family, entered as ``re`` or ``re+imj`` strings on the command line.
    """

    N: int = 1024
    seed: int = 0
    family: str = "moebius"
    a: float = 0.3
    b: float = 0.2
    coeffs: tuple = (0.05,)
    alpha: str = "golden"
    s: float = 2.0
    t: float = 0.1
    t_end: float = 0.1
    dt: float = 2.5e-4
    out_dir: str = "circleflow_out"
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.N < 8 or self.N & (self.N - 1):
            raise ConfigError(f"N must be a power of two >= 8, got {self.N}")
        if self.family not in FAMILIES:
            raise ConfigError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.alpha not in DIOPHANTINE_MENU:
            raise ConfigError(f"alpha must name an entry of the Diophantine menu {sorted(DIOPHANTINE_MENU)}")
        if not 0 <= abs(self.a) < 1:
            raise ConfigError("moebius parameter needs |a| < 1")
        if self.dt <= 0 or self.t_end <= 0:
            raise ConfigError("dt and t_end must be positive")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"unknown tolerance keys {sorted(unknown)}")

    @property
    def alpha_value(self) -> float:
        return DIOPHANTINE_MENU[self.alpha]

    def tol(self, key: str) -> float:
        return float(self.tolerances.get(key, DEFAULT_TOLERANCES[key]))

    def with_overrides(self, **kw) -> "RunConfig":
        tol = dict(self.tolerances)
        tol.update(kw.pop("tolerances", {}) or {})
        return replace(self, tolerances=tol, **kw)

    def build_map(self) -> CircleMap:
        """The circle map of the selected family (germs give their ``t = 0`` map)."""
        if self.family == "rotation":
            return make_rotation(self.alpha, self.N)
        if self.family == "moebius":
            return make_linearizable(self.alpha, ConformalConjugacy.moebius(self.a), self.N)
        if self.family == "fourier":
            h = ConformalConjugacy.fourier([complex(c) for c in self.coeffs], M=2 * self.N)
            return make_linearizable(self.alpha, h, self.N)
        from .flow import germ_state
        return germ_state(self.germ(), 0.0, 2 * self.N)[0].map

    def germ(self):
        from .flow import Germ
        if self.family == "rotation":
            return Germ("linear", self.alpha_value)
        if self.family != "moebius_germ":
            raise ConfigError(f"family {self.family!r} does not define a germ")
        return Germ("moebius", self.alpha_value, self.b)

    def to_json(self) -> dict:
        d = asdict(self)
        d["coeffs"] = [str(c) for c in self.coeffs]
        d["tolerances"] = {k: d["tolerances"][k] for k in sorted(d["tolerances"])}
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, d: dict) -> "RunConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        d = dict(d)
        if "coeffs" in d:
            d["coeffs"] = tuple(str(c) for c in d["coeffs"])
        if "tolerances" in d:
            tol = dict(DEFAULT_TOLERANCES)
            tol.update(d["tolerances"])
            d["tolerances"] = tol
        return cls(**d)
