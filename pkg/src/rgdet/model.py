"""Integrable-model parametrization and derived coupling constants.

A model is a set of N spins-1/2 with one conserved charge per spin,

    R_i = B_i . sigma_i + sum_{j != i} (X_ij sx_i sx_j + Y_ij sy_i sy_j
                                        + Z_ij sz_i sz_j),

where mutual commutation of all R_i holds for the two-parameter-family
couplings

    B^x_i = gamma / Fx(eps_i),   X_ij = g Fx(eps_i) Fy(eps_j) / (eps_i - eps_j),
    B^y_i = lambda / Fy(eps_i),  Y_ij = g Fx(eps_j) Fy(eps_i) / (eps_i - eps_j),
    B^z_i = 1,                   Z_ij = g Fx(eps_j) Fy(eps_j) / (eps_i - eps_j),

with Fx(e) = sqrt(alpha_x e + beta_x), Fy(e) = sqrt(alpha_y e + beta_y).

The charges then satisfy the exact quadratic operator relations

    R_i^2 = sum_{j != i} Gamma_ij R_j + K_i,

with Gamma_ij = 2 Z_ij and
K_i = |B_i|^2 + sum_{j != i} (X_ij^2 + Y_ij^2 + Z_ij^2), which is the
identity everything downstream (eigenvalue equations, operator
determinants, pairing coefficients) is built on.

Only the Hermitian regime is supported: alpha e + beta must be strictly
positive at every eps_i so that Fx, Fy are real, all coefficients real and
every charge Hermitian.  B^z_i = 1 is fixed; any model with nonzero B^z can
be rescaled into this normalization, and Gamma_ij = 2 Z_ij relies on it.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

__all__ = [
    "ModelError",
    "ConfigError",
    "ModelSpec",
    "Couplings",
    "build_couplings",
    "xxx_spec",
    "xxz_spec",
    "load_model_file",
    "parse_model_toml",
    "spec_hash",
]

# Reject eps spacings below this relative gap: couplings scale as 1/gap and
# become numerically meaningless well before exact coincidence.
EPS_GAP_RTOL = 1e-10

# Largest N for which dense 2^N x 2^N matrices are materialized anywhere.
DENSE_CAP = 12


class ModelError(ValueError):
    """Invalid model parameters."""


class ConfigError(ModelError):
    """Malformed or out-of-schema model config file."""


@dataclass(frozen=True)
class ModelSpec:
    """Free parameters of one integrable model.

    epsilons must be pairwise distinct and alpha_x*e + beta_x,
    alpha_y*e + beta_y strictly positive at every entry.
    """

    n_spins: int
    epsilons: tuple[float, ...]
    g: float
    gamma: float = 0.0
    lambda_: float = 0.0
    alpha_x: float = 0.0
    beta_x: float = 1.0
    alpha_y: float = 0.0
    beta_y: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        if self.n_spins < 2:
            raise ModelError(f"n_spins must be >= 2, got {self.n_spins}")
        if len(self.epsilons) != self.n_spins:
            raise ModelError(
                f"expected {self.n_spins} epsilons, got {len(self.epsilons)}"
            )
        eps = np.asarray(self.epsilons)
        if not np.all(np.isfinite(eps)):
            raise ModelError("epsilons must be finite")
        scale = float(np.max(np.abs(eps))) or 1.0
        for i in range(self.n_spins):
            for j in range(i + 1, self.n_spins):
                if abs(eps[i] - eps[j]) < EPS_GAP_RTOL * scale:
                    raise ModelError(
                        f"epsilons[{i}] = {eps[i]!r} and epsilons[{j}] = {eps[j]!r} "
                        f"are closer than {EPS_GAP_RTOL} * max|eps|"
                    )
        for name, alpha, beta in (
            ("x", self.alpha_x, self.beta_x),
            ("y", self.alpha_y, self.beta_y),
        ):
            vals = alpha * eps + beta
            if np.min(vals) <= 0.0:
                k = int(np.argmin(vals))
                raise ModelError(
                    f"alpha_{name} * eps + beta_{name} must be > 0 for all eps; "
                    f"violated at epsilons[{k}] = {eps[k]!r} (value {vals[k]!r})"
                )

    @property
    def fx(self) -> np.ndarray:
        """Fx(eps_i) for all i."""
        return np.sqrt(self.alpha_x * np.asarray(self.epsilons) + self.beta_x)

    @property
    def fy(self) -> np.ndarray:
        """Fy(eps_i) for all i."""
        return np.sqrt(self.alpha_y * np.asarray(self.epsilons) + self.beta_y)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Couplings:
    """All derived constants of one model, computed eagerly and immutable.

    X, Y, Z, Gamma are N x N with zero diagonal; Bx, By, Bz and K are
    length N.  Gamma = 2 Z; K_i is the scalar constant of the quadratic
    relation R_i^2 = sum_j Gamma_ij R_j + K_i.
    """

    spec: ModelSpec
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    Gamma: np.ndarray
    Bx: np.ndarray
    By: np.ndarray
    Bz: np.ndarray
    K: np.ndarray

    @property
    def n_spins(self) -> int:
        return self.spec.n_spins

    @property
    def k_field(self) -> np.ndarray:
        """g-independent part of K: |B_i|^2."""
        return self.Bx**2 + self.By**2 + self.Bz**2


def build_couplings(spec: ModelSpec) -> Couplings:
    """Evaluate X, Y, Z, Gamma, B and K for a model spec.

    Raises ModelError via ModelSpec validation for duplicate epsilons or
    non-positive F^2 arguments.
    """
    n = spec.n_spins
    eps = np.asarray(spec.epsilons)
    fx, fy = spec.fx, spec.fy

    diff = eps[:, None] - eps[None, :]
    np.fill_diagonal(diff, 1.0)  # placeholder, diagonals zeroed below
    inv = 1.0 / diff

    X = spec.g * np.outer(fx, fy) * inv
    Y = spec.g * np.outer(fy, fx) * inv
    Z = spec.g * (fx * fy)[None, :] * inv
    for m in (X, Y, Z):
        np.fill_diagonal(m, 0.0)
    Gamma = 2.0 * Z

    Bx = spec.gamma / fx
    By = spec.lambda_ / fy
    Bz = np.ones(n)
    K = Bx**2 + By**2 + Bz**2 + np.sum(X**2 + Y**2 + Z**2, axis=1)

    return Couplings(
        spec=spec,
        X=_frozen(X),
        Y=_frozen(Y),
        Z=_frozen(Z),
        Gamma=_frozen(Gamma),
        Bx=_frozen(Bx),
        By=_frozen(By),
        Bz=_frozen(Bz),
        K=_frozen(K),
    )


def xxx_spec(
    epsilons: Sequence[float],
    g: float,
    gamma: float = 0.0,
    lambda_: float = 0.0,
) -> ModelSpec:
    """Isotropic model: constant Fx = Fy = 1, so X = Y = Z."""
    return ModelSpec(
        n_spins=len(epsilons),
        epsilons=tuple(epsilons),
        g=g,
        gamma=gamma,
        lambda_=lambda_,
        alpha_x=0.0,
        beta_x=1.0,
        alpha_y=0.0,
        beta_y=1.0,
    )


def xxz_spec(
    epsilons: Sequence[float],
    g: float,
    alpha: float,
    beta: float = 1.0,
    gamma: float = 0.0,
    lambda_: float = 0.0,
) -> ModelSpec:
    """Axially anisotropic model with X = Y != Z.

    Uses Fx = Fy = sqrt(alpha*e + beta), which makes the x and y coupling
    matrices coincide while Z stays distinct for alpha != 0.  With
    gamma = lambda = 0 the field is purely along z and total z
    magnetization is conserved.  alpha = 0 degenerates to the XXX class.
    """
    return ModelSpec(
        n_spins=len(epsilons),
        epsilons=tuple(epsilons),
        g=g,
        gamma=gamma,
        lambda_=lambda_,
        alpha_x=alpha,
        beta_x=beta,
        alpha_y=alpha,
        beta_y=beta,
    )


# --- config file ingestion -------------------------------------------------

_SCHEMA_KEYS = {
    "n_spins",
    "epsilons",
    "g",
    "gamma",
    "lambda",
    "alpha_x",
    "beta_x",
    "alpha_y",
    "beta_y",
}
_REQUIRED_KEYS = {"n_spins", "epsilons", "g"}


def parse_model_toml(text: str) -> ModelSpec:
    """Parse a TOML model config. Unknown keys are errors (fail closed).

    Schema (all at top level)::

        n_spins  = 4                 # required, integer >= 2
        epsilons = [0.1, 0.9, 1.7, 2.4]   # required, n_spins distinct reals
        g        = 0.6               # required
        gamma    = 0.3               # optional, default 0
        lambda   = 0.1               # optional, default 0
        alpha_x  = 0.2               # optional, default 0
        beta_x   = 1.0               # optional, default 1
        alpha_y  = 0.0               # optional, default 0
        beta_y   = 1.0               # optional, default 1
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from exc

    unknown = sorted(set(data) - _SCHEMA_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    missing = sorted(_REQUIRED_KEYS - set(data))
    if missing:
        raise ConfigError(f"missing required config keys: {', '.join(missing)}")

    n_spins = data["n_spins"]
    if not isinstance(n_spins, int) or isinstance(n_spins, bool):
        raise ConfigError(f"n_spins must be an integer, got {n_spins!r}")
    eps = data["epsilons"]
    if not isinstance(eps, list) or not all(
        isinstance(e, (int, float)) and not isinstance(e, bool) for e in eps
    ):
        raise ConfigError("epsilons must be an array of numbers")

    def _num(key, default):
        v = data.get(key, default)
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ConfigError(f"{key} must be a number, got {v!r}")
        return float(v)

    return ModelSpec(
        n_spins=n_spins,
        epsilons=tuple(float(e) for e in eps),
        g=_num("g", 0.0),
        gamma=_num("gamma", 0.0),
        lambda_=_num("lambda", 0.0),
        alpha_x=_num("alpha_x", 0.0),
        beta_x=_num("beta_x", 1.0),
        alpha_y=_num("alpha_y", 0.0),
        beta_y=_num("beta_y", 1.0),
    )


def load_model_file(path) -> ModelSpec:
    """Read and validate a model config file (see parse_model_toml)."""
    with open(path, "rb") as fh:
        text = fh.read().decode("utf-8")
    return parse_model_toml(text)


def spec_hash(spec: ModelSpec) -> str:
    """Short stable hash tying output files to the exact model parameters."""
    parts = [f"n={spec.n_spins}"]
    parts += [format(e, ".17g") for e in spec.epsilons]
    parts += [
        format(v, ".17g")
        for v in (
            spec.g,
            spec.gamma,
            spec.lambda_,
            spec.alpha_x,
            spec.beta_x,
            spec.alpha_y,
            spec.beta_y,
        )
    ]
    return hashlib.sha256(";".join(parts).encode()).hexdigest()[:16]
