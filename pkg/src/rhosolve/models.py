"""Benchmark model builders: a driven qubit-cavity system, a dissipative
spin chain, and a driven optomechanical cavity. Each builder returns the
Hamiltonian and collapse operators ready for the Liouvillian constructor."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import destroy, embed, spin_ops

__all__ = ["ModelSpec", "build_model", "build_jc", "build_spin_chain",
           "build_optomech", "MODEL_NAMES", "model_defaults"]

_ALIASES = {
    "jc": "jaynes-cummings",
    "jaynes-cummings": "jaynes-cummings",
    "spin": "spin-chain",
    "spin-chain": "spin-chain",
    "optomech": "optomechanical",
    "optomechanical": "optomechanical",
}

MODEL_NAMES = ("jaynes-cummings", "spin-chain", "optomechanical")

_JC_DEFAULTS = {"delta": 0.0, "omega_a": 1.0, "g": 0.25, "drive": 1.0,
                "kappa": 5e-3, "gamma": 0.05, "n_th": 1.0}
_SPIN_DEFAULTS = {"delta": 0.0, "omega": 2.0 * np.pi,
                  "jx": 0.1 * 2.0 * np.pi, "jy": 0.1 * 2.0 * np.pi,
                  "jz": 0.1 * 2.0 * np.pi, "gamma": 0.01}
_OPTO_DEFAULTS = {"delta": 0.0, "omega_m": 1.0, "g0": 0.4, "drive": 0.1,
                  "kappa": 0.3, "gamma": 1e-4, "n_th": 1.0, "n_c": 4.0}


def model_defaults(name):
    """Default parameter map for a model name (aliases accepted)."""
    canon = _canonical(name)
    if canon == "jaynes-cummings":
        return dict(_JC_DEFAULTS)
    if canon == "spin-chain":
        d = dict(_SPIN_DEFAULTS)
        d["rabi"] = d["omega"] / 2.0
        return d
    return dict(_OPTO_DEFAULTS)


def _canonical(name):
    try:
        return _ALIASES[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; expected one of "
                         f"{sorted(set(_ALIASES))}") from None


def _merge(defaults, overrides, extra_keys=()):
    params = dict(defaults)
    allowed = set(defaults) | set(extra_keys)
    for key, value in (overrides or {}).items():
        if key not in allowed:
            raise ValueError(f"unknown parameter {key!r}; allowed: "
                             f"{sorted(allowed)}")
        params[key] = float(value)
    return params


@dataclass
class ModelSpec:
    """A model request: which system, at what size, with which parameter
    overrides. Parseable from CLI-style key=value pairs or a parameter
    file with one key=value per line (# comments allowed); the keys
    `system` and `size` select the model, everything else is an override."""

    name: str
    size: int
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        self.name = _canonical(self.name)
        self.size = int(self.size)

    @classmethod
    def from_pairs(cls, pairs):
        name = None
        size = None
        overrides = {}
        for raw in pairs:
            key, sep, value = raw.partition("=")
            if not sep:
                raise ValueError(f"expected key=value, got {raw!r}")
            key = key.strip()
            value = value.strip()
            if key in ("system", "name", "model"):
                name = value
            elif key == "size":
                size = int(value)
            else:
                overrides[key] = float(value)
        if name is None or size is None:
            raise ValueError("a model needs at least system=... and size=...")
        return cls(name, size, overrides)

    @classmethod
    def from_file(cls, path):
        pairs = []
        with open(path, "r", encoding="utf-8") as handle:
            for line in handle:
                line = line.split("#", 1)[0].strip()
                if line:
                    pairs.append(line)
        return cls.from_pairs(pairs)


def build_jc(n, overrides=None):
    """Driven qubit-cavity model with a thermal cavity bath and qubit decay.

    n is the number of cavity Fock states; the Hilbert space factors are
    ordered qubit first, cavity second. Returns (H, collapse_ops)."""
    if n < 2:
        raise ValueError("need at least 2 cavity states")
    prm = _merge(_JC_DEFAULTS, overrides)
    dims = (2, n)
    sp_ops = spin_ops()
    sm = embed(sp_ops["sigma_minus"], dims, 0)
    sp = embed(sp_ops["sigma_plus"], dims, 0)
    a = embed(destroy(n), dims, 1)
    ad = a.adjoint()
    h = ((-prm["delta"]) * (ad @ a)
         + prm["omega_a"] * (sp @ sm)
         + prm["g"] * ((a + ad) @ (sm + sp))
         + prm["drive"] * (a + ad))
    c_ops = [
        np.sqrt(prm["kappa"] * (1.0 + prm["n_th"])) * a,
        np.sqrt(prm["kappa"] * prm["n_th"]) * ad,
        np.sqrt(prm["gamma"] * (1.0 + prm["n_th"])) * sm,
    ]
    return h, c_ops


def build_spin_chain(n, overrides=None):
    """Dissipative transverse-field spin chain with nearest-neighbor
    exchange and per-spin dephasing; the first spin carries the drive and
    detuning. Returns (H, collapse_ops)."""
    if n < 2:
        raise ValueError("need at least 2 spins")
    prm = _merge(_SPIN_DEFAULTS, overrides, extra_keys=("rabi",))
    if "rabi" not in prm:
        prm["rabi"] = prm["omega"] / 2.0
    dims = (2,) * n
    ops = spin_ops()
    sx = [embed(ops["sigma_x"], dims, k) for k in range(n)]
    sy = [embed(ops["sigma_y"], dims, k) for k in range(n)]
    sz = [embed(ops["sigma_z"], dims, k) for k in range(n)]
    h = (-0.5 * prm["delta"]) * sz[0] + (-0.5 * prm["rabi"]) * sx[0]
    for k in range(1, n):
        h = h + (-0.5 * prm["omega"]) * sz[k]
    for k in range(n - 1):
        h = h + ((-0.5 * prm["jx"]) * (sx[k] @ sx[k + 1])
                 + (-0.5 * prm["jy"]) * (sy[k] @ sy[k + 1])
                 + (-0.5 * prm["jz"]) * (sz[k] @ sz[k + 1]))
    c_ops = [np.sqrt(prm["gamma"]) * op for op in sz]
    return h, c_ops


def build_optomech(n_m, overrides=None):
    """Driven cavity coupled to a thermally damped mechanical mode through
    radiation pressure.

    n_m is the number of mechanical Fock states; the cavity truncation
    defaults to 4 and can be overridden with n_c. Factors are ordered
    cavity first, mechanics second. Returns (H, collapse_ops)."""
    if n_m < 2:
        raise ValueError("need at least 2 mechanical states")
    prm = _merge(_OPTO_DEFAULTS, overrides)
    n_c = int(prm["n_c"])
    if n_c != prm["n_c"] or n_c < 2:
        raise ValueError("n_c must be an integer >= 2")
    dims = (n_c, n_m)
    a = embed(destroy(n_c), dims, 0)
    b = embed(destroy(n_m), dims, 1)
    ad = a.adjoint()
    bd = b.adjoint()
    h = ((-prm["delta"]) * (ad @ a)
         + prm["omega_m"] * (bd @ b)
         + prm["g0"] * ((b + bd) @ (ad @ a))
         + prm["drive"] * (a + ad))
    c_ops = [
        np.sqrt(prm["kappa"]) * a,
        np.sqrt(prm["gamma"] * (1.0 + prm["n_th"])) * b,
        np.sqrt(prm["gamma"] * prm["n_th"]) * bd,
    ]
    return h, c_ops


def build_model(spec):
    """Build (H, collapse_ops) from a ModelSpec."""
    if spec.name == "jaynes-cummings":
        return build_jc(spec.size, spec.overrides)
    if spec.name == "spin-chain":
        return build_spin_chain(spec.size, spec.overrides)
    return build_optomech(spec.size, spec.overrides)
