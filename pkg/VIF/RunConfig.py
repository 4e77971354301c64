"""
Run configuration: a tree of dataclasses read from a YAML spec file and merged over the package defaults
"""
import copy
import dataclasses
import hashlib
import math
import numbers
import yaml
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional
# VIF imports
from VIF.defaults import defaults_info
from VIF.ArtifactIO import canonical_json
from VIF.errors import ConfigurationError, ArtifactError


def _number(name: str, value, low=None, high=None, low_open=False, allow_inf=False) -> float:
    if isinstance(value, str) and allow_inf and value.strip().lower() in ('inf', '+inf', '.inf'):
        value = math.inf
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigurationError(name, f'{value!r} is not a number')
    value = float(value)
    if math.isnan(value) or (math.isinf(value) and not allow_inf):
        raise ConfigurationError(name, f'{value} must be finite')
    if low is not None and (value < low or (low_open and value == low)):
        raise ConfigurationError(name, f'{value} must be {">" if low_open else ">="} {low}')
    if high is not None and value > high:
        raise ConfigurationError(name, f'{value} must be <= {high}')
    return value


def _integer(name: str, value, low=None, high=None) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ConfigurationError(name, f'{value!r} is not an integer')
    if low is not None and value < low:
        raise ConfigurationError(name, f'{value} must be >= {low}')
    if high is not None and value >= high:
        raise ConfigurationError(name, f'{value} must be < {high}')
    return int(value)


def _choice(name: str, value, choices) -> str:
    if value not in choices:
        raise ConfigurationError(name, f'{value!r} must be one of {choices}')
    return value


def _flag(name: str, value) -> bool:
    if not isinstance(value, bool):
        raise ConfigurationError(name, f'{value!r} must be true or false')
    return value


def _vector(name: str, value) -> List[float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigurationError(name, f'{value!r} must be a list of two numbers')
    return [_number(f'{name}[{i}]', v) for i, v in enumerate(value)]


@dataclass
class LatticeConfig:
    nx: int = 24
    ny: int = 24
    a: float = 1.0
    t_hop: float = 1.0
    mu: float = 0.0
    boundary: str = 'open'

    def validate(self):
        self.nx = _integer('lattice.nx', self.nx, low=4)
        self.ny = _integer('lattice.ny', self.ny, low=4)
        self.a = _number('lattice.a', self.a, low=0, low_open=True)
        self.t_hop = _number('lattice.t_hop', self.t_hop, low=0, low_open=True)
        self.mu = _number('lattice.mu', self.mu)
        self.boundary = _choice('lattice.boundary', self.boundary, ('open', 'periodic'))


@dataclass
class PairingConfig:
    g: float = 2.5
    bulk_gap: float = 0.6
    xi: float = 2.0
    cutoff: float = 4.0
    mixing: float = 0.5
    tol: float = 1e-6
    max_iter: int = 200
    pin_phase: bool = False

    def validate(self):
        self.g = _number('pairing.g', self.g, low=0)
        self.bulk_gap = _number('pairing.bulk_gap', self.bulk_gap, low=0)
        self.xi = _number('pairing.xi', self.xi, low=0, low_open=True)
        self.cutoff = _number('pairing.cutoff', self.cutoff, low=0, low_open=True)
        self.mixing = _number('pairing.mixing', self.mixing, low=0, high=1, low_open=True)
        self.tol = _number('pairing.tol', self.tol, low=0, low_open=True)
        self.max_iter = _integer('pairing.max_iter', self.max_iter, low=1)
        self.pin_phase = _flag('pairing.pin_phase', self.pin_phase)


@dataclass
class TemperatureConfig:
    beta: float = math.inf

    def validate(self):
        self.beta = _number('temperature.beta', self.beta, low=0, low_open=True, allow_inf=True)


@dataclass
class VortexConfig:
    q: int = 1
    center: Optional[List[float]] = None

    def validate(self):
        self.q = _integer('vortex.q', self.q)
        _choice('vortex.q', self.q, (-1, 0, 1))
        if self.center is not None:
            self.center = _vector('vortex.center', self.center)


@dataclass
class DisorderConfig:
    strength: float = 0.0
    density: float = 1.0
    seed: int = 0
    kind: str = 'box'
    ensemble_size: int = 1
    seeds: Optional[List[int]] = None

    def validate(self):
        self.strength = _number('disorder.strength', self.strength, low=0)
        self.density = _number('disorder.density', self.density, low=0, high=1)
        self.seed = _integer('disorder.seed', self.seed, low=0, high=2 ** 64)
        self.kind = _choice('disorder.kind', self.kind, ('box', 'gaussian'))
        self.ensemble_size = _integer('disorder.ensemble_size', self.ensemble_size, low=1)
        if self.seeds is not None:
            if not isinstance(self.seeds, (list, tuple)) or not self.seeds:
                raise ConfigurationError('disorder.seeds', f'{self.seeds!r} must be a non-empty list of seeds')
            self.seeds = [_integer(f'disorder.seeds[{i}]', s, low=0, high=2 ** 64) for i, s in enumerate(self.seeds)]

    def ensemble_seeds(self) -> List[int]:
        """ Explicit seed list, or seed, seed + 1, ... for ensemble_size members """
        if self.seeds is not None:
            return list(self.seeds)
        return [(self.seed + i) % 2 ** 64 for i in range(self.ensemble_size)]


@dataclass
class NumericsConfig:
    fd_step: float = 0.01
    degeneracy_tol: float = 1e-8
    eta_b: Optional[float] = None
    omega_spacing: float = 0.25
    omega_max: Optional[float] = None
    n_tau: int = 201
    tau_max: float = 50.0
    ohmic_window: Optional[float] = None
    nonohmic_threshold: float = 0.2
    state_route: bool = True
    reconverge_displaced: bool = False

    def validate(self):
        self.fd_step = _number('numerics.fd_step', self.fd_step, low=0, high=0.5, low_open=True)
        self.degeneracy_tol = _number('numerics.degeneracy_tol', self.degeneracy_tol, low=0, low_open=True)
        for name in ('eta_b', 'omega_max', 'ohmic_window'):
            if getattr(self, name) is not None:
                setattr(self, name, _number(f'numerics.{name}', getattr(self, name), low=0, low_open=True))
        self.omega_spacing = _number('numerics.omega_spacing', self.omega_spacing, low=0, high=1, low_open=True)
        self.n_tau = _integer('numerics.n_tau', self.n_tau, low=2)
        self.tau_max = _number('numerics.tau_max', self.tau_max, low=0, low_open=True)
        self.nonohmic_threshold = _number('numerics.nonohmic_threshold', self.nonohmic_threshold, low=0,
                                          low_open=True)
        self.state_route = _flag('numerics.state_route', self.state_route)
        self.reconverge_displaced = _flag('numerics.reconverge_displaced', self.reconverge_displaced)


@dataclass
class DriveConfig:
    kind: str = 'none'
    amplitude: List[float] = field(default_factory=lambda: [0.0, 0.0])
    frequency: float = 0.0

    def validate(self):
        self.kind = _choice('dynamics.drive.kind', self.kind, ('none', 'constant', 'sinusoidal'))
        self.amplitude = _vector('dynamics.drive.amplitude', self.amplitude)
        self.frequency = _number('dynamics.drive.frequency', self.frequency)


@dataclass
class DynamicsConfig:
    x_init: List[float] = field(default_factory=lambda: [1.0, 0.0])
    t_final: Optional[float] = None
    dt: Optional[float] = None
    b: Optional[float] = None
    k_spring: Optional[float] = None
    eta: Optional[float] = None
    memory: bool = False
    mass: Optional[float] = None
    drive: DriveConfig = field(default_factory=DriveConfig)

    def validate(self):
        self.x_init = _vector('dynamics.x_init', self.x_init)
        for name in ('t_final', 'dt', 'mass'):
            if getattr(self, name) is not None:
                setattr(self, name, _number(f'dynamics.{name}', getattr(self, name), low=0, low_open=True))
        if self.b is not None:
            self.b = _number('dynamics.b', self.b)
        for name in ('k_spring', 'eta'):
            if getattr(self, name) is not None:
                setattr(self, name, _number(f'dynamics.{name}', getattr(self, name), low=0))
        self.memory = _flag('dynamics.memory', self.memory)
        self.drive.validate()

    @property
    def coefficients_given(self) -> bool:
        return self.b is not None and self.k_spring is not None and self.eta is not None


@dataclass
class OutputsConfig:
    directory: str = 'vif_out'
    threads: int = 1

    def validate(self):
        if not isinstance(self.directory, str) or not self.directory:
            raise ConfigurationError('outputs.directory', f'{self.directory!r} must be a non-empty path')
        self.threads = _integer('outputs.threads', self.threads, low=1)


SECTIONS = {
    'lattice': LatticeConfig,
    'pairing': PairingConfig,
    'temperature': TemperatureConfig,
    'vortex': VortexConfig,
    'disorder': DisorderConfig,
    'numerics': NumericsConfig,
    'dynamics': DynamicsConfig,
    'outputs': OutputsConfig,
}


def _merge(base: dict, update: dict) -> dict:
    """ Recursive dict update; nested dicts are merged, everything else replaced """
    out = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _build(cls, params, prefix: str):
    if not isinstance(params, dict):
        raise ConfigurationError(prefix, f'{params!r} must be a mapping')
    names = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in params.items():
        if key not in names:
            raise ConfigurationError(f'{prefix}.{key}', 'unknown field')
        if key == 'drive' and cls is DynamicsConfig:
            value = _build(DriveConfig, value, f'{prefix}.drive')
        kwargs[key] = value
    return cls(**kwargs)


@dataclass
class RunConfig:
    lattice: LatticeConfig = field(default_factory=LatticeConfig)
    pairing: PairingConfig = field(default_factory=PairingConfig)
    temperature: TemperatureConfig = field(default_factory=TemperatureConfig)
    vortex: VortexConfig = field(default_factory=VortexConfig)
    disorder: DisorderConfig = field(default_factory=DisorderConfig)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    dynamics: DynamicsConfig = field(default_factory=DynamicsConfig)
    outputs: OutputsConfig = field(default_factory=OutputsConfig)

    @classmethod
    def from_dict(cls, params: Optional[dict] = None, merge_defaults: bool = True) -> 'RunConfig':
        """
        Builds and validates a config from a nested dict, merged over the package defaults

        Raises
        ------
        ConfigurationError
            naming the dotted path of the first invalid field
        """
        params = params or {}
        if not isinstance(params, dict):
            raise ConfigurationError('config', 'top level must be a mapping')
        for key in params:
            if key not in SECTIONS:
                raise ConfigurationError(str(key), 'unknown section')
        merged = _merge(defaults_info, params) if merge_defaults else params
        sections = {name: _build(SECTIONS[name], merged.get(name, {}), name) for name in SECTIONS}
        config = cls(**sections)
        config.validate()
        return config

    @classmethod
    def from_yaml(cls, path) -> 'RunConfig':
        try:
            with open(path, 'r') as f:
                params = yaml.safe_load(f)
        except OSError as exc:
            raise ArtifactError(f'cannot read config {path}: {exc}') from exc
        except yaml.YAMLError as exc:
            raise ConfigurationError('config', f'{path} is not valid YAML: {exc}') from exc
        return cls.from_dict(params or {})

    def validate(self):
        for name in SECTIONS:
            getattr(self, name).validate()
        if self.lattice.boundary == 'periodic' and self.vortex.q != 0:
            raise ConfigurationError('vortex.q', 'a single vortex is inconsistent with periodic boundaries')

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_yaml(self) -> str:
        """ Canonical YAML text: sorted keys, block style """
        return yaml.safe_dump(self.to_dict(), sort_keys=True, default_flow_style=False)

    def write(self, path) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(self.to_yaml())
        except OSError as exc:
            raise ArtifactError(f'cannot write {path}: {exc}') from exc
        return path

    def config_hash(self) -> str:
        """ SHA-256 of the canonical JSON form of the config; the outputs section does not enter """
        params = self.to_dict()
        params.pop('outputs')
        return hashlib.sha256(canonical_json(params).encode('utf-8')).hexdigest()

    def with_seed(self, seed: int) -> 'RunConfig':
        """ Copy with a different disorder seed and a single-member ensemble """
        disorder = dataclasses.replace(self.disorder, seed=seed, seeds=None, ensemble_size=1)
        config = dataclasses.replace(copy.deepcopy(self), disorder=disorder)
        config.validate()
        return config
