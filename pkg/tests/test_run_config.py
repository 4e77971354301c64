"""
test_run_config.py

Unit tests for run configuration parsing, validation and hashing.
"""
import math
import pytest
import yaml
from VIF.RunConfig import RunConfig
from VIF.errors import ConfigurationError, ArtifactError


def test_defaults():
    config = RunConfig.from_dict({})
    assert config.lattice.nx == config.lattice.ny == 24
    assert config.lattice.boundary == 'open'
    assert config.pairing.g == 2.5
    assert config.pairing.pin_phase is False
    assert math.isinf(config.temperature.beta)
    assert config.vortex.q == 1 and config.vortex.center is None
    assert config.numerics.fd_step == 0.01
    assert config.numerics.state_route
    assert config.dynamics.drive.kind == 'none'
    assert not config.dynamics.coefficients_given


def test_spec_overrides_only_what_it_names(spec_dir):
    config = RunConfig.from_yaml(spec_dir / 'TinyVortex.yaml')
    assert (config.lattice.nx, config.lattice.ny) == (8, 8)
    assert config.pairing.tol == 1e-5 and config.pairing.max_iter == 400
    assert config.pairing.mixing == 0.5
    assert config.outputs.directory == 'tiny_vortex_out'


@pytest.mark.parametrize('params, field', [
    ({'lattice': {'nx': 3}}, 'lattice.nx'),
    ({'lattice': {'boundary': 'twisted'}}, 'lattice.boundary'),
    ({'pairing': {'g': -1.0}}, 'pairing.g'),
    ({'pairing': {'mixing': 0.0}}, 'pairing.mixing'),
    ({'pairing': {'max_iter': 2.5}}, 'pairing.max_iter'),
    ({'pairing': {'pin_phase': 1}}, 'pairing.pin_phase'),
    ({'temperature': {'beta': 0.0}}, 'temperature.beta'),
    ({'temperature': {'beta': 'hot'}}, 'temperature.beta'),
    ({'vortex': {'q': 2}}, 'vortex.q'),
    ({'vortex': {'center': [1.0]}}, 'vortex.center'),
    ({'disorder': {'density': 1.5}}, 'disorder.density'),
    ({'disorder': {'seed': -1}}, 'disorder.seed'),
    ({'disorder': {'seeds': []}}, 'disorder.seeds'),
    ({'numerics': {'state_route': 'yes'}}, 'numerics.state_route'),
    ({'numerics': {'fd_step': 1.0}}, 'numerics.fd_step'),
    ({'dynamics': {'drive': {'kind': 'pulse'}}}, 'dynamics.drive.kind'),
    ({'dynamics': {'x_init': [1.0, 'a']}}, 'dynamics.x_init[1]'),
    ({'outputs': {'threads': 0}}, 'outputs.threads'),
])
def test_invalid_field_is_named(params, field):
    with pytest.raises(ConfigurationError) as info:
        RunConfig.from_dict(params)
    assert info.value.field == field


def test_unknown_names_rejected():
    with pytest.raises(ConfigurationError) as info:
        RunConfig.from_dict({'plotting': {}})
    assert info.value.field == 'plotting'
    with pytest.raises(ConfigurationError) as info:
        RunConfig.from_dict({'lattice': {'nz': 4}})
    assert info.value.field == 'lattice.nz'
    with pytest.raises(ConfigurationError) as info:
        RunConfig.from_dict({'dynamics': {'drive': {'phase': 0.0}}})
    assert info.value.field == 'dynamics.drive.phase'


def test_vortex_needs_open_boundaries():
    with pytest.raises(ConfigurationError) as info:
        RunConfig.from_dict({'lattice': {'boundary': 'periodic'}})
    assert info.value.field == 'vortex.q'
    config = RunConfig.from_dict({'lattice': {'boundary': 'periodic'}, 'vortex': {'q': 0}})
    assert config.lattice.boundary == 'periodic'


@pytest.mark.parametrize('beta', ['inf', '.inf', float('inf')])
def test_infinite_beta_spellings(beta):
    assert math.isinf(RunConfig.from_dict({'temperature': {'beta': beta}}).temperature.beta)


def test_integer_where_float_expected():
    config = RunConfig.from_dict({'lattice': {'mu': 0}, 'temperature': {'beta': 20}})
    assert isinstance(config.lattice.mu, float)
    assert config.temperature.beta == 20.0


def test_yaml_round_trip_keeps_hash(tmp_path):
    config = RunConfig.from_dict({'lattice': {'nx': 10, 'mu': 0.2}, 'disorder': {'strength': 0.3, 'seed': 9}})
    path = config.write(tmp_path / 'config.yaml')
    loaded = RunConfig.from_yaml(path)
    assert loaded == config
    assert loaded.config_hash() == config.config_hash()
    assert yaml.safe_load(path.read_text())['lattice']['nx'] == 10


def test_hash_tracks_physics_not_outputs():
    base = RunConfig.from_dict({})
    assert len(base.config_hash()) == 64
    assert base.config_hash() == RunConfig.from_dict({}).config_hash()
    assert RunConfig.from_dict({'pairing': {'g': 2.6}}).config_hash() != base.config_hash()
    assert RunConfig.from_dict({'outputs': {'directory': 'elsewhere', 'threads': 4}}).config_hash() == \
        base.config_hash()


def test_with_seed():
    config = RunConfig.from_dict({'disorder': {'strength': 0.5, 'seed': 4, 'ensemble_size': 3}})
    member = config.with_seed(11)
    assert member.disorder.seed == 11
    assert member.disorder.ensemble_size == 1
    assert member.disorder.strength == 0.5
    assert config.disorder.seed == 4
    assert member.config_hash() != config.config_hash()


def test_ensemble_seeds():
    assert RunConfig.from_dict({'disorder': {'seed': 7, 'ensemble_size': 3}}).disorder.ensemble_seeds() == [7, 8, 9]
    explicit = RunConfig.from_dict({'disorder': {'seeds': [5, 1, 5], 'ensemble_size': 2}})
    assert explicit.disorder.ensemble_seeds() == [5, 1, 5]
    wrapped = RunConfig.from_dict({'disorder': {'seed': 2 ** 64 - 1, 'ensemble_size': 2}})
    assert wrapped.disorder.ensemble_seeds() == [2 ** 64 - 1, 0]


def test_missing_file(tmp_path):
    with pytest.raises(ArtifactError):
        RunConfig.from_yaml(tmp_path / 'absent.yaml')


def test_malformed_yaml(tmp_path):
    path = tmp_path / 'broken.yaml'
    path.write_text('lattice: [nx: 4\n')
    with pytest.raises(ConfigurationError):
        RunConfig.from_yaml(path)


def test_invalid_spec_file(spec_dir):
    with pytest.raises(ConfigurationError) as info:
        RunConfig.from_yaml(spec_dir / 'InvalidLattice.yaml')
    assert info.value.field == 'lattice.nx'
