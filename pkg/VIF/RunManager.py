import logging
import math
import time
import numpy as np
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional
# VIF imports
from VIF import __version__
from VIF.RunConfig import RunConfig
from VIF.Disorder import DisorderSpec
from VIF.LatticeModel import LatticeModel, build_lattice
from VIF.PairField import PairField, seed_pair_field, default_loop, winding_number, rotation_error
from VIF.BdGMatrix import assemble_bdg
from VIF.Spectrum import BdGSpectrum, diagonalize, occupations, mean_density, subgap_states, check_particle_hole
from VIF.SelfConsistency import SelfConsistencyReport, self_consistent_gap, thermodynamic_potential
from VIF.ForceMatrix import force_matrix_elements
from VIF.SpectralFunction import JSamples, spectral_function, default_broadening, default_omega_grid
from VIF.DampingKernel import damping_kernel, default_tau_grid
from VIF.TransverseForce import (transverse_coefficient_virtual, transverse_coefficient_state,
                                 RigidSpectrumProvider, AdiabaticSpectrumProvider)
from VIF.SpringConstant import SpringResult, spring_constant, fermion_integral
from VIF.KernelSet import KernelSet, assemble_action_kernels
from VIF.EquationOfMotion import EquationOfMotion, Drive, integrate, hall_angle, ohmic_reduction
from VIF.ArtifactIO import StageArtifacts, write_table, write_json, read_json, file_checksum
from VIF.errors import VIFError, ConfigurationError, ConvergenceError, StageError

logger = logging.getLogger(__name__)

MANIFEST = 'manifest.json'
CONFIG_FILE = 'config.yaml'
# Sweep aborts when more than this fraction of the members fail
FAILURE_LIMIT = 0.5
# Decoupling thresholds on the ensemble spreads of B and eta
B_SPREAD_LIMIT = 0.05
ETA_SPREAD_FLOOR = 0.20


@dataclass
class SolveOutcome:
    model: LatticeModel
    pair: PairField
    spectrum: BdGSpectrum
    report: SelfConsistencyReport


@dataclass
class KernelOutcome:
    kernels: KernelSet
    jsamples: JSamples
    ohmic: object
    spring: SpringResult
    b_virtual: object
    b_state: Optional[object]
    mean_density: float


"""
Pipeline steps without I/O. These are what the sweep workers run.
"""


def build_model(config: RunConfig) -> LatticeModel:
    lat = config.lattice
    dis = config.disorder
    disorder = DisorderSpec(strength=dis.strength, density=dis.density, seed=dis.seed, kind=dis.kind)
    return build_lattice(lat.nx, lat.ny, lat.a, lat.t_hop, lat.mu, lat.boundary, disorder)


def seed_field(config: RunConfig, model: LatticeModel) -> PairField:
    p = config.pairing
    return seed_pair_field(model, config.vortex.center, config.vortex.q, p.bulk_gap, p.xi)


def solve(config: RunConfig) -> SolveOutcome:
    """ Self-consistent vortex solution for `config`; g = 0 yields the zero field without iterating """
    model = build_model(config)
    seed = seed_field(config, model)
    p = config.pairing
    beta = config.temperature.beta
    if p.g == 0:
        pair = seed.with_delta(np.zeros(model.n_sites, dtype=complex))
        spectrum = occupations(diagonalize(assemble_bdg(model, pair)), beta)
        report = SelfConsistencyReport(0.0, p.cutoff, p.tol, p.mixing, p.pin_phase)
        report.record(0.0)
        return SolveOutcome(model, pair, spectrum, report)
    pair, spectrum, report = self_consistent_gap(model, seed, p.g, beta, p.cutoff, p.tol, p.max_iter, p.mixing,
                                                 p.pin_phase)
    return SolveOutcome(model, pair, spectrum, report)


def compute_kernels(config: RunConfig, model: LatticeModel, pair: PairField, spectrum: BdGSpectrum) -> KernelOutcome:
    """ Every kernel of the effective action for one converged configuration """
    num = config.numerics
    p = config.pairing
    beta = config.temperature.beta
    elements = force_matrix_elements(model, pair, spectrum, num.fd_step)
    eta_b = num.eta_b if num.eta_b is not None else default_broadening(spectrum, p.cutoff)

    omega = default_omega_grid(spectrum, eta_b, num.omega_max, num.omega_spacing)
    tau = default_tau_grid(beta, num.n_tau, num.tau_max)

    jsamples = spectral_function(elements, spectrum, omega, eta_b)
    damping = damping_kernel(jsamples, tau, beta)
    b_virtual = transverse_coefficient_virtual(elements, spectrum, num.degeneracy_tol)
    b_state = None
    if num.state_route:
        if num.reconverge_displaced and p.g > 0:
            provider = AdiabaticSpectrumProvider(model, p.g, beta, p.cutoff, p.tol, p.max_iter, p.mixing,
                                                 p.pin_phase)
        else:
            provider = RigidSpectrumProvider(model, beta)
        b_state = transverse_coefficient_state(model, pair, provider, num.fd_step, num.degeneracy_tol,
                                               reference=spectrum)
    if p.g > 0:
        spring = spring_constant(model, pair, jsamples, p.g, num.fd_step)
    else:
        spring = SpringResult(0.0, fermion_integral(jsamples), 0.0)
    ohmic = ohmic_reduction(jsamples, num.ohmic_window, num.nonohmic_threshold)
    density = mean_density(spectrum, model.area)
    metadata = {
        'eta_b': eta_b,
        'disorder_seed': model.disorder.seed,
        'q': pair.winding,
        'b_virtual': b_virtual.to_dict(),
        'b_state': None if b_state is None else b_state.to_dict(),
        'spring': spring.to_dict(),
        'ohmic': ohmic.to_dict(),
        'mean_density': density,
        'topological_estimate': math.pi * pair.winding * density,
        'total_weight': jsamples.total_weight,
        'integrated_weight': jsamples.integrated_weight(),
    }
    if b_state is not None and b_virtual.b != 0:
        metadata['b_relative_difference'] = abs(b_state.b - b_virtual.b) / abs(b_virtual.b)
    kernels = assemble_action_kernels(spring, damping, b_virtual, tau, jsamples, metadata)
    return KernelOutcome(kernels, jsamples, ohmic, spring, b_virtual, b_state, density)


def _sweep_member(params: dict, seed: int) -> dict:
    """ One ensemble member; failures are returned as rows, never raised """
    config = RunConfig.from_dict(params, merge_defaults=False).with_seed(seed)
    row = {'seed': seed, 'ok': False, 'b': math.nan, 'b_state': math.nan, 'eta': math.nan, 'k': math.nan,
           'iterations': 0, 'error': ''}
    try:
        outcome = solve(config)
        row['iterations'] = outcome.report.iterations
        if not outcome.report.converged:
            row['error'] = f'not converged after {outcome.report.iterations} iterations'
            return row
        kernels = compute_kernels(config, outcome.model, outcome.pair, outcome.spectrum)
    except (VIFError, np.linalg.LinAlgError, ValueError, ArithmeticError) as exc:
        row['error'] = f'{type(exc).__name__}: {exc}'
        return row
    row.update({'ok': True, 'b': kernels.b_virtual.b, 'eta': kernels.ohmic.eta, 'k': kernels.spring.k,
                'b_state': math.nan if kernels.b_state is None else kernels.b_state.b,
                'kernels': kernels.kernels})
    return row


def ensemble_statistics(values) -> dict:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return {'mean': math.nan, 'stdev': math.nan, 'min': math.nan, 'max': math.nan, 'relative_spread': math.nan}
    mean = float(np.mean(values))
    stdev = float(np.std(values))
    if stdev == 0:
        spread = 0.0
    else:
        spread = stdev / abs(mean) if mean != 0 else math.inf
    return {'mean': mean, 'stdev': stdev, 'min': float(np.min(values)), 'max': float(np.max(values)),
            'relative_spread': spread}


class RunManager:
    """
    Class that oversees a run: solves the vortex, extracts the kernels, integrates the dynamics and sweeps
    disorder ensembles. Every stage reads its inputs from the files earlier stages wrote under `out_dir` and
    ends by refreshing the run manifest.
    """

    def __init__(self, config: RunConfig, out_dir=None, threads: Optional[int] = None):
        self.config = config
        self.out_dir = Path(out_dir if out_dir is not None else config.outputs.directory)
        self.threads = int(threads if threads is not None else config.outputs.threads)
        if self.threads < 1:
            raise ConfigurationError('threads', f'{self.threads} must be >= 1')
        self.stage_info = {}
        self.seeds = []

    @classmethod
    def from_spec_file(cls, spec_file, out_dir=None, threads: Optional[int] = None,
                       seed_override: Optional[int] = None):
        """ Run for a spec file; `threads` defaults to outputs.threads of the config """
        config = RunConfig.from_yaml(spec_file)
        if seed_override is not None:
            if config.disorder.seeds is not None:
                raise ConfigurationError('disorder.seeds',
                                         'an explicit seed list cannot be combined with a seed override')
            config.disorder.seed = seed_override
            config.validate()
        return cls(config, out_dir, threads)

    def run_flow(self, stage: str):
        """ Runs one stage by name and refreshes the manifest, also when the stage fails """
        flows = {'solve': self.run_solve, 'kernels': self.run_kernels,
                 'dynamics': self.run_dynamics, 'sweep': self.run_sweep}
        if stage not in flows:
            raise ValueError(f'{stage} is not a valid stage, choose from {list(flows)}')
        start = time.perf_counter()
        try:
            return flows[stage]()
        finally:
            self.stage_info.setdefault(stage, {})['wall_time'] = time.perf_counter() - start
            self.write_manifest()

    """
    STAGES
    """

    def run_solve(self) -> SolveOutcome:
        logger.info('Running solve stage')
        outcome = solve(self.config)
        self.seeds = [self.config.disorder.seed]
        self._write_config()
        model, pair, spectrum, report = outcome.model, outcome.pair, outcome.spectrum, outcome.report
        stage = self.out_dir / 'solve'
        write_table(stage / 'gap_profile.csv', pair.export_fields(),
                    units={'x': 'a', 'y': 'a', 'delta_re': 't', 'delta_im': 't', 'delta_abs': 't'})
        write_table(stage / 'eigenvalues.csv',
                    {'index': np.arange(len(spectrum)), 'energy': spectrum.energies,
                     'occupation': spectrum.occupations},
                    units={'energy': 't'})
        summary = report.to_dict()
        summary.update({
            'q': pair.winding,
            'center': list(pair.center),
            'bulk_gap': pair.bulk_gap,
            'xi': pair.coherence_length,
            'disorder_seed': model.disorder.seed,
            'max_gap': float(np.max(np.abs(pair.delta))),
            'mean_density': mean_density(spectrum, model.area),
            'subgap_energies': subgap_states(spectrum, float(np.max(np.abs(pair.delta)))).tolist(),
            'particle_hole_ok': check_particle_hole(spectrum),
            'rotation_error': rotation_error(pair),
        })
        loop = default_loop(pair) if pair.winding and not pair.degenerate else None
        summary['winding'] = winding_number(pair, loop) if loop is not None else None
        if self.config.pairing.g > 0:
            summary['thermodynamic_potential'] = thermodynamic_potential(model, pair, spectrum, self.config.pairing.g,
                                                                         self.config.pairing.cutoff)
        write_json(stage / 'self_consistency.json', summary)
        self.stage_info['solve'] = {'converged': report.converged, 'iterations': report.iterations}
        logger.info(f'Solve stage done: converged={report.converged}')
        return outcome

    def load_solution(self) -> SolveOutcome:
        """ Rebuilds the converged field of the solve stage and re-diagonalizes it """
        artifacts = StageArtifacts(self.out_dir, 'solve')
        profile = artifacts.table('gap_profile.csv')
        summary = artifacts.scalars('self_consistency.json')
        model = build_model(self.config)
        if profile['delta_re'].size != model.n_sites:
            raise StageError(f'solve/gap_profile.csv has {profile["delta_re"].size} sites, '
                             f'the configured lattice has {model.n_sites}; rerun the solve stage')
        delta = profile['delta_re'] + 1j * profile['delta_im']
        pair = PairField(model, delta, summary['center'], int(summary['q']), summary['bulk_gap'], summary['xi'])
        spectrum = occupations(diagonalize(assemble_bdg(model, pair)), self.config.temperature.beta)
        report = SelfConsistencyReport(summary['coupling_g'], summary['cutoff'], summary['tolerance'],
                                       summary['mixing'])
        report.residual_history = list(summary['residual_history'])
        return SolveOutcome(model, pair, spectrum, report)

    def run_kernels(self) -> KernelOutcome:
        logger.info('Running kernels stage')
        solution = self.load_solution()
        self.seeds = [self.config.disorder.seed]
        self._write_config()
        outcome = compute_kernels(self.config, solution.model, solution.pair, solution.spectrum)
        outcome.kernels.to_directory(self.out_dir / 'kernels')
        self.stage_info['kernels'] = {'b_virtual': outcome.b_virtual.b,
                                      'b_state': None if outcome.b_state is None else outcome.b_state.b}
        logger.info(f'Kernels stage done: B={outcome.b_virtual.b:.6g}, K={outcome.spring.k:.6g}, '
                    f'eta={outcome.ohmic.eta:.6g}')
        return outcome

    def equation_of_motion(self) -> EquationOfMotion:
        dyn = self.config.dynamics
        drive = Drive(dyn.drive.kind, dyn.drive.amplitude, dyn.drive.frequency)
        if dyn.coefficients_given:
            b, k, eta = dyn.b, dyn.k_spring, dyn.eta
        else:
            scalars = StageArtifacts(self.out_dir, 'kernels').scalars('scalars.json')
            b = dyn.b if dyn.b is not None else float(scalars['b_transverse'])
            k = dyn.k_spring if dyn.k_spring is not None else float(scalars['k_spring'])
            eta = dyn.eta if dyn.eta is not None else float(scalars['metadata']['ohmic']['eta'])
        if dyn.memory:
            spectral = StageArtifacts(self.out_dir, 'kernels').table('spectral_function.csv')
            scalars = StageArtifacts(self.out_dir, 'kernels').scalars('scalars.json')
            jsamples = JSamples(spectral['omega'], spectral['J'], scalars['metadata']['eta_b'])
            dt, t_final = self._time_grid(EquationOfMotion(b, k, eta, drive=drive))
            return EquationOfMotion.with_memory(b, k, jsamples, dt, int(round(t_final / dt)), drive)
        return EquationOfMotion(b, k, eta, drive=drive, mass=dyn.mass)

    def _time_grid(self, eom: EquationOfMotion):
        """ Configured dt and t_final, or 1% of the dynamical time and ten rotations (decay times) """
        dyn = self.config.dynamics
        scale = eom.timescale()
        if scale is None and (dyn.dt is None or dyn.t_final is None):
            raise ConfigurationError('dynamics.dt', 'dt and t_final are required when the spring constant is 0')
        dt = dyn.dt if dyn.dt is not None else 0.01 * scale
        if dyn.t_final is not None:
            return dt, dyn.t_final
        if eom.b != 0:
            rotation = abs(eom.k_spring * eom.b) / (eom.b ** 2 + eom.eta ** 2)
            return dt, 10 * 2 * math.pi / rotation
        return dt, 10 * scale

    def run_dynamics(self):
        logger.info('Running dynamics stage')
        self._write_config()
        eom = self.equation_of_motion()
        dt, t_final = self._time_grid(eom)
        record = integrate(eom, self.config.dynamics.x_init, t_final, dt)
        stage = self.out_dir / 'dynamics'
        write_table(stage / 'trajectory.csv',
                    {'t': record.times, 'x': record.positions[:, 0], 'y': record.positions[:, 1],
                     'vx': record.velocities[:, 0], 'vy': record.velocities[:, 1]},
                    units={'t': 'hbar/t', 'x': 'a', 'y': 'a', 'vx': 'a t/hbar', 'vy': 'a t/hbar'})
        denom = eom.b ** 2 + eom.eta ** 2
        summary = {
            'b': eom.b, 'k_spring': eom.k_spring, 'eta': eom.eta, 'dt': dt, 't_final': t_final,
            'scheme': record.metadata['scheme'], 'memory': eom.memory is not None,
            'hall_angle': hall_angle(eom) if denom > 0 else None,
            'predicted_orbit_frequency': -eom.k_spring * eom.b / denom if denom > 0 else None,
            'predicted_decay_rate': eom.k_spring * eom.eta / denom if denom > 0 else None,
            'steady_velocity': record.steady_velocity().tolist(),
            'energy_monotone': record.metadata.get('energy_monotone'),
            'energy_drift': record.metadata.get('energy_drift'),
        }
        if np.all(record.radius() > 0):
            summary['orbit_frequency'] = record.orbit_frequency()
            summary['decay_rate'] = record.decay_rate()
            if summary['orbit_frequency'] != 0:
                summary['period'] = 2 * math.pi / abs(summary['orbit_frequency'])
        write_json(stage / 'summary.json', summary)
        self.stage_info['dynamics'] = {'scheme': record.metadata['scheme'], 'steps': record.times.size - 1}
        logger.info(f'Dynamics stage done: {record.times.size - 1} steps of {dt:.4g}')
        return record

    def run_sweep(self) -> dict:
        logger.info('Running sweep stage')
        seeds = self.config.disorder.ensemble_seeds()
        if len(seeds) < 2:
            raise ConfigurationError('disorder.ensemble_size', 'a sweep needs at least 2 ensemble members')
        self.seeds = list(seeds)
        self._write_config()
        params = self.config.to_dict()
        if self.threads > 1:
            with ProcessPoolExecutor(max_workers=self.threads) as pool:
                rows = list(pool.map(_sweep_member, [params] * len(seeds), seeds))
        else:
            rows = [_sweep_member(params, seed) for seed in seeds]
        # keyed by seed, so the pool's completion order never matters
        rows = sorted(rows, key=lambda r: seeds.index(r['seed']))

        stage = self.out_dir / 'sweep'
        for row in rows:
            if row['ok']:
                row.pop('kernels').to_directory(stage / f'seed_{row["seed"]}')
            else:
                logger.warning(f'seed {row["seed"]} failed: {row["error"]}')
        write_table(stage / 'ensemble.csv',
                    {name: [float(r[name]) for r in rows] for name in ('seed', 'ok', 'b', 'b_state', 'eta', 'k',
                                                                       'iterations')})
        good = [r for r in rows if r['ok']]
        b_stats = ensemble_statistics([r['b'] for r in good])
        eta_stats = ensemble_statistics([r['eta'] for r in good])
        summary = {
            'members': len(rows),
            'failed': len(rows) - len(good),
            'failures': {str(r['seed']): r['error'] for r in rows if not r['ok']},
            'b': b_stats,
            'eta': eta_stats,
            'k': ensemble_statistics([r['k'] for r in good]),
            'b_spread_below_eta_spread': bool(b_stats['relative_spread'] < eta_stats['relative_spread']),
            'decoupling': ('confirmed' if b_stats['relative_spread'] < B_SPREAD_LIMIT and
                           eta_stats['relative_spread'] > ETA_SPREAD_FLOOR else 'violated'),
        }
        write_json(stage / 'summary.json', summary)
        self.stage_info['sweep'] = {'members': len(rows), 'failed': summary['failed']}
        if len(rows) - len(good) > FAILURE_LIMIT * len(rows):
            raise ConvergenceError(f'{len(rows) - len(good)} of {len(rows)} ensemble members failed',
                                   diagnostics=summary['failures'])
        logger.info(f'Sweep done: B spread {b_stats["relative_spread"]:.3g}, '
                    f'eta spread {eta_stats["relative_spread"]:.3g}, decoupling {summary["decoupling"]}')
        return summary

    """
    BOOKKEEPING
    """

    def _write_config(self):
        self.config.write(self.out_dir / CONFIG_FILE)

    def write_manifest(self) -> dict:
        """
        Inventories every file under out_dir with its SHA-256; stage information and seeds of earlier
        stages in the same directory are kept
        """
        path = self.out_dir / MANIFEST
        previous = read_json(path) if path.is_file() else {}
        stages = previous.get('stages', {})
        stages.update(self.stage_info)
        seeds = sorted(set(previous.get('seeds', [])) | set(self.seeds))
        files = []
        if self.out_dir.is_dir():
            for item in sorted(p for p in self.out_dir.rglob('*') if p.is_file() and p.name != MANIFEST):
                files.append({'path': item.relative_to(self.out_dir).as_posix(),
                              'sha256': file_checksum(item),
                              'bytes': item.stat().st_size})
        manifest = {'config_hash': self.config.config_hash(), 'code_version': __version__,
                    'stages': stages, 'seeds': seeds, 'files': files}
        write_json(path, manifest)
        return manifest
