"""
Scenario Engine
Motor de execução de cenários: um handler por tipo de experimento.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..analysis import (
    OUTCOMES,
    SINGLE_ION_OUTCOMES,
    ShotRecord,
    bell_fidelity,
    classify_counts,
    fit_parity_contrast,
    fit_ramsey,
    optimal_thresholds,
    ramsey_contrast_model,
)
from ..analysis.parity import BRIGHT_TO_OUTCOME
from ..dynamics import (
    bell_mixture,
    carrier_flop,
    cooling_schedule,
    excitation_populations,
    ms_evolve,
    parity_scan_probabilities,
    sideband_cool,
    sideband_flop,
)
from ..noise import (
    BudgetConfig,
    Heating,
    LaserGaussianDecay,
    LaserSinusoid,
    Readout,
    total_budget,
)
from ..noise.channels import QUASI_STATIC
from ..physcore import fock_cutoff, thermal_distribution
from .sampling import ShotSample, point_rng, projection_stderr
from .scenario import Scenario, with_setting

logger = logging.getLogger(__name__)


@dataclass
class PointResult:
    """Saída de um ponto da varredura"""
    index: int
    sweep_value: Optional[float]
    records: List[dict] = field(default_factory=list)
    shots: List[ShotRecord] = field(default_factory=list)
    document: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "sweep_value": self.sweep_value,
            "records": self.records,
            "shots": [s.to_dict() for s in self.shots],
            "document": self.document,
        }


def _draw_shots(probabilities, n_shots: int, rng: np.random.Generator) -> np.ndarray:
    """Resultados individuais; índice = número de íons em ↑"""
    p = np.clip(np.asarray(probabilities, dtype=float), 0.0, None)
    return rng.choice(p.size, size=n_shots, p=p / p.sum())


def _summary(shots: List[ShotRecord], names) -> ShotSample:
    """Contagens por resultado registrado (classificado, se houver leitura)"""
    counts = np.array([sum(s.outcome == name for s in shots) for name in names])
    frequencies = counts / len(shots)
    return ShotSample(counts, frequencies, projection_stderr(frequencies, len(shots)), len(shots))


def _sampled_row(columns, probabilities, sample: ShotSample) -> dict:
    row = {}
    for name, p, f, se in zip(columns, probabilities, sample.frequencies, sample.stderr):
        row[name] = float(p)
        row[f"{name}_measured"] = float(f)
        row[f"{name}_stderr"] = float(se)
    return row


class ScenarioEngine:
    """
    Motor de execução de cenários.

    Tipos de experimento suportados:
    - carrier_flop: flop de portadora com Debye-Waller dos modos
    - sideband_flop: flop de banda lateral (um ou dois íons)
    - ms_gate: trajetória do portão MS
    - parity_scan: varredura de fase de análise com ajuste de contraste
    - ramsey: contraste de Ramsey com ruído de laser
    - sideband_cool: resfriamento pulsado por banda vermelha
    - budget: orçamento de erros do portão
    """

    EXPERIMENT_TYPES = {
        "carrier_flop": {"label": "Carrier flopping", "shots": True, "document": False},
        "sideband_flop": {"label": "Sideband flopping", "shots": True, "document": False},
        "ms_gate": {"label": "MS gate trajectory", "shots": True, "document": True},
        "parity_scan": {"label": "Parity scan", "shots": True, "document": True},
        "ramsey": {"label": "Ramsey contrast", "shots": True, "document": True},
        "sideband_cool": {"label": "Sideband cooling", "shots": False, "document": True},
        "budget": {"label": "Error budget", "shots": False, "document": True},
    }

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.execution_logs: List[dict] = []

    # ----- varredura -----

    def sweep_points(self) -> List[Tuple[int, Optional[float], Scenario]]:
        """(índice, valor, cenário) para cada ponto; um ponto sem varredura"""
        sweep = self.scenario.sweep
        if sweep is None:
            return [(0, None, self.scenario)]
        return [
            (index, float(value), with_setting(self.scenario, sweep.variable, value))
            for index, value in enumerate(sweep.values)
        ]

    def run(self, jobs: int = 1) -> List[PointResult]:
        """
        Executa todos os pontos.

        Os resultados saem na ordem do índice da varredura; cada ponto usa
        seu próprio fluxo aleatório, então o número de processos não altera a saída.
        """
        points = self.sweep_points()
        logger.info(
            "running %s (%s) over %d point(s) with %d job(s)",
            self.scenario.name, self.scenario.experiment.kind, len(points), jobs,
        )
        if jobs > 1 and len(points) > 1:
            payloads = [(s.model_dump_json(), i, v) for i, v, s in points]
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = [pool.submit(_run_point_job, *p) for p in payloads]
                results = []
                for (index, value, _), future in zip(points, futures):
                    started = datetime.now()
                    try:
                        results.append(future.result())
                        self._log(index, value, started, None)
                    except Exception as e:
                        self._log(index, value, started, e)
                        raise
            return results
        return [self.run_point(scenario, index, value) for index, value, scenario in points]

    def run_point(self, scenario: Scenario, index: int = 0, sweep_value: Optional[float] = None) -> PointResult:
        """Executa um ponto e registra o resultado em execution_logs"""
        started = datetime.now()
        try:
            result = self._execute_experiment(scenario, index, sweep_value)
        except Exception as e:
            self._log(index, sweep_value, started, e)
            raise
        self._log(index, sweep_value, started, None)
        return result

    def _log(self, index: int, sweep_value, started: datetime, error: Optional[Exception]):
        entry = {
            "point_index": index,
            "sweep_value": sweep_value,
            "experiment": self.scenario.experiment.kind,
            "started_at": started.isoformat(),
            "completed_at": datetime.now().isoformat(),
            "success": error is None,
        }
        if error is not None:
            entry["error"] = str(error)
            logger.error("point %d failed: %s", index, error)
        self.execution_logs.append(entry)

    def _execute_experiment(self, scenario: Scenario, index: int, sweep_value) -> PointResult:
        """Executa o experimento de um ponto"""

        handlers = {
            "carrier_flop": self._handle_carrier_flop,
            "sideband_flop": self._handle_sideband_flop,
            "ms_gate": self._handle_ms_gate,
            "parity_scan": self._handle_parity_scan,
            "ramsey": self._handle_ramsey,
            "sideband_cool": self._handle_sideband_cool,
            "budget": self._handle_budget,
        }

        rng = point_rng(scenario.seed, index)
        result = PointResult(index, sweep_value)
        handlers[scenario.experiment.kind](scenario, rng, result)
        if sweep_value is not None:
            for record in result.records:
                record["sweep_value"] = sweep_value
        return result

    # ----- disparos -----

    def _readout(self, scenario: Scenario) -> Optional[Readout]:
        found = [c for c in scenario.build_channels() if isinstance(c, Readout)]
        return found[0] if found else None

    def _shot_records(
        self, scenario: Scenario, outcomes: np.ndarray, value: float, rng: np.random.Generator, start: int, n_ions: int
    ) -> List[ShotRecord]:
        """Registros de disparo; com leitura Poisson, o resultado é o classificado"""
        readout = self._readout(scenario) if n_ions == 2 else None
        if readout is None:
            names = OUTCOMES if n_ions == 2 else SINGLE_ION_OUTCOMES
            return [ShotRecord(start + k, value, outcome=names[o]) for k, o in enumerate(outcomes)]
        thresholds = readout.thresholds or optimal_thresholds(readout.poisson_means)
        # íons em ↑ (escuros) → íons brilhantes
        bright = n_ions - outcomes
        photons = rng.poisson(np.asarray(readout.poisson_means)[bright])
        classified = classify_counts(photons, thresholds)
        return [
            ShotRecord(start + k, value, outcome=BRIGHT_TO_OUTCOME[int(c)], counts=int(n))
            for k, (c, n) in enumerate(zip(np.atleast_1d(classified), photons))
        ]

    def _flop_records(self, scenario, result, rng, out: PointResult, time_unit: float = 1e6):
        n_shots = scenario.shots_per_point
        names = OUTCOMES if result.n_ions == 2 else SINGLE_ION_OUTCOMES
        for t, row in zip(result.times, result.spin_populations):
            outcomes = _draw_shots(row, n_shots, rng)
            shots = self._shot_records(scenario, outcomes, float(t * time_unit), rng, len(out.shots), result.n_ions)
            record = {"time": float(t * time_unit)}
            record.update(_sampled_row(result.columns, row, _summary(shots, names)))
            out.records.append(record)
            out.shots.extend(shots)

    # ----- handlers -----

    def _handle_carrier_flop(self, scenario: Scenario, rng, out: PointResult):
        """Flop de portadora; modos com n̄ dão a média de Debye-Waller"""
        experiment = scenario.experiment
        n_ions = experiment.n_ions
        rabi = scenario.carrier_rabi() * np.asarray(scenario.drive.ion_rabi_scales[:n_ions])
        result = carrier_flop(rabi, scenario.build_modes(), experiment.times.grid(), n_ions)
        self._flop_records(scenario, result, rng, out)

    def _handle_sideband_flop(self, scenario: Scenario, rng, out: PointResult):
        """Flop de banda lateral no modo sondado"""
        experiment = scenario.experiment
        mode = scenario.mode(experiment.flop_mode or scenario.drive.gate_mode)
        dist = thermal_distribution(mode.nbar, fock_cutoff(mode.nbar))
        eta = abs(mode.eta[0]) if experiment.n_ions == 1 else mode.eta
        result = sideband_flop(
            scenario.carrier_rabi(), eta, dist, experiment.sideband, experiment.times.grid(), experiment.n_ions
        )
        self._flop_records(scenario, result, rng, out)

    def _gate_channels(self, scenario: Scenario) -> list:
        return [c for c in scenario.build_channels() if isinstance(c, QUASI_STATIC + (Heating,))]

    def _handle_ms_gate(self, scenario: Scenario, rng, out: PointResult):
        """Trajetória do portão com um sorteio dos canais quase estáticos"""
        experiment = scenario.experiment
        drive = scenario.build_drive()
        mode = scenario.mode(scenario.drive.gate_mode)
        times = experiment.times.grid() if experiment.times else np.linspace(0.0, drive.total_duration, 201)
        if not np.any(np.isclose(times, drive.total_duration, rtol=1e-12, atol=0.0)):
            times = np.sort(np.append(times, drive.total_duration))
        result = ms_evolve(
            drive, mode, channels=self._gate_channels(scenario), times=times, method=scenario.drive.method,
            include_carrier=scenario.drive.include_carrier, rng=rng,
        )
        self._flop_records(scenario, result, rng, out)
        out.document.update({
            "gate_time_us": drive.total_duration * 1e6,
            "rabi_khz": drive.rabi_rate / (2e3 * np.pi),
            "detuning_khz": drive.detuning_from(mode.angular_frequency) / (2e3 * np.pi),
            "ramp_us": drive.ramp_duration * 1e6,
            "fidelity_vs_target": result.fidelity_vs_target,
            "mixed_at_gate_time": float(result.at(drive.total_duration)[1]),
        })

    def _bell_source(self, scenario: Scenario, rng):
        """Estado de spin a analisar: mistura de Bell dada ou portão simulado"""
        experiment = scenario.experiment
        if experiment.bell_even_population is not None and experiment.bell_contrast is not None:
            return bell_mixture(experiment.bell_even_population, experiment.bell_contrast)
        drive = scenario.build_drive()
        result = ms_evolve(
            drive, scenario.mode(scenario.drive.gate_mode), channels=self._gate_channels(scenario),
            times=[0.0, drive.total_duration], method=scenario.drive.method,
            include_carrier=scenario.drive.include_carrier, rng=rng,
        )
        return result.final_state.spin_state()

    def _handle_parity_scan(self, scenario: Scenario, rng, out: PointResult):
        """Varredura da fase de análise, ajuste do contraste e fidelidade de Bell"""
        experiment = scenario.experiment
        n_shots = scenario.shots_per_point
        state = self._bell_source(scenario, rng)
        phases = np.linspace(0.0, np.pi, experiment.phase_points, endpoint=False)
        probabilities = parity_scan_probabilities(state, phases)

        for phase, row in zip(phases, probabilities):
            outcomes = _draw_shots(row, n_shots, rng)
            shots = self._shot_records(scenario, outcomes, float(phase), rng, len(out.shots), 2)
            out.shots.extend(shots)
            sample = _summary(shots, OUTCOMES)
            mixed = float(sample.frequencies[1])
            record = {"analysis_phase": float(phase)}
            record.update(_sampled_row(("p_down_down", "p_mixed", "p_up_up"), row, sample))
            record["parity"] = float(row[0] + row[2] - row[1])
            record["parity_measured"] = float(1.0 - 2.0 * mixed)
            record["parity_stderr"] = float(2.0 * projection_stderr(mixed, n_shots))
            out.records.append(record)

        # população par medida sem pulsos de análise
        population = excitation_populations(state)
        even_outcomes = _draw_shots(population, n_shots, rng)
        even_shots = self._shot_records(scenario, even_outcomes, np.nan, rng, 0, 2)
        even = float(np.mean([s.outcome != OUTCOMES[1] for s in even_shots]))

        fit = fit_parity_contrast(shots=out.shots)
        contrast = fit.params["contrast"]
        out.document.update({
            "parity_fit": fit.to_dict(),
            "even_population": even,
            "even_population_stderr": float(projection_stderr(even, n_shots)),
            "even_population_exact": float(population[0] + population[2]),
            "bell_fidelity": bell_fidelity(even, contrast),
        })
        logger.info("parity scan: contrast %.4f, even %.4f, fidelity %.4f", contrast, even, bell_fidelity(even, contrast))

    def _handle_ramsey(self, scenario: Scenario, rng, out: PointResult):
        """Contraste de Ramsey de um íon medido nas fases 0 e π"""
        experiment = scenario.experiment
        channels = scenario.build_channels()
        sinusoid = next((c for c in channels if isinstance(c, LaserSinusoid)), None)
        decay = next((c for c in channels if isinstance(c, LaserGaussianDecay)), None)
        params = {
            "excursion": sinusoid.excursion_amplitude if sinusoid else 0.0,
            "period": sinusoid.period if sinusoid else 1.0,
            "gaussian_t1e": decay.t_1e if decay else np.inf,
        }
        times = experiment.times.grid()
        contrast = ramsey_contrast_model(times, params)
        n_shots = scenario.shots_per_point
        rows = []
        for t, c in zip(times, contrast):
            plus_draw = _draw_shots([0.5 * (1 - c), 0.5 * (1 + c)], n_shots, rng)
            minus_draw = _draw_shots([0.5 * (1 + c), 0.5 * (1 - c)], n_shots, rng)
            plus_shots = self._shot_records(scenario, plus_draw, float(t * 1e6), rng, len(out.shots), 1)
            minus_shots = self._shot_records(scenario, minus_draw, float(t * 1e6), rng, 0, 1)
            out.shots.extend(plus_shots)
            plus, minus = _summary(plus_shots, SINGLE_ION_OUTCOMES), _summary(minus_shots, SINGLE_ION_OUTCOMES)
            measured = float(plus.frequencies[1] - minus.frequencies[1])
            stderr = float(np.hypot(plus.stderr[1], minus.stderr[1]))
            rows.append((t, measured, stderr))
            out.records.append({
                "time": float(t * 1e6), "contrast": float(c),
                "contrast_measured": measured, "contrast_stderr": stderr,
            })
        if sinusoid is not None and decay is not None and sinusoid.excursion_amplitude > 0:
            fit = fit_ramsey(np.array(rows), params)
            out.document["ramsey_fit"] = fit.to_dict()
        out.document["ramsey_params"] = {k: (None if np.isinf(v) else v) for k, v in params.items()}

    def _handle_sideband_cool(self, scenario: Scenario, rng, out: PointResult):
        """Resfriamento pulso a pulso; n̄ e população do fundamental após cada pulso"""
        experiment = scenario.experiment
        mode = scenario.mode(experiment.flop_mode or scenario.drive.gate_mode)
        nbar = experiment.initial_nbar if experiment.initial_nbar is not None else mode.nbar
        state = thermal_distribution(nbar, fock_cutoff(nbar))
        rabi = scenario.carrier_rabi()
        eta = mode.eta_magnitude
        schedule = cooling_schedule(rabi, eta, experiment.cooling_levels, experiment.cooling_repeats)
        out.records.append({"pulse": 0, "duration": 0.0, "nbar": state.mean, "ground_population": float(state.probabilities[0])})
        for number, pulse in enumerate(schedule, start=1):
            state = sideband_cool(state, [pulse], rabi, eta)
            out.records.append({
                "pulse": number,
                "duration": pulse["duration"] * 1e6,
                "nbar": state.mean,
                "ground_population": float(state.probabilities[0]),
            })
        out.document.update({"initial_nbar": nbar, "final_nbar": state.mean, "pulses": len(schedule)})

    def _handle_budget(self, scenario: Scenario, rng, out: PointResult):
        """Orçamento de erros na ordem da tabela"""
        experiment = scenario.experiment
        config = BudgetConfig(
            gate=scenario.build_drive(),
            mode=scenario.mode(scenario.drive.gate_mode),
            channels=scenario.build_channels(),
            quadrature_order=experiment.quadrature_order,
            joint_samples=experiment.joint_samples,
            seed=int(rng.integers(2 ** 63)),
        )
        budget = total_budget(config)
        out.records.extend(budget.to_records())
        out.document["budget"] = budget.to_dict()

    # ----- consultas -----

    def get_experiment_types(self) -> dict:
        """Retorna os tipos de experimento disponíveis"""
        return self.EXPERIMENT_TYPES

    def get_execution_logs(self, point_index: int = None) -> List[dict]:
        """Retorna logs de execução"""
        if point_index is not None:
            return [log for log in self.execution_logs if log["point_index"] == point_index]
        return self.execution_logs


def _run_point_job(scenario_json: str, index: int, sweep_value) -> PointResult:
    scenario = Scenario.model_validate_json(scenario_json)
    return ScenarioEngine(scenario).run_point(scenario, index, sweep_value)
