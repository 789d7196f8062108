"""
IonGate CLI
Subcomandos run, budget, fit, sweep, validate e calibrate.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError

from .. import __version__
from ..analysis import (
    bootstrap_contrast,
    calibrate_bright_mean,
    fit_parity_contrast,
    fit_sideband_nbar,
    group_shots,
    group_single_ion,
    optimal_thresholds,
)
from ..config import Settings, load_settings
from ..errors import IonGateError, PhysicsDomainError, ScenarioError, TruncationOverflowError
from ..noise import Kerr, Readout, SpectatorDephasing, calibrate_kerr, calibrate_spectator
from ..optics import calibrate_coupling
from ..physcore import TWO_PI
from .engine import ScenarioEngine
from .output import FORMATS, RunOutput, plain, read_shots
from .scenario import Scenario, load_scenario, with_setting

logger = logging.getLogger(__name__)

# === CÓDIGOS DE SAÍDA ===
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_PHYSICS = 3
EXIT_TRUNCATION = 4


def _status(message: str):
    print(message, file=sys.stderr)


def _seed(value: str) -> int:
    seed = int(value)
    if seed < 0:
        raise argparse.ArgumentTypeError(f"seed must be a non-negative integer, got {seed}")
    return seed


# ============== Parser ==============

def build_parser(settings: Settings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iongate", description="Trapped-ion two-qubit gate simulator")
    parser.add_argument("--version", action="version", version=f"iongate {__version__}")
    parser.add_argument("--log-level", default=settings.log_level, help="logging level (stderr)")
    commands = parser.add_subparsers(dest="command", required=True)

    def scenario_command(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("--scenario", required=True, type=Path, help="scenario JSON file")
        sub.add_argument("--seed", type=_seed, default=None, help="root seed (u64), overrides the scenario")
        sub.add_argument("--out", type=Path, default=Path(settings.out_dir), help="output directory")
        sub.add_argument("--jobs", type=int, default=settings.jobs, help="worker processes for sweeps")
        sub.add_argument("--format", choices=FORMATS, default=settings.format, help="table format")
        return sub

    scenario_command("run", "run the scenario's experiment (and its sweep, if any)")
    scenario_command("budget", "compute the gate error budget of a scenario")
    scenario_command("sweep", "run a scenario that declares a sweep")

    validate = commands.add_parser("validate", help="parse a scenario and build its physics objects")
    validate.add_argument("--scenario", required=True, type=Path)

    fit = commands.add_parser("fit", help="fit a recorded shot file")
    fit.add_argument("--shots", required=True, type=Path, help="shot-record file")
    fit.add_argument("--model", choices=("parity", "sideband"), default="parity")
    fit.add_argument("--scenario", type=Path, default=None, help="scenario for thresholds, Rabi rate and eta")
    fit.add_argument("--thresholds", type=int, nargs=2, default=None, help="photon-count thresholds")
    fit.add_argument("--rabi-khz", type=float, default=None, help="carrier Rabi frequency Ω/2π for sideband fits")
    fit.add_argument("--eta", type=float, default=None, help="Lamb-Dicke factor for sideband fits")
    fit.add_argument("--fit-rabi", action="store_true", help="fit the Rabi rate together with nbar")
    fit.add_argument("--bootstrap", type=int, default=0, help="parametric bootstrap resamples for parity fits")
    fit.add_argument("--seed", type=_seed, default=0, help="bootstrap seed")
    fit.add_argument("--out", type=Path, default=None, help="also write the fit document here")

    calibrate = commands.add_parser("calibrate", help="print calibrated constants for a scenario")
    calibrate.add_argument("--scenario", required=True, type=Path)
    calibrate.add_argument("--pi-time-us", type=float, default=2.0, help="target carrier π-time")
    calibrate.add_argument("--kerr-target", type=float, default=4e-4)
    calibrate.add_argument("--spectator-target", type=float, default=3e-4)
    calibrate.add_argument("--confusion-target", type=float, default=9e-4)
    return parser


# ============== Comandos ==============

def _prepared(args) -> Scenario:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = with_setting(scenario, "seed", args.seed)
    if args.jobs < 1:
        raise ScenarioError(f"--jobs must be >= 1, got {args.jobs}")
    return scenario


def _execute(scenario: Scenario, args) -> RunOutput:
    engine = ScenarioEngine(scenario)
    label = engine.get_experiment_types()[scenario.experiment.kind]["label"]
    _status(f"🚀 {label}: {scenario.name}")
    points = engine.run(jobs=args.jobs)
    output = RunOutput.from_points(scenario, points)
    for path in output.write(args.out, args.format):
        _status(f"✅ wrote {path}")
    return output


def cmd_run(args) -> int:
    _execute(_prepared(args), args)
    return EXIT_OK


def cmd_sweep(args) -> int:
    scenario = _prepared(args)
    if scenario.sweep is None:
        raise ScenarioError(f"scenario {scenario.name!r} declares no sweep")
    _execute(scenario, args)
    return EXIT_OK


def cmd_budget(args) -> int:
    scenario = _prepared(args)
    if scenario.experiment.kind != "budget":
        scenario = with_setting(scenario, "experiment.kind", "budget")
    output = _execute(scenario, args)
    table = pd.DataFrame.from_records(output.records)
    print(table.to_string(index=False, float_format=lambda v: f"{v:.3e}"))
    return EXIT_OK


def cmd_validate(args) -> int:
    scenario = load_scenario(args.scenario)
    modes = scenario.build_modes()
    drive = scenario.build_drive()
    channels = scenario.build_channels()
    _status(
        f"✅ {scenario.name}: {len(modes)} mode(s), gate time {drive.total_duration * 1e6:.3f} us, "
        f"{len(channels)} noise channel(s)"
    )
    return EXIT_OK


def _sideband_rows(shots) -> np.ndarray:
    values, counts = group_single_ion(shots)
    totals = counts.sum(axis=1)
    p_up = counts[:, 1] / totals
    stderr = np.sqrt(p_up * (1 - p_up) / totals)
    # sweep_value em μs
    return np.column_stack([values * 1e-6, p_up, stderr])


def cmd_fit(args) -> int:
    shots = read_shots(args.shots)
    scenario = load_scenario(args.scenario) if args.scenario else None

    if args.model == "parity":
        thresholds = tuple(args.thresholds) if args.thresholds else None
        if thresholds is None and scenario is not None:
            readout = next((c for c in scenario.build_channels() if isinstance(c, Readout)), None)
            if readout is not None:
                thresholds = readout.thresholds or optimal_thresholds(readout.poisson_means)
        result = fit_parity_contrast(shots=shots, thresholds=thresholds)
        document = {"fit": result.to_dict()}
        if args.bootstrap > 0:
            phases, counts = group_shots(shots, thresholds)
            rng = np.random.default_rng(args.seed)
            document["bootstrap"] = bootstrap_contrast(phases, counts, rng, args.bootstrap)
    else:
        rabi = TWO_PI * args.rabi_khz * 1e3 if args.rabi_khz is not None else None
        eta = args.eta
        if scenario is not None:
            mode = scenario.mode(scenario.experiment.flop_mode or scenario.drive.gate_mode)
            rabi = rabi if rabi is not None else scenario.carrier_rabi()
            eta = eta if eta is not None else mode.eta_magnitude
        if rabi is None or eta is None:
            raise ScenarioError("sideband fits need --rabi-khz and --eta, or a --scenario")
        result = fit_sideband_nbar(_sideband_rows(shots), rabi, eta, fit_rabi=args.fit_rabi)
        document = {"fit": result.to_dict()}

    text = json.dumps(plain(document), indent=2, sort_keys=True)
    print(text)
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        path = args.out / f"{args.shots.stem}_fit.json"
        path.write_text(text + "\n", encoding="utf-8")
        _status(f"✅ wrote {path}")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    scenario = load_scenario(args.scenario)
    beam = scenario.beam
    position = beam.ion_position_um if beam.ion_position_um is not None else beam.center_um
    values = {
        "beam": {
            "coupling_rad_s_per_sqrt_w_m2": calibrate_coupling(
                args.pi_time_us * 1e-6, beam.input_power_mw * 1e-3, beam.ledger(), beam.profile(),
                tuple(p * 1e-6 for p in position),
            ),
            "target_pi_time_us": args.pi_time_us,
        }
    }

    channels = scenario.build_channels()
    kerr = next((c for c in channels if isinstance(c, Kerr)), None)
    spectator = next((c for c in channels if isinstance(c, SpectatorDephasing)), None)
    readout = next((c for c in channels if isinstance(c, Readout)), None)
    if kerr is not None or spectator is not None:
        gate = scenario.build_drive()
        mode = scenario.mode(scenario.drive.gate_mode)
        if kerr is not None:
            calibrated = calibrate_kerr(kerr, gate, mode, args.kerr_target)
            values["kerr"] = {
                "chi_per_phonon_hz": [c / TWO_PI for c in calibrated.chi_per_phonon],
                "spectator_nbars": list(calibrated.spectator_nbars),
                "target": args.kerr_target,
            }
        if spectator is not None:
            calibrated = calibrate_spectator(spectator, gate, mode, args.spectator_target)
            values["spectator_dephasing"] = {
                "etas": list(calibrated.etas),
                "nbars": list(calibrated.nbars),
                "target": args.spectator_target,
            }
    if readout is not None:
        values["readout"] = calibrate_bright_mean(readout.poisson_means[0], args.confusion_target)

    print(json.dumps(plain(values), indent=2, sort_keys=True))
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "budget": cmd_budget,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
    "fit": cmd_fit,
    "calibrate": cmd_calibrate,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Ponto de entrada; devolve o código de saída"""
    settings = load_settings()
    args = build_parser(settings).parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        return COMMANDS[args.command](args)
    except (ScenarioError, ValidationError) as e:
        _status(f"❌ invalid scenario: {e}")
        return EXIT_USAGE
    except TruncationOverflowError as e:
        _status(f"❌ truncation overflow: {e}")
        return EXIT_TRUNCATION
    except PhysicsDomainError as e:
        _status(f"❌ physics validation: {e}")
        return EXIT_PHYSICS
    except IonGateError as e:
        _status(f"❌ {type(e).__name__}: {e}")
        return EXIT_FAILURE
    except Exception as e:
        logger.exception("unexpected failure")
        _status(f"❌ {type(e).__name__}: {e}")
        return EXIT_FAILURE
