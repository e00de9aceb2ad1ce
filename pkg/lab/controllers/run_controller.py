import itertools
import json
import logging
import math
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from pydantic import ValidationError

from controllers.dichotomy_controller import check_flow_invariance, classify, trapping_profile
from controllers.evolution_controller import detect_blowup, evolve
from controllers.functionals_controller import functional_values
from controllers.grid_controller import RadialField, RadialGrid, field_from_snapshot
from controllers.ground_state_controller import compute_ground_state, survey_minimizers
from controllers.inequality_controller import compact_embedding_split, counterexample_report, run_inequality_suite
from controllers.params_controller import derived_exponents, validate_regime
from controllers.virial_controller import (
    blowup_functional_bound,
    build_cutoff,
    certify_cutoff,
    pure_virial,
    verify_virial,
)
from models.manifest_model import RunConfig, RunManifest
from models.params_model import Theorem
from utils.config import SWEEP_CAP, WORKERS, output_dir, read_config_file
from utils.errors import ConfigError, LabError
from utils.storage import atomic_write_text, read_snapshot, write_csv, write_snapshot

logger = logging.getLogger(__name__)

COMMANDS = ("groundstate", "evolve", "classify", "virial", "verify-inequalities", "counterexample", "sweep")

# theorem whose window a sweep point must satisfy before it is run
SWEEP_THEOREMS = {
    "groundstate": Theorem.GN,
    "evolve": Theorem.GN,
    "classify": Theorem.DICHOTOMY_GLOBAL,
    "virial": Theorem.GN,
    "verify-inequalities": Theorem.GN,
}


def build_config(overrides: dict | None = None, config_path: str | Path | None = None) -> RunConfig:
    """File values first, then flags; flags win. Validation errors name the key."""
    values = {}
    if config_path is not None:
        if not Path(config_path).exists():
            raise ConfigError(f"config file not found: {config_path}")
        values.update(read_config_file(config_path))
    values.update({key: value for key, value in (overrides or {}).items() if value is not None})
    try:
        return RunConfig.model_validate(values)
    except ValidationError as exc:
        error = exc.errors()[0]
        key = ".".join(str(part) for part in error["loc"]) or "config"
        raise ConfigError(f"invalid value for {key!r}: {error['msg']}", payload={"key": key})


def parse_range(text: str, key: str) -> list[float]:
    """'a:step:b' inclusive of b, or a single value"""
    parts = text.split(":")
    try:
        numbers = [float(part) for part in parts]
    except ValueError:
        raise ConfigError(f"invalid range for {key!r}: {text!r}", payload={"key": key})
    if len(numbers) == 1:
        return numbers
    if len(numbers) != 3 or numbers[1] <= 0 or numbers[2] < numbers[0]:
        raise ConfigError(f"range for {key!r} must be 'start:step:stop' with step > 0, got {text!r}", payload={"key": key})
    start, step, stop = numbers
    count = int(math.floor((stop - start) / step + 1e-9))
    return [start + i * step for i in range(count + 1)]


def parse_list(text: str, key: str) -> list[float]:
    """Comma separated numbers"""
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"invalid list for {key!r}: {text!r}", payload={"key": key})


def _grid(config: RunConfig) -> RadialGrid:
    return RadialGrid(config.N, config.r_max, config.m)


def build_initial(config: RunConfig, grid: RadialGrid, gs=None) -> tuple[RadialField, object]:
    """
    Initial datum from the `init` key. Returns the field and the ground state
    (computed here when scaled-zeta asks for it).
    """
    kind, _, rest = config.init.partition(":")
    args = rest.split(":") if rest else []
    try:
        if kind == "gaussian":
            amplitude, width = (float(args[0]), float(args[1])) if args else (1.0, 1.0)
            return RadialField.from_function(grid, lambda r: amplitude * np.exp(-((r / width) ** 2))), gs
        if kind == "scaled-zeta":
            factor = float(args[0])
            gs = gs or compute_ground_state(config.params, grid, settings=config.solver)
            return gs.zeta * factor, gs
    except (IndexError, ValueError):
        raise ConfigError(f"invalid value for 'init': {config.init!r}", payload={"key": "init"})
    if kind == "snapshot":
        field = field_from_snapshot(read_snapshot(rest))
        if field.grid.N != config.N:
            raise ConfigError(f"snapshot has N={field.grid.N}, config says N={config.N}", payload={"key": "init"})
        return field, gs
    raise ConfigError(
        f"invalid value for 'init': {config.init!r} (gaussian, gaussian:A:w, scaled-zeta:λ, snapshot:path)",
        payload={"key": "init"},
    )


def _dump(model, **kwargs) -> dict:
    """JSON-ready dict; infinities become strings so manifests parse back to themselves"""
    return json.loads(model.model_dump_json(**kwargs))


def _run_dir(command: str, config: RunConfig) -> Path:
    return output_dir(config.output_dir) / f"{command}-N{config.N}-b{config.b:g}-q{config.q:g}"


def _series_frame(traj) -> pd.DataFrame:
    return pd.DataFrame({
        "t": traj.times,
        "mass": traj.mass_series,
        "energy": traj.energy_series,
        "kinetic": traj.kinetic_series,
    })


def _groundstate(config: RunConfig, out: Path):
    grid = _grid(config)
    params = config.params
    outputs, files = {}, {}
    if config.survey_widths:
        widths = parse_list(config.survey_widths, "survey_widths")
        states = survey_minimizers(params, grid, widths, config.solver)
        gs = states[0]
        outputs["distinct_minimizers"] = len(states)
        outputs["survey_c_opt"] = [state.c_opt for state in states]
    else:
        gs = compute_ground_state(params, grid, settings=config.solver)
    outputs["ground_state"] = _dump(gs)
    files["zeta"] = str(write_snapshot(out / "zeta.txt", gs.zeta, params))
    files["phi"] = str(write_snapshot(out / "phi.txt", gs.phi, params))
    history = pd.DataFrame({"iteration": np.arange(1, len(gs.weinstein_history) + 1), "weinstein": gs.weinstein_history})
    files["weinstein_history"] = str(write_csv(out / "weinstein_history.csv", history))
    return outputs, files


def _evolve(config: RunConfig, out: Path):
    grid = _grid(config)
    v0, _ = build_initial(config, grid)
    settings = config.evolution
    traj = evolve(v0, settings, config.params)
    blowup = detect_blowup(traj, settings)
    outputs = {
        "initial": _dump(functional_values(v0, config.params)),
        "trajectory": _dump(traj, exclude={"times", "mass_series", "energy_series", "kinetic_series"}),
        "mass_drift": traj.mass_drift,
        "energy_drift": traj.energy_drift,
        "blowup": _dump(blowup),
    }
    files = {
        "series": str(write_csv(out / "series.csv", _series_frame(traj))),
        "final": str(write_snapshot(out / "final.txt", traj.snapshots[-1], config.params, traj.times[-1])),
    }
    return outputs, files


def _classify(config: RunConfig, out: Path):
    grid = _grid(config)
    params = config.params
    gs = compute_ground_state(params, grid, settings=config.solver)
    v0, gs = build_initial(config, grid, gs)
    report = classify(v0, gs, params, rtol=config.classify_rtol)
    return {
        "ground_state": _dump(gs),
        "classification": _dump(report),
        "trapping": _dump(trapping_profile(v0, gs, params)),
    }, {}


def _virial(config: RunConfig, out: Path):
    grid = _grid(config)
    params = config.params
    v0, gs = build_initial(config, grid)
    chi = build_cutoff(config.cutoff_r, grid) if config.cutoff_r else pure_virial(grid)
    traj = evolve(v0, config.evolution, params)
    report = verify_virial(traj, chi, params)
    bound = blowup_functional_bound(traj, chi)
    outputs = {
        "virial": _dump(report, exclude={"times", "morawetz", "dmdt_fd", "rhs", "mismatch"}),
        "cutoff": _dump(certify_cutoff(chi)),
        "bound": _dump(bound),
        "terminated": traj.terminated.value,
    }
    if gs is not None:
        outputs["flow_invariance"] = _dump(check_flow_invariance(traj, gs, params))
    frame = pd.DataFrame({
        "t": report.times,
        "M_R": report.morawetz,
        "dMdt_fd": report.dmdt_fd,
        "rhs": report.rhs,
        "mismatch": report.mismatch,
    })
    return outputs, {"virial": str(write_csv(out / "virial.csv", frame))}


def _verify_inequalities(config: RunConfig, out: Path):
    grid = _grid(config)
    params = config.params
    gs = compute_ground_state(params, grid, settings=config.solver)
    report, frame = run_inequality_suite(params, gs, config.n_samples, config.seed)
    outputs = {"inequalities": _dump(report)}
    files = {"samples": str(write_csv(out / "samples.csv", frame))}
    if validate_regime(params, Theorem.COMPACT_EMBEDDING).passed:
        outputs["compact_embedding"] = _dump(compact_embedding_split(params))
    return outputs, files


def _counterexample(config: RunConfig, out: Path):
    n_values = parse_list(config.bump_n, "bump_n")
    report = counterexample_report(config.params, n_values)
    frame = pd.DataFrame({"n": report.n_values, "quotient": report.quotients})
    return {"counterexample": _dump(report)}, {"quotients": str(write_csv(out / "quotients.csv", frame))}


HANDLERS = {
    "groundstate": _groundstate,
    "evolve": _evolve,
    "classify": _classify,
    "virial": _virial,
    "verify-inequalities": _verify_inequalities,
    "counterexample": _counterexample,
}


def _sweep_point(command: str, config: RunConfig, point: dict) -> dict:
    """One isolated sweep point; failures become rows, never exceptions"""
    row = {"N": point["N"], "b": point["b"], "q": point["q"], "status": "ok", "reason": ""}
    try:
        point_config = RunConfig.model_validate({**config.model_dump(), **point})
        params = point_config.params
    except ValidationError as exc:
        row.update(status="skipped", reason=str(exc.errors()[0]["msg"]))
        return row
    ex = derived_exponents(params)
    row.update(D=ex.D, E=ex.E, s_c=ex.s_c, C_opt=math.nan)
    theorem = SWEEP_THEOREMS.get(command)
    if theorem is not None:
        regime = validate_regime(params, theorem)
        if not regime.passed:
            row.update(status="skipped", reason=regime.summary())
            return row
    try:
        manifest = run(command, point_config)
        gs = manifest.outputs.get("ground_state")
        if gs:
            row["C_opt"] = gs["c_opt"]
    except LabError as exc:
        row.update(status="failed", reason=exc.detail)
    except (ArithmeticError, ValueError, np.linalg.LinAlgError, RuntimeError) as exc:
        # solver breakdowns outside the lab's own checks still only cost this point
        logger.warning(f"sweep point {point}: {type(exc).__name__}: {exc}")
        row.update(status="failed", reason=f"{type(exc).__name__}: {exc}")
    return row


def _sweep(config: RunConfig, out: Path):
    command = config.sweep_command
    if command not in HANDLERS:
        raise ConfigError(f"invalid value for 'sweep_command': {command!r}", payload={"key": "sweep_command"})
    axes = {
        "N": [int(n) for n in parse_range(config.sweep_n, "sweep_n")] if config.sweep_n else [config.N],
        "b": parse_range(config.sweep_b, "sweep_b") if config.sweep_b else [config.b],
        "q": parse_range(config.sweep_q, "sweep_q") if config.sweep_q else [config.q],
    }
    points = [dict(zip(axes, combo)) for combo in itertools.product(*axes.values())]
    if len(points) > SWEEP_CAP:
        raise ConfigError(f"sweep has {len(points)} points, cap is {SWEEP_CAP} (LAB_SWEEP_CAP)", payload={"key": "sweep"})
    workers = config.workers if config.workers is not None else WORKERS
    base = config.model_copy(update={"output_dir": str(out)})
    logger.info(f"sweep: {len(points)} points of {command} on {workers} workers")
    rows = Parallel(n_jobs=workers)(delayed(_sweep_point)(command, base, point) for point in points)
    frame = pd.DataFrame(rows, columns=["N", "b", "q", "status", "reason", "C_opt", "D", "E", "s_c"])
    skipped = int((frame["status"] != "ok").sum())
    return (
        {"points": len(points), "not_ok": skipped},
        {"summary": str(write_csv(out / "summary.csv", frame))},
    )


def run(command: str, config: RunConfig) -> RunManifest:
    """Dispatch one command, write its data files and the manifest, return the manifest"""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; choose one of {', '.join(COMMANDS)}")
    started = datetime.now(timezone.utc).isoformat()
    out = _run_dir(command, config)
    clock = time.perf_counter()
    handler = _sweep if command == "sweep" else HANDLERS[command]
    outputs, files = handler(config, out)
    elapsed = time.perf_counter() - clock

    manifest = RunManifest(
        command=command,
        config=config,
        outputs={"exponents": _dump(derived_exponents(config.params)), **outputs},
        files=files,
        timings={"wall_seconds": elapsed},
        started_at=started,
    )
    atomic_write_text(out / "manifest.json", manifest.model_dump_json(indent=2))
    logger.info(f"{command}: finished in {elapsed:.2f}s, outputs in {out}")
    return manifest
