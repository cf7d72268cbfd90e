"""
DD command - Store a Bell state under a decoupling scheme and record its correlation
"""

import logging

import numpy as np

from src.core.core import thread_count
from src.core.errors import ConfigError, NumericalError
from src.core.output import PlotSeries, emit_plot, write_csv, write_json
from src.core.scenario import build_scenario, resolve_system_path
from src.dd.noise import NoiseSpectrum, monte_carlo_decay
from src.dd.storage import BLOCK_UNIT_S, block_sequence, optimal_order, storage_experiment
from src.dd.timing import SCHEMES
from src.hamiltonian.system import load_system
from src.perf.performance import timed_command
from src.relax.singlet import fit_decay_constant
from src.spinops.operators import bell_states

# Flat bath below 1.25 pi / block unit with S = 0.0336
DEFAULT_SPECTRUM = "ohmic:amp=3.4459e-05,cutoff=975.07,exponent=0"

DEFAULTS = {
    "scheme": "udd",
    "order": 7,
    "bell": "psi-plus",
    "spectrum": DEFAULT_SPECTRUM,
    "t_max_s": 30.0,
    "steps": 121,
    "relax": False,
    "rf_error": 0.0,
    "collective": False,
    "trajectories": 0,
    "mc_blocks": 10,
    "optimize": False,
}


def _bell(label: str) -> np.ndarray:
    states = bell_states()
    if label not in states:
        raise ConfigError(f"Unknown Bell state '{label}' (expected {', '.join(states)})")
    return states[label]


def _spectrum(text: str) -> NoiseSpectrum:
    try:
        return NoiseSpectrum.parse(text)
    except ValueError as e:
        raise ConfigError(f"--spectrum: {e}") from e


def _fitted_constant(t: np.ndarray, y: np.ndarray) -> float | None:
    keep = y > 1e-6
    if keep.sum() < 3 or np.allclose(y[keep], y[keep][0]):
        return None
    try:
        constant, _ = fit_decay_constant(t[keep], y[keep])
    except NumericalError as e:
        logging.warning(f"Decay fit skipped: {e}")
        return None
    return constant


@timed_command
def cmd_dd(args):
    """Run a Bell-state storage experiment"""
    scenario = build_scenario("dd", args, DEFAULTS)
    scheme = scenario["scheme"]
    order = int(scenario["order"])
    steps = int(scenario["steps"])
    t_max = float(scenario["t_max_s"])
    if scheme not in SCHEMES:
        raise ConfigError(f"Unknown scheme '{scheme}' (expected {', '.join(SCHEMES)})")
    if scheme != "none" and order < 1:
        raise ConfigError(f"--order must be at least 1, got {order}")
    if steps < 2 or t_max <= 0:
        raise ConfigError("--steps must be at least 2 and --t-max-s positive")

    bell = _bell(scenario["bell"])
    spectrum = _spectrum(scenario["spectrum"])
    system = load_system(scenario.system or resolve_system_path("btp"))
    t_grid = np.linspace(0.0, t_max, steps)
    options = {"relax": bool(scenario["relax"]), "rf_error": float(scenario["rf_error"]),
               "collective": bool(scenario["collective"])}

    curve = storage_experiment(bell, scheme, order, system, spectrum, t_grid, **options)

    out = scenario.output
    write_csv(out / "storage.csv", ["t_s", "correlation", "magnetization"], curve.rows(), metadata={
        "scheme": curve.label,
        "bell": scenario["bell"],
        "spectrum": scenario["spectrum"],
        "block_s": block_sequence(scheme, order).total_s,
    })
    summary = {
        "scheme": curve.label,
        "bell": scenario["bell"],
        "points_above_0.9": curve.count_above(0.9),
        "decay_constant_s": _fitted_constant(t_grid, curve.magnetization),
        "final_correlation": float(curve.correlation[-1]),
    }

    if scenario["optimize"]:
        best, counts = optimal_order(bell, system, spectrum, t_grid, **options)
        summary["optimal_udd_order"] = best
        summary["udd_counts"] = {str(k): v for k, v in counts.items()}

    trajectories = int(scenario["trajectories"])
    if trajectories:
        seed = scenario.require_seed("Monte-Carlo trajectories")
        block = block_sequence(scheme, order, BLOCK_UNIT_S)
        try:
            times, mc_corr = monte_carlo_decay(block, spectrum, trajectories, bell, seed,
                                               blocks=int(scenario["mc_blocks"]),
                                               collective=options["collective"], n_jobs=thread_count())
        except ValueError as e:
            raise ConfigError(f"--trajectories: {e}") from e
        write_csv(out / "monte_carlo.csv", ["t_s", "correlation"], zip(times, mc_corr),
                  metadata={"trajectories": trajectories, "seed": seed})
        summary["monte_carlo_final_correlation"] = float(mc_corr[-1])

    write_json(out / "summary.json", summary)
    emit_plot([PlotSeries(curve.label, t_grid, curve.correlation)], out / "storage.svg",
              title=f"Bell storage ({scenario['bell']})", xlabel="t (s)", ylabel="correlation")

    print(f"[OK] {curve.label}: {summary['points_above_0.9']} of {steps} samples above 0.9")
    print(f"     Output: {out}")
    return 0
