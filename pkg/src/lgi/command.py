"""
LGI command - Leggett-Garg string sweep, optionally with a decaying target
"""

import numpy as np

from src.core.core import thread_count
from src.core.errors import ConfigError
from src.core.output import PlotSeries, emit_plot, write_csv, write_json
from src.core.scenario import build_scenario, resolve_system_path
from src.hamiltonian.system import load_system
from src.lgi.correlations import (
    LgiConfig,
    bounds,
    classical_crossing,
    correlation_labels,
    fit_string_decay,
    lgi_sweep,
    tune_target_t2,
)
from src.perf.performance import timed_command

DEFAULTS = {
    "n": 3,
    "omega_hz": 100.0,
    "dt_max_ms": 300.0,
    "steps": 360,
    "tau_ms": None,
}


@timed_command
def cmd_lgi(args):
    """Sweep the measurement spacing and evaluate K_n"""
    scenario = build_scenario("lgi", args, DEFAULTS)
    n = int(scenario["n"])
    steps = int(scenario["steps"])
    if n < 3:
        raise ConfigError(f"--n must be at least 3, got {n}")
    if steps < 1 or scenario["dt_max_ms"] <= 0:
        raise ConfigError("--steps and --dt-max-ms must be positive")

    omega = 2 * np.pi * float(scenario["omega_hz"])
    dt_max = float(scenario["dt_max_ms"]) / 1000
    grid = [k * dt_max / steps for k in range(steps + 1)]
    tau_ms = scenario["tau_ms"]
    config = LgiConfig(omega, n, tuple(grid), None if tau_ms is None else float(tau_ms) / 1000)

    system = None
    if config.decay_tau_s is not None:
        base = load_system(scenario.system or resolve_system_path("chloroform"))
        system = tune_target_t2(base, omega, config.decay_tau_s, n, dt_max)

    rows = lgi_sweep(config, system, n_jobs=thread_count())
    b = bounds(n)
    dt = np.array([r[0] for r in rows])
    k = np.array([r[-1] for r in rows])

    out = scenario.output
    header = ["dt_s", "omega_dt_rad", *correlation_labels(n), f"K{n}"]
    write_csv(out / "lgi.csv", header, rows, metadata={
        "n": n,
        "omega_rad_s": omega,
        "classical_lo": b.classical_lo,
        "classical_hi": b.classical_hi,
        "quantum_lo": b.quantum_lo,
        "quantum_hi": b.quantum_hi,
    })
    summary = {
        "n": n,
        "omega_rad_s": omega,
        "max_k": float(k.max()),
        "bounds": vars(b),
        "classical_crossing_s": classical_crossing(dt, k, b.classical_hi),
    }
    if system is not None:
        summary["target_t2_s"] = system.t2_s[1]
        summary["fitted_decay_s"] = fit_string_decay(dt, k)
    write_json(out / "summary.json", summary)
    emit_plot([PlotSeries(f"K{n}", omega * dt / np.pi, k),
               PlotSeries("classical bound", omega * dt / np.pi, np.full_like(k, b.classical_hi))],
              out / "lgi.svg", title=f"Leggett-Garg string K{n}", xlabel="omega dt / pi", ylabel=f"K{n}")

    print(f"[OK] K{n}: max {k.max():.6f} (classical {b.classical_hi:g}, quantum {b.quantum_hi:.6f})")
    print(f"     Output: {out}")
    return 0
