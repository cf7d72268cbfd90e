"""
Tomo command - Build a tomography constraint system and reconstruct a test state
"""

import logging

import numpy as np

from src.core.errors import ConfigError
from src.core.output import write_csv, write_json
from src.core.scenario import build_scenario, resolve_system_path
from src.hamiltonian.system import SpinSystem, load_system
from src.perf.performance import timed_command
from src.relax.channels import thermal_deviation
from src.spinops.operators import correlation, pps_deviation, random_deviation, singlet_deviation
from src.tomography.constraints import (
    build_constraints,
    condition_number,
    element_table,
    reconstruct,
    simulate_readouts,
)
from src.tomography.scheme import diagonal_scheme, three_spin_scheme, two_spin_scheme

DEFAULTS = {
    "scheme": "2spin",
    "state": "random",
    "noise": 0.0,
    "readout": "spin",
    "qubits": 4,
}

DEFAULT_SYSTEMS = {"2spin": "btp", "3spin": "acrylonitrile"}


def _scheme(name: str, system, readout: str, qubits: int):
    match name:
        case "2spin":
            return two_spin_scheme(system, readout)
        case "3spin":
            return three_spin_scheme(system, readout)
        case "diagonal":
            return diagonal_scheme(qubits)
    raise ConfigError(f"Unknown tomography scheme '{name}' (expected 2spin, 3spin or diagonal)")


def _test_state(label: str, n: int, scenario) -> np.ndarray:
    if label == "random":
        return random_deviation(n, scenario.rng("random test state"))
    if label == "thermal":
        return thermal_deviation(n)
    if label == "singlet" and n == 2:
        return singlet_deviation()
    if label.startswith("pps:") and len(label) == 4 + n:
        return pps_deviation(label[4:])
    raise ConfigError(f"Unknown test state '{label}' for {n} spins")


@timed_command
def cmd_tomo(args):
    """Reconstruct a simulated state and report conditioning"""
    scenario = build_scenario("tomo", args, DEFAULTS)
    name = scenario["scheme"]
    noise = float(scenario["noise"])
    if noise < 0:
        raise ConfigError(f"--noise must be non-negative, got {noise}")

    if name == "diagonal":
        n = int(scenario["qubits"])
        system = SpinSystem(n=n, shifts_hz=(0.0,) * n, j_hz=None, name=f"{n}-spin register")
    else:
        system = load_system(scenario.system or resolve_system_path(DEFAULT_SYSTEMS[name]))
    scheme = _scheme(name, system, scenario["readout"], int(scenario["qubits"]))

    constraints = build_constraints(scheme, system)
    target = _test_state(scenario["state"], scheme.n, scenario)
    if scheme.diagonal_only:
        target = np.diag(np.diag(target))
    rng = scenario.rng("readout noise") if noise > 0 else None
    readouts = simulate_readouts(target, constraints, noise, rng)
    result = reconstruct(readouts, constraints)

    max_error = float(np.max(np.abs(result - target)))
    cond = condition_number(constraints)
    corr = correlation(result, target)
    logging.info(f"tomo {name}: condition {cond:.4g}, max error {max_error:.3g}")

    out = scenario.output
    write_csv(out / "constraints.csv", ["row", *constraints.labels],
              [[label, *row] for label, row in zip(constraints.row_labels, constraints.matrix)],
              metadata={"scheme": name, "readout": constraints.readout})
    write_csv(out / "elements.csv", ["unknown", "reconstructed", "target"],
              element_table(result, target, scheme.diagonal_only))
    write_json(out / "report.json", {
        "scheme": name,
        "system": system.name,
        "readout": constraints.readout,
        "shape": list(constraints.shape),
        "rank": constraints.rank(),
        "condition_number": cond,
        "state": scenario["state"],
        "noise": noise,
        "max_error": max_error,
        "correlation": corr,
    })

    print(f"[OK] {name}: {constraints.shape[0]}x{constraints.shape[1]} constraints, "
          f"condition {cond:.3f}, max error {max_error:.3g}, correlation {corr:.6f}")
    print(f"     Output: {out}")
    return 0
