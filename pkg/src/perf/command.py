"""
Perf command - Display performance statistics
"""

from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

from src.core.core import get_project_root
from src.perf.performance import budget_for


@dataclass(frozen=True)
class CommandStats:
    command: str
    count: int
    min_s: float
    avg_s: float
    max_s: float
    p95_s: float
    failures: int

    @property
    def over_budget(self) -> bool:
        return self.avg_s > budget_for(self.command)


def summarize(perf_log: Path) -> list[CommandStats]:
    """Per-command timing statistics from a performance log; malformed lines are skipped."""
    if not perf_log.exists():
        return []

    times = defaultdict(list)
    failures = defaultdict(int)
    with open(perf_log, encoding='utf-8') as f:
        for line in f:
            parts = line.strip().split(',')
            if len(parts) < 4:
                continue
            _, command, elapsed, status = parts[:4]
            try:
                times[command].append(float(elapsed))
            except ValueError:
                continue
            if status == "FAILED":
                failures[command] += 1

    stats = []
    for command in sorted(times):
        values = sorted(times[command])
        count = len(values)
        p95_idx = int(count * 0.95)
        stats.append(CommandStats(
            command=command,
            count=count,
            min_s=values[0],
            avg_s=sum(values) / count,
            max_s=values[-1],
            p95_s=values[p95_idx] if p95_idx < count else values[-1],
            failures=failures.get(command, 0),
        ))
    return stats


def cmd_perf(args):
    """Display performance statistics"""
    print("spinlab - Performance Report")
    print("=" * 60)

    stats = summarize(get_project_root() / "logs" / "performance.log")
    if not stats:
        print("\nNo performance data available.")
        return 0

    print("\nCommand Performance:")
    print(f"{'Command':<12} {'Count':<8} {'Min':<10} {'Avg':<10} {'Max':<10} {'P95':<10} {'Failures'}")
    print("-" * 75)
    for s in stats:
        warning = "!" if s.over_budget else " "
        print(f"{warning}{s.command:<11} {s.count:<8} {s.min_s:<10.3f} {s.avg_s:<10.3f} "
              f"{s.max_s:<10.3f} {s.p95_s:<10.3f} {s.failures}")

    print("\n" + "=" * 60)
    print("Budgets:")
    for s in stats:
        print(f"  {s.command + ':':<10}<{budget_for(s.command):g}s")
    print("\nBudget violations marked with !")
    return 0
