"""Run reports: per-degree outcomes, the minimal-degree statement, and rendering."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .checkpoint import atomic_write
from .errors import SautPermError

OUTCOMES = ("exhausted", "nontrivial", "capacity")


@dataclass
class DegreeOutcome:
    m: int
    outcome: str
    counts: dict
    certificate: str | None = None  # file name, relative to the output directory
    message: str = ""

    def to_record(self) -> dict:
        rec = {"m": self.m, "outcome": self.outcome, "counts": dict(sorted(self.counts.items()))}
        if self.certificate:
            rec["certificate"] = self.certificate
        if self.message:
            rec["message"] = self.message
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> DegreeOutcome:
        return cls(rec["m"], rec["outcome"], rec["counts"], rec.get("certificate"), rec.get("message", ""))


class MonotonicityError(SautPermError):
    pass


@dataclass
class RunReport:
    rank: int
    config: dict
    degrees: list[DegreeOutcome] = field(default_factory=list)

    @property
    def minimal_degree(self) -> int | None:
        """x_n, when the run pins it down exactly."""
        first = next((d for d in self.degrees if d.outcome == "nontrivial"), None)
        if first is None:
            return None
        below = {d.m: d.outcome for d in self.degrees if d.m < first.m}
        if all(below.get(k) == "exhausted" for k in range(2, first.m)):
            return first.m
        return None

    @property
    def lower_bound(self) -> int:
        """Largest b such that every action on fewer than b points is trivial."""
        by_m = {d.m: d.outcome for d in self.degrees}
        b = 2  # one point only carries the trivial action
        while by_m.get(b) == "exhausted":
            b += 1
        return b

    @property
    def upper_bound(self) -> int | None:
        found = [d.m for d in self.degrees if d.outcome == "nontrivial"]
        return min(found) if found else None

    def statement(self) -> str:
        n = self.rank
        x = self.minimal_degree
        if x is not None:
            return f"x_{n} = {x}"
        parts = [f"x_{n} >= {self.lower_bound}"]
        if self.upper_bound is not None:
            parts.append(f"x_{n} <= {self.upper_bound}")
        return "; ".join(parts)

    def check_consistent(self) -> None:
        """No degree may be exhausted above a degree that carries a nontrivial action."""
        hits = [d.m for d in self.degrees if d.outcome == "nontrivial"]
        if hits:
            bad = [d.m for d in self.degrees if d.outcome == "exhausted" and d.m > min(hits)]
            if bad:
                raise MonotonicityError(
                    f"rank {self.rank}: exhausted at {bad} above a nontrivial action at {min(hits)}"
                )

    def to_record(self) -> dict:
        return {
            "format": "sautperm-report/1",
            "rank": self.rank,
            "config": self.config,
            "degrees": [d.to_record() for d in self.degrees],
            "statement": self.statement(),
            "minimal_degree": self.minimal_degree,
            "lower_bound": self.lower_bound,
        }

    @classmethod
    def from_record(cls, rec: dict) -> RunReport:
        return cls(rec["rank"], rec["config"], [DegreeOutcome.from_record(d) for d in rec["degrees"]])

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True, indent=2) + "\n"

    def to_tsv(self) -> str:
        cols = ["alphas_enumerated", "alphas_kept", "alphas_searched", "candidates_tested",
                "screen_passers", "audit_failures"]
        rows = ["\t".join(["rank", "m", "outcome", *cols, "certificate"])]
        for d in self.degrees:
            rows.append("\t".join([str(self.rank), str(d.m), d.outcome,
                                   *(str(d.counts.get(c, "")) for c in cols), d.certificate or ""]))
        rows.append(f"# {self.statement()}")
        return "\n".join(rows) + "\n"

    def human(self) -> str:
        lines = [f"rank {self.rank}"]
        for d in self.degrees:
            extra = d.message or (f"certificate {d.certificate}" if d.certificate else "")
            lines.append(
                f"  m={d.m:>3}  {d.outcome:<10}  alphas {d.counts.get('alphas_searched', 0):>4}  "
                f"tested {d.counts.get('candidates_tested', 0):>12}  {extra}".rstrip()
            )
        lines.append(f"  {self.statement()}")
        return "\n".join(lines)


def check_monotone(reports: Sequence[RunReport]) -> list[str]:
    """x_3 <= x_4 <= ... across ranks, comparing exact values or lower bounds."""
    problems = []
    ordered = sorted(reports, key=lambda r: r.rank)
    for r in ordered:
        try:
            r.check_consistent()
        except MonotonicityError as e:
            problems.append(str(e))
    for a, b in zip(ordered, ordered[1:]):
        lo_a = a.minimal_degree or a.lower_bound
        hi_b = b.minimal_degree or b.upper_bound
        if hi_b is not None and lo_a > hi_b:
            problems.append(f"x_{a.rank} >= {lo_a} exceeds x_{b.rank} <= {hi_b}")
    return problems


def plot_counts(report: RunReport, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    colors = {"exhausted": "tab:blue", "nontrivial": "tab:red", "capacity": "tab:gray"}
    ms = [d.m for d in report.degrees]
    tested = [max(d.counts.get("candidates_tested", 0), 1) for d in report.degrees]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(ms, tested, color=[colors[d.outcome] for d in report.degrees])
    ax.set_yscale("log")
    ax.set_xlabel("degree m")
    ax.set_ylabel("candidates tested")
    ax.set_title(f"rank {report.rank}: {report.statement()}")
    ax.set_xticks(ms)
    handles = [plt.Rectangle((0, 0), 1, 1, color=c) for c in colors.values()]
    ax.legend(handles, list(colors), fontsize="small")
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def write_report(report: RunReport, out_dir: Path, plot: bool = True) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    atomic_write(out_dir / "report.json", report.to_json())
    atomic_write(out_dir / "report.tsv", report.to_tsv())
    if plot and report.degrees:
        plot_counts(report, out_dir / "report.png")
