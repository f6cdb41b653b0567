"""Degree sweeps: build the finite groups, enumerate and filter restrictions, search.

Every committed step goes through a Checkpoint when one is configured, so an
interrupted sweep can be resumed and produces the same bytes as a clean one.
"""
from __future__ import annotations

import json
import logging
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from . import __version__
from .checkpoint import CONVENTIONS, FORMAT, Checkpoint, atomic_write
from .errors import CapacityError, CheckpointError, InputError
from .homs import FilterLog, HomClass, compatibility_filter, enumerate_hom_classes, injectivity_justified
from .report import DegreeOutcome, RunReport, write_report
from .search import Certificate, SearchContext, ShardResult, build_context, search_degree

log = logging.getLogger("sautperm")


@dataclass
class SearchConfig:
    rank: int
    m_lo: int
    m_hi: int
    threads: int = 1
    checkpoint: str | None = None
    injectivity: str = "auto"  # auto | on | off
    compat: bool = True
    budget_tau: int = 10**9
    node_budget: int = 10**8
    multiset_bound: int = 10**6
    early_stop: bool = True
    shard_size: int = 1 << 20
    screen: str = "single"  # single | all

    # fields that do not influence results stay out of headers and reports
    RUNTIME_ONLY = ("threads", "checkpoint")

    def validate(self) -> None:
        if self.rank < 3:
            raise InputError("rank must be at least 3")
        if self.m_lo < 1 or self.m_hi < self.m_lo:
            raise InputError(f"bad degree range {self.m_lo}..{self.m_hi}")
        if self.threads < 1:
            raise InputError("threads must be positive")
        if self.injectivity not in ("auto", "on", "off"):
            raise InputError("injectivity must be auto, on or off")
        if self.screen not in ("single", "all"):
            raise InputError("screen must be single or all")
        for name in ("budget_tau", "node_budget", "multiset_bound", "shard_size"):
            if getattr(self, name) <= 0:
                raise InputError(f"{name} must be positive")

    def result_fields(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name not in self.RUNTIME_ONLY}

    @classmethod
    def from_result_fields(cls, d: dict, **runtime) -> SearchConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise InputError(f"unknown configuration fields {sorted(unknown)}")
        return cls(**d, **runtime)


def header_for(cfg: SearchConfig) -> dict:
    return {
        "format": FORMAT,
        "rank": cfg.rank,
        "degrees": [cfg.m_lo, cfg.m_hi],
        "config": cfg.result_fields(),
        "conventions": CONVENTIONS,
        "software": f"sautperm {__version__}",
    }


def dumps_pretty(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# -- phase 2 ---------------------------------------------------------------------

def injectivity_mode(cfg: SearchConfig, m: int) -> tuple[bool, str]:
    justified = injectivity_justified(cfg.rank, m)
    if cfg.injectivity == "off":
        return False, "off"
    if cfg.injectivity == "on":
        return True, "on (forced)" if not justified else "on (justified: n = 5, m < 31)"
    return justified, "on (justified: n = 5, m < 31)" if justified else "off (not justified)"


def phase2(cfg: SearchConfig, ctx: SearchContext, m: int) -> tuple[dict, list[HomClass]]:
    alphas = enumerate_hom_classes(ctx.dprime, m, ctx.dprime_classes, alternating_only=True,
                                   multiset_bound=cfg.multiset_bound)
    betas = enumerate_hom_classes(ctx.alt, m, ctx.alt_classes, alternating_only=True,
                                  multiset_bound=cfg.multiset_bound)
    counts = {"alphas_enumerated": len(alphas), "betas_enumerated": len(betas)}
    inj_on, inj_note = injectivity_mode(cfg, m)
    if inj_on:
        alphas = [a for a in alphas if a.injective]
        betas = [b for b in betas if b.injective]
    counts["alphas_after_injectivity"] = len(alphas)
    flog = FilterLog()
    if cfg.compat:
        kept = compatibility_filter(alphas, betas, m, ctx.dprime, ctx.alt, cfg.node_budget, flog)
    else:
        kept = list(alphas)
    counts["alphas_kept"] = len(kept)
    filters = {
        "alternating_only": True,
        "injectivity": inj_note,
        "compatibility": "on" if cfg.compat else "off",
        "screen": cfg.screen,
        "removed_by_compatibility": {str(k): v for k, v in sorted(flog.removed.items())},
    }
    return {"counts": counts, "filters": filters}, kept


def _p2_text(summary: dict, kept: list[HomClass]) -> str:
    lines = [json.dumps({"type": "summary", **summary}, sort_keys=True, separators=(",", ":"))]
    for a in kept:
        lines.append(json.dumps({"type": "alpha", **a.to_record()}, sort_keys=True, separators=(",", ":")))
    return "\n".join(lines) + "\n"


def _p2_parse(text: str) -> tuple[dict, list[HomClass]]:
    summary, kept = None, []
    for line in text.splitlines():
        rec = json.loads(line)
        kind = rec.pop("type")
        if kind == "summary":
            summary = rec
        else:
            kept.append(HomClass.from_record(rec))
    if summary is None:
        raise ValueError("phase-2 record without summary")
    return summary, kept


# -- the sweep -------------------------------------------------------------------

def certificate_name(cfg: SearchConfig, m: int) -> str:
    return f"certificate_n{cfg.rank}_m{m}.json"


def _degree(cfg: SearchConfig, ctx: SearchContext, m: int, ck: Checkpoint | None) -> tuple[DegreeOutcome, str | None]:
    """Outcome of one degree and the certificate text, if any."""
    entry = ck.find("outcome", m=m) if ck else None
    if entry is not None:
        rec = json.loads(ck.read(entry))
        outcome = DegreeOutcome.from_record(rec["outcome"])
        return outcome, (dumps_pretty(rec["certificate"]) if rec.get("certificate") else None)

    p2 = ck.find("p2", m=m) if ck else None
    if p2 is not None:
        try:
            summary, kept = _p2_parse(ck.read(p2))
        except (ValueError, KeyError) as e:
            raise CheckpointError(f"unreadable phase-2 record: {e}", ck.root / p2["file"]) from None
    else:
        try:
            summary, kept = phase2(cfg, ctx, m)
        except CapacityError as e:
            return DegreeOutcome(m, "capacity", {}, None, f"phase 2: {e}"), None
        if ck:
            ck.put_file("p2", f"p2_m{m}.jsonl", _p2_text(summary, kept), m=m)

    completed = {}
    if ck:
        for rec in ck.shard_records(m):
            r = ShardResult.from_record(rec)
            completed[(r.alpha_index, r.lo)] = r

    def on_shard(res: ShardResult) -> None:
        log.info(json.dumps({"event": "shard", "n": cfg.rank, "m": m, "alpha": res.alpha_index,
                             "lo": res.lo, "hi": res.hi, "tested": res.tested, "passers": len(res.passers)}))
        if ck:
            ck.append_shard(f"p3_m{m}.jsonl", res.to_record(), m=m, alpha=res.alpha_index, lo=res.lo)

    counts = dict(summary["counts"])
    try:
        cert = search_degree(
            cfg.rank, m, kept, ctx, budget_tau=cfg.budget_tau, shard_size=cfg.shard_size,
            threads=cfg.threads, filters=summary["filters"], base_counts=counts,
            completed=completed, on_shard=on_shard,
        )
    except CapacityError as e:
        outcome = DegreeOutcome(m, "capacity", counts, None, str(e))
        cert_text = None
    else:
        name = certificate_name(cfg, m)
        outcome = DegreeOutcome(m, cert.kind, cert.counts, name)
        cert_text = dumps_pretty(cert.to_record())
    if ck:
        payload = {"outcome": outcome.to_record(), "certificate": json.loads(cert_text) if cert_text else None}
        ck.put_file("outcome", f"outcome_m{m}.json", dumps_pretty(payload), m=m)
    return outcome, cert_text


def run_search(cfg: SearchConfig, out_dir: str | Path | None = None, plot: bool = True,
               stop_after: int | None = None) -> RunReport:
    """Sweep degrees low to high.  ``stop_after`` interrupts after that many commits (testing aid)."""
    cfg.validate()
    ck = None
    if cfg.checkpoint:
        ck = Checkpoint.create(Path(cfg.checkpoint), header_for(cfg), stop_after=stop_after)
    if out_dir is None:
        out_dir = cfg.checkpoint or f"sautperm_rank{cfg.rank}"
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    ctx = build_context(cfg.rank, screen=cfg.screen)
    report = RunReport(cfg.rank, cfg.result_fields())
    timings = {}
    for m in range(cfg.m_lo, cfg.m_hi + 1):
        t0 = time.perf_counter()
        outcome, cert_text = _degree(cfg, ctx, m, ck)
        timings[str(m)] = round(time.perf_counter() - t0, 3)
        if cert_text is not None:
            atomic_write(out_dir / outcome.certificate, cert_text)
        report.degrees.append(outcome)
        log.info(json.dumps({"event": "degree", "n": cfg.rank, "m": m, "outcome": outcome.outcome}))
        if outcome.outcome == "nontrivial" and cfg.early_stop:
            break
    report.check_consistent()
    write_report(report, out_dir, plot=plot)
    atomic_write(out_dir / "timings.json", dumps_pretty({"seconds_per_degree": timings}))
    return report


def resume(checkpoint_dir: str | Path, threads: int = 1, out_dir: str | Path | None = None,
           plot: bool = True, stop_after: int | None = None) -> RunReport:
    ck = Checkpoint.open(Path(checkpoint_dir))
    header = ck.read_header()
    try:
        cfg = SearchConfig.from_result_fields(header["config"], threads=threads, checkpoint=str(checkpoint_dir))
    except (KeyError, TypeError, InputError) as e:
        raise CheckpointError(f"header does not describe a run: {e}", ck.root / "header.json") from None
    if header != header_for(cfg):
        raise CheckpointError("header was written by an incompatible version", ck.root / "header.json")
    return run_search(cfg, out_dir=out_dir, plot=plot, stop_after=stop_after)
