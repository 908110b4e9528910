"""Experiment orchestration: run the engine, account costs, report.

Reports are deterministic functions of (workload, options): all numbers
are exact integers or rationals rendered as "p/q" with a fixed-point
decimal companion, so golden files compare byte-identically. The JSON
form carries the whole report; the CSV form carries the per-phase rows.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .configs import brute_force_min_target, config_matrix
from .engine import ALGORITHMS, Engine, graver_min_move
from .errors import InputError, VerificationError
from .graver import GRAVER_K_GUARD, SUBDET_K_GUARD, graver_basis_for, max_subdeterminant
from .model import Instance, Mapping
from .optimum import opt_cost, opt_per_phase_lower_bound
from .workloads import Workload


@dataclass(frozen=True)
class ExperimentOptions:
    algorithm: str = "comp-min"
    compute_opt: bool = False
    verify: bool = False

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise InputError(
                f"unknown algorithm {self.algorithm!r}, expected one of {ALGORITHMS}"
            )


def ratio_strings(num: int, den: int) -> tuple:
    """Reduced "p/q" plus a 6-place decimal, integer arithmetic only."""
    fr = Fraction(num, den)
    scaled, rem = divmod(abs(fr.numerator) * 10**6, fr.denominator)
    if 2 * rem >= fr.denominator:
        scaled += 1
    sign = "-" if fr < 0 else ""
    text = f"{sign}{scaled // 10**6}.{scaled % 10**6:06d}"
    return f"{fr.numerator}/{fr.denominator}", text


@dataclass
class Report:
    algorithm: str
    instance: Instance
    workload_kind: str
    workload_seed: int | None
    requests_served: int
    communication: int
    migration: int
    phases: list
    remap_histogram: dict
    f_obs: int
    graver_stats: dict
    bound_cap: int
    bound_holds: bool
    opt: int | None = None
    phase_certificates: list | None = None
    verified: bool | None = None
    events: list = field(default_factory=list, repr=False)
    records: list = field(default_factory=list, repr=False)
    requests: tuple = field(default=(), repr=False)

    @property
    def total(self) -> int:
        return self.communication + self.migration

    def to_dict(self) -> dict:
        opt_block = None
        if self.opt is not None:
            ratio = ratio_decimal = None
            if self.opt > 0:
                ratio, ratio_decimal = ratio_strings(self.total, self.opt)
            opt_block = {
                "cost": self.opt,
                "ratio": ratio,
                "ratio_decimal": ratio_decimal,
                "phase_certificates": self.phase_certificates,
            }
        return {
            "algorithm": self.algorithm,
            "instance": {
                "k": self.instance.k,
                "l": self.instance.l,
                "n": self.instance.n,
            },
            "workload": {
                "kind": self.workload_kind,
                "seed": self.workload_seed,
                "requests_served": self.requests_served,
            },
            "totals": {
                "communication": self.communication,
                "migration": self.migration,
                "total": self.total,
            },
            "phases": self.phases,
            "remap_histogram": {str(k): v for k, v in sorted(self.remap_histogram.items())},
            "f_obs": self.f_obs,
            "graver": self.graver_stats,
            "phase_bound": {"cap": self.bound_cap, "holds": self.bound_holds},
            "opt": opt_block,
            "verified": self.verified,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            [
                "phase",
                "start",
                "end",
                "communication",
                "migration",
                "remap_events",
                "max_affected",
                "cost",
                "completed",
            ]
        )
        for row in self.phases:
            writer.writerow(
                [
                    row["phase"],
                    row["start"],
                    row["end"],
                    row["communication"],
                    row["migration"],
                    row["remap_events"],
                    row["max_affected"],
                    row["cost"],
                    str(row["completed"]).lower(),
                ]
            )
        return buf.getvalue()


def run_experiment(workload: Workload, options: ExperimentOptions = ExperimentOptions()) -> Report:
    instance = workload.instance
    engine = Engine(instance, workload.initial, options.algorithm)
    generator = workload.make_generator()
    served = []
    for _ in range(workload.length):
        request = generator.next(engine.mapping)
        if request is None:
            break
        engine.serve(request)
        served.append(request)

    ranges = engine.phase_ranges()
    rows = engine.ledger.rows
    if len(ranges) != len(rows):
        raise VerificationError(
            f"{len(rows)} ledger rows vs {len(ranges)} phase ranges"
        )
    completed = len(engine.completed_phases)
    phases = [
        {
            "phase": row.phase,
            "start": start,
            "end": end,
            "communication": row.communication,
            "migration": row.migration,
            "remap_events": row.remap_events,
            "max_affected": row.max_affected,
            "cost": row.cost,
            "completed": row.phase < completed,
        }
        for row, (start, end) in zip(rows, ranges)
    ]
    cap = (instance.n - 1) * (1 + instance.k * engine.f_obs)
    holds = all(row.cost <= cap for row in rows)
    graver_stats = _graver_stats(engine)

    opt_value = None
    certificates = None
    if options.compute_opt:
        initial = workload.initial or Mapping.default(instance)
        opt_value = opt_cost(instance, initial, served)
        certificates = opt_per_phase_lower_bound(
            instance, served, engine.completed_phases
        )

    verified = None
    if options.verify:
        _verify_run(engine, options, certificates)
        verified = True

    return Report(
        algorithm=options.algorithm,
        instance=instance,
        workload_kind=workload.kind,
        workload_seed=workload.seed,
        requests_served=len(served),
        communication=engine.ledger.communication,
        migration=engine.ledger.migration,
        phases=phases,
        remap_histogram=dict(engine.affected_histogram),
        f_obs=engine.f_obs,
        graver_stats=graver_stats,
        bound_cap=cap,
        bound_holds=holds,
        opt=opt_value,
        phase_certificates=certificates,
        verified=verified,
        events=list(engine.event_log),
        records=list(engine.remap_records),
        requests=tuple(served),
    )


def _graver_stats(engine: Engine) -> dict:
    k = engine.instance.k
    pseudos = sorted(engine.pseudos_used)
    stats = {
        "pseudos_seen": len(pseudos),
        "max_move_one_norm": max(
            (r.distance for r in engine.remap_records), default=None
        ),
        "max_basis_one_norm": None,
        "delta_max": None,
    }
    if pseudos and k <= GRAVER_K_GUARD:
        stats["max_basis_one_norm"] = max(
            graver_basis_for(k, p).max_one_norm for p in pseudos
        )
    if pseudos and k <= SUBDET_K_GUARD:
        stats["delta_max"] = max(
            max_subdeterminant(config_matrix(k, p)) for p in pseudos
        )
    return stats


def _verify_run(engine: Engine, options: ExperimentOptions, certificates) -> None:
    """Recheck the run against independent oracles; raise on any gap."""
    instance = engine.instance
    k = instance.k
    for record in engine.remap_records:
        matrix = config_matrix(k, record.pseudo)
        brute_y, brute_d = brute_force_min_target(record.x, matrix, record.u)
        if k <= GRAVER_K_GUARD:
            basis = graver_basis_for(k, record.pseudo)
            g = graver_min_move(basis, record.x)
            if g is None:
                raise VerificationError(
                    f"no applicable basis move at x={record.x}, pseudo={record.pseudo}"
                )
            g_d = sum(abs(c) for c in g)
            if g_d != brute_d:
                raise VerificationError(
                    f"basis-scan distance {g_d} != search distance {brute_d} "
                    f"at x={record.x}, pseudo={record.pseudo}"
                )
        if options.algorithm == "comp-min" and record.distance != brute_d:
            raise VerificationError(
                f"applied distance {record.distance} != minimal {brute_d} "
                f"at x={record.x}, pseudo={record.pseudo}"
            )
    for row in engine.ledger.rows:
        cap = (instance.n - 1) * (1 + k * row.max_affected)
        if row.cost > cap:
            raise VerificationError(
                f"phase {row.phase} cost {row.cost} exceeds cap {cap}"
            )
    if certificates is not None and not all(certificates):
        bad = [i for i, ok in enumerate(certificates) if not ok]
        raise VerificationError(f"phases {bad} missing their optimum certificate")
