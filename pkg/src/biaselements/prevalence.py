"""Prevalence statistics over consensus-labeled sentence units.

Type prevalence is the share of units carrying the type; group prevalence
is the share of distinct units carrying at least one of the group's types
(union semantics, so a group's value is bounded by its strongest type from
below and by the capped sum of its types from above, and is generally far
less than the sum). Percentages are rounded half-up to two decimals.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Mapping, Set

from .errors import DomainError, UnknownType
from .taxonomy import FrequencyTier, Taxonomy


def percent_of(count: int, total: int) -> float:
    """100*count/total rounded half-up to 2 decimals (exact decimal arithmetic)."""
    if total < 1:
        raise DomainError(f"total must be >= 1, got {total}")
    q = (Decimal(100 * count) / Decimal(total)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
    return float(q)


@dataclass(frozen=True)
class SampleStats:
    total_units: int
    type_counts: dict[str, int]        # units carrying the type
    group_unit_counts: dict[str, int]  # distinct units carrying >= 1 type of the group


@dataclass(frozen=True)
class TypePrevalence:
    type_id: str
    count: int
    percent: float
    tier: FrequencyTier | None  # None when never observed
    boundary_flag: bool


@dataclass(frozen=True)
class GroupPrevalence:
    group_id: str
    unit_count: int
    percent: float


@dataclass(frozen=True)
class PrevalenceReport:
    taxonomy_version: str
    total_units: int
    types: dict[str, TypePrevalence]
    groups: dict[str, GroupPrevalence]

    @property
    def boundary_flags(self) -> tuple[str, ...]:
        return tuple(t.type_id for t in self.types.values() if t.boundary_flag)


def compute_stats(
    labels: Mapping[str, Set[str]], taxonomy: Taxonomy, total_units: int
) -> SampleStats:
    if total_units < 1:
        raise DomainError(f"total_units must be >= 1, got {total_units}")
    if len(labels) > total_units:
        raise DomainError(
            f"{len(labels)} labeled units exceed the stated total of {total_units}"
        )
    known = set(taxonomy.type_ids())
    type_counts = {t: 0 for t in taxonomy.type_ids()}
    group_counts = {g: 0 for g in taxonomy.group_ids()}
    group_of = {t.id: t.group_id for t in taxonomy.types}

    for unit_id, type_ids in labels.items():
        bad = sorted(set(type_ids) - known)
        if bad:
            raise UnknownType(f"unit {unit_id!r} labeled with unknown type ids: {bad}")
        for t in type_ids:
            type_counts[t] += 1
        for g in {group_of[t] for t in type_ids}:
            group_counts[g] += 1
    return SampleStats(total_units, type_counts, group_counts)


def compute_prevalence(
    labels: Mapping[str, Set[str]], taxonomy: Taxonomy, total_units: int
) -> PrevalenceReport:
    stats = compute_stats(labels, taxonomy, total_units)
    types: dict[str, TypePrevalence] = {}
    for t in taxonomy.type_ids():
        count = stats.type_counts[t]
        pct = percent_of(count, total_units)
        if count == 0:
            types[t] = TypePrevalence(t, 0, 0.0, None, False)
        else:
            types[t] = TypePrevalence(
                t,
                count,
                pct,
                taxonomy.tiers.tier_for(pct),
                taxonomy.tiers.boundary_flagged(pct),
            )
    groups = {
        g: GroupPrevalence(g, stats.group_unit_counts[g], percent_of(stats.group_unit_counts[g], total_units))
        for g in taxonomy.group_ids()
    }
    return PrevalenceReport(taxonomy.version, total_units, types, groups)


# ---------------------------------------------------------------------------
# Ordering shared with the table layout: groups by descending prevalence,
# ties by summed type counts, then declaration order; types within a group
# by descending prevalence, ties by declaration order.
# ---------------------------------------------------------------------------

def ordered_group_ids(report: PrevalenceReport, taxonomy: Taxonomy) -> list[str]:
    decl = {g: i for i, g in enumerate(taxonomy.group_ids())}

    def key(gid: str):
        type_count_sum = sum(
            report.types[t.id].count for t in taxonomy.list_group(gid) if t.id in report.types
        )
        return (-report.groups[gid].unit_count, -type_count_sum, decl[gid])

    return sorted(report.groups, key=key)


def ordered_type_ids_in_group(
    report: PrevalenceReport, taxonomy: Taxonomy, group_id: str
) -> list[str]:
    members = [t.id for t in taxonomy.list_group(group_id) if t.id in report.types]
    decl = {t: i for i, t in enumerate(t.id for t in taxonomy.types)}
    return sorted(members, key=lambda t: (-report.types[t].count, decl[t]))


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def render_table(report: PrevalenceReport, taxonomy: Taxonomy, fmt: str = "table") -> str:
    if fmt == "csv":
        return _render_csv(report, taxonomy)
    if fmt == "table":
        return _render_text(report, taxonomy)
    raise ValueError(f"unknown format {fmt!r}")


def _rows(report: PrevalenceReport, taxonomy: Taxonomy):
    for gid in ordered_group_ids(report, taxonomy):
        group = taxonomy.get_group(gid)
        gp = report.groups[gid]
        for tid in ordered_type_ids_in_group(report, taxonomy, gid):
            tp = report.types[tid]
            yield group, gp, taxonomy.get_type(tid), tp


def _render_text(report: PrevalenceReport, taxonomy: Taxonomy) -> str:
    header = (f"{'Group %':<24}  {'Bias type':<32}  {'Type %':>7}", "-" * 67)
    lines = list(header)
    last_group = None
    for group, gp, btype, tp in _rows(report, taxonomy):
        cell = f"{group.name} ({gp.percent:.2f}%)" if group.id != last_group else ""
        lines.append(f"{cell:<24}  {btype.name:<32}  {tp.percent:>7.2f}")
        last_group = group.id
    return "\n".join(lines) + "\n"


def _render_csv(report: PrevalenceReport, taxonomy: Taxonomy) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["group", "group_pct", "type", "type_pct", "tier", "count"])
    for group, gp, btype, tp in _rows(report, taxonomy):
        writer.writerow([
            group.id,
            f"{gp.percent:.2f}",
            btype.id,
            f"{tp.percent:.2f}",
            tp.tier.slug if tp.tier else "",
            tp.count,
        ])
    return buf.getvalue()


def report_to_dict(report: PrevalenceReport, taxonomy: Taxonomy) -> dict:
    """JSON-friendly form used by the HTTP service and the classify report."""
    return {
        "taxonomy_version": report.taxonomy_version,
        "total_units": report.total_units,
        "groups": [
            {
                "group": gid,
                "name": taxonomy.get_group(gid).name,
                "unit_count": report.groups[gid].unit_count,
                "percent": report.groups[gid].percent,
            }
            for gid in ordered_group_ids(report, taxonomy)
        ],
        "types": [
            {
                "type": tid,
                "name": taxonomy.get_type(tid).name,
                "group": taxonomy.get_type(tid).group_id,
                "count": report.types[tid].count,
                "percent": report.types[tid].percent,
                "tier": report.types[tid].tier.slug if report.types[tid].tier else None,
                "boundary_flag": report.types[tid].boundary_flag,
            }
            for gid in ordered_group_ids(report, taxonomy)
            for tid in ordered_type_ids_in_group(report, taxonomy, gid)
        ],
        "boundary_flags": list(report.boundary_flags),
    }
