"""Deterministic placement of the 38 types onto an 8x5 grid, plus SVG output.

The path through the grid snakes: the first row runs left to right, the
next right to left, and so on. Filling that path with the types ordered by
group frequency (types ordered by frequency inside each group) keeps every
group's cells visually contiguous. The two unused cells are the last two
positions of the path. Font size encodes the frequency tier.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import IncompleteReport, WrongCount
from .prevalence import PrevalenceReport, ordered_group_ids, ordered_type_ids_in_group
from .taxonomy import FrequencyTier, Taxonomy

# fallback colors when the taxonomy file carries none, keyed by group order
_FALLBACK_PALETTE = (
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759",
    "#b07aa1", "#edc948", "#76b7b2", "#9c755f",
    "#bab0ac", "#ff9da7",
)


@dataclass(frozen=True)
class GridSpec:
    rows: int = 5
    cols: int = 8
    cell_width: float = 150.0
    cell_height: float = 112.0
    base_font_size: float = 15.0
    font_ratio: float = 0.85  # geometric step between adjacent tiers

    def font_for(self, tier: FrequencyTier | None) -> float:
        # tiers rank 5 (very high) .. 1 (very low); None (never observed)
        # renders at the smallest declared size
        rank = tier.value if tier is not None else FrequencyTier.VERY_LOW.value
        return self.base_font_size * self.font_ratio ** (FrequencyTier.VERY_HIGH.value - rank)


@dataclass(frozen=True)
class CellPlacement:
    type_id: str
    row: int  # 0-based
    col: int  # 0-based
    sequence_index: int


@dataclass(frozen=True)
class LayoutGrid:
    spec: GridSpec
    placements: tuple[CellPlacement, ...]
    group_colors: dict[str, str] = field(default_factory=dict)


def cell_for_index(index: int, cols: int) -> tuple[int, int]:
    """Zig-zag path: even rows run left to right, odd rows right to left."""
    row, offset = divmod(index, cols)
    col = offset if row % 2 == 0 else cols - 1 - offset
    return row, col


def order_types(report: PrevalenceReport, taxonomy: Taxonomy) -> list[str]:
    """All type ids in placement order; the most frequent type of the most
    frequent group comes first."""
    missing = set(taxonomy.type_ids()) - set(report.types)
    if missing:
        raise IncompleteReport(f"report lacks entries for {sorted(missing)}")
    ordered: list[str] = []
    for gid in ordered_group_ids(report, taxonomy):
        ordered.extend(ordered_type_ids_in_group(report, taxonomy, gid))
    return ordered


def group_palette(taxonomy: Taxonomy) -> dict[str, str]:
    colors: dict[str, str] = {}
    for i, group in enumerate(taxonomy.groups):
        colors[group.id] = group.color or _FALLBACK_PALETTE[i % len(_FALLBACK_PALETTE)]
    return colors


def place(
    ordered: Sequence[str],
    spec: GridSpec = GridSpec(),
    group_colors: Mapping[str, str] | None = None,
    expected_count: int = 38,
) -> LayoutGrid:
    ids = list(ordered)
    if len(ids) != expected_count or len(set(ids)) != expected_count:
        raise WrongCount(
            f"expected {expected_count} distinct type ids, got {len(ids)} "
            f"({len(set(ids))} distinct)"
        )
    if spec.rows * spec.cols < len(ids):
        raise WrongCount(
            f"grid {spec.rows}x{spec.cols} cannot hold {len(ids)} cells"
        )
    placements = tuple(
        CellPlacement(tid, *cell_for_index(i, spec.cols), sequence_index=i)
        for i, tid in enumerate(ids)
    )
    return LayoutGrid(spec, placements, dict(group_colors or {}))


def build_layout(
    report: PrevalenceReport, taxonomy: Taxonomy, spec: GridSpec = GridSpec()
) -> LayoutGrid:
    return place(
        order_types(report, taxonomy),
        spec,
        group_palette(taxonomy),
        expected_count=len(taxonomy.types),
    )


# ---------------------------------------------------------------------------
# SVG rendering. Pure function of (grid, taxonomy, report): stable element
# order, fixed decimal formatting, no timestamps or randomness.
# ---------------------------------------------------------------------------

def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _wrap_name(name: str, font: float, cell_width: float) -> list[str]:
    # crude width model: ~0.55 * font px per character
    budget = max(4, int((cell_width - 12) / (0.55 * font)))
    lines: list[str] = []
    current = ""
    for word in name.split():
        if not current:
            current = word
        elif len(current) + 1 + len(word) <= budget:
            current += " " + word
        else:
            lines.append(current)
            current = word
    if current:
        lines.append(current)
    return lines


def render_svg(grid: LayoutGrid, taxonomy: Taxonomy, report: PrevalenceReport) -> bytes:
    spec = grid.spec
    margin = 10.0
    width = spec.cols * spec.cell_width + 2 * margin
    height = spec.rows * spec.cell_height + 2 * margin
    colors = grid.group_colors or group_palette(taxonomy)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width:.2f}" height="{height:.2f}" '
        f'viewBox="0 0 {width:.2f} {height:.2f}">',
        f'<rect x="0" y="0" width="{width:.2f}" height="{height:.2f}" fill="#ffffff"/>',
    ]
    for p in grid.placements:
        btype = taxonomy.get_type(p.type_id)
        tp = report.types[p.type_id]
        x = margin + p.col * spec.cell_width
        y = margin + p.row * spec.cell_height
        font = spec.font_for(tp.tier)
        fill = colors.get(btype.group_id, "#cccccc")
        opacity = "1.00" if tp.tier is not None else "0.55"
        parts.append(
            f'<g class="cell" data-type="{_esc(p.type_id)}" data-group="{_esc(btype.group_id)}" '
            f'data-index="{p.sequence_index}" opacity="{opacity}">'
        )
        parts.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{spec.cell_width:.2f}" '
            f'height="{spec.cell_height:.2f}" fill="{fill}" stroke="#ffffff" stroke-width="2"/>'
        )
        lines = _wrap_name(btype.name, font, spec.cell_width)
        text_y = y + spec.cell_height / 2 - (len(lines) - 1) * font * 0.6
        parts.append(
            f'<text x="{x + spec.cell_width / 2:.2f}" y="{text_y:.2f}" '
            f'font-family="sans-serif" font-size="{font:.2f}" fill="#ffffff" '
            f'text-anchor="middle">'
        )
        for i, line in enumerate(lines):
            dy = "0" if i == 0 else f"{font * 1.2:.2f}"
            parts.append(
                f'<tspan x="{x + spec.cell_width / 2:.2f}" dy="{dy}">{_esc(line)}</tspan>'
            )
        parts.append("</text>")
        parts.append(
            f'<text x="{x + spec.cell_width / 2:.2f}" y="{y + spec.cell_height - 8:.2f}" '
            f'font-family="sans-serif" font-size="9.00" fill="#ffffff" '
            f'text-anchor="middle">{tp.percent:.2f}%</text>'
        )
        parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts).encode("utf-8")
