"""Self-contained SVG emitters for box plots and error-bar charts.

No plotting dependency: reports render anywhere, byte-stable for fixed
inputs.  Whiskers follow the 1.5 IQR convention from BoxStats.
"""

from __future__ import annotations

from centaur.analysis.stats import BoxStats

_W, _H = 640, 360
_MARGIN = 56


def _scale(lo, hi):
    if hi == lo:
        hi = lo + 1.0
    span = _H - 2 * _MARGIN

    def to_y(v):
        return _MARGIN + span * (1 - (v - lo) / (hi - lo))
    return to_y


def _header(title):
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" '
        f'height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
    ]


def box_plot_svg(groups, title="") -> str:
    """`groups`: ordered (label, BoxStats) pairs."""
    groups = list(groups)
    values = []
    for _, box in groups:
        values += [box.whisker_low, box.whisker_high, *box.outliers]
    to_y = _scale(min(values), max(values))
    step = (_W - 2 * _MARGIN) / max(len(groups), 1)
    half = min(28.0, step * 0.3)

    parts = _header(title)
    for i, (label, box) in enumerate(groups):
        x = _MARGIN + step * (i + 0.5)
        parts += [
            f'<line x1="{x:.1f}" y1="{to_y(box.whisker_low):.1f}" '
            f'x2="{x:.1f}" y2="{to_y(box.whisker_high):.1f}" '
            f'stroke="black"/>',
            f'<rect x="{x - half:.1f}" y="{to_y(box.q3):.1f}" '
            f'width="{2 * half:.1f}" '
            f'height="{to_y(box.q1) - to_y(box.q3):.1f}" fill="#cfe2f3" '
            f'stroke="black"/>',
            f'<line x1="{x - half:.1f}" y1="{to_y(box.median):.1f}" '
            f'x2="{x + half:.1f}" y2="{to_y(box.median):.1f}" '
            f'stroke="black" stroke-width="2"/>',
            f'<text x="{x:.1f}" y="{_H - 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{label}</text>',
        ]
        for v in box.outliers:
            parts.append(f'<circle cx="{x:.1f}" cy="{to_y(v):.1f}" r="2.5" '
                         f'fill="none" stroke="black"/>')
    parts.append("</svg>")
    return "\n".join(parts)


def bar_chart_svg(bars, title="", baseline=None) -> str:
    """`bars`: ordered (label, value, error) triples with SEM error bars."""
    bars = list(bars)
    values = [v for _, v, e in bars] + [v + e for _, v, e in bars] + [0.0]
    if baseline is not None:
        values.append(baseline)
    to_y = _scale(min(values), max(values))
    step = (_W - 2 * _MARGIN) / max(len(bars), 1)
    half = min(32.0, step * 0.32)

    parts = _header(title)
    zero_y = to_y(0.0)
    for i, (label, value, err) in enumerate(bars):
        x = _MARGIN + step * (i + 0.5)
        top = to_y(value)
        parts += [
            f'<rect x="{x - half:.1f}" y="{min(top, zero_y):.1f}" '
            f'width="{2 * half:.1f}" height="{abs(zero_y - top):.1f}" '
            f'fill="#b6d7a8" stroke="black"/>',
            f'<line x1="{x:.1f}" y1="{to_y(value - err):.1f}" '
            f'x2="{x:.1f}" y2="{to_y(value + err):.1f}" stroke="black"/>',
            f'<text x="{x:.1f}" y="{_H - 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{label}</text>',
        ]
    if baseline is not None:
        y = to_y(baseline)
        parts.append(f'<line x1="{_MARGIN}" y1="{y:.1f}" '
                     f'x2="{_W - _MARGIN}" y2="{y:.1f}" stroke="black" '
                     f'stroke-dasharray="6 4"/>')
    parts.append("</svg>")
    return "\n".join(parts)


def probe_report_box_svg(report, condition_names=None, title=None) -> str:
    """Box plot of a paired probe: high/low group per condition."""
    names = condition_names or list(report.conditions)
    groups = []
    for name in names:
        cond = report.conditions[name]
        groups.append((f"{name}:{cond.group_high_name}", cond.box_high))
        groups.append((f"{name}:{cond.group_low_name}", cond.box_low))
    return box_plot_svg(groups, title=title or report.probe)
