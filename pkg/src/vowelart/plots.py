"""Minimal deterministic SVG scatter plots (byte-stable across runs)."""

_W, _H = 640, 480
_MARGIN = 60

_VOWEL_STYLE = {"a": "#d62728", "i": "#1f77b4", "u": "#2ca02c"}


def _scale(vmin, vmax, flip=False):
    span = (vmax - vmin) or 1.0

    def to_px(v, lo=_MARGIN, hi_w=_W - _MARGIN):
        frac = (v - vmin) / span
        if flip:
            frac = 1.0 - frac
        return lo + frac * (hi_w - lo)

    return to_px


def _header(title):
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="24" text-anchor="middle" font-size="16" '
        f'font-family="sans-serif">{title}</text>',
    ]


def _axes(xlabel, ylabel):
    return [
        f'<line x1="{_MARGIN}" y1="{_H - _MARGIN}" x2="{_W - _MARGIN}" '
        f'y2="{_H - _MARGIN}" stroke="black"/>',
        f'<line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" '
        f'y2="{_H - _MARGIN}" stroke="black"/>',
        f'<text x="{_W // 2}" y="{_H - 16}" text-anchor="middle" font-size="13" '
        f'font-family="sans-serif">{xlabel}</text>',
        f'<text x="18" y="{_H // 2}" text-anchor="middle" font-size="13" '
        f'font-family="sans-serif" transform="rotate(-90 18 {_H // 2})">{ylabel}</text>',
    ]


def vowel_space_svg(points, triangle, title):
    """F2-F1 scatter (clinical orientation: both axes descending).

    points: iterable of (vowel, f1, f2); triangle: {vowel: (f1, f2)}
    representative vertices drawn as a closed polyline.
    """
    points = list(points)
    all_f1 = [p[1] for p in points] + [v[0] for v in triangle.values()]
    all_f2 = [p[2] for p in points] + [v[1] for v in triangle.values()]
    pad1 = 0.08 * ((max(all_f1) - min(all_f1)) or 100.0)
    pad2 = 0.08 * ((max(all_f2) - min(all_f2)) or 100.0)
    x_of = _scale(min(all_f2) - pad2, max(all_f2) + pad2, flip=True)
    y_of = _scale(min(all_f1) - pad1, max(all_f1) + pad1, flip=True)

    def ypx(f1):
        return _MARGIN + (_H - 2 * _MARGIN) * (y_of(f1) - _MARGIN) / (_W - 2 * _MARGIN)

    parts = _header(title) + _axes("F2 (Hz, descending)", "F1 (Hz, descending)")
    for vowel, f1, f2 in points:
        color = _VOWEL_STYLE.get(vowel, "#7f7f7f")
        parts.append(
            f'<circle cx="{x_of(f2):.2f}" cy="{ypx(f1):.2f}" r="3" '
            f'fill="{color}" fill-opacity="0.5"/>'
        )
    if triangle:
        verts = [triangle[v] for v in ("a", "i", "u") if v in triangle]
        if len(verts) == 3:
            pts = " ".join(f"{x_of(f2):.2f},{ypx(f1):.2f}" for f1, f2 in verts)
            first = verts[0]
            pts += f" {x_of(first[1]):.2f},{ypx(first[0]):.2f}"
            parts.append(
                f'<polyline points="{pts}" fill="none" stroke="black" stroke-width="2"/>'
            )
        for f1, f2 in verts:
            parts.append(
                f'<circle cx="{x_of(f2):.2f}" cy="{ypx(f1):.2f}" r="5" fill="black"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def scatter_with_fit_svg(xs, ys, title, xlabel, ylabel):
    """Scatter with a least-squares regression line as a single polyline."""
    xs = [float(v) for v in xs]
    ys = [float(v) for v in ys]
    pad_x = 0.08 * ((max(xs) - min(xs)) or 1.0)
    pad_y = 0.08 * ((max(ys) - min(ys)) or 1.0)
    x_of = _scale(min(xs) - pad_x, max(xs) + pad_x)
    y_lo, y_hi = min(ys) - pad_y, max(ys) + pad_y
    y_of_raw = _scale(y_lo, y_hi, flip=True)

    def ypx(v):
        return _MARGIN + (_H - 2 * _MARGIN) * (y_of_raw(v) - _MARGIN) / (_W - 2 * _MARGIN)

    parts = _header(title) + _axes(xlabel, ylabel)
    for x, y in zip(xs, ys):
        parts.append(
            f'<circle cx="{x_of(x):.2f}" cy="{ypx(y):.2f}" r="3" '
            f'fill="#1f77b4" fill-opacity="0.6"/>'
        )
    n = len(xs)
    if n >= 2:
        mx = sum(xs) / n
        my = sum(ys) / n
        sxx = sum((x - mx) ** 2 for x in xs)
        if sxx > 0:
            slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx
            x0, x1 = min(xs), max(xs)
            y0 = my + slope * (x0 - mx)
            y1 = my + slope * (x1 - mx)
            y0 = min(max(y0, y_lo), y_hi)
            y1 = min(max(y1, y_lo), y_hi)
            parts.append(
                f'<polyline points="{x_of(x0):.2f},{ypx(y0):.2f} '
                f'{x_of(x1):.2f},{ypx(y1):.2f}" fill="none" stroke="#d62728" '
                f'stroke-width="2"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
