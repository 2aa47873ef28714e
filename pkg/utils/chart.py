"""
Intensity chart generator.
Renders the buy/sell intensity paths as a standalone SVG 1.1 line chart.
"""
from typing import List, Sequence
from xml.sax.saxutils import escape

from models.hawkes import IntensitySample

BUY_COLOR = "#1f77b4"
SELL_COLOR = "#ff7f0e"


class IntensityChartGenerator:
    """Two polylines (buy, sell) over labelled time and intensity axes"""

    def __init__(self, width: int = 1200, height: int = 600):
        self.width = width
        self.height = height
        self.margin_left = 80
        self.margin_right = 30
        self.margin_top = 50
        self.margin_bottom = 60

    def _plot_box(self):
        x0 = self.margin_left
        x1 = self.width - self.margin_right
        y0 = self.margin_top
        y1 = self.height - self.margin_bottom
        return x0, x1, y0, y1

    def _points(self, samples: Sequence[IntensitySample], attr: str, t_max: float, y_max: float) -> str:
        x0, x1, y0, y1 = self._plot_box()
        pts: List[str] = []
        for s in samples:
            x = x0 + (s.time / t_max) * (x1 - x0)
            y = y1 - (getattr(s, attr) / y_max) * (y1 - y0)
            pts.append(f"{x:.2f},{y:.2f}")
        return " ".join(pts)

    def generate_svg(self, samples: Sequence[IntensitySample], title: str = "Intensity functions against time") -> str:
        x0, x1, y0, y1 = self._plot_box()
        t_max = max((s.time for s in samples), default=1.0) or 1.0
        y_max = max((max(s.lambda_buy, s.lambda_sell) for s in samples), default=1.0) or 1.0
        y_max *= 1.05

        parts = [
            '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}">',
            f'<rect x="0" y="0" width="{self.width}" height="{self.height}" fill="white"/>',
            f'<text x="{self.width / 2:.0f}" y="{self.margin_top / 2 + 6:.0f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="18">{escape(title)}</text>',
            f'<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="black" stroke-width="1"/>',
            f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black" stroke-width="1"/>',
        ]
        for k in range(5):
            frac = k / 4
            tx = x0 + frac * (x1 - x0)
            ty = y1 - frac * (y1 - y0)
            parts.append(
                f'<text x="{tx:.2f}" y="{y1 + 20}" text-anchor="middle" font-family="sans-serif" '
                f'font-size="12">{frac * t_max:.3g}</text>'
            )
            parts.append(
                f'<text x="{x0 - 8}" y="{ty + 4:.2f}" text-anchor="end" font-family="sans-serif" '
                f'font-size="12">{frac * y_max:.3g}</text>'
            )
        parts += [
            f'<text x="{(x0 + x1) / 2:.0f}" y="{self.height - 15}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">time (s)</text>',
            f'<text x="20" y="{(y0 + y1) / 2:.0f}" text-anchor="middle" font-family="sans-serif" font-size="14" '
            f'transform="rotate(-90 20 {(y0 + y1) / 2:.0f})">intensity (events/s)</text>',
            f'<polyline fill="none" stroke="{BUY_COLOR}" stroke-width="1.5" '
            f'points="{self._points(samples, "lambda_buy", t_max, y_max)}"/>',
            f'<polyline fill="none" stroke="{SELL_COLOR}" stroke-width="1.5" '
            f'points="{self._points(samples, "lambda_sell", t_max, y_max)}"/>',
            f'<text x="{x1 - 120}" y="{y0 + 15}" font-family="sans-serif" font-size="12" fill="{BUY_COLOR}">buy</text>',
            f'<text x="{x1 - 60}" y="{y0 + 15}" font-family="sans-serif" font-size="12" fill="{SELL_COLOR}">sell</text>',
            "</svg>",
        ]
        return "\n".join(parts) + "\n"
