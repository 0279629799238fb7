"""Latency harness: per-stage timings by kernel size and resolution.

Reports medians and p95s over repetitions (medians are robust to desktop
scheduler noise), excludes warm-up iterations, and emits schema-stable CSV
plus a markdown summary with an ASCII bar chart. Absolute numbers are
machine-dependent; the portable facts are the orderings and ratios.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .frames import ColorFrame
from .matte import MatteParams, matte_pass
from .refine import close_plane, composite
from .rgbd_io import SceneSpec, synth_scene
from .align import register_pair
from .stream import BUDGET_NS, process_pair, neutral_background

BENCH_CSV_HEADER = "width,height,kernel,close_median_ns,close_p95_ns,median_ns,p95_ns,reps"


@dataclass
class BenchRow:
    width: int
    height: int
    kernel: int
    close_median_ns: float  # close sub-stage alone, the k-dependent cost
    close_p95_ns: float
    median_ns: float        # whole close+composite stage
    p95_ns: float
    reps: int

    def as_csv_row(self) -> str:
        return (f"{self.width},{self.height},{self.kernel},"
                f"{self.close_median_ns:.0f},{self.close_p95_ns:.0f},"
                f"{self.median_ns:.0f},{self.p95_ns:.0f},{self.reps}")


def _bench_scene(width: int, height: int, rolloff: float = 0.3) -> tuple[ColorFrame, ColorFrame]:
    """A matted foreground with a fractional-coverage edge plus a background,
    both at the requested resolution."""
    spec = SceneSpec(color_width=width, color_height=height,
                     depth_width=width, depth_height=height,
                     subject_depth_m=1.0, background_depth_m=3.0)
    color, depth = synth_scene(spec, 0)
    params = MatteParams(depth_m=1.0, rolloff_m=rolloff)
    fg = matte_pass(color, depth, params)
    return fg, neutral_background(width, height)


def run_bench(resolutions: list[tuple[int, int]], kernels: list[int],
              repetitions: int, warmup: int = 2) -> list[BenchRow]:
    """Time the close+composite stage for each (resolution, kernel) cell.

    Repetitions are interleaved round-robin across kernels so slow system
    phases (thermal or scheduler throttling) hit every cell equally instead
    of biasing whichever kernel ran during them.
    """
    if repetitions < 3:
        raise ValueError(f"repetitions must be >= 3, got {repetitions}")
    params = MatteParams()
    rows: list[BenchRow] = []
    for w, h in resolutions:
        fg, bg = _bench_scene(w, h)
        alpha = np.ascontiguousarray(fg.pixels[..., 3])
        staged = ColorFrame(fg.pixels.copy(), fg.frame_index, fg.timestamp_ns)
        close_ns: dict[int, list[int]] = {k: [] for k in kernels}
        stage_ns: dict[int, list[int]] = {k: [] for k in kernels}
        for i in range(warmup + repetitions):
            for k in kernels:
                t0 = time.perf_counter_ns()
                closed = close_plane(alpha, k)
                t1 = time.perf_counter_ns()
                staged.pixels[..., 3] = closed
                composite(staged, bg, params)
                t2 = time.perf_counter_ns()
                if i >= warmup:
                    close_ns[k].append(t1 - t0)
                    stage_ns[k].append(t2 - t0)
        for k in kernels:
            closes = np.asarray(close_ns[k], dtype=np.float64)
            stages = np.asarray(stage_ns[k], dtype=np.float64)
            rows.append(BenchRow(w, h, k,
                                 float(np.median(closes)),
                                 float(np.percentile(closes, 95)),
                                 float(np.median(stages)),
                                 float(np.percentile(stages, 95)),
                                 repetitions))
    return rows


def medians_monotone(rows: list[BenchRow], allow_p95_overlap: bool = True) -> bool:
    """Check close-stage medians never decrease with kernel size, per
    resolution. With allow_p95_overlap an inversion is tolerated when the
    two cells' median..p95 ranges overlap (measurement noise)."""
    by_res: dict[tuple[int, int], list[BenchRow]] = {}
    for r in rows:
        by_res.setdefault((r.width, r.height), []).append(r)
    for cells in by_res.values():
        cells = sorted(cells, key=lambda r: r.kernel)
        for a, b in zip(cells, cells[1:]):
            if b.close_median_ns >= a.close_median_ns:
                continue
            if allow_p95_overlap and b.close_p95_ns >= a.close_median_ns:
                continue
            return False
    return True


def bench_rows_to_csv(rows: list[BenchRow]) -> str:
    return "\n".join([BENCH_CSV_HEADER] + [r.as_csv_row() for r in rows]) + "\n"


def bench_summary_markdown(rows: list[BenchRow], bar_width: int = 40) -> str:
    """Markdown table plus an ASCII bar chart of medians per resolution."""
    lines = ["# close+composite latency", ""]
    by_res: dict[tuple[int, int], list[BenchRow]] = {}
    for r in rows:
        by_res.setdefault((r.width, r.height), []).append(r)
    for (w, h), cells in by_res.items():
        cells = sorted(cells, key=lambda r: r.kernel)
        lines.append(f"## {w}x{h}")
        lines.append("")
        lines.append("| kernel | close median (ms) | stage median (ms) | stage p95 (ms) |")
        lines.append("|-------:|------------------:|------------------:|---------------:|")
        for r in cells:
            lines.append(f"| {r.kernel or 'off'} | {r.close_median_ns / 1e6:.3f} "
                         f"| {r.median_ns / 1e6:.3f} | {r.p95_ns / 1e6:.3f} |")
        lines.append("")
        peak = max(r.close_median_ns for r in cells) or 1
        lines.append("```")
        for r in cells:
            bar = "#" * max(1, round(bar_width * r.close_median_ns / peak))
            lines.append(f"k={r.kernel or 0:<2} {bar} {r.close_median_ns / 1e6:.3f} ms")
        lines.append("```")
        lines.append("")
    return "\n".join(lines)


def pipeline_budget_probe(resolutions: list[tuple[int, int]], kernel_slider: float = 9.0,
                          repetitions: int = 9, warmup: int = 2,
                          ) -> list[tuple[int, int, float]]:
    """Median align-through-composite time per frame at each resolution,
    kernel 9x9, prefilter off. Depth runs at 2.5x below the composite
    resolution, like a streamed sensor. Encode/ingest are excluded: the
    frame budget covers the processing stages."""
    if repetitions < 3:
        raise ValueError(f"repetitions must be >= 3, got {repetitions}")
    results = []
    params = MatteParams(depth_m=2.0, rolloff_m=0.25, kernel_slider=kernel_slider)
    for w, h in resolutions:
        dw, dh = max(1, round(w / 2.5)), max(1, round(h / 2.5))
        spec = SceneSpec(color_width=w, color_height=h, depth_width=dw, depth_height=dh,
                         subject_depth_m=1.0, background_depth_m=3.0)
        color, depth = synth_scene(spec, 0)
        color_reg, _ = register_pair(color, depth)
        bg = neutral_background(color_reg.width, color_reg.height)
        totals = []
        for i in range(warmup + repetitions):
            t = process_pair(color, depth, bg, params).timings
            if i >= warmup:
                totals.append(t.align_ns + t.prefilter_ns + t.matte_ns
                              + t.close_ns + t.composite_ns)
        results.append((w, h, float(np.median(totals))))
    return results


def achieved_budget_resolution(results: list[tuple[int, int, float]],
                               budget_ns: int = BUDGET_NS) -> tuple[int, int] | None:
    """Largest resolution (by pixel count) whose median total meets the budget."""
    ok = [(w, h) for w, h, med in results if med <= budget_ns]
    if not ok:
        return None
    return max(ok, key=lambda wh: wh[0] * wh[1])
