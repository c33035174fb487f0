"""
Sampling service: evaluates a solution field on a grid and writes CSV rows.
"""

import csv
from pathlib import Path
from typing import Iterator, List, Sequence, TextIO, Tuple

import numpy as np

from ..core.logging import get_logger
from ..forms.fields import build_null_frame
from ..models.schemas import PhLOConfig
from ..physics.frobenius import curvature_R
from ..physics.solutions import build_solution, support_box
from ..physics.stress_energy import frame_energy_tensor

logger = get_logger(__name__)

SAMPLE_HEADER = ("x", "y", "z", "xi", "u", "p", "phi2", "psi", "R", "energy_density")


def parse_grid(text: str) -> Tuple[int, int, int]:
    """'nx,ny,nz' -> (nx, ny, nz), each >= 1."""
    try:
        counts = tuple(int(part) for part in text.split(","))
    except ValueError as e:
        raise ValueError(f"grid must be 'nx,ny,nz', got {text!r}") from e
    if len(counts) != 3 or min(counts) < 1:
        raise ValueError(f"grid must be three positive counts, got {text!r}")
    return counts  # type: ignore[return-value]


def _axis(lo: float, hi: float, n: int) -> np.ndarray:
    return np.array([0.5 * (lo + hi)]) if n == 1 else np.linspace(lo, hi, n)


class SamplingService:
    """Service for dumping field samples of one solution config."""

    def __init__(self, config: PhLOConfig):
        self.config = config
        self.solution = build_solution(config)

    def grid_points(self, counts: Sequence[int], xi: float) -> np.ndarray:
        """Points of shape (4, N), z slowest, then y, then x."""
        extents = self.config.grid.extents or support_box(self.config, xi)
        xs, ys, zs = (_axis(lo, hi, n) for (lo, hi), n in zip(extents, counts))
        z, y, x = np.meshgrid(zs, ys, xs, indexing="ij")
        return np.stack([x.ravel(), y.ravel(), z.ravel(), np.full(x.size, float(xi))])

    def sample(self, counts: Sequence[int], xi: float) -> np.ndarray:
        """Rows in SAMPLE_HEADER order, shape (N, 10)."""
        pts = self.grid_points(counts, xi)
        pair = self.solution.pair
        frame = build_null_frame(pair, pts, self.config.tolerances.phase_floor)
        density = frame_energy_tensor(frame).energy_density
        curvature = curvature_R(pair, pts, self.config.tolerances.phase_floor)
        columns = [
            pts[0], pts[1], pts[2], pts[3],
            pair.u.eval(pts), pair.p.eval(pts),
            frame.phi2, frame.psi, curvature.R, density,
        ]
        return np.stack(columns, axis=1)

    def iter_rows(self, counts: Sequence[int], xi: float) -> Iterator[List[str]]:
        for row in self.sample(counts, xi):
            yield [repr(float(v)) for v in row]

    def write_csv(self, stream: TextIO, counts: Sequence[int], xi: float) -> int:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(SAMPLE_HEADER)
        rows = 0
        for row in self.iter_rows(counts, xi):
            writer.writerow(row)
            rows += 1
        logger.info("Samples written", rows=rows, counts=list(counts), xi=xi)
        return rows

    def write_file(self, path: Path, counts: Sequence[int], xi: float) -> int:
        with open(path, "w", encoding="utf-8", newline="") as stream:
            return self.write_csv(stream, counts, xi)
