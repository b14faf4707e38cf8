#!/usr/bin/env python3
"""
Figure Export Script

Writes the curve data of every probability figure as CSV:
- Photon-count probabilities (2a-2d)
- AM qubit teleportation (3a-3d)
- Coherent and swap demodulation families (4a, 4b, 5a, 5b)

Run: python scripts/export_figures.py [output_dir]
"""
import logging
import sys
from pathlib import Path

from dfock.config import get_settings
from dfock.schemas.sweep import FigureId
from dfock.services.figure_service import FigureService
from dfock.utils.csv_writer import write_rows

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
)
logger = logging.getLogger(__name__)


def export_all(output_dir: Path) -> int:
    """Export every figure into output_dir/figure_<id>.csv."""
    settings = get_settings()
    service = FigureService(settings)
    output_dir.mkdir(parents=True, exist_ok=True)

    for figure in FigureId:
        points = service.curves(figure)
        path = output_dir / f"figure_{figure.value}.csv"
        write_rows(
            str(path),
            ("a1", "curve", "value"),
            ((p.a1, p.curve, p.value) for p in points),
            settings.CSV_SIGNIFICANT_DIGITS,
        )
        print(f"  ✓ {figure.value}: {len(points)} points -> {path}")
    return len(FigureId)


def main():
    output_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("figures")
    print(f"Exporting figure data to {output_dir}/")
    count = export_all(output_dir)
    print(f"Done: {count} figures exported.")


if __name__ == "__main__":
    main()
