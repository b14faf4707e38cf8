"""Tests for figure curve data and CSV output."""
import math

import pytest
from pydantic import ValidationError

from dfock.schemas.demodulation import Branch, Strategy
from dfock.schemas.sweep import FigureId, SweepConfig
from dfock.services.figure_service import FIGURES, a1_grid
from dfock.utils.csv_writer import format_value, read_rows, render_rows, write_rows
from dfock.utils.exceptions import OutOfRangeError, OutputPathError


def curve(points, number):
    return [point.value for point in points if point.curve == number]


class TestPhotonCountFigures:
    """Curves of the direct protocol."""

    def test_first_panel_endpoints(self, figure_service):
        """Test the (0,1) panel at |a1| = 0 and |a1| = 1."""
        points = figure_service.curves(FigureId.FIG_2A, a1_count=11)
        first, fourth = curve(points, 1), curve(points, 4)
        assert first[0] == pytest.approx(math.exp(-0.04))
        assert first[-1] == pytest.approx(math.exp(-0.04) * 0.04)
        assert fourth[0] == pytest.approx(0.9992, abs=1e-4)
        assert fourth[-1] == pytest.approx(0.9239, abs=1e-4)

    def test_sum_curve(self, figure_service):
        """Test that curve 4 is the sum of curves 1 and 2."""
        points = figure_service.curves(FigureId.FIG_2D, a1_count=6)
        for a, b, total in zip(curve(points, 1), curve(points, 2), curve(points, 4)):
            assert total == pytest.approx(a + b)

    @pytest.mark.parametrize("figure", [FigureId.FIG_2B, FigureId.FIG_2C, FigureId.FIG_3A, FigureId.FIG_3B, FigureId.FIG_3C, FigureId.FIG_3D])
    def test_values_are_probabilities(self, figure_service, figure):
        """Test that every panel yields four curves of probabilities."""
        points = figure_service.curves(figure, a1_count=5)
        assert len(points) == 4 * 5
        assert {point.curve for point in points} == {1, 2, 3, 4}
        assert all(0.0 <= point.value <= 1.0 + 1e-9 for point in points)

    def test_alpha_override(self, figure_service):
        """Test that a given alpha replaces the panel default."""
        default = figure_service.curves(FigureId.FIG_2A, a1_count=3)
        override = figure_service.curves(FigureId.FIG_2A, alphas=[0.5], a1_count=3)
        assert curve(default, 1)[0] != pytest.approx(curve(override, 1)[0])
        assert curve(override, 1)[0] == pytest.approx(math.exp(-0.25))

    def test_am_panel_target_curve(self, figure_service, demodulation_service):
        """Test that the first AM curve is the teleportation success P_t1."""
        points = figure_service.curves(FigureId.FIG_3A, a1_count=5)
        for a1, value in zip(a1_grid(5), curve(points, 1)):
            am = figure_service.am_qubit(Branch.K_BRANCH, 0.2, a1)
            assert value == pytest.approx(demodulation_service.teleport_probability(am, 0.2))

    def test_grid_needs_a_point(self):
        """Test that an empty |a1| grid is refused."""
        with pytest.raises(OutOfRangeError):
            a1_grid(0)


class TestSweepConfig:
    """Parameters shared by the sweep commands."""

    def test_fields(self):
        """Test that a sweep holds its command, alphas, grid size and output path."""
        config = SweepConfig(command="figure", alphas=[0.2], a1_count=5)
        assert set(SweepConfig.model_fields) == {"command", "alphas", "a1_count", "out"}
        assert config.out is None
        assert len(a1_grid(config.a1_count)) == 5

    def test_rejects_non_positive_alpha(self):
        """Test that alpha values must be positive."""
        with pytest.raises(ValidationError):
            SweepConfig(command="demod", alphas=[0.2, 0.0])


class TestDemodulationFigures:
    """Curves of the demodulation families."""

    @pytest.mark.parametrize("figure", [FigureId.FIG_4A, FigureId.FIG_4B, FigureId.FIG_5A, FigureId.FIG_5B])
    def test_one_curve_per_alpha(self, figure_service, figure):
        """Test that each demodulation panel holds eight curves."""
        points = figure_service.curves(figure, a1_count=3)
        assert {point.curve for point in points} == set(range(1, 9))
        assert FIGURES[figure].branch is not None

    def test_demod_curves_identify_formula(self, figure_service):
        """Test that rows name strategy, branch and order."""
        points = figure_service.demod_curves(Strategy.SWAP, Branch.N_BRANCH, [0.2, 0.4], a1_count=3, higher_order=True)
        assert len(points) == 6
        assert {point.formula_id for point in points} == {"swap-n-higher"}
        assert [point.alpha for point in points[:3]] == [0.2, 0.2, 0.2]

    def test_higher_order_curves_dominate(self, figure_service):
        """Test that the higher-order curve lies on or above the base curve."""
        base = figure_service.demod_curves(Strategy.COHERENT, Branch.K_BRANCH, [0.3], a1_count=5)
        extended = figure_service.demod_curves(Strategy.COHERENT, Branch.K_BRANCH, [0.3], a1_count=5, higher_order=True)
        for low, high in zip(base, extended):
            assert high.value >= low.value


class TestCsvOutput:
    """Deterministic CSV rendering."""

    def test_seventeen_significant_digits(self):
        """Test that floats keep 17 significant digits and bools become 0/1."""
        assert format_value(0.1) == "0.10000000000000001"
        assert format_value(True) == "1"
        assert format_value("coherent-k") == "coherent-k"

    def test_render_is_deterministic(self):
        """Test that rendering twice gives identical text with LF endings."""
        rows = [(0.1, 1, 0.5), (0.2, 2, 1.0 / 3.0)]
        first = render_rows(("a1", "curve", "value"), rows)
        assert first == render_rows(("a1", "curve", "value"), rows)
        assert "\r" not in first
        assert first.splitlines()[0] == "a1,curve,value"

    def test_round_trip_through_file(self, tmp_path):
        """Test that written values read back bit for bit."""
        path = tmp_path / "curve.csv"
        value = math.exp(-0.04) * 0.9216
        assert write_rows(str(path), ("a1", "value"), [(1.0, value)]) == 1
        rows = read_rows(str(path))
        assert float(rows[0]["value"]) == value

    def test_missing_directory(self, tmp_path):
        """Test that a missing parent directory is an output error."""
        with pytest.raises(OutputPathError) as exc_info:
            write_rows(str(tmp_path / "missing" / "curve.csv"), ("a1",), [(0.0,)])
        assert exc_info.value.exit_code == 2

    def test_stdout(self, capsys):
        """Test that no path writes to stdout."""
        write_rows(None, ("a1",), [(0.5,)])
        assert capsys.readouterr().out == "a1\n0.5\n"
