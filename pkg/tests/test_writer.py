import pytest

from ctspectra.theme_config import STYLE_NAMES, THEMES, ThemeIndex
from ctspectra.writer import ConsoleWriter


@pytest.mark.parametrize("theme_index", list(ThemeIndex))
def test_every_theme_defines_markup_styles(theme_index):

    styles = THEMES[theme_index].styles

    for name in STYLE_NAMES:
        assert name in styles


def test_warn_prefixes_message(capsys):

    console_writer = ConsoleWriter(ThemeIndex.PLAIN)
    console_writer.warn("rho * b_n = 1.5 is not small")

    assert "warning: rho * b_n = 1.5 is not small" in capsys.readouterr().out


def test_unknown_theme_falls_back_to_default():

    console_writer = ConsoleWriter(ThemeIndex.GREEN)
    console_writer.set_theme(42)

    assert console_writer.theme_index is ThemeIndex.DEFAULT


def test_parameter_table_rows(capsys):

    console_writer = ConsoleWriter(ThemeIndex.PLAIN)
    table = console_writer.parameter_table("poisson estimator", [("n", "100"), ("b_n", "0.25")])

    assert table.row_count == 2

    console_writer.print(table)
    out = capsys.readouterr().out
    assert "poisson estimator" in out
    assert "0.25" in out
