from enum import IntEnum

from rich.theme import Theme


class ThemeIndex(IntEnum):

    DEFAULT = 1
    GREEN = 2
    PLAIN = 3


# markup style names, in palette order
STYLE_NAMES = (
    "banner",
    "param",
    "value",
    "path",
    "success",
    "waitspinner",
    "warning",
    "error",
)

PALETTES = {
    ThemeIndex.DEFAULT: (
        "bold bright_yellow",
        "#E0A734",
        "dark_olive_green3",
        "cyan",
        "bold bright_green",
        "bold bright_green",
        "bold orange1",
        "bold bright_red",
    ),
    ThemeIndex.GREEN: (
        "bold spring_green3",
        "green3",
        "chartreuse3",
        "green4",
        "bold bright_green",
        "bold bright_green",
        "bold dark_sea_green4",
        "bold bright_green",
    ),
    # for logs and terminals without colour
    ThemeIndex.PLAIN: ("bold", "none", "none", "underline", "bold", "bold", "bold", "bold reverse"),
}


def build_theme(theme_index: ThemeIndex) -> Theme:
    """Build the rich theme of a palette

    :type theme_index: ThemeIndex
    :param theme_index: Palette to use
    :rtype: Theme
    :returns: Theme with every markup style name defined
    """

    styles = {"repr.number": "bold", "repr.call": "not bold", "repr.brace": "not bold"}
    styles.update(zip(STYLE_NAMES, PALETTES[theme_index]))

    return Theme(styles)


THEMES = {theme_index: build_theme(theme_index) for theme_index in ThemeIndex}
